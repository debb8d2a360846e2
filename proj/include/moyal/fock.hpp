#pragma once

// Truncated Fock-space representation of the Moyal plane.
//
// Everything lives in the number basis |0>, ..., |N-1> of the harmonic
// oscillator. The quantum coordinates are represented through the lowering
// operator a|n> = λ_P √n |n-1>, with θ = λ_P². The top `edge_guard` levels are
// a buffer zone: states must carry less than `leakage_bound` mass there, and
// identities such as [a, a†] = θ𝕀 are only asserted on the interior block.

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "moyal/error.hpp"
#include "moyal/linalg.hpp"

namespace moyal {

struct FockContext {
  int trunc_dim = 64;
  double theta = 1.0;
  double tol = 1e-10;
  int edge_guard = 8;
  double leakage_bound = 1e-10;

  double lambda_p() const { return std::sqrt(theta); }
  /// Number of interior levels, i.e. levels 0 .. safe_dim()-1.
  int safe_dim() const { return trunc_dim - edge_guard; }

  friend bool operator==(const FockContext&, const FockContext&) = default;
};

inline FockContext make_context(int trunc_dim, double theta, double tol,
                                std::optional<int> edge_guard = std::nullopt,
                                double leakage_bound = 1e-10) {
  require(trunc_dim >= 8, "make_context: trunc_dim must be >= 8");
  require(theta > 0.0 && std::isfinite(theta), "make_context: theta must be positive");
  require(tol > 0.0, "make_context: tol must be positive");
  require(leakage_bound > 0.0, "make_context: leakage bound must be positive");
  const int guard = edge_guard.value_or(std::max(2, trunc_dim / 8));
  require(guard >= 2, "make_context: edge_guard must be >= 2");
  require(2 * guard < trunc_dim, "make_context: edge_guard must be < trunc_dim/2");
  return FockContext{trunc_dim, theta, tol, guard, leakage_bound};
}

/// Same physics at a different truncation; used by the convergence-in-N checks.
inline FockContext with_trunc_dim(const FockContext& ctx, int trunc_dim) {
  return make_context(trunc_dim, ctx.theta, ctx.tol, std::nullopt, ctx.leakage_bound);
}

inline void require_same_context(const FockContext& a, const FockContext& b, const char* where) {
  if (!(a == b)) throw ContextMismatch(std::string(where) + ": context mismatch");
}

/// Matrix of π_S(f) in the number basis.
struct Operator {
  FockContext ctx;
  Matrix mat;
  bool hermitian = false;

  Operator(FockContext c, Matrix m, bool herm = false) : ctx(c), mat(std::move(m)), hermitian(herm) {
    require(mat.rows() == ctx.trunc_dim && mat.cols() == ctx.trunc_dim, "Operator: wrong matrix size");
    if (!all_finite(mat)) throw AnomalyError("Operator: non-finite entries");
    if (hermitian && !is_hermitian(mat, ctx.tol * std::max(1.0, mat.cwiseAbs().maxCoeff())))
      throw AnomalyError("Operator: hermitian flag set on a non-hermitian matrix");
  }

  Operator adjoint() const { return Operator(ctx, mat.adjoint(), hermitian); }
};

inline Operator operator+(const Operator& x, const Operator& y) {
  require_same_context(x.ctx, y.ctx, "operator+");
  return Operator(x.ctx, x.mat + y.mat, x.hermitian && y.hermitian);
}
inline Operator operator-(const Operator& x, const Operator& y) {
  require_same_context(x.ctx, y.ctx, "operator-");
  return Operator(x.ctx, x.mat - y.mat, x.hermitian && y.hermitian);
}
inline Operator operator*(const Operator& x, const Operator& y) {
  require_same_context(x.ctx, y.ctx, "operator*");
  return Operator(x.ctx, x.mat * y.mat);
}
inline Operator operator*(double s, const Operator& x) { return Operator(x.ctx, s * x.mat, x.hermitian); }
inline Operator operator*(cplx s, const Operator& x) { return Operator(x.ctx, s * x.mat); }

inline Matrix commutator(const Matrix& x, const Matrix& y) { return x * y - y * x; }

inline Operator commutator(const Operator& x, const Operator& y) {
  require_same_context(x.ctx, y.ctx, "commutator");
  return Operator(x.ctx, commutator(x.mat, y.mat));
}

/// Top-left block on levels 0 .. safe_dim()-1.
inline Matrix interior(const Matrix& m, const FockContext& ctx) {
  const int k = ctx.safe_dim();
  return m.topLeftCorner(k, k);
}

inline Matrix lowering_matrix(int dim, double lambda_p) {
  Matrix a = Matrix::Zero(dim, dim);
  for (int n = 1; n < dim; ++n) a(n - 1, n) = lambda_p * std::sqrt(static_cast<double>(n));
  return a;
}

inline Operator identity(const FockContext& ctx) {
  return Operator(ctx, Matrix::Identity(ctx.trunc_dim, ctx.trunc_dim), true);
}

inline Operator annihilation(const FockContext& ctx) {
  return Operator(ctx, lowering_matrix(ctx.trunc_dim, ctx.lambda_p()));
}

inline Operator creation(const FockContext& ctx) { return annihilation(ctx).adjoint(); }

/// (q₁, q₂) with a = (q₁ + i q₂)/√2.
inline std::pair<Operator, Operator> quadratures(const FockContext& ctx) {
  const Matrix a = lowering_matrix(ctx.trunc_dim, ctx.lambda_p());
  const Matrix ad = a.adjoint();
  Operator q1(ctx, (a + ad) / std::sqrt(2.0), true);
  Operator q2(ctx, (a - ad) / (I_unit * std::sqrt(2.0)), true);
  return {std::move(q1), std::move(q2)};
}

/// H = ½(q₁² + q₂²) = a†a + θ/2, exactly diagonal θ(m + ½).
inline Operator hamiltonian(const FockContext& ctx) {
  Matrix h = Matrix::Zero(ctx.trunc_dim, ctx.trunc_dim);
  for (int m = 0; m < ctx.trunc_dim; ++m) h(m, m) = ctx.theta * (m + 0.5);
  return Operator(ctx, std::move(h), true);
}

inline double energy(const FockContext& ctx, int m) { return ctx.theta * (m + 0.5); }

inline Operator number_projector(const FockContext& ctx, int m) {
  require(m >= 0 && m < ctx.trunc_dim, "number_projector: level out of range");
  Matrix p = Matrix::Zero(ctx.trunc_dim, ctx.trunc_dim);
  p(m, m) = 1.0;
  return Operator(ctx, std::move(p), true);
}

/// e₀, the projector on the vacuum.
inline Operator vacuum_projector(const FockContext& ctx) { return number_projector(ctx, 0); }

// ---------------------------------------------------------------------------
// State construction tags

struct StateTag;
using TagPtr = std::shared_ptr<const StateTag>;

struct EigenTag {
  int m = 0;
};
struct CoherentTag {
  cplx kappa;
};
struct TranslatedTag {
  TagPtr base;
  cplx kappa;  // position-space displacement (x₁ + i x₂)
};
struct SuperpositionTag {
  std::vector<int> indices;
  std::vector<cplx> coeffs;
};
struct MixedTag {
  std::vector<double> weights;
  std::vector<StateTag> parts;
};

struct StateTag {
  std::variant<EigenTag, CoherentTag, TranslatedTag, SuperpositionTag, MixedTag> v;

  bool is_pure() const { return !std::holds_alternative<MixedTag>(v); }
};

inline bool operator==(const StateTag& x, const StateTag& y);

inline bool operator==(const EigenTag& x, const EigenTag& y) { return x.m == y.m; }
inline bool operator==(const CoherentTag& x, const CoherentTag& y) { return x.kappa == y.kappa; }
inline bool operator==(const TranslatedTag& x, const TranslatedTag& y) {
  return x.kappa == y.kappa && x.base && y.base && *x.base == *y.base;
}
inline bool operator==(const SuperpositionTag& x, const SuperpositionTag& y) {
  return x.indices == y.indices && x.coeffs == y.coeffs;
}
inline bool operator==(const MixedTag& x, const MixedTag& y) {
  return x.weights == y.weights && x.parts == y.parts;
}
inline bool operator==(const StateTag& x, const StateTag& y) { return x.v == y.v; }

inline StateTag eigen_tag(int m) { return StateTag{EigenTag{m}}; }
inline StateTag coherent_tag(cplx kappa) { return StateTag{CoherentTag{kappa}}; }
inline StateTag translated_tag(StateTag base, cplx kappa) {
  return StateTag{TranslatedTag{std::make_shared<const StateTag>(std::move(base)), kappa}};
}

// ---------------------------------------------------------------------------
// States

/// Mass on the top edge_guard levels.
inline double leakage(const Matrix& rho, const FockContext& ctx) {
  double mass = 0.0;
  for (int k = ctx.safe_dim(); k < ctx.trunc_dim; ++k) mass += rho(k, k).real();
  return std::abs(mass);
}

class QState {
 public:
  /// Validates the density-matrix invariants and the leakage bound.
  QState(FockContext ctx, Matrix rho, StateTag tag) : ctx_(ctx), rho_(std::move(rho)), tag_(std::move(tag)) {
    require(rho_.rows() == ctx_.trunc_dim && rho_.cols() == ctx_.trunc_dim, "QState: wrong matrix size");
    if (!all_finite(rho_)) throw AnomalyError("QState: non-finite density matrix");
    if (!is_hermitian(rho_, ctx_.tol)) throw AnomalyError("QState: density matrix is not hermitian");
    if (std::abs(rho_.trace() - 1.0) > ctx_.tol) throw AnomalyError("QState: trace is not 1");
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (rho_ + rho_.adjoint()), Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -ctx_.tol) throw AnomalyError("QState: negative eigenvalue");
    if (tag_.is_pure() && (rho_ * rho_ - rho_).cwiseAbs().maxCoeff() > 10 * ctx_.tol)
      throw AnomalyError("QState: pure tag on a mixed density matrix");
    const double leak = moyal::leakage(rho_, ctx_);
    if (leak > ctx_.leakage_bound)
      throw LeakageError("QState: leakage " + std::to_string(leak) + " above bound; increase trunc_dim");
  }

  const FockContext& ctx() const { return ctx_; }
  const Matrix& rho() const { return rho_; }
  const StateTag& tag() const { return tag_; }
  double leakage() const { return moyal::leakage(rho_, ctx_); }

  bool is_diagonal(double tol) const {
    Matrix off = rho_;
    off.diagonal().setZero();
    return off.cwiseAbs().maxCoeff() <= tol;
  }

 private:
  FockContext ctx_;
  Matrix rho_;
  StateTag tag_;
};

inline QState pure_state(const FockContext& ctx, const Vector& psi, StateTag tag) {
  Matrix rho = psi * psi.adjoint();
  return QState(ctx, std::move(rho), std::move(tag));
}

/// ω_m = |m><m|.
inline QState eigenstate(const FockContext& ctx, int m) {
  require(m >= 0 && m < ctx.safe_dim(), "eigenstate: level outside the guarded range");
  Vector psi = Vector::Zero(ctx.trunc_dim);
  psi(m) = 1.0;
  return pure_state(ctx, psi, eigen_tag(m));
}

/// |κ> with components e^{-|κ|²/2} κ^m/√m!, an eigenvector of a with
/// eigenvalue λ_P κ.
inline QState coherent_state(const FockContext& ctx, cplx kappa) {
  Vector psi(ctx.trunc_dim);
  psi(0) = std::exp(-0.5 * std::norm(kappa));
  for (int m = 1; m < ctx.trunc_dim; ++m) psi(m) = psi(m - 1) * kappa / std::sqrt(static_cast<double>(m));
  const double kept = psi.squaredNorm();
  double top = 0.0;
  for (int m = ctx.safe_dim(); m < ctx.trunc_dim; ++m) top += std::norm(psi(m));
  const double leak = top + std::max(0.0, 1.0 - kept);
  if (!(leak <= ctx.leakage_bound))
    throw LeakageError("coherent_state: |kappa| too large for trunc_dim (leakage " + std::to_string(leak) + ")");
  psi /= std::sqrt(kept);
  return pure_state(ctx, psi, coherent_tag(kappa));
}

/// U(κ) = exp((κa† − κ̄a)/(√2θ)), so that U†aU = a + κ/√2 and the position
/// expectation shifts by (Re κ, Im κ).
inline Matrix displacement_unitary(const FockContext& ctx, cplx kappa) {
  const Matrix a = lowering_matrix(ctx.trunc_dim, ctx.lambda_p());
  const Matrix gen = (kappa * a.adjoint() - std::conj(kappa) * a) / (std::sqrt(2.0) * ctx.theta);
  return gen.exp();
}

/// α_κ: the state translated by κ in the plane.
inline QState displace(const QState& state, cplx kappa) {
  const FockContext& ctx = state.ctx();
  StateTag tag = translated_tag(state.tag(), kappa);
  if (kappa == cplx{0.0, 0.0}) return QState(ctx, state.rho(), std::move(tag));
  const Matrix u = displacement_unitary(ctx, kappa);
  Matrix rho = u * state.rho() * u.adjoint();
  rho = (0.5 * (rho + rho.adjoint())).eval();
  const double leak = leakage(rho, ctx);
  if (!(leak <= ctx.leakage_bound))
    throw LeakageError("displace: translated state leaks " + std::to_string(leak) + "; increase trunc_dim");
  rho /= rho.trace().real();
  return QState(ctx, std::move(rho), std::move(tag));
}

/// Pure state of the normalized vector Σ c_i |index_i>.
inline QState superposition_state(const FockContext& ctx, const std::vector<int>& indices,
                                  const std::vector<cplx>& coeffs) {
  require(!indices.empty() && indices.size() == coeffs.size(), "superposition_state: size mismatch");
  std::vector<int> sorted = indices;
  std::sort(sorted.begin(), sorted.end());
  require(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end(), "superposition_state: repeated index");
  Vector psi = Vector::Zero(ctx.trunc_dim);
  for (std::size_t i = 0; i < indices.size(); ++i) {
    require(indices[i] >= 0 && indices[i] < ctx.safe_dim(), "superposition_state: index outside guarded range");
    psi(indices[i]) = coeffs[i];
  }
  const double nrm = psi.norm();
  require(nrm > 0.0, "superposition_state: zero vector");
  psi /= nrm;
  return pure_state(ctx, psi, StateTag{SuperpositionTag{indices, coeffs}});
}

/// Convex combination Σ w_i ρ_i; weights must be nonnegative and are
/// normalized to sum 1.
inline QState mixed_state(const std::vector<double>& weights, const std::vector<QState>& parts) {
  require(!parts.empty() && weights.size() == parts.size(), "mixed_state: size mismatch");
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  require(total > 0.0, "mixed_state: weights sum to zero");
  const FockContext& ctx = parts.front().ctx();
  Matrix rho = Matrix::Zero(ctx.trunc_dim, ctx.trunc_dim);
  MixedTag tag;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    require(weights[i] >= 0.0, "mixed_state: negative weight");
    require_same_context(ctx, parts[i].ctx(), "mixed_state");
    rho += (weights[i] / total) * parts[i].rho();
    tag.weights.push_back(weights[i]);
    tag.parts.push_back(parts[i].tag());
  }
  return QState(ctx, std::move(rho), StateTag{std::move(tag)});
}

/// Rebuild a state from its construction tag, possibly at another truncation.
inline QState build_state(const FockContext& ctx, const StateTag& tag) {
  return std::visit(
      [&](const auto& t) -> QState {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, EigenTag>) {
          return eigenstate(ctx, t.m);
        } else if constexpr (std::is_same_v<T, CoherentTag>) {
          return coherent_state(ctx, t.kappa);
        } else if constexpr (std::is_same_v<T, TranslatedTag>) {
          return displace(build_state(ctx, *t.base), t.kappa);
        } else if constexpr (std::is_same_v<T, SuperpositionTag>) {
          return superposition_state(ctx, t.indices, t.coeffs);
        } else {
          std::vector<QState> parts;
          parts.reserve(t.parts.size());
          for (const auto& p : t.parts) parts.push_back(build_state(ctx, p));
          return mixed_state(t.weights, parts);
        }
      },
      tag.v);
}

/// ω(f) = Tr(ρ π(f)).
inline cplx evaluate(const QState& state, const Operator& op) {
  require_same_context(state.ctx(), op.ctx, "evaluate");
  return (state.rho().cwiseProduct(op.mat.transpose())).sum();
}

inline double trace_distance(const QState& x, const QState& y) {
  require_same_context(x.ctx(), y.ctx(), "trace_distance");
  const Matrix d = x.rho() - y.rho();
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (d + d.adjoint()), Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

/// Δq₁·Δq₂.
inline double uncertainty_product(const QState& state) {
  const auto [q1, q2] = quadratures(state.ctx());
  auto spread = [&](const Operator& q) {
    const double mean = evaluate(state, q).real();
    const double second = evaluate(state, q * q).real();
    return std::sqrt(std::max(0.0, second - mean * mean));
  };
  return spread(q1) * spread(q2);
}

}  // namespace moyal
