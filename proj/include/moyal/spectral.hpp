#pragma once

// Dirac calculus of the Moyal plane in the number basis and the spectral
// distance
//
//   d_D(ω₁, ω₂) = sup { |ω₁(A) − ω₂(A)| : A = A*, ‖[∂̸, A]‖ ≤ 1 },
//   [∂̸, A] = −i√2 [[0, ∂̄A], [∂A, 0]],  ∂A = −θ⁻¹[a†, A],  ∂̄A = θ⁻¹[a, A].
//
// Commutators are formed at full size N and the seminorm is read off the
// interior block (levels 0 .. N−g−1).

#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "moyal/ball_solver.hpp"
#include "moyal/fock.hpp"

namespace moyal {

class DiracCalculus {
 public:
  explicit DiracCalculus(FockContext ctx) : ctx_(ctx), a_(lowering_matrix(ctx.trunc_dim, ctx.lambda_p())) {}

  const FockContext& ctx() const { return ctx_; }
  const Matrix& lowering() const { return a_; }

  /// ∂F = −θ⁻¹[a†, F]
  Matrix dz(const Matrix& f) const { return -(a_.adjoint() * f - f * a_.adjoint()) / ctx_.theta; }
  /// ∂̄F = θ⁻¹[a, F]
  Matrix dzbar(const Matrix& f) const { return (a_ * f - f * a_) / ctx_.theta; }

  Operator dz(const Operator& f) const {
    require_same_context(ctx_, f.ctx, "dz");
    return Operator(ctx_, dz(f.mat));
  }
  Operator dzbar(const Operator& f) const {
    require_same_context(ctx_, f.ctx, "dzbar");
    return Operator(ctx_, dzbar(f.mat));
  }

  /// √2·max(‖∂f‖, ‖∂̄f‖) on the interior block, i.e. ‖[∂̸, f]‖.
  double lipschitz_seminorm(const Operator& f) const {
    require_same_context(ctx_, f.ctx, "lipschitz_seminorm");
    require(is_hermitian(f.mat, ctx_.tol * std::max(1.0, f.mat.cwiseAbs().maxCoeff())),
            "lipschitz_seminorm: operator is not hermitian");
    return std::numbers::sqrt2 *
           std::max(spectral_norm(interior(dz(f.mat), ctx_)), spectral_norm(interior(dzbar(f.mat), ctx_)));
  }

  /// [∂̸, f] as a 2N×2N matrix (spinor components up, down).
  Matrix dirac_commutator(const Matrix& f) const {
    const int n = ctx_.trunc_dim;
    Matrix c = Matrix::Zero(2 * n, 2 * n);
    const cplx s = -I_unit * std::numbers::sqrt2;
    c.topRightCorner(n, n) = s * dzbar(f);
    c.bottomLeftCorner(n, n) = s * dz(f);
    return c;
  }

 private:
  FockContext ctx_;
  Matrix a_;
};

// ---------------------------------------------------------------------------
// Closed forms and optimal elements

/// (λ_P/√2) Σ_{k=m+1}^{n} 1/√k; the order of m, n does not matter.
inline double eigenstate_distance(double theta, int m, int n) {
  if (m > n) std::swap(m, n);
  double s = 0.0;
  for (int k = m + 1; k <= n; ++k) s += 1.0 / std::sqrt(static_cast<double>(k));
  return std::sqrt(theta / 2.0) * s;
}

/// π(l_κ) = (a e^{−iΞ} + a† e^{iΞ})/√2.
inline Operator optimal_element_translation(const DiracCalculus& calc, double xi) {
  const Matrix& a = calc.lowering();
  const cplx ph = std::polar(1.0, xi);
  Matrix l = (a * std::conj(ph) + a.adjoint() * ph) / std::numbers::sqrt2;
  l = (0.5 * (l + l.adjoint())).eval();
  return Operator(calc.ctx(), std::move(l), true);
}

/// Diagonal element with α₀ = 0 and α_k − α_{k−1} = increments[k−1]; constant
/// past the last increment.
inline Operator diagonal_element(const FockContext& ctx, const std::vector<double>& increments) {
  require(static_cast<int>(increments.size()) < ctx.trunc_dim, "diagonal_element: too many increments");
  Matrix d = Matrix::Zero(ctx.trunc_dim, ctx.trunc_dim);
  double acc = 0.0;
  for (int k = 1; k < ctx.trunc_dim; ++k) {
    if (k <= static_cast<int>(increments.size())) acc += increments[k - 1];
    d(k, k) = acc;
  }
  return Operator(ctx, std::move(d), true);
}

/// λ_P/√(2k) for k = 1..upto.
inline std::vector<double> eigenstate_increments(double theta, int upto) {
  std::vector<double> inc(upto);
  for (int k = 1; k <= upto; ++k) inc[k - 1] = std::sqrt(theta / (2.0 * k));
  return inc;
}

/// The optimal element between eigenstates, built up to level `upto`.
inline Operator optimal_element_eigenstates(const DiracCalculus& calc, int upto) {
  require(upto >= 1 && upto < calc.ctx().safe_dim(), "optimal_element_eigenstates: upto outside the guarded range");
  return diagonal_element(calc.ctx(), eigenstate_increments(calc.ctx().theta, upto));
}

struct TranslationElementCheck {
  double seminorm = 0;
  double unitarity_residual = 0;  // ‖[∂̸,l]*[∂̸,l] − 𝕀‖ on the interior
};

inline TranslationElementCheck check_translation_element(const DiracCalculus& calc, const Operator& l) {
  const int n = calc.ctx().trunc_dim, m = calc.ctx().safe_dim();
  const Matrix c = calc.dirac_commutator(l.mat);
  const Matrix g = c.adjoint() * c;
  double res = 0.0;
  for (int s = 0; s < 2; ++s)
    for (int t = 0; t < 2; ++t) {
      Matrix blk = g.block(s * n, t * n, m, m);
      if (s == t) blk -= Matrix::Identity(m, m);
      res = std::max(res, blk.cwiseAbs().maxCoeff());
    }
  return {calc.lipschitz_seminorm(l), res};
}

struct EigenElementCheck {
  int levels = 0;               // relations checked on levels 0 .. levels−1
  double defect_residual = 0;   // ‖𝕀 − [∂̸,A]*[∂̸,A] − diag(0, e₀)‖
  double vacuum_defect = 0;     // the (down, 0, 0) entry of 𝕀 − [∂̸,A]*[∂̸,A]
  double shift_residual = 0;    // ‖∂A·a·(∂A·a)* − ½a†a‖
  double seminorm = 0;
};

inline EigenElementCheck check_eigenstate_element(const DiracCalculus& calc, const Operator& el, int upto) {
  const FockContext& ctx = calc.ctx();
  const int n = ctx.trunc_dim;
  const Matrix c = calc.dirac_commutator(el.mat);
  const Matrix defect = Matrix::Identity(2 * n, 2 * n) - c.adjoint() * c;
  EigenElementCheck r;
  r.levels = upto;
  r.vacuum_defect = defect(n, n).real();
  for (int s = 0; s < 2; ++s)
    for (int t = 0; t < 2; ++t) {
      Matrix blk = defect.block(s * n, t * n, upto, upto);
      if (s == 1 && t == 1) blk(0, 0) -= 1.0;
      r.defect_residual = std::max(r.defect_residual, blk.cwiseAbs().maxCoeff());
    }
  const Matrix& a = calc.lowering();
  const Matrix da = calc.dz(el.mat) * a;
  const Matrix rel = da * da.adjoint() - 0.5 * a.adjoint() * a;
  r.shift_residual = rel.topLeftCorner(upto, upto).cwiseAbs().maxCoeff();
  r.seminorm = calc.lipschitz_seminorm(el);
  return r;
}

// ---------------------------------------------------------------------------
// Distance reports

enum class DistanceMethod { ClosedForm, DiagonalLP, ConvexSolver, Scaled };

inline const char* method_name(DistanceMethod m) {
  switch (m) {
    case DistanceMethod::ClosedForm: return "closed";
    case DistanceMethod::DiagonalLP: return "lp";
    case DistanceMethod::ConvexSolver: return "solver";
    case DistanceMethod::Scaled: return "scaled";
  }
  return "?";
}

struct DistanceReport {
  double value = 0;
  DistanceMethod method = DistanceMethod::ClosedForm;
  std::optional<Operator> certificate;
  std::optional<Operator> certificate2;  // second-sheet component (doubled triple)
  std::vector<double> increments;  // diagonal certificates
  double feasibility = 0;          // seminorm of the certificate
  std::optional<double> gap;       // |value − cross-check|
  std::optional<double> reference;
  std::string note = "optimal element up to regularization";
  std::vector<std::pair<std::string, double>> diagnostics;
};

struct TranslationForm {
  cplx kappa;
};
struct EigenstatesForm {
  int m = 0, n = 0;
};
using ClosedFormKind = std::variant<TranslationForm, EigenstatesForm>;

inline DistanceReport distance_closed_form(const DiracCalculus& calc, const ClosedFormKind& kind) {
  DistanceReport r;
  r.method = DistanceMethod::ClosedForm;
  if (const auto* t = std::get_if<TranslationForm>(&kind)) {
    r.value = std::abs(t->kappa);
    r.certificate = optimal_element_translation(calc, std::arg(t->kappa));
  } else {
    auto [m, n] = std::get<EigenstatesForm>(kind);
    if (m > n) std::swap(m, n);
    require(m >= 0 && n < calc.ctx().safe_dim(), "distance_closed_form: level outside the guarded range");
    r.value = eigenstate_distance(calc.ctx().theta, m, n);
    r.increments = eigenstate_increments(calc.ctx().theta, calc.ctx().safe_dim() - 1);
    r.certificate = diagonal_element(calc.ctx(), r.increments);
  }
  r.feasibility = calc.lipschitz_seminorm(*r.certificate);
  return r;
}

namespace detail {

/// Splits a tag into (untranslated base, total translation).
inline std::pair<StateTag, cplx> translation_normal_form(const StateTag& tag, double theta) {
  if (const auto* t = std::get_if<TranslatedTag>(&tag.v)) {
    auto [base, k] = translation_normal_form(*t->base, theta);
    return {base, k + t->kappa};
  }
  if (const auto* c = std::get_if<CoherentTag>(&tag.v)) return {eigen_tag(0), std::sqrt(2.0 * theta) * c->kappa};
  return {tag, cplx(0.0)};
}

}  // namespace detail

/// The closed form that applies to a pair of states, from their tags.
inline std::optional<ClosedFormKind> closed_form_kind(const QState& s1, const QState& s2) {
  const double theta = s1.ctx().theta;
  auto [b1, k1] = detail::translation_normal_form(s1.tag(), theta);
  auto [b2, k2] = detail::translation_normal_form(s2.tag(), theta);
  if (b1 == b2) return TranslationForm{k2 - k1};
  const auto* e1 = std::get_if<EigenTag>(&b1.v);
  const auto* e2 = std::get_if<EigenTag>(&b2.v);
  if (e1 && e2 && k1 == k2) return EigenstatesForm{e1->m, e2->m};
  return std::nullopt;
}

/// Exact distance between number-diagonal states: with T_j = Σ_{k≥j}(p_k − q_k)
/// the supremum over the diagonal cone is Σ_j λ_P/√(2j)·|T_j|.
inline DistanceReport distance_diagonal_lp(const DiracCalculus& calc, const QState& s1, const QState& s2) {
  const FockContext& ctx = calc.ctx();
  require_same_context(ctx, s1.ctx(), "distance_diagonal_lp");
  require_same_context(ctx, s2.ctx(), "distance_diagonal_lp");
  require(s1.is_diagonal(ctx.tol) && s2.is_diagonal(ctx.tol), "distance_diagonal_lp: states must be number-diagonal");
  const int n = ctx.trunc_dim, m = ctx.safe_dim();
  std::vector<double> tail(n + 1, 0.0);
  for (int k = n - 1; k >= 0; --k) tail[k] = tail[k + 1] + (s1.rho()(k, k) - s2.rho()(k, k)).real();
  DistanceReport r;
  r.method = DistanceMethod::DiagonalLP;
  r.increments.assign(m - 1, 0.0);
  for (int j = 1; j < m; ++j) {
    const double c = std::sqrt(ctx.theta / (2.0 * j));
    const double t = tail[j];
    r.value += c * std::abs(t);
    r.increments[j - 1] = t > 0 ? c : (t < 0 ? -c : 0.0);
  }
  r.certificate = diagonal_element(ctx, r.increments);
  r.feasibility = calc.lipschitz_seminorm(*r.certificate);
  if (auto kind = closed_form_kind(s1, s2); kind && std::holds_alternative<EigenstatesForm>(*kind)) {
    r.reference = distance_closed_form(calc, *kind).value;
    r.gap = std::abs(r.value - *r.reference);
  }
  return r;
}

// ---------------------------------------------------------------------------
// Convex solver

/// Hermitian (n×n) ↔ real parameters: diagonal first, then (Re, Im) of each
/// entry above the diagonal, row by row.
struct HermitianParams {
  int n = 0;
  int dim() const { return n * n; }

  Matrix to_matrix(const RealVector& x, int offset = 0) const {
    Matrix a(n, n);
    for (int i = 0; i < n; ++i) a(i, i) = x(offset + i);
    int p = offset + n;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j, p += 2) {
        a(i, j) = cplx(x(p), x(p + 1));
        a(j, i) = cplx(x(p), -x(p + 1));
      }
    return a;
  }

  /// Gradient of Re⟨G, A(x)⟩ in the parameters.
  void gradient(const Matrix& g, RealVector& out, int offset = 0) const {
    for (int i = 0; i < n; ++i) out(offset + i) = g(i, i).real();
    int p = offset + n;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j, p += 2) {
        out(p) = (g(i, j) + g(j, i)).real();
        out(p + 1) = g(i, j).imag() - g(j, i).imag();
      }
  }

  /// Coefficients c with cᵀx = tr(Δ A(x)) for Hermitian Δ.
  RealVector objective(const Matrix& delta) const {
    RealVector c(dim());
    for (int i = 0; i < n; ++i) c(i) = delta(i, i).real();
    int p = n;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j, p += 2) {
        c(p) = 2.0 * delta(i, j).real();
        c(p + 1) = 2.0 * delta(i, j).imag();
      }
    return c;
  }
};

namespace detail {

/// (√2/θ)·[a, A] restricted to M×M, for A on levels 0..M; O(M²).
/// `root` holds s·√k for k = 0..M with s = √2λ_P/θ.
inline Matrix scaled_interior_commutator(const Matrix& x, int m, const RealVector& root) {
  Matrix c(m, m);
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < m; ++i) {
      c(i, j) = root(i + 1) * x(i + 1, j);
      if (j > 0) c(i, j) -= root(j) * x(i, j - 1);
    }
  }
  return c;
}

/// Adjoint of scaled_interior_commutator: an (M+1)×(M+1) matrix.
inline Matrix scaled_interior_commutator_adjoint(const Matrix& y, int m, const RealVector& root) {
  Matrix g = Matrix::Zero(m + 1, m + 1);
  for (int q = 0; q <= m; ++q)
    for (int p = 0; p <= m; ++p) {
      cplx v = 0.0;
      if (p >= 1 && q < m) v += root(p) * y(p - 1, q);
      if (p < m && q + 1 < m) v -= root(q + 1) * y(p, q + 1);
      g(p, q) = v;
    }
  return g;
}

inline RealVector scaled_roots(int m, double lambda, double theta) {
  RealVector r(m + 1);
  for (int k = 0; k <= m; ++k) r(k) = std::numbers::sqrt2 / theta * lambda * std::sqrt(double(k));
  return r;
}

}  // namespace detail

/// A ↦ √2·interior(∂̄A) for Hermitian A supported on levels 0..M, M = N − g.
/// Level M is the one outside the interior that interior commutators still
/// see; its diagonal entry is invisible and kept at 0.
class SheetMap {
 public:
  explicit SheetMap(const FockContext& ctx)
      : m_(ctx.safe_dim()), root_(detail::scaled_roots(m_, ctx.lambda_p(), ctx.theta)) {}
  int dim() const { return params_().dim(); }
  int support() const { return m_ + 1; }
  BlockImage apply(const RealVector& x) const { return {image(params_().to_matrix(x))}; }
  RealVector adjoint(const BlockImage& y) const {
    RealVector out(dim());
    params_().gradient(adjoint_matrix(y[0]), out);
    return out;
  }
  Matrix image(const Matrix& a) const { return detail::scaled_interior_commutator(a, m_, root_); }
  Matrix adjoint_matrix(const Matrix& y) const { return detail::scaled_interior_commutator_adjoint(y, m_, root_); }
  HermitianParams params() const { return params_(); }

 private:
  HermitianParams params_() const { return {m_ + 1}; }
  int m_;
  RealVector root_;
};

/// Δρ on levels 0..M with the invisible (M, M) entry removed.
inline Matrix solver_delta(const QState& s1, const QState& s2, int support) {
  Matrix d = (s1.rho() - s2.rho()).topLeftCorner(support, support);
  d = (0.5 * (d + d.adjoint())).eval();
  d(support - 1, support - 1) = 0.0;
  return d;
}

/// Embeds an (M+1)×(M+1) block as an N×N Hermitian operator.
inline Operator embed(const FockContext& ctx, const Matrix& block) {
  Matrix full = Matrix::Zero(ctx.trunc_dim, ctx.trunc_dim);
  full.topLeftCorner(block.rows(), block.cols()) = block;
  full = (0.5 * (full + full.adjoint())).eval();
  return Operator(ctx, std::move(full), true);
}

inline constexpr double kFeasibilitySlack = 1e-8;

/// Certified lower bound of d_D by maximizing tr(ΔρA) over the seminorm ball.
inline DistanceReport distance_solver(const DiracCalculus& calc, const QState& s1, const QState& s2,
                                      const BallSolverConfig& cfg = {}) {
  const FockContext& ctx = calc.ctx();
  require_same_context(ctx, s1.ctx(), "distance_solver");
  require_same_context(ctx, s2.ctx(), "distance_solver");
  const SheetMap map(ctx);
  const HermitianParams hp = map.params();
  const RealVector c = hp.objective(solver_delta(s1, s2, map.support()));
  DistanceReport r;
  r.method = DistanceMethod::ConvexSolver;
  const BallSolution sol = maximize_over_ball(map, c, cfg);
  Operator cert = embed(ctx, hp.to_matrix(sol.x));
  r.feasibility = calc.lipschitz_seminorm(cert);
  if (r.feasibility > 1.0 + kFeasibilitySlack) throw AnomalyError("distance_solver: certificate above seminorm 1");
  r.value = c.norm() == 0.0 ? 0.0 : std::abs((evaluate(s1, cert) - evaluate(s2, cert)).real());
  if (r.feasibility > 1.0) r.value /= r.feasibility;
  r.diagnostics = {{"admm", sol.admm_value}, {"subgradient", sol.subgradient_value}};
  r.certificate = std::move(cert);
  if (auto kind = closed_form_kind(s1, s2)) {
    r.reference = distance_closed_form(calc, *kind).value;
  } else if (s1.is_diagonal(ctx.tol) && s2.is_diagonal(ctx.tol)) {
    r.reference = distance_diagonal_lp(calc, s1, s2).value;
  }
  if (r.reference) r.gap = std::abs(r.value - *r.reference);
  return r;
}

/// √2 Re(e^{−iΞ} φ(∂̄A)): the rate at which φ(A) changes along a translation in
/// direction Ξ; equal to 1 for π(l_κ).
inline double translation_alignment(const DiracCalculus& calc, const Operator& a, const QState& phi, double xi) {
  const cplx v = evaluate(phi, calc.dzbar(a));
  return std::numbers::sqrt2 * (std::polar(1.0, -xi) * v).real();
}

// ---------------------------------------------------------------------------
// Modified length versus spectral distance

struct Discrepancy {
  double d_D = 0;
  double d_L_mod = 0;
  double rel_gap = 0;
  double radial_gap = 0;  // |ω_m(R) − ω_n(R)| for R = √(aa† + a†a)
};

inline Discrepancy length_vs_optimal_discrepancy(const DiracCalculus& calc, int m, int n) {
  const FockContext& ctx = calc.ctx();
  require(0 <= m && m < n && n < ctx.safe_dim(), "length_vs_optimal_discrepancy: need 0 <= m < n < N - edge_guard");
  Discrepancy d;
  d.d_D = eigenstate_distance(ctx.theta, m, n);
  d.d_L_mod = std::sqrt(2.0 * energy(ctx, n)) - std::sqrt(2.0 * energy(ctx, m));
  d.rel_gap = std::abs(d.d_L_mod - d.d_D) / d.d_L_mod;
  const Matrix& a = calc.lowering();
  const Matrix radial = hermitian_sqrt(a * a.adjoint() + a.adjoint() * a, ctx.tol);
  d.radial_gap = std::abs(radial(n, n).real() - radial(m, m).real());
  return d;
}

/// d_{D_Ω} = d_D/√(1+Ω²).
inline DistanceReport scaled_distance(const DistanceReport& report, double omega) {
  require(omega >= 0.0 && std::isfinite(omega), "scaled_distance: Omega must be nonnegative");
  DistanceReport r = report;
  r.value = report.value / std::sqrt(1.0 + omega * omega);
  r.method = DistanceMethod::Scaled;
  r.gap.reset();
  r.reference.reset();
  return r;
}

}  // namespace moyal
