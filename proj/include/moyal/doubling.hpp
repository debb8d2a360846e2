#pragma once

// Two-sheet spectral triple: the Moyal triple times the two-point triple on ℂ²,
//
//   D′ = D⊗𝕀 + Γ⊗D_I,  D_I = [[0, Λ̄], [Λ, 0]],  A′ = (A₁, A₂),
//
// on spinor ⊗ Fock ⊗ sheet. With the sheet index outermost,
//
//   [D′, A′] = [[ [D,A₁],    −Λ̄ΓB ],
//               [  ΛΓB,    [D,A₂] ]],   B = A₁ − A₂,  Γ = diag(𝕀, −𝕀).

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "moyal/lengthop.hpp"
#include "moyal/spectral.hpp"

namespace moyal {

struct SheetState {
  QState state;
  int sheet = 1;

  SheetState(QState s, int sh) : state(std::move(s)), sheet(sh) {
    require(sheet == 1 || sheet == 2, "SheetState: sheet must be 1 or 2");
  }
};

class DoubledDirac {
 public:
  DoubledDirac(DiracCalculus calc, cplx lambda) : calc_(std::move(calc)), lambda_(lambda) {
    require(std::abs(lambda) > 0.0 && std::isfinite(std::abs(lambda)), "make_doubled: Lambda must be nonzero and finite");
  }

  const DiracCalculus& calc() const { return calc_; }
  const FockContext& ctx() const { return calc_.ctx(); }
  cplx lambda() const { return lambda_; }
  /// |Λ|⁻¹, the distance between the sheets.
  double inter_sheet() const { return 1.0 / std::abs(lambda_); }

  /// [D′, (A₁, A₂)] as a 4N×4N matrix, order (1↑, 1↓, 2↑, 2↓).
  Matrix commutator(const Matrix& a1, const Matrix& a2) const {
    const int n = ctx().trunc_dim;
    Matrix c = Matrix::Zero(4 * n, 4 * n);
    c.topLeftCorner(2 * n, 2 * n) = calc_.dirac_commutator(a1);
    c.bottomRightCorner(2 * n, 2 * n) = calc_.dirac_commutator(a2);
    const Matrix b = a1 - a2;
    // ΓB = diag(B, −B)
    c.block(0, 2 * n, n, n) = -std::conj(lambda_) * b;
    c.block(n, 3 * n, n, n) = std::conj(lambda_) * b;
    c.block(2 * n, 0, n, n) = lambda_ * b;
    c.block(3 * n, n, n, n) = -lambda_ * b;
    return c;
  }

  /// Interior restriction of a 4N×4N matrix: levels 0..M−1 of each component.
  Matrix interior4(const Matrix& c) const {
    const int n = ctx().trunc_dim, m = ctx().safe_dim();
    Matrix out(4 * m, 4 * m);
    for (int p = 0; p < 4; ++p)
      for (int q = 0; q < 4; ++q) out.block(p * m, q * m, m, m) = c.block(p * n, q * n, m, m);
    return out;
  }

  /// ‖[D′, (A₁, A₂)]‖ on the interior.
  double seminorm(const Operator& a1, const Operator& a2) const {
    require_same_context(ctx(), a1.ctx, "doubled seminorm");
    require_same_context(ctx(), a2.ctx, "doubled seminorm");
    const double scale = std::max({1.0, a1.mat.cwiseAbs().maxCoeff(), a2.mat.cwiseAbs().maxCoeff()});
    require(is_hermitian(a1.mat, ctx().tol * scale) && is_hermitian(a2.mat, ctx().tol * scale),
            "doubled seminorm: operators must be hermitian");
    return spectral_norm(interior4(commutator(a1.mat, a2.mat)));
  }

 private:
  DiracCalculus calc_;
  cplx lambda_;
};

inline DoubledDirac make_doubled(const DiracCalculus& calc, cplx lambda) { return DoubledDirac(calc, lambda); }

/// Λ = d_{L²}(ω_m, ω_m)^{−½} = 1/(2λ_P√(m+½)).
inline double reference_lambda(double theta, int m) {
  require(theta > 0.0 && m >= 0, "reference_lambda: need theta > 0 and m >= 0");
  return 1.0 / (2.0 * std::sqrt(theta * (m + 0.5)));
}

// ---------------------------------------------------------------------------
// Solver maps on pairs (A₁, A₂)

/// Hermitian pairs on levels 0..M; one 4M×4M image block.
class PairMap {
 public:
  explicit PairMap(const DoubledDirac& dd) : sheet_(dd.ctx()), m_(dd.ctx().safe_dim()), lambda_(dd.lambda()) {}

  int dim() const { return 2 * params().dim(); }
  int support() const { return m_ + 1; }
  HermitianParams params() const { return sheet_.params(); }

  std::pair<Matrix, Matrix> split(const RealVector& x) const {
    const HermitianParams hp = params();
    return {hp.to_matrix(x, 0), hp.to_matrix(x, hp.dim())};
  }

  BlockImage apply(const RealVector& x) const {
    const auto [a1, a2] = split(x);
    const int m = m_;
    const Matrix c1 = sheet_.image(a1), c2 = sheet_.image(a2);
    const Matrix b = (a1 - a2).topLeftCorner(m, m);
    const cplx mi(0.0, -1.0);
    Matrix y = Matrix::Zero(4 * m, 4 * m);
    y.block(0, m, m, m) = mi * c1;
    y.block(m, 0, m, m) = mi * c1.adjoint();
    y.block(2 * m, 3 * m, m, m) = mi * c2;
    y.block(3 * m, 2 * m, m, m) = mi * c2.adjoint();
    y.block(0, 2 * m, m, m) = -std::conj(lambda_) * b;
    y.block(m, 3 * m, m, m) = std::conj(lambda_) * b;
    y.block(2 * m, 0, m, m) = lambda_ * b;
    y.block(3 * m, m, m, m) = -lambda_ * b;
    return {std::move(y)};
  }

  RealVector adjoint(const BlockImage& yv) const {
    const Matrix& y = yv[0];
    const int m = m_;
    auto blk = [&](int p, int q) { return y.block(p * m, q * m, m, m); };
    const cplx i(0.0, 1.0);
    const Matrix g1 = sheet_.adjoint_matrix(i * blk(0, 1) - i * blk(1, 0).adjoint());
    const Matrix g2 = sheet_.adjoint_matrix(i * blk(2, 3) - i * blk(3, 2).adjoint());
    Matrix gb = Matrix::Zero(m + 1, m + 1);
    gb.topLeftCorner(m, m) = -lambda_ * blk(0, 2) + lambda_ * blk(1, 3) + std::conj(lambda_) * blk(2, 0) -
                             std::conj(lambda_) * blk(3, 1);
    const HermitianParams hp = params();
    RealVector out(dim());
    hp.gradient((g1 + gb).eval(), out, 0);
    hp.gradient((g2 - gb).eval(), out, hp.dim());
    return out;
  }

 private:
  SheetMap sheet_;
  int m_;
  cplx lambda_;
};

/// Number-diagonal pairs on levels 0..M−1. The image splits into M−1 blocks of
/// size 4 {1↑k, 1↓k+1, 2↑k, 2↓k+1} and two 2×2 edge blocks {1↓0, 2↓0},
/// {1↑(M−1), 2↑(M−1)}.
class DiagonalPairMap {
 public:
  explicit DiagonalPairMap(const DoubledDirac& dd) : m_(dd.ctx().safe_dim()) {
    const RealVector root = detail::scaled_roots(m_, dd.ctx().lambda_p(), dd.ctx().theta);
    const cplx l = dd.lambda(), lb = std::conj(l), mi(0.0, -1.0);
    auto a1 = [](int k) { return k; };
    auto a2 = [this](int k) { return m_ + k; };
    // B_k = A₁_k − A₂_k
    auto add_b = [&](int b, int i, int j, cplx coef, int k) {
      entries_.push_back({b, i, j, coef, a1(k), 1.0});
      entries_.push_back({b, i, j, coef, a2(k), -1.0});
    };
    auto add_d = [&](int b, int i, int j, cplx coef, auto var, int k) {
      entries_.push_back({b, i, j, coef, var(k + 1), 1.0});
      entries_.push_back({b, i, j, coef, var(k), -1.0});
    };
    for (int k = 0; k + 1 < m_; ++k) {
      const double r = root(k + 1);
      sizes_.push_back(4);
      const int b = k;
      add_d(b, 0, 1, mi * r, a1, k);
      add_d(b, 1, 0, mi * r, a1, k);
      add_d(b, 2, 3, mi * r, a2, k);
      add_d(b, 3, 2, mi * r, a2, k);
      add_b(b, 0, 2, -lb, k);
      add_b(b, 2, 0, l, k);
      add_b(b, 1, 3, lb, k + 1);
      add_b(b, 3, 1, -l, k + 1);
    }
    const int lo = static_cast<int>(sizes_.size());
    sizes_.push_back(2);
    add_b(lo, 0, 1, lb, 0);
    add_b(lo, 1, 0, -l, 0);
    sizes_.push_back(2);
    add_b(lo + 1, 0, 1, -lb, m_ - 1);
    add_b(lo + 1, 1, 0, l, m_ - 1);
  }

  int dim() const { return 2 * m_; }
  int levels() const { return m_; }

  BlockImage apply(const RealVector& x) const {
    BlockImage y;
    y.reserve(sizes_.size());
    for (int s : sizes_) y.push_back(Matrix::Zero(s, s));
    for (const auto& e : entries_) y[e.block](e.i, e.j) += e.coef * (e.weight * x(e.var));
    return y;
  }

  RealVector adjoint(const BlockImage& y) const {
    RealVector g = RealVector::Zero(dim());
    for (const auto& e : entries_) g(e.var) += e.weight * (std::conj(y[e.block](e.i, e.j)) * e.coef).real();
    return g;
  }

  /// The pair of N×N diagonal operators for parameters x.
  std::pair<Matrix, Matrix> split(const RealVector& x, int trunc_dim) const {
    Matrix a1 = Matrix::Zero(trunc_dim, trunc_dim), a2 = a1;
    for (int k = 0; k < m_; ++k) {
      a1(k, k) = x(k);
      a2(k, k) = x(m_ + k);
    }
    return {a1, a2};
  }

 private:
  struct Entry {
    int block, i, j;
    cplx coef;
    int var;
    double weight;
  };
  int m_;
  std::vector<int> sizes_;
  std::vector<Entry> entries_;
};

// ---------------------------------------------------------------------------
// Doubled distance

namespace detail {

/// Objective of (φ₁ on sheet i) − (φ₂ on sheet j) over Hermitian pairs.
inline RealVector pair_objective(const HermitianParams& hp, const SheetState& s1, const SheetState& s2) {
  const int n = hp.n;
  auto rho = [n](const QState& s) {
    Matrix d = s.rho().topLeftCorner(n, n);
    d = (0.5 * (d + d.adjoint())).eval();
    d(n - 1, n - 1) = 0.0;
    return d;
  };
  Matrix d[2] = {Matrix::Zero(n, n), Matrix::Zero(n, n)};
  d[s1.sheet - 1] += rho(s1.state);
  d[s2.sheet - 1] -= rho(s2.state);
  RealVector c(2 * hp.dim());
  c << hp.objective(d[0]), hp.objective(d[1]);
  return c;
}

inline RealVector diagonal_pair_objective(int m, const SheetState& s1, const SheetState& s2) {
  RealVector c = RealVector::Zero(2 * m);
  for (int k = 0; k < m; ++k) {
    c((s1.sheet - 1) * m + k) += s1.state.rho()(k, k).real();
    c((s2.sheet - 1) * m + k) -= s2.state.rho()(k, k).real();
  }
  return c;
}

inline cplx sheet_value(const SheetState& s, const Operator& a1, const Operator& a2) {
  return evaluate(s.state, s.sheet == 1 ? a1 : a2);
}

}  // namespace detail

/// Certified lower bound of d_{D′} by the convex solver over pairs (A₁, A₂).
/// Number-diagonal states use the diagonal pair map (exact by phase averaging).
inline DistanceReport doubled_distance_solver(const DoubledDirac& dd, const SheetState& s1, const SheetState& s2,
                                              const BallSolverConfig& cfg = {}) {
  const FockContext& ctx = dd.ctx();
  require_same_context(ctx, s1.state.ctx(), "doubled_distance");
  require_same_context(ctx, s2.state.ctx(), "doubled_distance");
  Matrix a1, a2;
  BallSolution sol;
  if (s1.state.is_diagonal(ctx.tol) && s2.state.is_diagonal(ctx.tol)) {
    const DiagonalPairMap map(dd);
    const int m = map.levels();
    const RealVector c = detail::diagonal_pair_objective(m, s1, s2);
    // sheet constants (𝕀, −𝕀) and the single-sheet certificate on both sheets
    RealVector constants(2 * m), lifted = RealVector::Zero(2 * m);
    constants << RealVector::Ones(m), -RealVector::Ones(m);
    const Operator l = distance_diagonal_lp(dd.calc(), s1.state, s2.state).certificate.value();
    for (int k = 0; k < m; ++k) lifted(k) = lifted(m + k) = l.mat(k, k).real();
    sol = maximize_over_ball(map, c, cfg, {constants, lifted});
    std::tie(a1, a2) = map.split(sol.x, ctx.trunc_dim);
  } else {
    const PairMap map(dd);
    const HermitianParams hp = map.params();
    const RealVector c = detail::pair_objective(hp, s1, s2);
    RealVector constants = RealVector::Zero(map.dim());
    constants.head(hp.n).setOnes();
    constants.segment(hp.dim(), hp.n).setConstant(-1.0);
    sol = maximize_over_ball(map, c, cfg, {constants});
    const auto [b1, b2] = map.split(sol.x);
    a1 = embed(ctx, b1).mat;
    a2 = embed(ctx, b2).mat;
  }
  Operator c1(ctx, std::move(a1), true), c2(ctx, std::move(a2), true);
  DistanceReport r;
  r.method = DistanceMethod::ConvexSolver;
  r.feasibility = dd.seminorm(c1, c2);
  if (r.feasibility > 1.0 + kFeasibilitySlack) throw AnomalyError("doubled_distance: certificate above seminorm 1");
  r.value = std::abs((detail::sheet_value(s1, c1, c2) - detail::sheet_value(s2, c1, c2)).real());
  if (r.feasibility > 1.0) r.value /= r.feasibility;
  r.diagnostics = {{"admm", sol.admm_value}, {"subgradient", sol.subgradient_value}};
  r.certificate = std::move(c1);
  r.certificate2 = std::move(c2);
  return r;
}

/// Best single-sheet d_D: closed form, else diagonal LP, else solver.
inline DistanceReport single_sheet_distance(const DiracCalculus& calc, const QState& s1, const QState& s2,
                                            const BallSolverConfig& cfg = {}) {
  if (auto kind = closed_form_kind(s1, s2)) return distance_closed_form(calc, *kind);
  if (s1.is_diagonal(calc.ctx().tol) && s2.is_diagonal(calc.ctx().tol)) return distance_diagonal_lp(calc, s1, s2);
  return distance_solver(calc, s1, s2, cfg);
}

/// d_{D′} between sheet states. Same sheet: d_D. Opposite sheets within one
/// translation family: √(|κ|² + |Λ|⁻²). Otherwise the doubled solver.
/// With `cross_check` the doubled solver also runs on the closed-form routes.
inline DistanceReport doubled_distance(const DoubledDirac& dd, const SheetState& s1, const SheetState& s2,
                                       const BallSolverConfig& cfg = {}, bool cross_check = false) {
  require_same_context(dd.ctx(), s1.state.ctx(), "doubled_distance");
  require_same_context(dd.ctx(), s2.state.ctx(), "doubled_distance");
  DistanceReport r;
  if (s1.sheet == s2.sheet) {
    r = single_sheet_distance(dd.calc(), s1.state, s2.state, cfg);
  } else if (auto kind = closed_form_kind(s1.state, s2.state); kind && std::holds_alternative<TranslationForm>(*kind)) {
    const double k = std::abs(std::get<TranslationForm>(*kind).kappa);
    r.method = DistanceMethod::ClosedForm;
    r.value = std::hypot(k, dd.inter_sheet());
    r.feasibility = 1.0;
  } else {
    return doubled_distance_solver(dd, s1, s2, cfg);
  }
  if (cross_check) {
    const DistanceReport s = doubled_distance_solver(dd, s1, s2, cfg);
    r.diagnostics.emplace_back("doubled_solver", s.value);
    r.reference = s.value;
    r.gap = std::abs(r.value - s.value);
  }
  return r;
}

// ---------------------------------------------------------------------------
// Pythagoras

inline constexpr double kSolverBracket = 0.02;

struct PythagorasCheck {
  double lhs = 0;        // d_{D′}²(φ¹, φ̃²), doubled solver
  double rhs_equal = 0;  // d_D² + |Λ|⁻²
  double rhs_lo = 0;
  double rhs_hi = 0;
  double d_D = 0;
  bool same_family = false;
  bool within_bracket = false;
  double feasibility = 0;
};

/// lhs against [rhs, 2·rhs]; the lower side allows the solver's 2% bracket.
inline PythagorasCheck pythagoras_check(const DoubledDirac& dd, const QState& s1, const QState& s2,
                                        const BallSolverConfig& cfg = {}) {
  PythagorasCheck p;
  const DistanceReport single = single_sheet_distance(dd.calc(), s1, s2, cfg);
  const DistanceReport doubled = doubled_distance_solver(dd, SheetState(s1, 1), SheetState(s2, 2), cfg);
  const double di = dd.inter_sheet();
  p.d_D = single.value;
  p.lhs = doubled.value * doubled.value;
  p.rhs_equal = single.value * single.value + di * di;
  p.rhs_lo = p.rhs_equal;
  p.rhs_hi = 2.0 * p.rhs_equal;
  p.feasibility = doubled.feasibility;
  const auto kind = closed_form_kind(s1, s2);
  p.same_family = kind && std::holds_alternative<TranslationForm>(*kind);
  const double lo = (1.0 - kSolverBracket) * (1.0 - kSolverBracket) * p.rhs_lo;
  p.within_bracket = p.lhs >= lo - 1e-8 && p.lhs <= p.rhs_hi + 1e-8;
  return p;
}

// ---------------------------------------------------------------------------
// d_{D′}² ↔ d_{L²} identification

struct SweepRow {
  int m = 0, n = 0;
  double kappa = 0;  // |κ − κ̃|
  double d_D = 0, d_L = 0, d_L2 = 0, d_L_mod = 0, rel_gap = 0, feasibility = 0;
  std::string method;
};

struct SweepTable {
  std::vector<SweepRow> rows;

  /// rel_gap strictly decreasing over rows [from, to).
  bool rel_gap_decreasing(std::size_t from = 0, std::size_t to = SIZE_MAX) const {
    to = std::min(to, rows.size());
    for (std::size_t i = from + 1; i < to; ++i)
      if (!(rows[i].rel_gap < rows[i - 1].rel_gap)) return false;
    return true;
  }
};

struct SweepSpec {
  int m = 0;                   // reference family 𝒞(ω_m)
  std::vector<int> ns;         // second family indices
  std::vector<double> kappas;  // |κ − κ̃|, split ±/2 along the real axis
};

/// Rows over (n, κ): d_D against d'_L, with d_{L²} and d_L alongside.
/// Same family: d_D is the closed form |κ|. Cross-family at κ = 0: the
/// eigenstate closed form. Otherwise the best certified lower bound
/// max(|κ|, d_D(ω_m, ω_n), solver).
inline SweepTable identification_sweep(const DoubledDirac& dd, const SweepSpec& spec, const BallSolverConfig& cfg = {}) {
  require(!spec.ns.empty() && !spec.kappas.empty(), "identification_sweep: empty grid");
  const FockContext& ctx = dd.ctx();
  const double expected = reference_lambda(ctx.theta, spec.m);
  require(std::abs(std::abs(dd.lambda()) - expected) <= 1e-9 * expected,
          "identification_sweep: |Lambda|^-2 must equal d_L2(w_m, w_m) of the reference family");
  const LengthOperator op = build_length(ctx);
  SweepTable t;
  for (int n : spec.ns) {
    require(n >= 0 && n < ctx.safe_dim(), "identification_sweep: level outside the guarded range");
    for (double k : spec.kappas) {
      require(k >= 0.0 && std::isfinite(k), "identification_sweep: kappa must be nonnegative");
      const QState s1 = displace(eigenstate(ctx, spec.m), cplx(-0.5 * k));
      const QState s2 = displace(eigenstate(ctx, n), cplx(0.5 * k));
      SweepRow row;
      row.m = spec.m;
      row.n = n;
      row.kappa = k;
      row.d_L2 = d_L2(op, s1, s2);
      row.d_L = d_L(op, s1, s2);
      row.d_L_mod = modified_length(op, s1, s2);
      if (n == spec.m || k == 0.0) {
        const DistanceReport r = distance_closed_form(dd.calc(), *closed_form_kind(s1, s2));
        row.d_D = r.value;
        row.feasibility = r.feasibility;
        row.method = "closed";
      } else {
        const DistanceReport r = distance_solver(dd.calc(), s1, s2, cfg);
        const double floor = std::max(k, eigenstate_distance(ctx.theta, spec.m, n));
        row.feasibility = r.feasibility;
        row.d_D = std::max(floor, r.value);
        row.method = r.value >= floor ? "solver" : "bound";
      }
      row.rel_gap = row.d_L_mod > 0.0 ? std::abs(row.d_L_mod - row.d_D) / row.d_L_mod : 0.0;
      t.rows.push_back(row);
    }
  }
  return t;
}

}  // namespace moyal
