#pragma once

// Length operator on the two-point space ℋ ⊗ ℋ.
//
//   L² = 2(H⊗𝕀 + 𝕀⊗H − a⊗a† − a†⊗a)
//
// commutes with the total number operator, so it splits into blocks labelled
// by s = m + n, each spanned by |m, s−m>. Every block is diagonalized on its
// own; L is the block-wise spectral square root. Blocks with s < N contain all
// pairs (m, s−m) and are therefore exact, i.e. not affected by the truncation.

#include <algorithm>
#include <cmath>
#include <vector>

#include "moyal/fock.hpp"

namespace moyal {

/// One invariant block of L²: the pairs |first + i, total − first − i>.
struct LengthBlock {
  int total = 0;
  int first = 0;  // smallest m in the block
  RealMatrix l2;
  RealMatrix l;
  RealVector eigenvalues;
};

class LengthOperator {
 public:
  LengthOperator(FockContext ctx, std::vector<LengthBlock> blocks) : ctx_(ctx), blocks_(std::move(blocks)) {
    for (const auto& b : blocks_)
      spectrum_.insert(spectrum_.end(), b.eigenvalues.data(), b.eigenvalues.data() + b.eigenvalues.size());
    std::sort(spectrum_.begin(), spectrum_.end());
  }

  const FockContext& ctx() const { return ctx_; }
  const std::vector<LengthBlock>& blocks() const { return blocks_; }
  /// Ascending eigenvalues of L².
  const std::vector<double>& spectrum() const { return spectrum_; }
  double min_l2() const { return spectrum_.front(); }

  /// Dense N²×N² matrices, index m·N + n. Meant for tests at small N.
  RealMatrix dense_l2() const { return dense(false); }
  RealMatrix dense_l() const { return dense(true); }

 private:
  RealMatrix dense(bool root) const {
    const int n = ctx_.trunc_dim;
    RealMatrix out = RealMatrix::Zero(n * n, n * n);
    for (const auto& b : blocks_) {
      const RealMatrix& m = root ? b.l : b.l2;
      for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
          const int mi = b.first + static_cast<int>(i), mj = b.first + static_cast<int>(j);
          out(mi * n + (b.total - mi), mj * n + (b.total - mj)) = m(i, j);
        }
    }
    return out;
  }

  FockContext ctx_;
  std::vector<LengthBlock> blocks_;
  std::vector<double> spectrum_;
};

inline constexpr int kDefaultMaxLengthDim = 96;

inline LengthOperator build_length(const FockContext& ctx, int max_trunc_dim = kDefaultMaxLengthDim) {
  const int n = ctx.trunc_dim;
  if (n > max_trunc_dim)
    throw PreconditionError("build_length: trunc_dim " + std::to_string(n) + " above the configured limit " +
                            std::to_string(max_trunc_dim));
  const double theta = ctx.theta;
  std::vector<LengthBlock> blocks;
  blocks.reserve(2 * n - 1);
  for (int s = 0; s <= 2 * (n - 1); ++s) {
    LengthBlock b;
    b.total = s;
    b.first = std::max(0, s - (n - 1));
    const int last = std::min(s, n - 1);
    const int size = last - b.first + 1;
    b.l2 = RealMatrix::Zero(size, size);
    for (int i = 0; i < size; ++i) {
      const int m = b.first + i;
      const int k = s - m;
      b.l2(i, i) = 2.0 * (theta * (m + 0.5) + theta * (k + 0.5));
      // a†⊗a : |m,k> -> θ√((m+1)k) |m+1,k-1>
      if (i + 1 < size) {
        const double c = -2.0 * theta * std::sqrt(static_cast<double>(m + 1) * k);
        b.l2(i + 1, i) = c;
        b.l2(i, i + 1) = c;
      }
    }
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(b.l2);
    b.eigenvalues = es.eigenvalues();
    RealVector root = b.eigenvalues;
    for (Eigen::Index i = 0; i < root.size(); ++i) {
      if (root(i) < -ctx.tol) throw AnomalyError("build_length: negative eigenvalue of L²");
      root(i) = std::sqrt(std::max(0.0, root(i)));
    }
    b.l = es.eigenvectors() * root.asDiagonal() * es.eigenvectors().transpose();
    blocks.push_back(std::move(b));
  }
  return LengthOperator(ctx, std::move(blocks));
}

namespace detail {

/// (ω⊗ω̃)(X) for a block-diagonal X.
inline double product_state_expectation(const LengthOperator& op, const QState& s1, const QState& s2, bool root) {
  require_same_context(op.ctx(), s1.ctx(), "length");
  require_same_context(op.ctx(), s2.ctx(), "length");
  const Matrix& r1 = s1.rho();
  const Matrix& r2 = s2.rho();
  double acc = 0.0;
  for (const auto& b : op.blocks()) {
    const RealMatrix& x = root ? b.l : b.l2;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      const int mi = b.first + static_cast<int>(i), ni = b.total - mi;
      for (Eigen::Index j = 0; j < x.cols(); ++j) {
        const int mj = b.first + static_cast<int>(j), nj = b.total - mj;
        // Tr(R X) = Σ R_{ji} X_{ij}, R = ρ₁⊗ρ₂
        acc += x(i, j) * (r1(mj, mi) * r2(nj, ni)).real();
      }
    }
  }
  return acc;
}

}  // namespace detail

/// d_{L²}(ω, ω̃) = (ω⊗ω̃)(L²).
inline double d_L2(const LengthOperator& op, const QState& s1, const QState& s2) {
  return detail::product_state_expectation(op, s1, s2, false);
}

/// d_L(ω, ω̃) = (ω⊗ω̃)(L).
inline double d_L(const LengthOperator& op, const QState& s1, const QState& s2) {
  return detail::product_state_expectation(op, s1, s2, true);
}

/// Λ⁻²(ω, ω̃) = √(d_{L²}(ω,ω) d_{L²}(ω̃,ω̃)).
inline double inverse_lambda_sq(const LengthOperator& op, const QState& s1, const QState& s2) {
  return std::sqrt(d_L2(op, s1, s1) * d_L2(op, s2, s2));
}

/// Modified quantum length d'_L = √|d_{L²}(ω,ω̃) − Λ⁻²(ω,ω̃)|.
inline double modified_length(const LengthOperator& op, const QState& s1, const QState& s2) {
  return std::sqrt(std::abs(d_L2(op, s1, s2) - inverse_lambda_sq(op, s1, s2)));
}

/// 2E_m + 2E_n + |κ − κ̃|² for α_κω_m, α_κ̃ω_n.
inline double square_length_closed_form(double theta, int m, int n, cplx kappa, cplx kappa_tilde) {
  return 2.0 * theta * (m + 0.5) + 2.0 * theta * (n + 0.5) + std::norm(kappa - kappa_tilde);
}

/// Minimal length, reported both ways: √min Sp(L²) = min Sp(L) and d_{L²}(ω₀, ω₀).
struct MinimalLength {
  double min_spectrum_l;
  double vacuum_square_length;
};

inline MinimalLength minimal_length(const LengthOperator& op) {
  const auto w0 = eigenstate(op.ctx(), 0);
  return {std::sqrt(std::max(0.0, op.min_l2())), d_L2(op, w0, w0)};
}

// ---------------------------------------------------------------------------
// No modified length operator L'².

struct CounterexampleResult {
  double lhs = 0;       // 3 d'_L²(ω_ijk, ω_l)
  double rhs = 0;       // linear combination forced by a would-be operator L'²
  double residual = 0;  // lhs − rhs
  double numeric_lhs = 0;
  double numeric_rhs = 0;
  double max_route_gap = 0;  // worst |closed form − tensor trace| over the seven d'_L² terms
};

inline CounterexampleResult counterexample_L2prime(const LengthOperator& op, int i, int j, int k, int l) {
  const FockContext& ctx = op.ctx();
  const int idx[4] = {i, j, k, l};
  for (int p = 0; p < 4; ++p) {
    require(idx[p] >= 0 && idx[p] < ctx.safe_dim(), "counterexample: index outside guarded range");
    for (int q = p + 1; q < 4; ++q)
      require(std::abs(idx[p] - idx[q]) >= 2, "counterexample: indices must pairwise differ by at least 2");
  }
  auto e = [&](int m) { return energy(ctx, m); };
  auto sq = [](double x) { return x * x; };
  const double r2l = std::sqrt(2 * e(l));
  auto cf1 = [&](int a) { return sq(std::sqrt(2 * e(a)) - r2l); };
  auto cf2 = [&](int a, int b) { return sq(std::sqrt(e(a) + e(b)) - r2l); };
  const double cf3 = sq(std::sqrt(2.0 / 3.0 * (e(i) + e(j) + e(k))) - r2l);

  CounterexampleResult r;
  r.lhs = 3 * cf3;
  r.rhs = 2 * (cf2(i, j) + cf2(i, k) + cf2(j, k)) - (cf1(i) + cf1(j) + cf1(k));
  r.residual = r.lhs - r.rhs;

  const auto wl = eigenstate(ctx, l);
  auto num = [&](const std::vector<int>& ind) {
    const std::vector<cplx> ones(ind.size(), cplx(1.0));
    const auto s = ind.size() == 1 ? eigenstate(ctx, ind[0]) : superposition_state(ctx, ind, ones);
    return sq(modified_length(op, s, wl));
  };
  const double n3 = num({i, j, k});
  const double n2[3] = {num({i, j}), num({i, k}), num({j, k})};
  const double n1[3] = {num({i}), num({j}), num({k})};
  r.numeric_lhs = 3 * n3;
  r.numeric_rhs = 2 * (n2[0] + n2[1] + n2[2]) - (n1[0] + n1[1] + n1[2]);
  const double c2[3] = {cf2(i, j), cf2(i, k), cf2(j, k)};
  const double c1[3] = {cf1(i), cf1(j), cf1(k)};
  r.max_route_gap = std::abs(n3 - cf3);
  for (int p = 0; p < 3; ++p)
    r.max_route_gap = std::max({r.max_route_gap, std::abs(n2[p] - c2[p]), std::abs(n1[p] - c1[p])});
  return r;
}

// ---------------------------------------------------------------------------
// Convergence in N

struct ConvergenceCheck {
  double value = 0;       // at N
  double half_value = 0;  // at N/2
  double tolerance = 0;
  bool passed = false;
};

/// Evaluates `fn(ctx)` at N and N/2 and requires agreement within 10×`tol`.
template <class Fn>
ConvergenceCheck convergence_in_n(const FockContext& ctx, double tol, Fn&& fn) {
  ConvergenceCheck c;
  c.value = fn(ctx);
  c.half_value = fn(with_trunc_dim(ctx, ctx.trunc_dim / 2));
  c.tolerance = tol;
  c.passed = std::abs(c.value - c.half_value) < 10 * tol;
  return c;
}

}  // namespace moyal
