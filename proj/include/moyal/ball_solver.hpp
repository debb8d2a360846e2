#pragma once

// Maximize cᵀx subject to ‖𝒜x‖ ≤ 1, where 𝒜 maps real parameters to a list of
// complex blocks and ‖·‖ is the largest spectral norm over the blocks.
//
// Every recorded candidate is x/‖𝒜x‖ with the norm evaluated exactly, so the
// returned value is a certified lower bound of the supremum.
//
// A map type M provides
//     int dim() const;
//     BlockImage apply(const RealVector& x) const;
//     RealVector adjoint(const BlockImage& y) const;   // ∂/∂x Re⟨y, 𝒜x⟩
// with ⟨y, z⟩ = Σ_b tr(y_bᴴ z_b).

#include <concepts>
#include <random>
#include <vector>

#include "moyal/linalg.hpp"

namespace moyal {

using BlockImage = std::vector<Matrix>;

template <class M>
concept BlockLinearMap = requires(const M& m, const RealVector& x, const BlockImage& y) {
  { m.dim() } -> std::convertible_to<int>;
  { m.apply(x) } -> std::convertible_to<BlockImage>;
  { m.adjoint(y) } -> std::convertible_to<RealVector>;
};

struct BallSolverConfig {
  int iterations = 2000;       // subgradient steps per restart
  int restarts = 8;            // subgradient restarts, seeds seed .. seed+restarts-1
  unsigned seed = 0;
  int admm_iterations = 300;
  double admm_rho = 0.1;
  int cg_iterations = 30;
};

struct BallSolution {
  double value = 0;  // cᵀx at the returned point
  RealVector x;      // ‖𝒜x‖ ≤ 1
  double norm = 0;   // ‖𝒜x‖ as evaluated
  double admm_value = 0;
  double subgradient_value = 0;
};

inline double block_norm(const BlockImage& y) {
  double n = 0.0;
  for (const auto& b : y) n = std::max(n, spectral_norm(b));
  return n;
}

inline double block_dot(const BlockImage& y, const BlockImage& z) {
  double s = 0.0;
  for (std::size_t b = 0; b < y.size(); ++b) s += real_dot(y[b], z[b]);
  return s;
}

inline BlockImage block_axpy(double s, const BlockImage& y, const BlockImage& z) {
  BlockImage out = z;
  for (std::size_t b = 0; b < y.size(); ++b) out[b] += s * y[b];
  return out;
}

inline BlockImage block_clip(const BlockImage& y, double radius) {
  BlockImage out;
  out.reserve(y.size());
  for (const auto& b : y) out.push_back(clip_singular_values(b, radius));
  return out;
}

namespace detail {

template <BlockLinearMap M>
void record(const M& map, const RealVector& c, const RealVector& x, BallSolution& best, double& slot) {
  const double n = block_norm(map.apply(x));
  if (!(n > 0.0)) return;
  const double v = c.dot(x) / n;
  if (v > slot) slot = v;
  if (v > best.value) {
    best.value = v;
    best.x = x / n;
    best.norm = 1.0;
  }
}

/// Solves (ρ𝒜ᵀ𝒜 + εI) x = b by conjugate gradients from x.
template <BlockLinearMap M>
void cg_solve(const M& map, double rho, double eps, const RealVector& b, RealVector& x, int iters) {
  auto op = [&](const RealVector& v) -> RealVector { return rho * map.adjoint(map.apply(v)) + eps * v; };
  RealVector r = b - op(x);
  RealVector p = r;
  double rs = r.squaredNorm();
  const double stop = 1e-24 * std::max(1.0, b.squaredNorm());
  for (int k = 0; k < iters && rs > stop; ++k) {
    const RealVector ap = op(p);
    const double alpha = rs / p.dot(ap);
    x += alpha * p;
    r -= alpha * ap;
    const double rn = r.squaredNorm();
    p = r + (rn / rs) * p;
    rs = rn;
  }
}

/// Top singular pair of the block with the largest norm, by power iteration
/// warm-started from `warm`; returns the rank-one gradient u vᴴ of the norm.
inline BlockImage top_singular_direction(const BlockImage& y, std::vector<Vector>& warm) {
  std::size_t arg = 0;
  double top = -1.0;
  for (std::size_t b = 0; b < y.size(); ++b) {
    Vector& v = warm[b];
    if (v.size() != y[b].cols() || v.norm() == 0.0) v = Vector::Ones(y[b].cols()) / std::sqrt(double(y[b].cols()));
    double s = 0.0;
    for (int it = 0; it < 12; ++it) {
      Vector w = y[b].adjoint() * (y[b] * v);
      const double wn = w.norm();
      if (wn == 0.0) break;
      v = w / wn;
      s = std::sqrt(wn);
    }
    if (s > top) top = s, arg = b;
  }
  BlockImage g;
  g.reserve(y.size());
  for (const auto& b : y) g.push_back(Matrix::Zero(b.rows(), b.cols()));
  const Vector& v = warm[arg];
  Vector u = y[arg] * v;
  const double un = u.norm();
  if (un > 0.0) g[arg] = (u / un) * v.adjoint();
  return g;
}

}  // namespace detail

/// ADMM on {max cᵀx : 𝒜x = Z, ‖Z‖ ≤ 1}.
template <BlockLinearMap M>
void admm_ball(const M& map, const RealVector& c, const BallSolverConfig& cfg, BallSolution& best) {
  const int n = map.dim();
  const double rho = cfg.admm_rho;
  RealVector x = RealVector::Zero(n);
  BlockImage z = map.apply(x);
  BlockImage u = z;
  for (int k = 0; k < cfg.admm_iterations; ++k) {
    const RealVector b = c + rho * map.adjoint(block_axpy(-1.0, u, z));
    detail::cg_solve(map, rho, 1e-8, b, x, cfg.cg_iterations);
    const BlockImage ax = map.apply(x);
    z = block_clip(block_axpy(1.0, u, ax), 1.0);
    u = block_axpy(1.0, ax, block_axpy(-1.0, z, u));
    detail::record(map, c, x, best, best.admm_value);
  }
}

/// Seeded subgradient ascent on the homogeneous ratio cᵀx/‖𝒜x‖ with
/// diminishing steps.
template <BlockLinearMap M>
void subgradient_ball(const M& map, const RealVector& c, int iterations, unsigned seed, BallSolution& best) {
  const int n = map.dim();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  RealVector x(n);
  for (int i = 0; i < n; ++i) x(i) = nd(rng);
  x = x / std::max(x.norm(), 1e-300) + 5.0 * c / std::max(c.norm(), 1e-300);
  std::vector<Vector> warm(1);
  for (int k = 0; k < iterations; ++k) {
    const BlockImage y = map.apply(x);
    if (warm.size() != y.size()) warm.assign(y.size(), Vector());
    const BlockImage dir = detail::top_singular_direction(y, warm);
    const double s = block_dot(dir, y);  // power-iteration estimate of ‖𝒜x‖
    if (!(s > 0.0)) break;
    const double ratio = c.dot(x) / s;
    // the estimate is a lower bound of the norm; verify before recording
    if (ratio > best.subgradient_value) detail::record(map, c, x, best, best.subgradient_value);
    const RealVector g = (c - ratio * map.adjoint(dir)) / s;
    const double gn = g.norm();
    if (gn == 0.0) break;
    x += (0.5 / std::sqrt(k + 1.0)) * (x.norm() / gn) * g;
  }
}

/// ADMM followed by seeded subgradient restarts; results merged by max.
/// `candidates` are recorded first (rescaled like every other point).
template <BlockLinearMap M>
BallSolution maximize_over_ball(const M& map, const RealVector& c, const BallSolverConfig& cfg,
                                const std::vector<RealVector>& candidates = {}) {
  BallSolution best;
  best.x = RealVector::Zero(map.dim());
  if (c.norm() == 0.0) return best;
  double seeded = 0.0;
  for (const auto& x : candidates) {
    detail::record(map, c, x, best, seeded);
    detail::record(map, c, (-x).eval(), best, seeded);
  }
  admm_ball(map, c, cfg, best);
  for (int r = 0; r < cfg.restarts; ++r) subgradient_ball(map, c, cfg.iterations, cfg.seed + r, best);
  best.norm = block_norm(map.apply(best.x));
  best.value = c.dot(best.x);
  return best;
}

}  // namespace moyal
