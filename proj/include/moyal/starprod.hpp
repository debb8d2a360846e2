#pragma once

// Moyal star product.
//
// Three routes, meant to cross-check one another:
//   * star_matrix    the product transported to the number basis, f⋆g ↦ FG;
//   * star_integral  the double integral
//        (f⋆g)(x) = (πθ)⁻² ∬ f(x+u) g(x+v) exp(−(2i/θ) u·Θ₀⁻¹·v) du dv,
//     Θ₀ = [[0,1],[−1,0]], by tensor trapezoid quadrature;
//   * star_fourier   f⋆g = F⁻¹[F f ×_θ F g], with the twisted convolution
//        (F ×_θ G)(k) = ∫ F(k′) G(k−k′) e^{−iθσ(k′,k)/2} dk′,
//     σ(x,y) = x₁y₂ − x₂y₁, F[f](k) = (2π)⁻² ∫ f e^{−ik·x} dx and
//     F⁻¹[H](x) = ∫ H e^{ik·x} dk.
// The quadratures are desk-scale oracles (grids up to a few hundred points per
// axis, Gaussian-type symbols); the matrix route is the production one.

#include <cmath>
#include <functional>
#include <numbers>
#include <string>

#include "moyal/fock.hpp"

namespace moyal {

inline constexpr double kDefaultDecayThreshold = 1e-8;

/// Symbol sampled on the uniform grid {−R + i·h : i = 0..n−1}², n = 2R/h + 1.
/// values(i, j) = f(x_i, x_j).
struct SampledSymbol {
  double radius = 0;
  double step = 0;
  Matrix values;
  double decay_cert = 0;  // max |f| on the grid boundary

  int points() const { return static_cast<int>(values.rows()); }
  double coord(int i) const { return -radius + i * step; }
  RealVector coords() const { return RealVector::LinSpaced(points(), -radius, radius); }
};

namespace detail {

inline int grid_points(double radius, double step) {
  require(radius > 0.0 && step > 0.0, "symbol grid: radius and step must be positive");
  const double cells = 2.0 * radius / step;
  const long n = std::lround(cells);
  require(std::abs(cells - n) < 1e-9 && n % 2 == 0, "symbol grid: 2R/h must be an even integer");
  return static_cast<int>(n) + 1;
}

inline double boundary_max(const Matrix& v) {
  const Eigen::Index n = v.rows() - 1;
  return std::max({v.row(0).cwiseAbs().maxCoeff(), v.row(n).cwiseAbs().maxCoeff(), v.col(0).cwiseAbs().maxCoeff(),
                   v.col(n).cwiseAbs().maxCoeff()});
}

inline void certify(const SampledSymbol& s, double threshold, const char* where) {
  if (!(s.decay_cert <= threshold))
    throw LeakageError(std::string(where) + ": boundary decay " + std::to_string(s.decay_cert) + " above threshold " +
                       std::to_string(threshold));
}

/// Every other grid point, keeping index `keep` (mod 2).
inline Matrix every_other(const Matrix& v, int keep1, int keep2) {
  const Eigen::Index n = v.rows();
  const auto s1 = Eigen::seq(keep1 % 2, n - 1, 2);
  const auto s2 = Eigen::seq(keep2 % 2, n - 1, 2);
  return v(s1, s2);
}

inline RealVector every_other(const RealVector& x, int keep) { return x(Eigen::seq(keep % 2, x.size() - 1, 2)); }

inline int grid_index(const SampledSymbol& s, double x, const char* where) {
  const double pos = (x + s.radius) / s.step;
  const long i = std::lround(pos);
  require(std::abs(pos - i) < 1e-9, std::string(where) + ": point is not a grid node");
  require(i > 0 && i < s.points() - 1, std::string(where) + ": point outside the grid interior");
  return static_cast<int>(i);
}

/// (πθ)⁻² h⁴ Σ_{u,v} f(x+u) g(x+v) e^{−(2i/θ)(u₂v₁ − u₁v₂)} on the grid xs1 × xs2.
inline cplx star_sum(const Matrix& f, const Matrix& g, const RealVector& xs1, const RealVector& xs2, double h,
                     double x1, double x2, double theta) {
  const RealVector d1 = xs1.array() - x1;  // u₁ and v₁ offsets
  const RealVector d2 = xs2.array() - x2;  // u₂ and v₂ offsets
  const double c = 2.0 / theta;
  Matrix eb(d1.size(), d2.size());
  for (Eigen::Index i = 0; i < d1.size(); ++i)
    for (Eigen::Index l = 0; l < d2.size(); ++l) eb(i, l) = std::polar(1.0, c * d1(i) * d2(l));  // (u₁, v₂)
  // e^{−(2i/θ)u₂v₁} = conj(eb)ᵀ
  // K(u₁,u₂) = Σ_{v₁,v₂} eb(u₁,v₂) g(v₁,v₂) conj(eb(v₁,u₂))
  const Matrix k = eb * g.transpose() * eb.conjugate();
  const double pre = std::pow(h * h / (std::numbers::pi * theta), 2);
  return pre * f.cwiseProduct(k).sum();
}

/// F[f] sampled on the k-grid ks: (2π)⁻² h² E f Eᵀ, E(a,i) = e^{−i k_a x_i}.
inline Matrix fourier_sum(const Matrix& f, const RealVector& xs, double h, const RealVector& ks) {
  Matrix e(ks.size(), xs.size());
  for (Eigen::Index a = 0; a < ks.size(); ++a)
    for (Eigen::Index i = 0; i < xs.size(); ++i) e(a, i) = std::polar(1.0, -ks(a) * xs(i));
  return (h * h / (4.0 * std::numbers::pi * std::numbers::pi)) * (e * f * e.transpose());
}

/// ∫dk′ F(k′)e^{ik′x} ∫dp G(p)e^{ipx} e^{−iθσ(k′,p)/2}, both sums on ks × ks.
inline cplx inverse_twisted_sum(const Matrix& ff, const Matrix& gg, const RealVector& ks, double dk, double x1,
                                double x2, double theta) {
  const Eigen::Index n = ks.size();
  Vector w1(n), w2(n);
  for (Eigen::Index a = 0; a < n; ++a) {
    w1(a) = std::polar(1.0, ks(a) * x1);
    w2(a) = std::polar(1.0, ks(a) * x2);
  }
  const Matrix gx = w1.asDiagonal() * gg * w2.asDiagonal();
  const Matrix fx = w1.asDiagonal() * ff * w2.asDiagonal();
  Matrix pa(n, n), pb(n, n);
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b) {
      pa(a, b) = std::polar(1.0, -0.5 * theta * ks(a) * ks(b));  // (k′₁, p₂)
      pb(a, b) = std::polar(1.0, 0.5 * theta * ks(a) * ks(b));   // (k′₂, p₁)
    }
  // T(k′₁,k′₂) = Σ_{p₁,p₂} pa(k′₁,p₂) gx(p₁,p₂) pb(k′₂,p₁)
  const Matrix t = pa * gx.transpose() * pb.transpose();
  return std::pow(dk, 4) * fx.cwiseProduct(t).sum();
}

}  // namespace detail

/// Samples `fn` on [−R,R]² with spacing h and certifies boundary decay.
inline SampledSymbol sample_symbol(double radius, double step, const std::function<cplx(double, double)>& fn,
                                   double decay_threshold = kDefaultDecayThreshold) {
  const int n = detail::grid_points(radius, step);
  SampledSymbol s{radius, step, Matrix(n, n), 0.0};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) s.values(i, j) = fn(s.coord(i), s.coord(j));
  if (!s.values.allFinite()) throw AnomalyError("sample_symbol: non-finite sample");
  s.decay_cert = detail::boundary_max(s.values);
  detail::certify(s, decay_threshold, "sample_symbol");
  return s;
}

/// Symbol of the vacuum projector e₀: 2 e^{−|x|²/θ}.
inline cplx vacuum_symbol(double theta, double x1, double x2) {
  return 2.0 * std::exp(-(x1 * x1 + x2 * x2) / theta);
}

/// Symbol of a multiple of e₀, evaluated at x. Rejects operators outside span{e₀}.
inline cplx vacuum_span_symbol(const Operator& op, double x1, double x2) {
  Matrix rest = op.mat;
  const cplx c = rest(0, 0);
  rest(0, 0) = 0.0;
  require(rest.cwiseAbs().maxCoeff() <= op.ctx.tol * std::max(1.0, std::abs(c)),
          "vacuum_span_symbol: operator is not a multiple of e0");
  return c * vacuum_symbol(op.ctx.theta, x1, x2);
}

/// f⋆g in the matrix basis.
inline Operator star_matrix(const Operator& f, const Operator& g) {
  require_same_context(f.ctx, g.ctx, "star_matrix");
  return Operator(f.ctx, f.mat * g.mat);
}

/// A quadrature value with an a-posteriori error bound.
struct StarValue {
  cplx value;
  double error_bound = 0;
};

/// (f⋆g)(x) by quadrature of the double integral. x must be an interior grid
/// node; the bound is |I_h − I_{2h}| plus the boundary and rounding terms.
inline StarValue star_integral(const SampledSymbol& f, const SampledSymbol& g, double x1, double x2, double theta,
                               double decay_threshold = kDefaultDecayThreshold) {
  require(theta > 0.0, "star_integral: theta must be positive");
  require(f.radius == g.radius && f.step == g.step, "star_integral: symbols on different grids");
  detail::certify(f, decay_threshold, "star_integral");
  detail::certify(g, decay_threshold, "star_integral");
  const int i0 = detail::grid_index(f, x1, "star_integral");
  const int j0 = detail::grid_index(f, x2, "star_integral");
  const RealVector xs = f.coords();
  const cplx fine = detail::star_sum(f.values, g.values, xs, xs, f.step, x1, x2, theta);
  // coarse grid through x: every other node, parity matched per axis
  const cplx coarse = detail::star_sum(detail::every_other(f.values, i0, j0), detail::every_other(g.values, i0, j0),
                                       detail::every_other(xs, i0), detail::every_other(xs, j0), 2 * f.step, x1, x2,
                                       theta);
  const double h = f.step;
  const double mass = std::pow(h * h / (std::numbers::pi * theta), 2) * f.values.cwiseAbs().sum() *
                      g.values.cwiseAbs().sum();
  const double boundary = std::pow(h * h / (std::numbers::pi * theta), 2) * 4.0 * f.points() *
                          (f.decay_cert * g.values.cwiseAbs().sum() + g.decay_cert * f.values.cwiseAbs().sum());
  const double rounding = 1e-15 * f.points() * mass;
  return {fine, std::abs(fine - coarse) + boundary + rounding};
}

/// Direct quadrature of ∫F(x′)G(x−x′)e^{−iθσ(x′,x)/2}dx′ (θ = λ_P²; θ = 0 gives
/// the ordinary convolution). x must be a grid node; G outside the grid is 0.
inline cplx twisted_convolution(const SampledSymbol& f, const SampledSymbol& g, double x1, double x2, double theta,
                                double decay_threshold = kDefaultDecayThreshold) {
  require(theta >= 0.0, "twisted_convolution: theta must be nonnegative");
  require(f.radius == g.radius && f.step == g.step, "twisted_convolution: symbols on different grids");
  detail::certify(f, decay_threshold, "twisted_convolution");
  detail::certify(g, decay_threshold, "twisted_convolution");
  const double p1 = (x1 + f.radius) / f.step, p2 = (x2 + f.radius) / f.step;
  const long i0 = std::lround(p1), j0 = std::lround(p2);
  require(std::abs(p1 - i0) < 1e-9 && std::abs(p2 - j0) < 1e-9, "twisted_convolution: point is not a grid node");
  const int n = f.points();
  const long mid = (n - 1) / 2;
  cplx acc = 0.0;
  for (int i = 0; i < n; ++i) {
    const long gi = i0 - i + mid;  // index of x₁ − x′₁
    if (gi < 0 || gi >= n) continue;
    for (int j = 0; j < n; ++j) {
      const long gj = j0 - j + mid;
      if (gj < 0 || gj >= n) continue;
      const double sigma = f.coord(i) * x2 - f.coord(j) * x1;
      acc += f.values(i, j) * g.values(gi, gj) * std::polar(1.0, -0.5 * theta * sigma);
    }
  }
  return acc * f.step * f.step;
}

/// Fourier transform F[f] on the k-grid [−K,K]² with spacing dk, certified.
inline SampledSymbol fourier_transform(const SampledSymbol& f, double k_radius, double k_step,
                                       double decay_threshold = kDefaultDecayThreshold) {
  const int n = detail::grid_points(k_radius, k_step);
  SampledSymbol out{k_radius, k_step, detail::fourier_sum(f.values, f.coords(), f.step, RealVector::LinSpaced(n, -k_radius, k_radius)), 0.0};
  out.decay_cert = detail::boundary_max(out.values);
  detail::certify(out, decay_threshold, "fourier_transform");
  return out;
}

struct FourierGrid {
  double k_radius = 12.0;
  double k_step = 0.125;
};

/// (f⋆g)(x) = F⁻¹[F f ×_θ F g](x); any θ ≥ 0 and any point x. The bound is the
/// difference with the same route on the grids coarsened by two.
inline StarValue star_fourier(const SampledSymbol& f, const SampledSymbol& g, double x1, double x2, double theta,
                              const FourierGrid& kg = {}, double decay_threshold = kDefaultDecayThreshold) {
  require(theta >= 0.0, "star_fourier: theta must be nonnegative");
  require(f.radius == g.radius && f.step == g.step, "star_fourier: symbols on different grids");
  detail::certify(f, decay_threshold, "star_fourier");
  detail::certify(g, decay_threshold, "star_fourier");
  const int nk = detail::grid_points(kg.k_radius, kg.k_step);
  const RealVector ks = RealVector::LinSpaced(nk, -kg.k_radius, kg.k_radius);
  const RealVector xs = f.coords();
  const Matrix ff = detail::fourier_sum(f.values, xs, f.step, ks);
  const Matrix gg = detail::fourier_sum(g.values, xs, f.step, ks);
  const double kdecay = std::max(detail::boundary_max(ff), detail::boundary_max(gg));
  if (!(kdecay <= decay_threshold))
    throw LeakageError("star_fourier: transform does not decay on the k-grid (" + std::to_string(kdecay) + ")");
  const cplx fine = detail::inverse_twisted_sum(ff, gg, ks, kg.k_step, x1, x2, theta);

  const RealVector xs2 = detail::every_other(xs, 0), ks2 = detail::every_other(ks, 0);
  const Matrix ff2 = detail::fourier_sum(detail::every_other(f.values, 0, 0), xs2, 2 * f.step, ks2);
  const Matrix gg2 = detail::fourier_sum(detail::every_other(g.values, 0, 0), xs2, 2 * f.step, ks2);
  const cplx coarse = detail::inverse_twisted_sum(ff2, gg2, ks2, 2 * kg.k_step, x1, x2, theta);
  const double rounding = 1e-15 * nk * std::pow(kg.k_step, 4) * ff.cwiseAbs().sum() * gg.cwiseAbs().sum();
  return {fine, std::abs(fine - coarse) + rounding + kdecay};
}

}  // namespace moyal
