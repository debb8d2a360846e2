#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "moyal/starprod.hpp"

using namespace moyal;

namespace {

cplx gauss(double x1, double x2, double c1, double c2, double w) {
  return std::exp(-((x1 - c1) * (x1 - c1) + (x2 - c2) * (x2 - c2)) / w);
}

// Smooth window, flat near the origin, below 1e-8 at |x| = 8.
double flat_window(double x1, double x2) { return std::exp(-std::pow((x1 * x1 + x2 * x2) / 43.0, 8)); }

SampledSymbol vacuum(double theta, double r = 8.0, double h = 1.0 / 16) {
  return sample_symbol(r, h, [theta](double a, double b) { return vacuum_symbol(theta, a, b); });
}

}  // namespace

TEST(StarMatrix, VacuumProjectorIdempotent) {
  const auto ctx = make_context(16, 1.0, 1e-12);
  const auto e0 = vacuum_projector(ctx);
  EXPECT_LT((star_matrix(e0, e0).mat - e0.mat).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(StarMatrix, CanonicalCommutatorOnInterior) {
  const auto ctx = make_context(16, 1.7, 1e-12);
  const auto a = annihilation(ctx), ad = creation(ctx);
  const Matrix c = interior((star_matrix(a, ad) - star_matrix(ad, a)).mat, ctx);
  EXPECT_LT((c - ctx.theta * Matrix::Identity(c.rows(), c.cols())).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(StarMatrix, Associativity) {
  const auto ctx = make_context(8, 1.0, 1e-12);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  auto rnd = [&] {
    Matrix m(8, 8);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = cplx(nd(rng), nd(rng));
    return Operator(ctx, m);
  };
  const auto f = rnd(), g = rnd(), h = rnd();
  EXPECT_LT((star_matrix(star_matrix(f, g), h).mat - star_matrix(f, star_matrix(g, h)).mat).cwiseAbs().maxCoeff(),
            1e-12);
}

TEST(StarMatrix, ContextMismatch) {
  EXPECT_THROW(star_matrix(identity(make_context(8, 1.0, 1e-12)), identity(make_context(8, 2.0, 1e-12))),
               ContextMismatch);
}

TEST(SampledSymbolTest, DecayCertification) {
  const auto s = vacuum(1.0);
  EXPECT_EQ(s.points(), 257);
  EXPECT_LT(s.decay_cert, 1e-8);
  EXPECT_THROW(sample_symbol(4.0, 0.125, [](double a, double b) { return gauss(a, b, 0, 0, 4.0); }), LeakageError);
  EXPECT_THROW(sample_symbol(4.0, 0.3, [](double, double) { return cplx(0.0); }), PreconditionError);
}

TEST(StarIntegral, VacuumProjectorMatchesMatrixRoute) {
  const double theta = 1.0;
  const auto ctx = make_context(16, theta, 1e-12);
  const auto e0 = vacuum_projector(ctx);
  const auto prod = star_matrix(e0, e0);
  const auto f0 = vacuum(theta);
  for (auto [x1, x2] : {std::pair{0.0, 0.0}, {0.25, 0.5}, {-0.75, 0.125}, {1.0, -1.0}}) {
    const auto r = star_integral(f0, f0, x1, x2, theta);
    EXPECT_LE(r.error_bound, 1e-5);
    EXPECT_LE(std::abs(r.value - vacuum_span_symbol(prod, x1, x2)), std::max(r.error_bound, 1e-12)) << x1 << "," << x2;
  }
  EXPECT_NEAR(star_integral(f0, f0, 0.0, 0.0, theta).value.real(), 2.0, 1e-10);
}

TEST(StarIntegral, ThetaScaling) {
  for (double theta : {0.5, 2.0}) {
    const auto f0 = vacuum(theta);
    const auto r = star_integral(f0, f0, 0.5, -0.25, theta);
    EXPECT_NEAR(std::abs(r.value - vacuum_symbol(theta, 0.5, -0.25)), 0.0, std::max(r.error_bound, 1e-10));
  }
}

TEST(StarIntegral, AnnihilatorOnVacuum) {
  // z⋆f₀ ↦ a e₀ = 0 and f₀⋆z̄ ↦ e₀ a† = 0; z is windowed to pass the decay check.
  const double theta = 1.0;
  const auto f0 = vacuum(theta);
  const auto z = sample_symbol(8.0, 1.0 / 16, [](double a, double b) {
    return cplx(a, b) / std::numbers::sqrt2 * flat_window(a, b);
  });
  const auto zbar = sample_symbol(8.0, 1.0 / 16, [](double a, double b) {
    return cplx(a, -b) / std::numbers::sqrt2 * flat_window(a, b);
  });
  for (auto [x1, x2] : {std::pair{0.0, 0.0}, {0.5, 0.25}}) {
    EXPECT_LT(std::abs(star_integral(z, f0, x1, x2, theta).value), 1e-6);
    EXPECT_LT(std::abs(star_integral(f0, zbar, x1, x2, theta).value), 1e-6);
    // the other order is not zero: z̄⋆f₀ = 2 z̄ f₀
    const cplx zb = cplx(x1, -x2) / std::numbers::sqrt2;
    EXPECT_LT(std::abs(star_integral(zbar, f0, x1, x2, theta).value - 2.0 * zb * vacuum_symbol(theta, x1, x2)), 1e-6);
  }
}

TEST(StarIntegral, UnitIsWindowedConstant) {
  const double theta = 1.0;
  auto fn = [](double a, double b) { return gauss(a, b, 0.5, -0.25, 1.0) * cplx(1.0, 0.3 * a); };
  const auto f = sample_symbol(8.0, 1.0 / 16, fn);
  const auto one = sample_symbol(8.0, 1.0 / 16, [](double a, double b) { return cplx(flat_window(a, b)); });
  for (auto [x1, x2] : {std::pair{0.0, 0.0}, {0.5, -0.25}, {1.0, 0.5}}) {
    const auto r = star_integral(f, one, x1, x2, theta);
    EXPECT_LT(std::abs(r.value - fn(x1, x2)), 1e-6);
  }
}

TEST(StarIntegral, Preconditions) {
  const auto f0 = vacuum(1.0);
  EXPECT_THROW(star_integral(f0, f0, 0.01, 0.0, 1.0), PreconditionError);
  EXPECT_THROW(star_integral(f0, f0, 8.0, 0.0, 1.0), PreconditionError);
  auto bad = f0;
  bad.decay_cert = 1.0;
  EXPECT_THROW(star_integral(bad, f0, 0.0, 0.0, 1.0), LeakageError);
  EXPECT_THROW(star_integral(f0, vacuum(1.0, 8.0, 0.125), 0.0, 0.0, 1.0), PreconditionError);
}

TEST(TwistedConvolution, OrdinaryConvolutionAtZeroTheta) {
  const auto f = sample_symbol(8.0, 1.0 / 16, [](double a, double b) { return gauss(a, b, 0, 0, 1.0); });
  const auto g = sample_symbol(8.0, 1.0 / 16, [](double a, double b) { return gauss(a, b, 0, 0, 0.5); });
  // ∫ e^{−|y|²/p} e^{−|x−y|²/q} dy = π pq/(p+q) e^{−|x|²/(p+q)}
  for (auto [x1, x2] : {std::pair{0.0, 0.0}, {0.5, 0.25}, {-1.0, 1.5}}) {
    const double exact = std::numbers::pi * 0.5 / 1.5 * std::exp(-(x1 * x1 + x2 * x2) / 1.5);
    EXPECT_NEAR(std::abs(twisted_convolution(f, g, x1, x2, 0.0) - exact), 0.0, 1e-12);
  }
}

TEST(TwistedConvolution, CenteredGaussiansAtOriginAreReal) {
  const auto f = sample_symbol(8.0, 1.0 / 16, [](double a, double b) { return gauss(a, b, 0, 0, 1.0); });
  const auto g = sample_symbol(8.0, 1.0 / 16, [](double a, double b) { return gauss(a, b, 0, 0, 0.7); });
  const cplx v = twisted_convolution(f, g, 0.0, 0.0, 1.0);
  EXPECT_LT(std::abs(v.imag()), 1e-14);
  EXPECT_GT(v.real(), 0.0);
  // off-center the phase matters
  const cplx w = twisted_convolution(f, sample_symbol(8.0, 1.0 / 16, [](double a, double b) {
                                       return gauss(a, b, 1.0, 0, 0.7);
                                     }),
                                     0.5, 0.5, 1.0);
  EXPECT_GT(std::abs(w.imag()), 1e-3);
}

TEST(StarFourier, RoundTripAgainstIntegral) {
  const double theta = 1.0;
  const auto f = sample_symbol(8.0, 1.0 / 16, [](double a, double b) { return gauss(a, b, 1.0, 0, 1.0) * cplx(1.0, 0.3 * a); });
  const auto g = sample_symbol(8.0, 1.0 / 16, [](double a, double b) { return gauss(a, b, 0, 1.0, 0.7); });
  for (auto [x1, x2] : {std::pair{0.25, 0.5}, {0.0, 0.0}, {-0.5, 1.0}}) {
    const auto direct = star_integral(f, g, x1, x2, theta);
    const auto viaf = star_fourier(f, g, x1, x2, theta);
    EXPECT_LT(std::abs(direct.value - viaf.value), 1e-6);
    EXPECT_LE(std::abs(direct.value - viaf.value), direct.error_bound + viaf.error_bound + 1e-12);
  }
}

TEST(StarFourier, PointwiseProductAtZeroTheta) {
  auto fn = [](double a, double b) { return gauss(a, b, 1.0, 0, 1.0); };
  auto gn = [](double a, double b) { return gauss(a, b, 0, 1.0, 0.7); };
  const auto f = sample_symbol(8.0, 1.0 / 16, fn), g = sample_symbol(8.0, 1.0 / 16, gn);
  const auto r = star_fourier(f, g, 0.3, 0.4, 0.0);
  EXPECT_LT(std::abs(r.value - fn(0.3, 0.4) * gn(0.3, 0.4)), 1e-9);
}

TEST(StarFourier, CommutativeLimitSweep) {
  auto fn = [](double a, double b) { return gauss(a, b, 1.0, 0, 1.0); };
  auto gn = [](double a, double b) { return gauss(a, b, 0, 1.0, 0.7); };
  const auto f = sample_symbol(8.0, 1.0 / 16, fn), g = sample_symbol(8.0, 1.0 / 16, gn);
  const double x1 = 0.5, x2 = 0.5;
  double prev = 1e300;
  for (double theta : {1.0, 0.5, 0.25, 0.125, 0.0625}) {
    const double gap = std::abs(star_fourier(f, g, x1, x2, theta).value - fn(x1, x2) * gn(x1, x2));
    EXPECT_LT(gap, prev) << theta;
    prev = gap;
  }
  EXPECT_LT(prev, 0.05);
}

TEST(StarFourier, NoncommutativityIsLinearInTheta) {
  auto fn = [](double a, double b) { return gauss(a, b, 1.0, 0, 1.0); };
  auto gn = [](double a, double b) { return gauss(a, b, 0, 1.0, 0.7); };
  const auto f = sample_symbol(6.0, 0.125, fn), g = sample_symbol(6.0, 0.125, gn);
  std::vector<double> lx, ly;
  for (double theta : {0.0125, 0.025, 0.05, 0.1}) {
    double worst = 0.0;
    for (double x1 : {0.0, 0.5, 1.0})
      for (double x2 : {0.0, 0.5, 1.0})
        worst = std::max(worst, std::abs(star_fourier(f, g, x1, x2, theta).value - star_fourier(g, f, x1, x2, theta).value));
    lx.push_back(std::log(theta));
    ly.push_back(std::log(worst));
  }
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / lx.size();
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / ly.size();
  double num = 0, den = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    num += (lx[i] - mx) * (ly[i] - my);
    den += (lx[i] - mx) * (lx[i] - mx);
  }
  EXPECT_NEAR(num / den, 1.0, 0.05);
}
