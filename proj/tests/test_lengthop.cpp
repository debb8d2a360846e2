#include <gtest/gtest.h>

#include <unsupported/Eigen/KroneckerProduct>

#include <random>

#include "moyal/lengthop.hpp"

using namespace moyal;

namespace {

const LengthOperator& length64() {
  static const LengthOperator op = build_length(make_context(64, 1.0, 1e-10));
  return op;
}

}  // namespace

TEST(LengthOperator, BlockAssemblyMatchesKroneckerFormula) {
  // Oracle: the textbook tensor-product formula assembled densely.
  const auto ctx = make_context(10, 1.3, 1e-10);
  const RealMatrix a = lowering_matrix(10, ctx.lambda_p()).real();
  const RealMatrix ad = a.transpose();
  const RealMatrix h = hamiltonian(ctx).mat.real();
  const RealMatrix id = RealMatrix::Identity(10, 10);
  const RealMatrix l2 = 2.0 * (RealMatrix(Eigen::kroneckerProduct(h, id)) + RealMatrix(Eigen::kroneckerProduct(id, h)) -
                               RealMatrix(Eigen::kroneckerProduct(a, ad)) - RealMatrix(Eigen::kroneckerProduct(ad, a)));
  const auto op = build_length(ctx);
  EXPECT_LT((op.dense_l2() - l2).cwiseAbs().maxCoeff(), 1e-12);

  Eigen::SelfAdjointEigenSolver<RealMatrix> es(l2);
  const RealMatrix root =
      es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
  EXPECT_LT((op.dense_l() - root).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LT((op.dense_l() * op.dense_l() - op.dense_l2()).cwiseAbs().maxCoeff(), 100 * ctx.tol);
  EXPECT_NEAR(op.spectrum().front(), es.eigenvalues().minCoeff(), 1e-10);
  EXPECT_EQ(op.spectrum().size(), 100u);
}

TEST(LengthOperator, MinimalEigenvalue) {
  EXPECT_NEAR(build_length(make_context(32, 1.0, 1e-10)).min_l2(), 2.0, 1e-6);
  EXPECT_NEAR(build_length(make_context(32, 4.0, 1e-10)).min_l2(), 8.0, 4e-6);
  EXPECT_GE(length64().spectrum().front(), -1e-10);
}

TEST(LengthOperator, VacuumDiagonalEntry) {
  const auto& op = length64();
  const auto w0 = eigenstate(op.ctx(), 0);
  EXPECT_DOUBLE_EQ(d_L2(op, w0, w0), 2.0);
  const auto ml = minimal_length(op);
  EXPECT_NEAR(ml.min_spectrum_l, std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(ml.vacuum_square_length, 2.0, 1e-12);
}

TEST(LengthOperator, SizeLimit) {
  EXPECT_THROW(build_length(make_context(128, 1.0, 1e-10)), PreconditionError);
  EXPECT_NO_THROW(build_length(make_context(128, 1.0, 1e-10), 128));
}

TEST(SquareLength, Examples) {
  const auto& op = length64();
  const auto& ctx = op.ctx();
  const auto w1 = eigenstate(ctx, 1);
  const auto moved = displace(eigenstate(ctx, 2), 2.0);
  EXPECT_NEAR(d_L2(op, w1, moved), 12.0, 1e-8);
  EXPECT_NEAR(d_L2(op, eigenstate(ctx, 0), eigenstate(ctx, 0)), 2.0, 1e-12);
  EXPECT_NEAR(square_length_closed_form(1.0, 1, 2, 0.0, 2.0), 12.0, 1e-15);
}

TEST(SquareLength, TranslationInvariance) {
  const auto& op = length64();
  const auto& ctx = op.ctx();
  const cplx gap(0.8, -0.4);
  const double ref = d_L2(op, eigenstate(ctx, 1), displace(eigenstate(ctx, 3), gap));
  for (cplx mu : {cplx(0.5, 0.0), cplx(-1.0, 1.0), cplx(0.0, -1.5)}) {
    const double v = d_L2(op, displace(eigenstate(ctx, 1), mu), displace(eigenstate(ctx, 3), mu + gap));
    EXPECT_NEAR(v, ref, 1e-8);
  }
}

TEST(SquareLength, ClosedFormOnSampledGrid) {
  const auto& op = length64();
  const auto& ctx = op.ctx();
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> lvl(0, 6);
  std::uniform_real_distribution<double> u(-1.4, 1.4);
  for (int trial = 0; trial < 25; ++trial) {
    const int m = lvl(rng), n = lvl(rng);
    const cplx k(u(rng), u(rng)), kt(u(rng), u(rng));
    const auto s1 = displace(eigenstate(ctx, m), k);
    const auto s2 = displace(eigenstate(ctx, n), kt);
    EXPECT_NEAR(d_L2(op, s1, s2), square_length_closed_form(1.0, m, n, k, kt), 1e-6);
  }
}

TEST(SquareLength, Symmetry) {
  const auto& op = length64();
  const auto& ctx = op.ctx();
  const auto s1 = displace(superposition_state(ctx, {0, 1, 3}, {1.0, cplx(0.2, 0.7), -0.5}), cplx(0.3, 0.9));
  const auto s2 = mixed_state({0.4, 0.6}, {coherent_state(ctx, cplx(-0.5, 0.2)), eigenstate(ctx, 2)});
  EXPECT_NEAR(d_L2(op, s1, s2), d_L2(op, s2, s1), 1e-12);
  EXPECT_NEAR(d_L(op, s1, s2), d_L(op, s2, s1), 1e-12);
}

TEST(QuantumLength, Examples) {
  const auto& op = length64();
  const auto& ctx = op.ctx();
  const auto w0 = eigenstate(ctx, 0);
  EXPECT_NEAR(d_L(op, w0, w0), std::sqrt(2.0), 1e-6);
  const auto w1 = eigenstate(ctx, 1);
  EXPECT_NEAR(d_L2(op, w1, w1), 6.0, 1e-12);
  EXPECT_LT(d_L(op, w1, w1), std::sqrt(6.0) - 1e-6);
  for (double k : {0.5, 1.0, 2.0}) {
    const auto moved = displace(w0, k);
    EXPECT_LT(d_L(op, w0, moved), std::sqrt(2.0 + k * k) - 1e-6);
  }
}

TEST(QuantumLength, BoundAndEqualityOnlyAtVacuumPair) {
  const auto& op = length64();
  const auto& ctx = op.ctx();
  for (int m = 0; m <= 6; ++m)
    for (int n = 0; n <= 6; ++n) {
      const auto s = eigenstate(ctx, m), t = eigenstate(ctx, n);
      const double gap = std::sqrt(d_L2(op, s, t)) - d_L(op, s, t);
      EXPECT_GE(gap, -1e-12);
      if (m == 0 && n == 0)
        EXPECT_LT(gap, 1e-6);
      else
        EXPECT_GT(gap, 1e-6) << m << "," << n;
    }
}

TEST(QuantumLength, DiagonalNeverVanishes) {
  const auto& op = length64();
  const auto& ctx = op.ctx();
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  std::uniform_int_distribution<int> lvl(0, 8);
  for (int trial = 0; trial < 20; ++trial) {
    const auto s = displace(superposition_state(ctx, {lvl(rng), 9 + lvl(rng)}, {cplx(u(rng), u(rng)), 1.0}),
                            cplx(u(rng), u(rng)));
    EXPECT_GE(d_L(op, s, s), std::sqrt(2.0) * ctx.lambda_p() - 1e-6);
  }
}

TEST(ModifiedLength, Examples) {
  const auto& op = length64();
  const auto& ctx = op.ctx();
  for (int m : {0, 1, 5}) EXPECT_NEAR(modified_length(op, eigenstate(ctx, m), eigenstate(ctx, m)), 0.0, 1e-7);
  EXPECT_NEAR(modified_length(op, eigenstate(ctx, 1), eigenstate(ctx, 2)), 0.5040171699309126, 1e-10);
  const auto w0 = eigenstate(ctx, 0);
  EXPECT_NEAR(modified_length(op, w0, displace(w0, cplx(0.0, 2.0))), 2.0, 1e-7);
}

TEST(Counterexample, ClosedFormValues) {
  const auto op = build_length(make_context(32, 1.0, 1e-10));
  const auto r = counterexample_L2prime(op, 0, 2, 4, 6);
  // frozen from direct evaluation with E_m = m + 1/2
  EXPECT_NEAR(r.lhs, 5.6264535102087, 1e-10);
  EXPECT_NEAR(r.rhs, 3.582334656843395, 1e-10);
  EXPECT_NEAR(r.residual, 2.0441188533653047, 1e-10);
  EXPECT_GT(r.residual, 1.0);
  EXPECT_LT(r.max_route_gap, 1e-6);
  EXPECT_NEAR(r.numeric_lhs - r.numeric_rhs, r.residual, 1e-5);
}

TEST(Counterexample, RejectsAdjacentIndices) {
  const auto op = build_length(make_context(32, 1.0, 1e-10));
  EXPECT_THROW(counterexample_L2prime(op, 0, 1, 4, 6), PreconditionError);
  EXPECT_THROW(counterexample_L2prime(op, 0, 2, 4, 5), PreconditionError);
  EXPECT_THROW(counterexample_L2prime(op, 0, 2, 4, 40), PreconditionError);
}

TEST(Convergence, LengthValuesStableUnderHalving) {
  const auto ctx = make_context(64, 1.0, 1e-10);
  const auto c1 = convergence_in_n(ctx, 1e-6, [](const FockContext& c) {
    const auto op = build_length(c);
    return d_L(op, eigenstate(c, 1), displace(eigenstate(c, 2), cplx(1.0, 0.5)));
  });
  EXPECT_TRUE(c1.passed) << c1.value << " vs " << c1.half_value;
  const auto c2 = convergence_in_n(ctx, 1e-6, [](const FockContext& c) { return build_length(c).min_l2(); });
  EXPECT_TRUE(c2.passed);
}
