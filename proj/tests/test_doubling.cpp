#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "moyal/doubling.hpp"

using namespace moyal;

namespace {

const double kSqrt2 = std::numbers::sqrt2;

FockContext ctx32() { return make_context(32, 1.0, 1e-10); }
FockContext ctx48() { return make_context(48, 1.0, 1e-10); }
FockContext ctx64() { return make_context(64, 1.0, 1e-10); }

BallSolverConfig quick_cfg() {
  BallSolverConfig cfg;
  cfg.restarts = 1;
  cfg.iterations = 300;
  return cfg;
}

Matrix random_hermitian(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  Matrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = cplx(nd(rng), nd(rng));
  return (0.5 * (a + a.adjoint())).eval();
}

RealVector random_vector(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  RealVector x(n);
  for (int i = 0; i < n; ++i) x(i) = nd(rng);
  return x;
}

BlockImage random_image(const BlockImage& shape, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  BlockImage y = shape;
  for (auto& b : y)
    for (Eigen::Index i = 0; i < b.rows(); ++i)
      for (Eigen::Index j = 0; j < b.cols(); ++j) b(i, j) = cplx(nd(rng), nd(rng));
  return y;
}

QState random_diagonal_state(const FockContext& ctx, std::mt19937_64& rng, int levels) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> w;
  std::vector<QState> parts;
  for (int k = 0; k < levels; ++k) {
    w.push_back(u(rng));
    parts.push_back(eigenstate(ctx, k));
  }
  double s = 0;
  for (double x : w) s += x;
  for (double& x : w) x /= s;
  return mixed_state(w, parts);
}

}  // namespace

TEST(MakeDoubled, ReferenceLambda) {
  const double l0 = reference_lambda(1.0, 0);
  EXPECT_NEAR(l0, 1.0 / kSqrt2, 1e-15);
  EXPECT_NEAR(1.0 / (l0 * l0), 2.0, 1e-12);
  const double l1 = reference_lambda(1.0, 1);
  EXPECT_NEAR(1.0 / (l1 * l1), 6.0, 1e-12);
  const DiracCalculus calc(ctx32());
  const LengthOperator op = build_length(calc.ctx());
  for (int m = 0; m < 4; ++m) {
    const QState w = eigenstate(calc.ctx(), m);
    const double l = reference_lambda(1.0, m);
    EXPECT_NEAR(1.0 / (l * l), d_L2(op, w, w), 1e-9);
  }
}

TEST(MakeDoubled, ZeroLambdaRejected) {
  const DiracCalculus calc(ctx32());
  EXPECT_THROW(make_doubled(calc, cplx(0.0)), PreconditionError);
  EXPECT_NO_THROW(make_doubled(calc, cplx(0.3, -0.4)));
}

TEST(SheetStateTest, SheetLabel) {
  const QState w = eigenstate(ctx32(), 0);
  EXPECT_THROW(SheetState(w, 0), PreconditionError);
  EXPECT_THROW(SheetState(w, 3), PreconditionError);
  EXPECT_EQ(SheetState(w, 2).sheet, 2);
}

TEST(DoubledCommutator, SheetBlocksAndInternalPart) {
  const DiracCalculus calc(ctx32());
  const DoubledDirac dd = make_doubled(calc, cplx(0.6, 0.8));
  std::mt19937_64 rng(3);
  const int n = calc.ctx().trunc_dim;
  const Matrix a1 = random_hermitian(n, rng), a2 = random_hermitian(n, rng);
  const Matrix c = dd.commutator(a1, a2);
  EXPECT_LT((c.topLeftCorner(2 * n, 2 * n) - calc.dirac_commutator(a1)).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((c.bottomRightCorner(2 * n, 2 * n) - calc.dirac_commutator(a2)).cwiseAbs().maxCoeff(), 1e-12);
  // D′ assembled directly; [D′, A′] = D′A′ − A′D′ on the internal part
  Matrix gamma_di = Matrix::Zero(4 * n, 4 * n);
  for (int k = 0; k < n; ++k) {
    gamma_di(k, 2 * n + k) = std::conj(dd.lambda());
    gamma_di(2 * n + k, k) = dd.lambda();
    gamma_di(n + k, 3 * n + k) = -std::conj(dd.lambda());
    gamma_di(3 * n + k, n + k) = -dd.lambda();
  }
  Matrix big = Matrix::Zero(4 * n, 4 * n);
  big.block(0, 0, n, n) = a1;
  big.block(n, n, n, n) = a1;
  big.block(2 * n, 2 * n, n, n) = a2;
  big.block(3 * n, 3 * n, n, n) = a2;
  const Matrix internal = gamma_di * big - big * gamma_di;
  Matrix c_int = c;
  c_int.topLeftCorner(2 * n, 2 * n).setZero();
  c_int.bottomRightCorner(2 * n, 2 * n).setZero();
  EXPECT_LT((c_int - internal).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(DoubledCommutator, SeminormOfSheetConstants) {
  const DiracCalculus calc(ctx32());
  const DoubledDirac dd = make_doubled(calc, cplx(1.0 / kSqrt2));
  const Operator one = identity(calc.ctx());
  EXPECT_NEAR(dd.seminorm(0.7 * one, -0.7 * one), 1.4 / kSqrt2, 1e-12);
  const Operator a = optimal_element_translation(calc, 0.0);
  EXPECT_NEAR(dd.seminorm(a, a), calc.lipschitz_seminorm(a), 1e-10);
}

TEST(PairMapTest, MatchesAssembledCommutatorAndAdjoint) {
  const DiracCalculus calc(ctx32());
  const DoubledDirac dd = make_doubled(calc, cplx(0.3, 0.5));
  const PairMap map(dd);
  std::mt19937_64 rng(11);
  const RealVector x = random_vector(map.dim(), rng);
  const BlockImage y = map.apply(x);
  const auto [b1, b2] = map.split(x);
  const Matrix full = dd.interior4(dd.commutator(embed(calc.ctx(), b1).mat, embed(calc.ctx(), b2).mat));
  EXPECT_LT((y[0] - full).cwiseAbs().maxCoeff(), 1e-10);
  const BlockImage w = random_image(y, rng);
  EXPECT_NEAR(block_dot(w, y), map.adjoint(w).dot(x), 1e-8 * std::max(1.0, std::abs(block_dot(w, y))));
}

TEST(DiagonalPairMapTest, BlockNormEqualsAssembledNorm) {
  const DiracCalculus calc(ctx32());
  const DoubledDirac dd = make_doubled(calc, cplx(0.4, -0.2));
  const DiagonalPairMap map(dd);
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 5; ++trial) {
    const RealVector x = random_vector(map.dim(), rng);
    const auto [a1, a2] = map.split(x, calc.ctx().trunc_dim);
    const double assembled = spectral_norm(dd.interior4(dd.commutator(a1, a2)));
    EXPECT_NEAR(block_norm(map.apply(x)), assembled, 1e-10 * assembled);
    const Operator o1(calc.ctx(), a1, true), o2(calc.ctx(), a2, true);
    EXPECT_NEAR(dd.seminorm(o1, o2), assembled, 1e-12 * assembled);
  }
}

TEST(DiagonalPairMapTest, Adjoint) {
  const DiracCalculus calc(ctx32());
  const DoubledDirac dd = make_doubled(calc, cplx(0.4, -0.2));
  const DiagonalPairMap map(dd);
  std::mt19937_64 rng(6);
  const RealVector x = random_vector(map.dim(), rng);
  const BlockImage y = map.apply(x);
  const BlockImage w = random_image(y, rng);
  EXPECT_NEAR(block_dot(w, y), map.adjoint(w).dot(x), 1e-9 * std::max(1.0, std::abs(block_dot(w, y))));
}

TEST(DoubledDistance, Examples) {
  const DiracCalculus calc(ctx48());
  const auto& ctx = calc.ctx();
  const DoubledDirac dd = make_doubled(calc, cplx(1.0 / kSqrt2));
  const QState w0 = eigenstate(ctx, 0), w1 = eigenstate(ctx, 1);
  EXPECT_NEAR(doubled_distance(dd, SheetState(w0, 1), SheetState(w0, 2)).value, kSqrt2, 1e-12);
  EXPECT_NEAR(doubled_distance(dd, SheetState(w0, 1), SheetState(displace(w0, cplx(2.0)), 2)).value, std::sqrt(6.0),
              1e-12);
  EXPECT_NEAR(doubled_distance(dd, SheetState(w0, 1), SheetState(w1, 1)).value, 1.0 / kSqrt2, 1e-12);
}

TEST(DoubledDistance, InterSheetConstancy) {
  const DiracCalculus calc(ctx32());
  const auto& ctx = calc.ctx();
  const DoubledDirac dd = make_doubled(calc, cplx(0.8));
  for (const QState& s : {eigenstate(ctx, 0), eigenstate(ctx, 1), coherent_state(ctx, cplx(1.0))}) {
    const DistanceReport r = doubled_distance(dd, SheetState(s, 1), SheetState(s, 2), quick_cfg(), true);
    EXPECT_NEAR(r.value, 1.25, 1e-12);
    ASSERT_TRUE(r.reference);
    EXPECT_LE(*r.reference, 1.25 + 1e-8);
    EXPECT_GE(*r.reference, 0.98 * 1.25);
  }
}

TEST(DoubledDistance, SheetProjectionBySolver) {
  const DiracCalculus calc(ctx32());
  const auto& ctx = calc.ctx();
  const DoubledDirac dd = make_doubled(calc, cplx(1.0 / kSqrt2));
  const QState w0 = eigenstate(ctx, 0), w2 = eigenstate(ctx, 2);
  const DistanceReport r = doubled_distance_solver(dd, SheetState(w0, 1), SheetState(w2, 1), quick_cfg());
  const double exact = eigenstate_distance(1.0, 0, 2);
  EXPECT_LE(r.value, exact + 1e-8);
  EXPECT_GE(r.value, 0.98 * exact);
  EXPECT_LE(r.feasibility, 1.0 + kFeasibilitySlack);
}

TEST(Pythagoras, EqualityOnTranslationFamiliesAgainstSquareLength) {
  const DiracCalculus calc(ctx64());
  const auto& ctx = calc.ctx();
  const LengthOperator op = build_length(ctx);
  for (int m = 0; m <= 3; ++m) {
    const DoubledDirac dd = make_doubled(calc, cplx(reference_lambda(1.0, m)));
    const QState w = eigenstate(ctx, m);
    for (double re : {-2.0, 0.0, 1.0})
      for (double im : {-1.0, 0.0, 1.0}) {
        const cplx k(re, im);
        if (std::abs(k) > 2.0) continue;
        const QState v = displace(w, k);
        const double dp = doubled_distance(dd, SheetState(w, 1), SheetState(v, 2)).value;
        const double dd_single = doubled_distance(dd, SheetState(w, 1), SheetState(v, 1)).value;
        EXPECT_NEAR(dp * dp, dd_single * dd_single + dd.inter_sheet() * dd.inter_sheet(), 1e-9);
        // d_{D′}² = d_{L²} on the reference family
        EXPECT_NEAR(dp * dp, d_L2(op, w, v), 1e-6);
      }
  }
}

TEST(Pythagoras, SolverRouteOnCoherentFamily) {
  const DiracCalculus calc(ctx32());
  const auto& ctx = calc.ctx();
  const DoubledDirac dd = make_doubled(calc, cplx(1.0 / kSqrt2));
  const QState w0 = eigenstate(ctx, 0);
  const PythagorasCheck p = pythagoras_check(dd, w0, displace(w0, cplx(1.0)), quick_cfg());
  EXPECT_TRUE(p.same_family);
  EXPECT_NEAR(p.rhs_equal, 3.0, 1e-12);
  EXPECT_TRUE(p.within_bracket) << p.lhs;
  EXPECT_NEAR(p.lhs, 3.0, 0.06 * 3.0);
}

TEST(Pythagoras, DegenerateAndCrossFamily) {
  const DiracCalculus calc(ctx48());
  const auto& ctx = calc.ctx();
  const DoubledDirac dd = make_doubled(calc, cplx(1.0 / kSqrt2));
  const QState w0 = eigenstate(ctx, 0), w2 = eigenstate(ctx, 2);
  const PythagorasCheck same = pythagoras_check(dd, w0, w0, quick_cfg());
  EXPECT_NEAR(same.lhs, 2.0, 1e-9);
  EXPECT_NEAR(same.rhs_equal, 2.0, 1e-12);
  const PythagorasCheck cross = pythagoras_check(dd, w0, w2, quick_cfg());
  EXPECT_FALSE(cross.same_family);
  EXPECT_TRUE(cross.within_bracket) << cross.lhs << " vs [" << cross.rhs_lo << ", " << cross.rhs_hi << "]";
}

TEST(Pythagoras, BracketOnRandomDiagonalPairs) {
  const DiracCalculus calc(ctx32());
  const auto& ctx = calc.ctx();
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> ul(0.3, 2.0);
  for (int t = 0; t < 12; ++t) {
    const DoubledDirac dd = make_doubled(calc, cplx(ul(rng)));
    const QState s1 = random_diagonal_state(ctx, rng, 6), s2 = random_diagonal_state(ctx, rng, 6);
    const PythagorasCheck p = pythagoras_check(dd, s1, s2, quick_cfg());
    EXPECT_TRUE(p.within_bracket) << t << ": " << p.lhs << " vs [" << p.rhs_lo << ", " << p.rhs_hi << "]";
  }
}

TEST(Identification, SameFamilyGapVanishes) {
  const DiracCalculus calc(ctx64());
  const DoubledDirac dd = make_doubled(calc, cplx(reference_lambda(1.0, 0)));
  const SweepTable t = identification_sweep(dd, {0, {0}, {0.0, 1.0, 2.0, 3.0}});
  ASSERT_EQ(t.rows.size(), 4u);
  for (const auto& r : t.rows) {
    EXPECT_LT(std::abs(r.d_D - r.d_L_mod), 1e-6) << r.kappa;
    EXPECT_LT(r.rel_gap, 1e-6);
    EXPECT_NEAR(r.d_L2, r.d_D * r.d_D + dd.inter_sheet() * dd.inter_sheet(), 1e-6);
  }
}

TEST(Identification, EnergySweepGapShrinks) {
  const DiracCalculus calc(ctx64());
  const DoubledDirac dd = make_doubled(calc, cplx(reference_lambda(1.0, 0)));
  const SweepTable t = identification_sweep(dd, {0, {1, 2, 5, 10, 20, 50}, {0.0}});
  EXPECT_NEAR(t.rows.front().rel_gap, 0.0341, 1e-4);
  EXPECT_LT(t.rows.back().rel_gap, 0.01);
  EXPECT_TRUE(t.rel_gap_decreasing());
}

TEST(Identification, TranslationSweepGapShrinks) {
  const DiracCalculus calc(ctx64());
  const DoubledDirac dd = make_doubled(calc, cplx(reference_lambda(1.0, 0)));
  const SweepTable t = identification_sweep(dd, {0, {1}, {1.0, 3.0, 10.0}}, quick_cfg());
  EXPECT_TRUE(t.rel_gap_decreasing());
  EXPECT_LT(t.rows.back().rel_gap, 0.01);
  for (const auto& r : t.rows) EXPECT_LE(r.feasibility, 1.0 + kFeasibilitySlack);
}

TEST(Identification, Preconditions) {
  const DiracCalculus calc(ctx32());
  const DoubledDirac dd = make_doubled(calc, cplx(reference_lambda(1.0, 0)));
  EXPECT_THROW(identification_sweep(dd, {0, {}, {0.0}}), PreconditionError);
  EXPECT_THROW(identification_sweep(dd, {0, {1}, {}}), PreconditionError);
  EXPECT_THROW(identification_sweep(dd, {1, {1}, {0.0}}), PreconditionError);
}
