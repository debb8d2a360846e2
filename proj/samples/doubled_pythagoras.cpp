// Two copies of the Moyal plane at distance 1/|Lambda|: the Pythagoras
// relation between the doubled distance and the square-length.

#include <cmath>
#include <complex>
#include <cstdio>

#include "moyal/doubling.hpp"
#include "moyal/lengthop.hpp"

int main() {
  using namespace moyal;
  const DiracCalculus calc(make_context(48, 1.0, 1e-10));
  const auto& ctx = calc.ctx();
  const LengthOperator op = build_length(ctx, ctx.trunc_dim);

  for (int m = 0; m <= 2; ++m) {
    const DoubledDirac dd = make_doubled(calc, cplx(reference_lambda(ctx.theta, m)));
    const QState w = eigenstate(ctx, m);
    for (double k : {0.0, 1.0, 2.5}) {
      const QState v = displace(w, cplx(k));
      const double dp = doubled_distance(dd, SheetState(w, 1), SheetState(v, 2)).value;
      std::printf("m=%d |k|=%.1f  d_D'^2 %.8f  d_L2 %.8f\n", m, k, dp * dp, d_L2(op, w, v));
    }
  }

  // diagonal mixtures go through the block-diagonal doubled solver
  const DoubledDirac dd = make_doubled(calc, cplx(0.7, 0.3));
  const QState s1 = mixed_state({0.5, 0.5}, {eigenstate(ctx, 0), eigenstate(ctx, 3)});
  const QState s2 = eigenstate(ctx, 2);
  BallSolverConfig cfg;
  cfg.restarts = 2;
  const PythagorasCheck p = pythagoras_check(dd, s1, s2, cfg);
  std::printf("mixture: lhs %.6f in [%.6f, %.6f]: %s\n", p.lhs, p.rhs_lo, p.rhs_hi, p.within_bracket ? "yes" : "no");
}
