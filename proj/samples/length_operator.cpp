// Quantum length: spectrum of L^2, square-length of translated eigenstates,
// and the modified length d'_L that vanishes on the diagonal.

#include <cmath>
#include <complex>
#include <cstdio>

#include "moyal/lengthop.hpp"

int main() {
  using namespace moyal;
  const FockContext ctx = make_context(40, 1.0, 1e-10);
  const LengthOperator op = build_length(ctx, ctx.trunc_dim);

  const MinimalLength ml = minimal_length(op);
  std::printf("min Sp(L) = %.10f   d_L2(w0, w0) = %.10f\n", ml.min_spectrum_l, ml.vacuum_square_length);

  const cplx k(1.0, -0.5);
  for (int m = 0; m <= 2; ++m)
    for (int n = 0; n <= 2; ++n) {
      const QState a = eigenstate(ctx, m), b = displace(eigenstate(ctx, n), k);
      std::printf("m=%d n=%d  d_L2 %.8f (closed %.8f)  d_L %.8f  d'_L %.8f\n", m, n, d_L2(op, a, b),
                  square_length_closed_form(ctx.theta, m, n, 0.0, k), d_L(op, a, b), modified_length(op, a, b));
    }

  const CounterexampleResult c = counterexample_L2prime(op, 0, 2, 4, 6);
  std::printf("no operator L'^2: residual %.6f (tensor route %.6f)\n", c.residual, c.numeric_lhs - c.numeric_rhs);
}
