// Spectral distances on the Moyal plane: eigenstates, translations, and the
// three routes (closed form, diagonal LP, convex solver) side by side.

#include <cstdio>

#include "moyal/spectral.hpp"
#include "moyal/state_expr.hpp"

int main() {
  using namespace moyal;
  const DiracCalculus calc(make_context(48, 1.0, 1e-10));
  const auto& ctx = calc.ctx();

  std::puts("d_D(w_0, w_n), additive partial sums:");
  for (int n = 1; n <= 5; ++n) {
    const auto r = distance_diagonal_lp(calc, eigenstate(ctx, 0), eigenstate(ctx, n));
    std::printf("  n=%d  lp %.10f  closed %.10f\n", n, r.value, eigenstate_distance(ctx.theta, 0, n));
  }

  BallSolverConfig cfg;
  cfg.restarts = 2;
  for (const char* expr : {"translated:eigen:0:1+0i", "translated:eigen:1:0+2i", "translated:coherent:0.5+0i:1-1i"}) {
    const StateTag tag = parse_state(expr);
    const QState moved = build_state(ctx, tag);
    const QState base = build_state(ctx, *std::get<TranslatedTag>(tag.v).base);
    const auto closed = distance_closed_form(calc, *closed_form_kind(base, moved));
    const auto solver = distance_solver(calc, base, moved, cfg);
    std::printf("%-34s closed %.8f  solver %.8f  (lower bound, feasibility %.3g)\n", expr, closed.value, solver.value,
                solver.feasibility);
  }

  const auto r = distance_closed_form(calc, EigenstatesForm{0, 1});
  std::printf("scaled by Omega = 1: %.8f\n", scaled_distance(r, 1.0).value);
}
