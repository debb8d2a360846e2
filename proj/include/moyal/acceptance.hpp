#pragma once

// Acceptance criteria 1-10, shared by `moyal suite` and the acceptance test
// binary. Each criterion returns pass/fail plus a one-line detail string.

#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "moyal/doubling.hpp"
#include "moyal/lengthop.hpp"
#include "moyal/spectral.hpp"
#include "moyal/starprod.hpp"

namespace moyal {

struct AcceptanceOptions {
  bool quick = false;  // N = 32 wherever the criterion allows it
  double theta = 1.0;
  unsigned seed = 0;
  int random_pairs = 200;
  BallSolverConfig solver{};
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0;
};

namespace acceptance {

inline std::string fmt_num(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

inline QState random_diagonal_state(const FockContext& ctx, std::mt19937_64& rng, int levels) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> count(1, levels);
  const int k = count(rng);
  std::vector<double> w;
  std::vector<QState> parts;
  std::vector<int> used;
  std::uniform_int_distribution<int> lvl(0, levels - 1);
  while (static_cast<int>(used.size()) < k) {
    const int m = lvl(rng);
    if (std::find(used.begin(), used.end(), m) != used.end()) continue;
    used.push_back(m);
    w.push_back(u(rng) + 1e-3);
    parts.push_back(eigenstate(ctx, m));
  }
  return mixed_state(w, parts);
}

inline FockContext context(const AcceptanceOptions& o, int n) {
  return make_context(o.quick ? 32 : n, o.theta, 1e-10);
}

inline BallSolverConfig solver_config(const AcceptanceOptions& o) {
  BallSolverConfig c = o.solver;
  if (o.quick) {
    c.restarts = std::min(c.restarts, 1);
    c.iterations = std::min(c.iterations, 300);
  }
  return c;
}

/// 1. LP eigenstate distances against (1/√2)Σ 1/√k.
inline CriterionResult eigenstate_distances(const AcceptanceOptions& o) {
  const DiracCalculus calc(context(o, 64));
  double worst = 0;
  for (int m = 0; m <= 6; ++m)
    for (int n = m + 1; n <= 6; ++n) {
      double sum = 0;
      for (int k = m + 1; k <= n; ++k) sum += 1.0 / std::sqrt(double(k));
      const double expected = std::sqrt(o.theta) * sum / std::numbers::sqrt2;
      const double got = distance_diagonal_lp(calc, eigenstate(calc.ctx(), m), eigenstate(calc.ctx(), n)).value;
      worst = std::max(worst, std::abs(got - expected));
    }
  return {1, "eigenstate distances", worst <= 1e-9, "max |lp - formula| = " + fmt_num(worst)};
}

/// 2. Translations: certificate evaluation = |κ|, solver ≥ 0.98|κ|.
inline CriterionResult translation_distances(const AcceptanceOptions& o) {
  const DiracCalculus calc(context(o, 48));
  const auto& ctx = calc.ctx();
  const BallSolverConfig cfg = solver_config(o);
  const double dir = 0.7;
  double worst_cert = 0, worst_ratio = 1e300, worst_excess = 0;
  for (const QState& phi : {eigenstate(ctx, 0), eigenstate(ctx, 1), coherent_state(ctx, cplx(1.0))})
    for (double k : {0.5, 1.0, 2.0}) {
      const cplx kappa = std::polar(k, dir);
      const QState moved = displace(phi, kappa);
      const DistanceReport closed = distance_closed_form(calc, *closed_form_kind(phi, moved));
      const double ev = std::abs((evaluate(phi, *closed.certificate) - evaluate(moved, *closed.certificate)).real());
      worst_cert = std::max({worst_cert, std::abs(ev - k), std::abs(closed.feasibility - 1.0)});
      const DistanceReport sol = distance_solver(calc, phi, moved, cfg);
      worst_ratio = std::min(worst_ratio, sol.value / k);
      worst_excess = std::max(worst_excess, sol.value - k);
    }
  const bool ok = worst_cert <= 1e-6 && worst_ratio >= 0.98 && worst_excess <= 1e-6;
  return {2, "translation distances", ok,
          "certificate err " + fmt_num(worst_cert) + ", min solver/|k| " + fmt_num(worst_ratio) +
              ", max solver - |k| " + fmt_num(worst_excess)};
}

/// 3. d_{L²} closed form over m, n ≤ 6 and a 5×5 (κ, κ̃) grid; translation invariance.
inline CriterionResult square_length(const AcceptanceOptions& o) {
  const FockContext ctx = context(o, 64);
  const LengthOperator op = build_length(ctx);
  const std::vector<cplx> grid = {cplx(-2, 0), cplx(-1, 1), cplx(0, 0), cplx(0.5, -1.5), cplx(0, 2)};
  std::vector<std::vector<QState>> states(7);
  for (int m = 0; m <= 6; ++m)
    for (const cplx& k : grid) states[m].push_back(displace(eigenstate(ctx, m), k));
  double worst = 0;
  for (int m = 0; m <= 6; ++m)
    for (int n = 0; n <= 6; ++n)
      for (std::size_t a = 0; a < grid.size(); ++a)
        for (std::size_t b = 0; b < grid.size(); ++b) {
          const double got = d_L2(op, states[m][a], states[n][b]);
          worst = std::max(worst, std::abs(got - square_length_closed_form(ctx.theta, m, n, grid[a], grid[b])));
        }
  double inv = 0;
  const cplx xi(0.6, -0.8);
  for (int m : {0, 3})
    for (int n : {1, 4}) {
      const QState s1 = eigenstate(ctx, m), s2 = displace(eigenstate(ctx, n), cplx(1.0, 0.5));
      inv = std::max(inv, std::abs(d_L2(op, displace(s1, xi), displace(s2, xi)) - d_L2(op, s1, s2)));
    }
  return {3, "quantum square-length", worst <= 1e-6 && inv <= 1e-8,
          "max closed-form err " + fmt_num(worst) + ", translation invariance err " + fmt_num(inv)};
}

/// 4. Minimal length at N = 32.
inline CriterionResult minimal_length_check(const AcceptanceOptions& o) {
  const FockContext ctx = make_context(32, o.theta, 1e-10);
  const LengthOperator op = build_length(ctx);
  const MinimalLength ml = minimal_length(op);
  const double min_l2 = op.min_l2();
  const QState w0 = eigenstate(ctx, 0);
  const double dl00 = d_L(op, w0, w0);
  bool only_vacuum = std::abs(dl00 - std::sqrt(d_L2(op, w0, w0))) <= 1e-6;
  double smallest_gap = 1e300;
  for (int m = 0; m <= 6; ++m)
    for (int n = 0; n <= 6; ++n) {
      if (m == 0 && n == 0) continue;
      const QState a = eigenstate(ctx, m), b = eigenstate(ctx, n);
      const double gap = std::sqrt(d_L2(op, a, b)) - d_L(op, a, b);
      smallest_gap = std::min(smallest_gap, gap);
    }
  only_vacuum = only_vacuum && smallest_gap > 1e-6;
  const double want = 2.0 * o.theta;
  const bool ok = std::abs(min_l2 - want) <= 1e-6 && std::abs(dl00 - std::sqrt(want)) <= 1e-6 && only_vacuum &&
                  std::abs(ml.vacuum_square_length - want) <= 1e-6;
  return {4, "minimal length", ok,
          "min Sp(L2) " + fmt_num(min_l2) + ", d_L(w0,w0) " + fmt_num(dl00) + ", smallest sqrt(d_L2)-d_L off (0,0) " +
              fmt_num(smallest_gap)};
}

/// 5. Pythagoras equality on 𝒞(ω_m) and the bracket on random pairs.
inline CriterionResult pythagoras(const AcceptanceOptions& o) {
  const DiracCalculus calc64(context(o, 64));
  const auto& ctx = calc64.ctx();
  const LengthOperator op = build_length(ctx);
  double worst_eq = 0, worst_id = 0;
  for (int m = 0; m <= 3; ++m) {
    const DoubledDirac dd = make_doubled(calc64, cplx(reference_lambda(o.theta, m)));
    const QState w = eigenstate(ctx, m);
    for (const cplx& k : {cplx(0.5, 0), cplx(1, 1), cplx(-2, 0), cplx(0, 1.5)}) {
      const QState v = displace(w, k);
      const double dp = doubled_distance(dd, SheetState(w, 1), SheetState(v, 2)).value;
      const double single = single_sheet_distance(calc64, w, v).value;
      worst_eq = std::max(worst_eq, std::abs(dp * dp - (single * single + dd.inter_sheet() * dd.inter_sheet())));
      worst_id = std::max(worst_id, std::abs(dp * dp - d_L2(op, w, v)));
    }
  }
  const DiracCalculus calc48(context(o, 48));
  std::mt19937_64 rng(o.seed);
  std::uniform_real_distribution<double> ul(0.3, 2.0), ph(0.0, 2 * std::numbers::pi);
  BallSolverConfig cfg = solver_config(o);
  cfg.restarts = std::min(cfg.restarts, 2);
  int violations = 0;
  double worst_lo = 1e300;
  const int pairs = o.quick ? std::min(o.random_pairs, 40) : o.random_pairs;
  for (int t = 0; t < pairs; ++t) {
    const DoubledDirac dd = make_doubled(calc48, std::polar(ul(rng), ph(rng)));
    const QState s1 = random_diagonal_state(calc48.ctx(), rng, 8), s2 = random_diagonal_state(calc48.ctx(), rng, 8);
    cfg.seed = o.seed + static_cast<unsigned>(t);
    const PythagorasCheck p = pythagoras_check(dd, s1, s2, cfg);
    if (!p.within_bracket) ++violations;
    worst_lo = std::min(worst_lo, p.lhs / p.rhs_lo);
  }
  const bool ok = worst_eq <= 1e-6 && worst_id <= 1e-6 && violations == 0;
  return {5, "pythagoras", ok,
          "closed-form err " + fmt_num(worst_eq) + ", d_L2 identification err " + fmt_num(worst_id) + ", " +
              std::to_string(violations) + "/" + std::to_string(pairs) + " bracket violations, min lhs/rhs " +
              fmt_num(worst_lo)};
}

/// 6. Identification on 𝒞(ω₀) and the two asymptotic sweeps.
inline CriterionResult identification(const AcceptanceOptions& o) {
  const DiracCalculus calc(make_context(64, o.theta, 1e-10));
  const DoubledDirac dd = make_doubled(calc, cplx(reference_lambda(o.theta, 0)));
  const BallSolverConfig cfg = solver_config(o);
  const SweepTable same = identification_sweep(dd, {0, {0}, {0.0, 1.0, 2.0, 3.0}});
  double same_gap = 0;
  for (const auto& r : same.rows) same_gap = std::max(same_gap, std::abs(r.d_D - r.d_L_mod));
  const SweepTable energy = identification_sweep(dd, {0, {1, 2, 3, 5, 10, 20, 30, 40, 50}, {0.0}});
  const SweepTable transl = identification_sweep(dd, {0, {1}, {1.0, 2.0, 3.0, 5.0, 10.0}}, cfg);
  const double g01 = energy.rows.front().rel_gap;
  const bool ok = same_gap <= 1e-6 && std::abs(g01 - 0.0341) <= 5e-4 && energy.rel_gap_decreasing() &&
                  energy.rows.back().rel_gap < 0.01 && transl.rel_gap_decreasing() && transl.rows.back().rel_gap < 0.01;
  return {6, "identification and asymptotics", ok,
          "same-family |d_D - d'_L| " + fmt_num(same_gap) + ", rel gap (0,1) " + fmt_num(g01) + ", n=50 " +
              fmt_num(energy.rows.back().rel_gap) + ", |dk|=10 " + fmt_num(transl.rows.back().rel_gap) +
              (energy.rel_gap_decreasing() ? ", energy sweep monotone" : ", energy sweep NOT monotone") +
              (transl.rel_gap_decreasing() ? ", translation sweep (|dk|>=1) monotone"
                                           : ", translation sweep NOT monotone")};
}

/// 7. No modified length operator.
inline CriterionResult counterexample(const AcceptanceOptions& o) {
  const LengthOperator op = build_length(context(o, 32));
  const CounterexampleResult r = counterexample_L2prime(op, 0, 2, 4, 6);
  const bool ok = std::abs(r.residual - 2.04412) <= 1e-4 && r.max_route_gap <= 1e-4 &&
                  std::abs(r.residual - (r.numeric_lhs - r.numeric_rhs)) <= 1e-4;
  return {7, "counterexample", ok,
          "residual " + fmt_num(r.residual) + ", tensor-trace residual " + fmt_num(r.numeric_lhs - r.numeric_rhs) +
              ", route gap " + fmt_num(r.max_route_gap)};
}

/// 8. Optimal elements.
inline CriterionResult optimal_elements(const AcceptanceOptions& o) {
  const DiracCalculus calc(context(o, 64));
  double sn = 0;
  for (double xi : {0.0, 0.9, -2.0}) {
    const auto c = check_translation_element(calc, optimal_element_translation(calc, xi));
    sn = std::max(sn, std::abs(c.seminorm - 1.0));
  }
  const int upto = calc.ctx().safe_dim() - 1;
  const EigenElementCheck e = check_eigenstate_element(calc, optimal_element_eigenstates(calc, upto), upto);
  const Discrepancy d = length_vs_optimal_discrepancy(calc, 0, 1);
  const double radial = std::abs(d.radial_gap - (std::sqrt(3.0) - 1.0) * std::sqrt(o.theta));
  const bool ok = sn <= 1e-10 && e.defect_residual <= 1e-12 && radial <= 1e-8;
  return {8, "optimal elements", ok,
          "|seminorm(l_k) - 1| " + fmt_num(sn) + ", defect residual " + fmt_num(e.defect_residual) +
              ", radial gap err " + fmt_num(radial)};
}

/// 9. Star product oracle.
inline CriterionResult star_oracle(const AcceptanceOptions& o) {
  const double theta = o.theta, r = 8.0, h = 1.0 / 16;
  const auto ctx = make_context(16, theta, 1e-12);
  const Operator e0 = vacuum_projector(ctx);
  const Operator prod = star_matrix(e0, e0);
  const SampledSymbol f0 = sample_symbol(r, h, [theta](double a, double b) { return vacuum_symbol(theta, a, b); });
  double worst_excess = -1e300, worst_bound = 0;
  for (auto [x1, x2] : {std::pair{0.0, 0.0}, {0.25, 0.5}, {-0.75, 0.125}, {1.0, -1.0}}) {
    const StarValue s = star_integral(f0, f0, x1, x2, theta);
    worst_bound = std::max(worst_bound, s.error_bound);
    worst_excess = std::max(worst_excess, std::abs(s.value - vacuum_span_symbol(prod, x1, x2)) - s.error_bound);
  }
  auto gauss = [](double a, double b, double c1, double c2, double w) {
    return std::exp(-((a - c1) * (a - c1) + (b - c2) * (b - c2)) / w);
  };
  const SampledSymbol f = sample_symbol(r, h, [&](double a, double b) { return gauss(a, b, 1.0, 0, 1.0) * cplx(1.0, 0.3 * a); });
  const SampledSymbol g = sample_symbol(r, h, [&](double a, double b) { return cplx(gauss(a, b, 0, 1.0, 0.7)); });
  double round_trip = 0;
  for (auto [x1, x2] : {std::pair{0.25, 0.5}, {0.0, 0.0}, {-0.5, 1.0}})
    round_trip = std::max(round_trip,
                          std::abs(star_integral(f, g, x1, x2, theta).value - star_fourier(f, g, x1, x2, theta).value));
  const bool ok = worst_excess <= 1e-12 && worst_bound <= 1e-5 && round_trip <= 1e-6;
  return {9, "star-product oracle", ok,
          "max quadrature bound " + fmt_num(worst_bound) + ", max (|matrix - quad| - bound) " + fmt_num(worst_excess) +
              ", Fourier round trip " + fmt_num(round_trip)};
}

/// 10. Metric axioms, uncertainty floor, convergence in N of L-derived values.
inline CriterionResult properties(const AcceptanceOptions& o) {
  const DiracCalculus calc(context(o, 64));
  const auto& ctx = calc.ctx();
  std::mt19937_64 rng(o.seed + 17);
  double axiom = 0;
  for (int t = 0; t < 30; ++t) {
    const QState a = random_diagonal_state(ctx, rng, 8), b = random_diagonal_state(ctx, rng, 8),
                 c = random_diagonal_state(ctx, rng, 8);
    auto d = [&](const QState& x, const QState& y) { return distance_diagonal_lp(calc, x, y).value; };
    const double ab = d(a, b), ba = d(b, a), bc = d(b, c), ac = d(a, c);
    axiom = std::max({axiom, d(a, a), std::abs(ab - ba), std::max(0.0, ac - ab - bc)});
  }
  double floor_violation = 0;
  for (const QState& s : {eigenstate(ctx, 0), eigenstate(ctx, 3), coherent_state(ctx, cplx(0.7, -0.2)),
                          displace(eigenstate(ctx, 2), cplx(1.0, 1.0)),
                          superposition_state(ctx, {0, 1, 4}, {cplx(1), cplx(0, 1), cplx(0.5)})})
    floor_violation = std::max(floor_violation, ctx.theta / 2 - uncertainty_product(s));
  // every L-derived value of criteria 3, 4, 6 recomputed at N and 2N
  int failed = 0, checked = 0;
  const double tol = 1e-8;
  std::map<int, LengthOperator> ops;
  auto length_at = [&](const FockContext& c) -> const LengthOperator& {
    auto it = ops.find(c.trunc_dim);
    if (it == ops.end()) it = ops.emplace(c.trunc_dim, build_length(c, c.trunc_dim)).first;
    return it->second;
  };
  auto check = [&](int n_ref, const StateTag& t1, const StateTag& t2) {
    const FockContext doubled = make_context(2 * n_ref, o.theta, 1e-10);
    const auto fn = [&](const FockContext& c) {
      const LengthOperator& op = length_at(c);
      const QState s1 = build_state(c, t1), s2 = build_state(c, t2);
      return d_L2(op, s1, s2) + d_L(op, s1, s2) + modified_length(op, s1, s2);
    };
    ++checked;
    if (!convergence_in_n(doubled, tol, fn).passed) ++failed;
  };
  const int n64 = o.quick ? 32 : 64;
  for (int m : {0, 3, 6})
    for (int n : {0, 2, 6}) check(n64, translated_tag(eigen_tag(m), cplx(-2, 0)), translated_tag(eigen_tag(n), cplx(0, 2)));
  for (int m = 0; m <= 2; ++m) check(32, eigen_tag(m), eigen_tag(m + 1));
  for (double k : {1.0, 3.0, 10.0})
    check(64, translated_tag(eigen_tag(0), cplx(-k / 2)), translated_tag(eigen_tag(1), cplx(k / 2)));
  check(64, eigen_tag(0), eigen_tag(50));
  const bool ok = axiom <= 1e-8 && floor_violation <= 1e-8 && failed == 0;
  return {10, "property suites", ok,
          "metric axiom defect " + fmt_num(axiom) + ", uncertainty floor violation " + fmt_num(floor_violation) + ", " +
              std::to_string(checked - failed) + "/" + std::to_string(checked) + " convergence-in-N checks"};
}

}  // namespace acceptance

/// Runs criteria 1-10 in order; `on_result` is called after each one.
inline std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& o,
                                                   const std::function<void(const CriterionResult&)>& on_result = {}) {
  using Fn = CriterionResult (*)(const AcceptanceOptions&);
  const Fn all[] = {acceptance::eigenstate_distances, acceptance::translation_distances, acceptance::square_length,
                    acceptance::minimal_length_check, acceptance::pythagoras,            acceptance::identification,
                    acceptance::counterexample,       acceptance::optimal_elements,      acceptance::star_oracle,
                    acceptance::properties};
  const char* names[] = {"eigenstate distances", "translation distances", "quantum square-length", "minimal length",
                         "pythagoras", "identification and asymptotics", "counterexample", "optimal elements",
                         "star-product oracle", "property suites"};
  std::vector<CriterionResult> out;
  for (int i = 0; i < 10; ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    CriterionResult r;
    try {
      r = all[i](o);
    } catch (const std::exception& e) {
      r = {i + 1, names[i], false, std::string("error: ") + e.what()};
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (on_result) on_result(r);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace moyal
