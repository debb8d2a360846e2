// moyal: batch command surface over the header library.
//
// Exit codes: 0 ok, 2 anomaly, 64 usage, 65 data.

#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <random>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "moyal/acceptance.hpp"
#include "moyal/doubling.hpp"
#include "moyal/lengthop.hpp"
#include "moyal/spectral.hpp"
#include "moyal/starprod.hpp"
#include "moyal/state_expr.hpp"
#include "output.hpp"
#include "run_config.hpp"

using namespace moyal;
using namespace moyal::cli;

namespace {

QState state_arg(const FockContext& ctx, const std::string& text) { return build_state(ctx, parse_state(text)); }

json report_json(const DistanceReport& r, bool with_certificate) {
  json j = json::object();
  j["method"] = method_name(r.method);
  j["value"] = jnum(r.value);
  j["feasibility"] = jnum(r.feasibility);
  if (r.reference) j["reference"] = jnum(*r.reference);
  if (r.gap) j["gap"] = jnum(*r.gap);
  j["note"] = r.note;
  if (!r.diagnostics.empty()) {
    json d = json::object();
    for (const auto& [k, v] : r.diagnostics) d[k] = jnum(v);
    j["diagnostics"] = d;
  }
  if (with_certificate) {
    if (r.certificate) j["certificate"] = matrix_json(r.certificate->mat);
    if (r.certificate2) j["certificate2"] = matrix_json(r.certificate2->mat);
    if (!r.increments.empty()) {
      json inc = json::array();
      for (double x : r.increments) inc.push_back(jnum(x));
      j["increments"] = inc;
    }
  }
  return j;
}

void announce(const std::vector<std::filesystem::path>& files) {
  for (const auto& f : files) fmt::print("wrote {}\n", f.string());
}

// ---------------------------------------------------------------------------

struct DistanceCmd {
  std::string s1, s2, method = "all";
  double omega = 0;
  bool with_certificate = false;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("distance", "spectral distance between two states");
    c->add_option("s1", s1, "first state expression")->required();
    c->add_option("s2", s2, "second state expression")->required();
    c->add_option("--method", method, "closed | lp | solver | all")
        ->check(CLI::IsMember({"closed", "lp", "solver", "all"}))
        ->capture_default_str();
    c->add_option("--omega", omega, "also report d_D/sqrt(1+omega^2)")->check(CLI::NonNegativeNumber);
    c->add_flag("--with-certificate", with_certificate, "include certificate matrices in the JSON report");
  }

  int run(const RunConfig& cfg) const {
    const DiracCalculus calc(cfg.context());
    const QState a = state_arg(calc.ctx(), s1), b = state_arg(calc.ctx(), s2);
    const auto kind = closed_form_kind(a, b);
    const bool diagonal = a.is_diagonal(calc.ctx().tol) && b.is_diagonal(calc.ctx().tol);
    std::vector<std::pair<std::string, DistanceReport>> routes;
    const bool all = method == "all";
    if (method == "closed" || (all && kind)) {
      if (!kind) throw PreconditionError("distance: no closed form applies to " + s1 + ", " + s2);
      routes.emplace_back("closed", distance_closed_form(calc, *kind));
    }
    if (method == "lp" || (all && diagonal)) {
      if (!diagonal) throw PreconditionError("distance: the lp route needs number-diagonal states");
      routes.emplace_back("lp", distance_diagonal_lp(calc, a, b));
    }
    if (method == "solver" || all) routes.emplace_back("solver", distance_solver(calc, a, b, cfg.solver()));

    Table t{{"s1", "s2", "route", "d_D", "feasibility"}, {}};
    json res = json::object();
    res["s1"] = format_state(a.tag());
    res["s2"] = format_state(b.tag());
    json jr = json::object();
    for (const auto& [name, r] : routes) {
      fmt::print("{:<7} {}  (feasibility {})\n", name, fnum(r.value), fnum(r.feasibility));
      t.add({format_state(a.tag()), format_state(b.tag()), name, r.value, r.feasibility});
      jr[name] = report_json(r, with_certificate);
      if (omega > 0) {
        const DistanceReport s = scaled_distance(r, omega);
        fmt::print("{:<7} {}  (omega {})\n", name + "/s", fnum(s.value), fnum(omega));
        t.add({format_state(a.tag()), format_state(b.tag()), name + "_scaled", s.value, s.feasibility});
        jr[name + "_scaled"] = report_json(s, false);
      }
    }
    res["routes"] = jr;
    json gaps = json::array();
    for (std::size_t i = 0; i < routes.size(); ++i)
      for (std::size_t j = i + 1; j < routes.size(); ++j) {
        const double g = std::abs(routes[i].second.value - routes[j].second.value);
        fmt::print("gap {}-{} {}\n", routes[i].first, routes[j].first, fnum(g));
        gaps.push_back({{"routes", routes[i].first + "-" + routes[j].first}, {"gap", jnum(g)}});
      }
    res["gaps"] = gaps;
    announce({write_csv(cfg, "distance", t), write_json(cfg, "distance", res)});
    return 0;
  }
};

// ---------------------------------------------------------------------------

struct QLengthCmd {
  std::string s1, s2;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("qlength", "quantum length, square-length and modified length");
    c->add_option("s1", s1, "first state expression")->required();
    c->add_option("s2", s2, "second state expression")->required();
  }

  /// (m, κ) when the tag is a translated eigenstate.
  static std::optional<std::pair<int, cplx>> family(const StateTag& tag, double theta) {
    auto [base, k] = moyal::detail::translation_normal_form(tag, theta);
    if (const auto* e = std::get_if<EigenTag>(&base.v)) return std::pair{e->m, k};
    return std::nullopt;
  }

  int run(const RunConfig& cfg) const {
    const FockContext ctx = cfg.context();
    const StateTag t1 = parse_state(s1), t2 = parse_state(s2);
    const QState a = build_state(ctx, t1), b = build_state(ctx, t2);
    const LengthOperator op = build_length(ctx, ctx.trunc_dim);
    const double l2 = d_L2(op, a, b), l = d_L(op, a, b), lmod = modified_length(op, a, b);
    std::optional<double> closed;
    const auto f1 = family(t1, ctx.theta), f2 = family(t2, ctx.theta);
    if (f1 && f2) closed = square_length_closed_form(ctx.theta, f1->first, f2->first, f1->second, f2->second);

    constexpr double conv_tol = 1e-8;
    std::string converged;
    std::optional<ConvergenceCheck> conv;
    try {
      conv = convergence_in_n(ctx, conv_tol, [&](const FockContext& c) {
        const LengthOperator o = build_length(c, c.trunc_dim);
        const QState x = build_state(c, t1), y = build_state(c, t2);
        return d_L2(o, x, y) + d_L(o, x, y) + modified_length(o, x, y);
      });
      converged = conv->passed ? "yes" : "no";
    } catch (const LeakageError&) {
      converged = "n/a";
    }

    fmt::print("d_L2      {}\n", fnum(l2));
    fmt::print("d_L       {}\n", fnum(l));
    fmt::print("sqrt d_L2 {}\n", fnum(std::sqrt(l2)));
    fmt::print("d_L_mod   {}\n", fnum(lmod));
    if (closed) fmt::print("closed    {}  (2E_m + 2E_n + |k - k'|^2)\n", fnum(*closed));
    fmt::print("converged {}  (N = {} vs N/2, tol {})\n", converged, ctx.trunc_dim, fnum(10 * conv_tol));

    Table t{{"s1", "s2", "d_L", "d_L2", "sqrt_d_L2", "d_L_mod", "d_L2_closed", "converged"}, {}};
    t.add({format_state(t1), format_state(t2), l, l2, std::sqrt(l2), lmod,
           closed ? Cell(*closed) : Cell(std::string()), converged});
    json res = {{"s1", format_state(t1)}, {"s2", format_state(t2)},     {"d_L", jnum(l)},
                {"d_L2", jnum(l2)},       {"sqrt_d_L2", jnum(std::sqrt(l2))}, {"d_L_mod", jnum(lmod)}};
    if (closed) res["d_L2_closed"] = jnum(*closed);
    res["converged"] = converged;
    if (conv) res["convergence"] = {{"value", jnum(conv->value)}, {"half_value", jnum(conv->half_value)}};
    announce({write_csv(cfg, "qlength", t), write_json(cfg, "qlength", res)});
    return 0;
  }
};

// ---------------------------------------------------------------------------

struct SpectrumCmd {
  int count = 10;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("spectrum", "lowest eigenvalues of the square-length operator");
    c->add_option("--count", count, "number of eigenvalues")->check(CLI::PositiveNumber)->capture_default_str();
  }

  int run(const RunConfig& cfg) const {
    const LengthOperator op = build_length(cfg.context(), cfg.trunc_dim);
    const MinimalLength ml = minimal_length(op);
    const auto& sp = op.spectrum();
    Table t{{"index", "l2", "l"}, {}};
    json vals = json::array();
    for (int i = 0; i < std::min<int>(count, static_cast<int>(sp.size())); ++i) {
      t.add({static_cast<long long>(i), sp[i], std::sqrt(std::max(0.0, sp[i]))});
      vals.push_back(jnum(sp[i]));
      fmt::print("{:>4}  {}\n", i, fnum(sp[i]));
    }
    fmt::print("min Sp(L2)     {}\n", fnum(op.min_l2()));
    fmt::print("min Sp(L)      {}\n", fnum(ml.min_spectrum_l));
    fmt::print("d_L2(w0, w0)   {}\n", fnum(ml.vacuum_square_length));
    json res = {{"min_l2", jnum(op.min_l2())},
                {"min_l", jnum(ml.min_spectrum_l)},
                {"vacuum_square_length", jnum(ml.vacuum_square_length)},
                {"l2", vals}};
    announce({write_csv(cfg, "spectrum", t), write_json(cfg, "spectrum", res)});
    return 0;
  }
};

// ---------------------------------------------------------------------------

struct PythagorasCmd {
  int family = 0;
  std::string kappas = "0.5,1,2";
  int pairs = 0;
  bool solver = false;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("pythagoras", "Pythagoras relation for the doubled triple");
    c->add_option("--family", family, "eigenstate family m; Lambda = d_L2(w_m, w_m)^-1/2")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    c->add_option("--kappa", kappas, "translation amplitudes (a..b[:step] or list)")->capture_default_str();
    c->add_option("--pairs", pairs, "random diagonal pairs checked against the bracket")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    c->add_flag("--solver", solver, "also run the doubled solver on the translation family");
  }

  int run(const RunConfig& cfg) const {
    const DiracCalculus calc(cfg.context());
    const auto& ctx = calc.ctx();
    const DoubledDirac dd = make_doubled(calc, cplx(reference_lambda(ctx.theta, family)));
    const LengthOperator op = build_length(ctx, ctx.trunc_dim);
    const BallSolverConfig scfg = cfg.solver();
    Table t{{"family", "kappa", "route", "lhs", "rhs", "rhs_hi", "d_D", "d_L2", "feasibility", "within"}, {}};
    int violations = 0;
    const QState w = eigenstate(ctx, family);
    const double di2 = dd.inter_sheet() * dd.inter_sheet();
    for (double k : parse_grid(kappas)) {
      const QState v = displace(w, cplx(k));
      const DistanceReport dp = doubled_distance(dd, SheetState(w, 1), SheetState(v, 2));
      const double single = single_sheet_distance(calc, w, v).value;
      const double rhs = single * single + di2, lhs = dp.value * dp.value;
      const bool eq = std::abs(lhs - rhs) <= 1e-6;
      violations += !eq;
      t.add({static_cast<long long>(family), k, "closed", lhs, rhs, 2 * rhs, single, d_L2(op, w, v), dp.feasibility, eq});
      fmt::print("m={} kappa={} closed lhs {} rhs {} {}\n", family, fnum(k), fnum(lhs), fnum(rhs), eq ? "ok" : "VIOLATION");
      if (solver) {
        const PythagorasCheck p = pythagoras_check(dd, w, v, scfg);
        violations += !p.within_bracket;
        t.add({static_cast<long long>(family), k, "solver", p.lhs, p.rhs_lo, p.rhs_hi, p.d_D, d_L2(op, w, v),
               p.feasibility, p.within_bracket});
        fmt::print("m={} kappa={} solver lhs {} bracket [{}, {}] {}\n", family, fnum(k), fnum(p.lhs), fnum(p.rhs_lo),
                   fnum(p.rhs_hi), p.within_bracket ? "ok" : "VIOLATION");
      }
    }
    std::mt19937_64 rng(cfg.seed);
    for (int i = 0; i < pairs; ++i) {
      const QState s1 = acceptance::random_diagonal_state(ctx, rng, 8);
      const QState s2 = acceptance::random_diagonal_state(ctx, rng, 8);
      BallSolverConfig c = scfg;
      c.seed = cfg.seed + static_cast<unsigned>(i);
      const PythagorasCheck p = pythagoras_check(dd, s1, s2, c);
      violations += !p.within_bracket;
      t.add({format_state(s1.tag()) + " | " + format_state(s2.tag()), 0.0, "random", p.lhs, p.rhs_lo, p.rhs_hi, p.d_D,
             d_L2(op, s1, s2), p.feasibility, p.within_bracket});
    }
    if (pairs > 0) fmt::print("random pairs: {} checked\n", pairs);
    fmt::print("{} violation(s)\n", violations);
    json res = {{"family", family}, {"lambda", jnum(std::abs(dd.lambda()))}, {"rows", t.rows.size()},
                {"violations", violations}};
    announce({write_csv(cfg, "pythagoras", t), write_json(cfg, "pythagoras", res)});
    return violations ? 2 : 0;
  }
};

// ---------------------------------------------------------------------------

/// First row index from which rel_gap strictly decreases to the end of the group.
std::size_t monotone_from(const std::vector<SweepRow>& rows, std::size_t begin, std::size_t end) {
  std::size_t from = end - 1;
  while (from > begin && rows[from].rel_gap < rows[from - 1].rel_gap) --from;
  return from;
}

struct AsymptoticsCmd {
  int family = 0;
  std::string ns = "1", kappas = "0";
  bool plot = false;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("asymptotics", "d_D versus d_L_mod sweeps across families");
    c->add_option("--family", family, "reference family m")->check(CLI::NonNegativeNumber)->capture_default_str();
    c->add_option("--n", ns, "second family indices (a..b[:step] or list)")->capture_default_str();
    c->add_option("--kappa", kappas, "|k - k'| values (a..b[:step] or list)")->capture_default_str();
    c->add_flag("--plot", plot, "write an SVG plot of rel_gap");
  }

  int run(const RunConfig& cfg) const {
    const DiracCalculus calc(cfg.context());
    const DoubledDirac dd = make_doubled(calc, cplx(reference_lambda(cfg.theta, family)));
    const SweepSpec spec{family, parse_int_grid(ns), parse_grid(kappas)};
    const SweepTable sw = identification_sweep(dd, spec, cfg.solver());
    Table t{{"family", "n", "kappa", "route", "d_D", "d_L", "d_L2", "d_L_mod", "rel_gap", "feasibility"}, {}};
    json rows = json::array();
    for (const auto& r : sw.rows) {
      t.add({static_cast<long long>(r.m), static_cast<long long>(r.n), r.kappa, r.method, r.d_D, r.d_L, r.d_L2, r.d_L_mod,
             r.rel_gap, r.feasibility});
      rows.push_back({{"n", r.n}, {"kappa", jnum(r.kappa)}, {"route", r.method}, {"d_D", jnum(r.d_D)},
                      {"d_L_mod", jnum(r.d_L_mod)}, {"rel_gap", jnum(r.rel_gap)}});
      fmt::print("m={} n={} kappa={} {:<6} d_D {} d_L_mod {} rel_gap {}\n", r.m, r.n, fnum(r.kappa), r.method,
                 fnum(r.d_D), fnum(r.d_L_mod), fnum(r.rel_gap));
    }
    // monotonicity along the varying axis: kappa within each n, or n when kappa is fixed
    const std::size_t group = spec.kappas.size() > 1 ? spec.kappas.size() : sw.rows.size();
    json mono = json::array();
    std::vector<Series> series;
    for (std::size_t g = 0; g < sw.rows.size(); g += group) {
      const std::size_t from = monotone_from(sw.rows, g, g + group);
      const auto& r0 = sw.rows[from];
      const std::string what = spec.kappas.size() > 1 ? fmt::format("n={}: rel_gap", sw.rows[g].n) : "rel_gap";
      if (from == g)
        fmt::print("{} strictly decreasing over the whole sweep\n", what);
      else
        fmt::print("{} strictly decreasing from n={} kappa={}\n", what, r0.n, fnum(r0.kappa));
      mono.push_back({{"n", sw.rows[g].n}, {"decreasing_from_row", from - g}});
      Series s{spec.kappas.size() > 1 ? fmt::format("n = {}", sw.rows[g].n) : "rel_gap", {}, {}};
      for (std::size_t i = g; i < g + group; ++i) {
        s.x.push_back(spec.kappas.size() > 1 ? sw.rows[i].kappa : sw.rows[i].n);
        s.y.push_back(sw.rows[i].rel_gap);
      }
      series.push_back(std::move(s));
    }
    json res = {{"family", family}, {"rows", rows}, {"monotone", mono}};
    std::vector<std::filesystem::path> files{write_csv(cfg, "asymptotics", t), write_json(cfg, "asymptotics", res)};
    if (plot)
      files.push_back(write_svg(cfg, "asymptotics", fmt::format("relative gap, family {}", family),
                                spec.kappas.size() > 1 ? "|k - k'|" : "n", "rel_gap", series));
    announce(files);
    return 0;
  }
};

// ---------------------------------------------------------------------------

struct CounterexampleCmd {
  std::string indices = "0,2,4,6";

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("counterexample", "no operator reproduces the modified length");
    c->add_option("--indices", indices, "i,j,k,l with pairwise differences >= 2")->capture_default_str();
  }

  int run(const RunConfig& cfg) const {
    const auto idx = parse_int_grid(indices);
    if (idx.size() != 4) throw ParseError("counterexample: --indices needs exactly four integers");
    const LengthOperator op = build_length(cfg.context(), cfg.trunc_dim);
    const CounterexampleResult r = counterexample_L2prime(op, idx[0], idx[1], idx[2], idx[3]);
    const bool agree = r.max_route_gap <= 1e-6;
    fmt::print("lhs {}  rhs {}  residual {}\n", fnum(r.lhs), fnum(r.rhs), fnum(r.residual));
    fmt::print("tensor-trace residual {}  route gap {}\n", fnum(r.numeric_lhs - r.numeric_rhs), fnum(r.max_route_gap));
    fmt::print("{}\n", r.residual != 0 ? "nonzero residual: no operator L'2 exists" : "zero residual");
    Table t{{"i", "j", "k", "l", "lhs", "rhs", "residual", "numeric_lhs", "numeric_rhs", "route_gap"}, {}};
    t.add({static_cast<long long>(idx[0]), static_cast<long long>(idx[1]), static_cast<long long>(idx[2]),
           static_cast<long long>(idx[3]), r.lhs, r.rhs, r.residual, r.numeric_lhs, r.numeric_rhs, r.max_route_gap});
    json res = {{"indices", idx},
                {"lhs", jnum(r.lhs)},
                {"rhs", jnum(r.rhs)},
                {"residual", jnum(r.residual)},
                {"numeric_lhs", jnum(r.numeric_lhs)},
                {"numeric_rhs", jnum(r.numeric_rhs)},
                {"route_gap", jnum(r.max_route_gap)}};
    announce({write_csv(cfg, "counterexample", t), write_json(cfg, "counterexample", res)});
    return agree ? 0 : 2;
  }
};

// ---------------------------------------------------------------------------

struct RiemannCmd {
  int m = 0;
  std::string ns = "1";
  bool plot = false;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("riemann", "eigenstate distance sum versus sqrt(2E_n) - sqrt(2E_m)");
    c->add_option("--m", m, "lower level")->check(CLI::NonNegativeNumber)->capture_default_str();
    c->add_option("--n", ns, "upper levels (a..b[:step] or list)")->capture_default_str();
    c->add_flag("--plot", plot, "write an SVG plot of rel_gap");
  }

  int run(const RunConfig& cfg) const {
    const DiracCalculus calc(cfg.context());
    const double lp = calc.ctx().lambda_p();
    Table t{{"m", "n", "d_D", "d_L_mod", "rel_gap", "radial_gap", "radial_err"}, {}};
    json rows = json::array();
    Series s{"rel_gap", {}, {}};
    bool ok = true;
    for (int n : parse_int_grid(ns)) {
      const Discrepancy d = length_vs_optimal_discrepancy(calc, m, n);
      const double want = lp * std::abs(std::sqrt(2.0 * n + 1) - std::sqrt(2.0 * m + 1));
      const double err = std::abs(d.radial_gap - want);
      ok = ok && err <= 1e-8;
      t.add({static_cast<long long>(m), static_cast<long long>(n), d.d_D, d.d_L_mod, d.rel_gap, d.radial_gap, err});
      rows.push_back({{"m", m}, {"n", n}, {"d_D", jnum(d.d_D)}, {"d_L_mod", jnum(d.d_L_mod)},
                      {"rel_gap", jnum(d.rel_gap)}, {"radial_gap", jnum(d.radial_gap)}, {"radial_err", jnum(err)}});
      s.x.push_back(n);
      s.y.push_back(d.rel_gap);
      fmt::print("m={} n={} d_D {} d_L_mod {} rel_gap {} radial_gap {}\n", m, n, fnum(d.d_D), fnum(d.d_L_mod),
                 fnum(d.rel_gap), fnum(d.radial_gap));
    }
    std::vector<std::filesystem::path> files{write_csv(cfg, "riemann", t), write_json(cfg, "riemann", {{"rows", rows}})};
    if (plot) files.push_back(write_svg(cfg, "riemann", fmt::format("Riemann sum gap from level {}", m), "n", "rel_gap", {s}));
    announce(files);
    return ok ? 0 : 2;
  }
};

// ---------------------------------------------------------------------------

struct OracleCmd {
  double radius = 8.0, step = 1.0 / 16;
  std::string x1s = "-1,0,0.5", x2s = "-1,0,0.5";

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("oracle", "matrix star product versus quadrature on the vacuum Gaussian");
    c->add_option("--radius", radius, "half-width R of the sample grid")->check(CLI::PositiveNumber)->capture_default_str();
    c->add_option("--step", step, "grid spacing h")->check(CLI::PositiveNumber)->capture_default_str();
    c->add_option("--x1", x1s, "x1 evaluation points")->capture_default_str();
    c->add_option("--x2", x2s, "x2 evaluation points")->capture_default_str();
  }

  int run(const RunConfig& cfg) const {
    const double theta = cfg.theta;
    const FockContext ctx = cfg.context();
    const Operator prod = star_matrix(vacuum_projector(ctx), vacuum_projector(ctx));
    const SampledSymbol f0 =
        sample_symbol(radius, step, [theta](double a, double b) { return vacuum_symbol(theta, a, b); });
    Table t{{"x1", "x2", "matrix_re", "matrix_im", "quad_re", "quad_im", "abs_diff", "bound", "fourier_diff"}, {}};
    int failures = 0;
    for (double x1 : parse_grid(x1s))
      for (double x2 : parse_grid(x2s)) {
        const cplx mv = vacuum_span_symbol(prod, x1, x2);
        const StarValue q = star_integral(f0, f0, x1, x2, theta);
        const double diff = std::abs(q.value - mv);
        const double fd = std::abs(star_fourier(f0, f0, x1, x2, theta).value - q.value);
        failures += diff > q.error_bound;
        t.add({x1, x2, mv.real(), mv.imag(), q.value.real(), q.value.imag(), diff, q.error_bound, fd});
        fmt::print("({}, {}) |matrix - quad| {} bound {} fourier {}\n", fnum(x1), fnum(x2), fnum(diff),
                   fnum(q.error_bound), fnum(fd));
      }
    fmt::print("{} point(s) outside the quadrature bound\n", failures);
    json res = {{"radius", jnum(radius)}, {"step", jnum(step)}, {"points", t.rows.size()}, {"failures", failures}};
    announce({write_csv(cfg, "oracle", t), write_json(cfg, "oracle", res)});
    return failures ? 2 : 0;
  }
};

// ---------------------------------------------------------------------------

struct OptimalElementCmd {
  std::string kind = "translation";
  std::string xis = "0,0.9,-2";
  int upto = 0;
  std::string ns = "1..5";

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("optimal-element", "checks on the optimal elements");
    c->add_option("--kind", kind, "translation | eigen | radial")
        ->check(CLI::IsMember({"translation", "eigen", "radial"}))
        ->capture_default_str();
    c->add_option("--xi", xis, "translation directions (radians)")->capture_default_str();
    c->add_option("--upto", upto, "eigen: levels checked (0 = N - edge_guard - 1)")->check(CLI::NonNegativeNumber);
    c->add_option("--n", ns, "radial: levels compared with level 0")->capture_default_str();
  }

  int run(const RunConfig& cfg) const {
    const DiracCalculus calc(cfg.context());
    const auto& ctx = calc.ctx();
    Table t;
    json rows = json::array();
    bool ok = true;
    if (kind == "translation") {
      t.columns = {"xi", "seminorm", "unitarity_residual"};
      for (double xi : parse_grid(xis)) {
        const auto c = check_translation_element(calc, optimal_element_translation(calc, xi));
        ok = ok && std::abs(c.seminorm - 1.0) <= 1e-8;
        t.add({xi, c.seminorm, c.unitarity_residual});
        rows.push_back({{"xi", jnum(xi)}, {"seminorm", jnum(c.seminorm)}, {"unitarity_residual", jnum(c.unitarity_residual)}});
        fmt::print("xi={} seminorm {} unitarity residual {}\n", fnum(xi), fnum(c.seminorm), fnum(c.unitarity_residual));
      }
    } else if (kind == "eigen") {
      const int u = upto > 0 ? upto : ctx.safe_dim() - 1;
      const EigenElementCheck e = check_eigenstate_element(calc, optimal_element_eigenstates(calc, u), u);
      ok = e.defect_residual <= 1e-8 && e.seminorm <= 1.0 + 1e-8;
      t.columns = {"levels", "seminorm", "defect_residual", "vacuum_defect", "shift_residual"};
      t.add({static_cast<long long>(e.levels), e.seminorm, e.defect_residual, e.vacuum_defect, e.shift_residual});
      rows.push_back({{"levels", e.levels}, {"seminorm", jnum(e.seminorm)}, {"defect_residual", jnum(e.defect_residual)},
                      {"vacuum_defect", jnum(e.vacuum_defect)}, {"shift_residual", jnum(e.shift_residual)}});
      fmt::print("levels {} seminorm {} defect residual {} vacuum defect {} shift residual {}\n", e.levels,
                 fnum(e.seminorm), fnum(e.defect_residual), fnum(e.vacuum_defect), fnum(e.shift_residual));
    } else {
      t.columns = {"m", "n", "radial_gap", "expected", "d_L_mod"};
      for (int n : parse_int_grid(ns)) {
        const Discrepancy d = length_vs_optimal_discrepancy(calc, 0, n);
        const double want = ctx.lambda_p() * (std::sqrt(2.0 * n + 1) - 1.0);
        ok = ok && std::abs(d.radial_gap - want) <= 1e-8;
        t.add({0LL, static_cast<long long>(n), d.radial_gap, want, d.d_L_mod});
        rows.push_back({{"n", n}, {"radial_gap", jnum(d.radial_gap)}, {"expected", jnum(want)}});
        fmt::print("(0,{}) radial gap {} expected {}\n", n, fnum(d.radial_gap), fnum(want));
      }
    }
    announce({write_csv(cfg, "optimal-element", t), write_json(cfg, "optimal-element", {{"kind", kind}, {"rows", rows}})});
    return ok ? 0 : 2;
  }
};

// ---------------------------------------------------------------------------

struct SuiteCmd {
  bool quick = false;
  int pairs = 200;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("suite", "run acceptance criteria 1-10");
    c->add_flag("--quick", quick, "N = 32 wherever the criterion allows it");
    c->add_option("--pairs", pairs, "random pairs for criterion 5")->check(CLI::PositiveNumber)->capture_default_str();
  }

  int run(const RunConfig& cfg) const {
    AcceptanceOptions o;
    o.quick = quick;
    o.theta = cfg.theta;
    o.seed = cfg.seed;
    o.random_pairs = pairs;
    o.solver = cfg.solver();
    Table t{{"criterion", "name", "passed", "detail"}, {}};
    json rows = json::array();
    int passed = 0;
    run_acceptance(o, [&](const CriterionResult& r) {
      fmt::print("{} criterion {} ({}): {} [{:.1f}s]\n", r.passed ? "PASS" : "FAIL", r.id, r.name, r.detail, r.seconds);
      std::fflush(stdout);
      passed += r.passed;
      t.add({static_cast<long long>(r.id), r.name, r.passed, r.detail});
      rows.push_back({{"criterion", r.id}, {"name", r.name}, {"passed", r.passed}, {"detail", r.detail}});
    });
    const auto csv = write_csv(cfg, "suite", t);
    const auto js = write_json(cfg, "suite", {{"passed", passed}, {"total", 10}, {"criteria", rows}});
    bool headers = true;
    for (const auto& p : {csv, js})
      if (!has_config_header(p)) {
        fmt::print("missing config header in {}\n", p.string());
        headers = false;
      }
    announce({csv, js});
    fmt::print("{}/10 criteria passed{}\n", passed, headers ? "" : ", config header check FAILED");
    return passed == 10 && headers ? 0 : 2;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Metric structure of the Moyal plane: spectral distances, quantum lengths, doubled triples"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", "moyal 1.0.0");
  RunConfigOptions run_options(app);

  DistanceCmd distance;
  QLengthCmd qlength;
  SpectrumCmd spectrum;
  PythagorasCmd pythagoras;
  AsymptoticsCmd asymptotics;
  CounterexampleCmd counterexample;
  RiemannCmd riemann;
  OracleCmd oracle;
  OptimalElementCmd optimal;
  SuiteCmd suite;
  distance.add(app);
  qlength.add(app);
  spectrum.add(app);
  pythagoras.add(app);
  asymptotics.add(app);
  counterexample.add(app);
  riemann.add(app);
  oracle.add(app);
  optimal.add(app);
  suite.add(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 64;
  }

  const std::map<std::string, std::function<int(const RunConfig&)>> commands = {
      {"distance", [&](const RunConfig& c) { return distance.run(c); }},
      {"qlength", [&](const RunConfig& c) { return qlength.run(c); }},
      {"spectrum", [&](const RunConfig& c) { return spectrum.run(c); }},
      {"pythagoras", [&](const RunConfig& c) { return pythagoras.run(c); }},
      {"asymptotics", [&](const RunConfig& c) { return asymptotics.run(c); }},
      {"counterexample", [&](const RunConfig& c) { return counterexample.run(c); }},
      {"riemann", [&](const RunConfig& c) { return riemann.run(c); }},
      {"oracle", [&](const RunConfig& c) { return oracle.run(c); }},
      {"optimal-element", [&](const RunConfig& c) { return optimal.run(c); }},
      {"suite", [&](const RunConfig& c) { return suite.run(c); }},
  };
  try {
    const RunConfig cfg = run_options.resolve();
    return commands.at(app.get_subcommands().front()->get_name())(cfg);
  } catch (const moyal::Error& e) {
    std::fprintf(stderr, "moyal: %s\n", e.what());
    return e.exit_code();
  } catch (const std::exception& e) {
    std::fprintf(stderr, "moyal: %s\n", e.what());
    return 65;
  }
}
