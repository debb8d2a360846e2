#pragma once

// Effective run configuration, layered as
//   defaults < config file (--config / MOYAL_CONFIG) < MOYAL_* environment < flags.
// Config files are `key = value` lines (CLI11's INI reader; `#` comments).

#include <cstdlib>
#include <fstream>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "moyal/ball_solver.hpp"
#include "moyal/error.hpp"
#include "moyal/fock.hpp"

namespace moyal::cli {

struct RunConfig {
  int trunc_dim = 64;
  double theta = 1.0;
  double tol = 1e-10;
  double leakage_bound = 1e-10;
  unsigned seed = 0;
  int iterations = 2000;
  int restarts = 8;
  int admm_iterations = 300;
  std::string out_dir = ".";
  std::string config_file;  // empty when none was read

  FockContext context() const { return make_context(trunc_dim, theta, tol, std::nullopt, leakage_bound); }
  FockContext context(int n) const { return make_context(n, theta, tol, std::nullopt, leakage_bound); }

  BallSolverConfig solver() const {
    BallSolverConfig c;
    c.seed = seed;
    c.iterations = iterations;
    c.restarts = restarts;
    c.admm_iterations = admm_iterations;
    return c;
  }

  /// (key, value) pairs in a fixed order; values at 12 significant digits.
  std::vector<std::pair<std::string, std::string>> entries() const {
    return {{"trunc_dim", std::to_string(trunc_dim)},
            {"theta", num(theta)},
            {"tol", num(tol)},
            {"leakage_bound", num(leakage_bound)},
            {"seed", std::to_string(seed)},
            {"iterations", std::to_string(iterations)},
            {"restarts", std::to_string(restarts)},
            {"admm_iterations", std::to_string(admm_iterations)},
            {"out_dir", out_dir},
            {"config_file", config_file}};
  }

 private:
  static std::string num(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
  }
};

namespace detail {

template <class T>
T convert(const std::string& key, const std::string& text) {
  T v{};
  if (!CLI::detail::lexical_conversion<T, T>({text}, v))
    throw ParseError("config: bad value '" + text + "' for " + key);
  return v;
}

struct Key {
  std::string name;  // file key; flag --name with '_' → '-'; env MOYAL_NAME
  std::string help;
  std::function<void(RunConfig&, const std::string&)> set;
};

inline const std::vector<Key>& keys() {
  static const std::vector<Key> k = {
      {"trunc_dim", "Fock truncation N", [](RunConfig& c, const std::string& v) { c.trunc_dim = convert<int>("trunc_dim", v); }},
      {"theta", "noncommutativity theta", [](RunConfig& c, const std::string& v) { c.theta = convert<double>("theta", v); }},
      {"tol", "numerical tolerance", [](RunConfig& c, const std::string& v) { c.tol = convert<double>("tol", v); }},
      {"leakage_bound", "maximal state leakage",
       [](RunConfig& c, const std::string& v) { c.leakage_bound = convert<double>("leakage_bound", v); }},
      {"seed", "solver seed", [](RunConfig& c, const std::string& v) { c.seed = convert<unsigned>("seed", v); }},
      {"iterations", "subgradient iterations per restart",
       [](RunConfig& c, const std::string& v) { c.iterations = convert<int>("iterations", v); }},
      {"restarts", "subgradient restarts", [](RunConfig& c, const std::string& v) { c.restarts = convert<int>("restarts", v); }},
      {"admm_iterations", "ADMM iterations",
       [](RunConfig& c, const std::string& v) { c.admm_iterations = convert<int>("admm_iterations", v); }},
      {"out_dir", "output directory", [](RunConfig& c, const std::string& v) { c.out_dir = v; }},
  };
  return k;
}

inline std::string flag_name(const std::string& key) {
  std::string f = "--" + key;
  for (char& ch : f)
    if (ch == '_') ch = '-';
  return f;
}

inline std::string env_name(const std::string& key) {
  std::string e = "MOYAL_" + key;
  for (char& ch : e) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
  return e;
}

}  // namespace detail

/// Flag storage registered on a CLI11 app; resolve() builds the RunConfig.
class RunConfigOptions {
 public:
  explicit RunConfigOptions(CLI::App& app) {
    config_ = app.add_option("--config")->description("key = value configuration file (env MOYAL_CONFIG)");
    config_->group("Run configuration");
    for (const auto& k : detail::keys())
      flags_.push_back(app.add_option(detail::flag_name(k.name))
                           ->description(k.help + " (env " + detail::env_name(k.name) + ")")
                           ->group("Run configuration"));
  }

  /// Applies the layers; `env` is injectable for tests.
  RunConfig resolve(const std::function<const char*(const char*)>& env = [](const char* n) { return std::getenv(n); }) const {
    RunConfig cfg;
    std::string file = config_->count() ? config_->as<std::string>() : "";
    if (file.empty())
      if (const char* e = env("MOYAL_CONFIG")) file = e;
    if (!file.empty()) {
      std::ifstream in(file);
      if (!in) throw ParseError("config: cannot read " + file);
      for (const auto& item : CLI::ConfigINI().from_config(in)) {
        if (item.name == "++" || item.name == "--") continue;  // section markers
        const auto& ks = detail::keys();
        auto it = std::find_if(ks.begin(), ks.end(), [&](const detail::Key& k) { return k.name == item.name; });
        if (it == ks.end()) throw ParseError("config: unknown key '" + item.name + "' in " + file);
        if (item.inputs.size() != 1) throw ParseError("config: key '" + item.name + "' needs one value");
        it->set(cfg, item.inputs.front());
      }
      cfg.config_file = file;
    }
    for (const auto& k : detail::keys())
      if (const char* e = env(detail::env_name(k.name).c_str())) k.set(cfg, e);
    for (std::size_t i = 0; i < flags_.size(); ++i)
      if (flags_[i]->count()) detail::keys()[i].set(cfg, flags_[i]->as<std::string>());
    return cfg;
  }

 private:
  CLI::Option* config_;
  std::vector<CLI::Option*> flags_;
};

}  // namespace moyal::cli
