#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <map>

#include "output.hpp"
#include "run_config.hpp"

using namespace moyal;
using namespace moyal::cli;

namespace {

namespace fs = std::filesystem;

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("moyal_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

struct Parsed {
  CLI::App app;
  RunConfigOptions opts{app};
  RunConfig resolve(std::vector<std::string> args, const std::map<std::string, std::string>& env) {
    std::reverse(args.begin(), args.end());
    app.parse(args);
    return opts.resolve([&](const char* n) -> const char* {
      auto it = env.find(n);
      return it == env.end() ? nullptr : it->second.c_str();
    });
  }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST(RunConfig, Defaults) {
  Parsed p;
  const RunConfig c = p.resolve({}, {});
  EXPECT_EQ(c.trunc_dim, 64);
  EXPECT_EQ(c.theta, 1.0);
  EXPECT_EQ(c.restarts, 8);
  EXPECT_EQ(c.out_dir, ".");
  EXPECT_TRUE(c.config_file.empty());
}

TEST(RunConfig, Precedence) {
  const fs::path dir = scratch("cfg");
  const fs::path file = dir / "run.cfg";
  std::ofstream(file) << "# comment\ntrunc_dim = 40\ntheta = 2\nseed = 5\nrestarts = 3\n";
  {
    Parsed p;
    const RunConfig c = p.resolve({"--config", file.string()}, {});
    EXPECT_EQ(c.trunc_dim, 40);
    EXPECT_EQ(c.theta, 2.0);
    EXPECT_EQ(c.config_file, file.string());
  }
  {
    Parsed p;
    const RunConfig c = p.resolve({"--config", file.string()}, {{"MOYAL_THETA", "3"}, {"MOYAL_SEED", "9"}});
    EXPECT_EQ(c.theta, 3.0);   // env over file
    EXPECT_EQ(c.seed, 9u);
    EXPECT_EQ(c.restarts, 3);  // file over default
  }
  {
    Parsed p;
    const RunConfig c =
        p.resolve({"--theta", "4", "--trunc-dim", "48"}, {{"MOYAL_CONFIG", file.string()}, {"MOYAL_THETA", "3"}});
    EXPECT_EQ(c.theta, 4.0);  // flag over env
    EXPECT_EQ(c.trunc_dim, 48);
    EXPECT_EQ(c.seed, 5u);    // MOYAL_CONFIG picked up
  }
}

TEST(RunConfig, Errors) {
  const fs::path dir = scratch("cfg_err");
  std::ofstream(dir / "bad.cfg") << "nonsense = 1\n";
  {
    Parsed p;
    EXPECT_THROW(p.resolve({"--config", (dir / "bad.cfg").string()}, {}), ParseError);
  }
  {
    Parsed p;
    EXPECT_THROW(p.resolve({"--config", (dir / "missing.cfg").string()}, {}), ParseError);
  }
  {
    Parsed p;
    EXPECT_THROW(p.resolve({"--trunc-dim", "abc"}, {}), ParseError);
  }
  {
    Parsed p;
    EXPECT_THROW(p.resolve({}, {{"MOYAL_ITERATIONS", "1.5"}}), ParseError);
  }
}

TEST(Output, NumbersAtTwelveDigits) {
  EXPECT_EQ(fnum(1.0 / 3.0), "0.333333333333");
  EXPECT_EQ(fnum(2.0), "2");
  EXPECT_EQ(fnum(1e-20), "1e-20");
  EXPECT_EQ(jnum(std::sqrt(2.0)), 1.41421356237);
  EXPECT_EQ(json(jnum(std::sqrt(2.0))).dump(), "1.41421356237");
}

TEST(Output, CsvHeaderAndQuoting) {
  RunConfig cfg;
  cfg.out_dir = scratch("csv").string();
  Table t{{"family", "d_D"}, {}};
  t.add({std::string("a,b"), 0.5});
  t.add({std::string("plain"), 1.0 / 3.0});
  EXPECT_THROW(t.add({1.0}), PreconditionError);
  const auto p = write_csv(cfg, "probe", t);
  const std::string text = slurp(p);
  EXPECT_EQ(text.rfind("# moyal probe\n# trunc_dim = 64\n", 0), 0u);
  EXPECT_NE(text.find("\nfamily,d_D\n\"a,b\",0.5\nplain,0.333333333333\n"), std::string::npos);
  EXPECT_EQ(text.find('\r'), std::string::npos);
  EXPECT_TRUE(has_config_header(p));
}

TEST(Output, JsonLayoutAndHeaderCheck) {
  RunConfig cfg;
  cfg.out_dir = scratch("json").string();
  const auto p = write_json(cfg, "probe", {{"x", jnum(0.1 + 0.2)}});
  const json j = json::parse(slurp(p));
  EXPECT_EQ(j["command"], "probe");
  EXPECT_EQ(j["config"]["trunc_dim"], "64");
  EXPECT_EQ(j["result"]["x"].dump(), "0.3");
  EXPECT_TRUE(has_config_header(p));
  std::ofstream(fs::path(cfg.out_dir) / "bare.csv") << "a,b\n1,2\n";
  EXPECT_FALSE(has_config_header(fs::path(cfg.out_dir) / "bare.csv"));
}

TEST(Output, SvgCarriesConfig) {
  RunConfig cfg;
  cfg.out_dir = scratch("svg").string();
  const auto p = write_svg(cfg, "probe", "t", "x", "y", {{"s", {0, 1, 2}, {3, 2, 1}}});
  const std::string text = slurp(p);
  EXPECT_NE(text.find("<polyline"), std::string::npos);
  EXPECT_NE(text.find("theta = 1"), std::string::npos);
  EXPECT_TRUE(has_config_header(p));
}

TEST(Output, Grids) {
  EXPECT_EQ(parse_grid("0..3"), (std::vector<double>{0, 1, 2, 3}));
  EXPECT_EQ(parse_grid("0..1:0.25"), (std::vector<double>{0, 0.25, 0.5, 0.75, 1}));
  EXPECT_EQ(parse_grid("1,2.5,-3"), (std::vector<double>{1, 2.5, -3}));
  EXPECT_EQ(parse_int_grid("1..5:2"), (std::vector<int>{1, 3, 5}));
  EXPECT_THROW(parse_grid("3..1"), ParseError);
  EXPECT_THROW(parse_grid("0..1:0"), ParseError);
  EXPECT_THROW(parse_grid("1,x"), ParseError);
  EXPECT_THROW(parse_int_grid("0.5"), ParseError);
}
