#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "qig/io/config.hpp"
#include "qig/io/csv.hpp"
#include "qig/io/svg.hpp"
#include "qig/io/tables.hpp"

using namespace qig;
using namespace qig::io;
namespace fs = std::filesystem;

namespace {
std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("qig_io_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int run_cli(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string(QIG_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

const char* kFixedPoint = R"({
  "system": {
    "hamiltonian": [[2.5, 0], [0, -2.5]],
    "jump_pairs": [ { "L": [[0, 0], [2, 0]], "L_partner": [[0, 1], [0, 0]], "phi": 1.3862943611198906 } ],
    "initial_state": [[0.2, 0], [0, 0.8]],
    "beta": 0.1
  },
  "grid": { "t_final": 0.5, "dt": 0.01 }
})";
}  // namespace

TEST(Csv, ShortestRoundTrip) {
  Table t;
  t.add("t", {0.0, 0.1, 1.0 / 3.0});
  t.add("x", {-0.0, std::numeric_limits<double>::quiet_NaN(), 1e-300});
  const std::string text = to_csv(t);
  EXPECT_EQ(text, "t,x\n0,0\n0.1,nan\n0.3333333333333333,1e-300\n");
  const Table back = parse_csv(text);
  ASSERT_EQ(back.header, t.header);
  EXPECT_EQ(back.columns[0][2], 1.0 / 3.0);
  EXPECT_TRUE(std::isnan(back.columns[1][1]));
  EXPECT_EQ(back.columns[1][2], 1e-300);
}

TEST(Csv, HeaderOnlyForEmptyTable) {
  Table t;
  t.add("t", {});
  t.add("F_Q_sld", {});
  EXPECT_EQ(to_csv(t), "t,F_Q_sld\n");
  EXPECT_EQ(parse_csv("t,F_Q_sld\n").rows(), 0u);
}

TEST(Csv, RejectsRaggedRows) {
  EXPECT_THROW(parse_csv("a,b\n1,2\n3\n"), ValidationError);
  EXPECT_THROW(parse_csv("a\nfoo\n"), ValidationError);
  Table t;
  t.add("a", {1, 2});
  EXPECT_THROW(t.add("b", {1}), ValidationError);
}

TEST(Svg, MinimalChart) {
  Table t;
  t.add("t", {0, 1, 2, 3});
  t.add("y", {1, std::numeric_limits<double>::quiet_NaN(), 3, 4});
  const std::string svg = to_svg(t, "demo");
  EXPECT_NE(svg.find("<svg"), std::string::npos);
  EXPECT_NE(svg.find("<path d=\"M"), std::string::npos);
  EXPECT_NE(svg.find(">y</text>"), std::string::npos);
  EXPECT_EQ(svg, to_svg(t, "demo"));
}

TEST(Config, ParsesSystem) {
  const RunConfig c = parse_config(kFixedPoint);
  ASSERT_TRUE(c.system);
  EXPECT_EQ(c.system->pairs.size(), 1u);
  EXPECT_EQ(c.metrics.size(), 3u);
  EXPECT_NEAR(*c.system->beta, 0.1, 0);
  EXPECT_NEAR(c.grid->t_final, 0.5, 0);
}

TEST(Config, ComplexEntriesAndBloch) {
  const RunConfig c = parse_config(R"({"system": {"hamiltonian": [[1, [0, -1]], [[0, 1], -1]],
    "jump_pairs": [{"self_paired": [[1, 0], [0, -1]]}], "initial_state": {"bloch": [0.1, 0.2, 0.3]}},
    "metrics": ["wy"]})");
  EXPECT_EQ(c.system->hamiltonian(0, 1), Complex(0, -1));
  EXPECT_TRUE(c.system->pairs[0].is_self_paired());
  EXPECT_NEAR(c.system->initial_state(0, 0).real(), 0.65, 1e-15);
  EXPECT_EQ(c.metrics, std::vector{MetricKind::WY});
}

TEST(Config, MpembaOverrides) {
  const RunConfig c = parse_config(R"({"mpemba": {"temperature": 5}, "grid": {"t_final": 3, "dt": 0.01}})");
  const auto s = c.scenario();
  EXPECT_EQ(s.temperature, 5.0);
  EXPECT_EQ(s.epsilon, 5.0);
  EXPECT_EQ(s.horizon, 3.0);
  EXPECT_EQ(s.dt, 0.01);
}

TEST(Config, ErrorsCarryLineNumbers) {
  try {
    parse_config("{\n  \"grid\": {\n    \"t_final\": 1,\n    \"dt\": oops\n  }\n}", "cfg.json");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.line(), 4u);
    EXPECT_NE(std::string(e.what()).find("cfg.json:4"), std::string::npos);
  }
  try {
    parse_config("{\n  \"metrics\": [\"sld\"],\n  \"system\": {\n    \"hamiltonian\": [[0, 1], [0, 0]],\n"
                 "    \"initial_state\": [[1, 0], [0, 0]]\n  }\n}");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.line(), 4u);
    EXPECT_NE(std::string(e.what()).find("not Hermitian"), std::string::npos);
  }
  try {
    parse_config("{\n\n  \"metricz\": []\n}");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  EXPECT_THROW(parse_config(R"({"metrics": []})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"metrics": ["sld", "sld"]})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"mpemba": {"r_ref": [0, 0, 0.5]}})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"system": {"hamiltonian": [[1, 0], [0, 1]], "initial_state": [[0.6, 0], [0, 0.6]]}})"),
               ConfigError);
  EXPECT_THROW(parse_config(R"({"system": {"hamiltonian": [[1, 0], [0, 1]], "initial_state": [[1, 0], [0, 0]],
    "jump_pairs": [{"L": [[0, 1], [0, 0]], "L_partner": [[0, 1], [0, 0]], "phi": 0}]}})"),
               ConfigError);
}

TEST(Config, OutputDirectoryOverride) {
  RunConfig c;
  c.output = "from-config";
  ::unsetenv("QIG_OUTPUT_DIR");
  EXPECT_EQ(output_directory(c), "from-config");
  ::setenv("QIG_OUTPUT_DIR", "from-env", 1);
  EXPECT_EQ(output_directory(c), "from-env");
  ::unsetenv("QIG_OUTPUT_DIR");
}

TEST(Tables, StateColumnOrder) {
  const auto sys = mpemba::build_scenario({});
  const std::vector<MetricKind> m{MetricKind::SLD, MetricKind::HM};
  const auto run = analyze(sys.lindbladian, sys.reference, TimeGrid{0.1, 1e-2}, m, sys.beta);
  const Table t = state_table(run, m);
  const std::vector<std::string> expected{
      "t",     "F_Q_sld", "F_Q_hm",  "F_IC",    "F_C_sld",     "F_C_hm",       "S",         "Sdot",
      "sigma", "Phi",     "L_sld",   "L_hm",    "R_sld",       "R_hm",         "delta_sld", "delta_hm",
      "I_sld", "I_hm",    "F_neq",   "heat_current", "bound_lhs", "bound_rhs"};
  EXPECT_EQ(t.header, expected);
  EXPECT_EQ(t.rows(), 11u);
  EXPECT_TRUE(std::isnan(t.column("bound_rhs")[0]));
  EXPECT_FALSE(std::isnan(t.column("bound_rhs")[1]));
}

TEST(Cli, SimulateFixedPoint) {
  const fs::path dir = scratch("simulate");
  std::ofstream(dir / "cfg.json") << kFixedPoint;
  ::setenv("QIG_OUTPUT_DIR", (dir / "out").c_str(), 1);
  EXPECT_EQ(run_cli("simulate --config " + (dir / "cfg.json").string(), dir / "log"), 0) << slurp(dir / "log");
  ::unsetenv("QIG_OUTPUT_DIR");
  const Table g = read_csv((dir / "out" / "geometry.csv").string());
  for (const char* col : {"F_Q_sld", "F_Q_wy", "F_Q_hm"})
    for (double v : g.column(col)) EXPECT_LE(std::abs(v), 1e-20);
  EXPECT_TRUE(fs::exists(dir / "out" / "trajectory.csv"));
}

TEST(Cli, ExitCodes) {
  const fs::path dir = scratch("exit");
  std::ofstream(dir / "bad.json") << "{\n  \"grid\": {\"t_final\": 1,\n  \"dt\": }\n}";
  EXPECT_EQ(run_cli("simulate --config " + (dir / "bad.json").string(), dir / "log"), 2);
  EXPECT_NE(slurp(dir / "log").find("bad.json:3"), std::string::npos) << slurp(dir / "log");
  EXPECT_EQ(run_cli("frobnicate", dir / "log"), 2);
  // a step far too large for the decay rate: numerical failure
  std::ofstream(dir / "stiff.json") << R"({"system": {"hamiltonian": [[0, 0], [0, 0]],
    "jump_pairs": [{"L": [[0, 0], [20, 0]], "L_partner": [[0, 20], [0, 0]], "phi": 0}],
    "initial_state": [[1, 0], [0, 0]]}, "grid": {"t_final": 1, "dt": 0.1}})";
  ::setenv("QIG_OUTPUT_DIR", (dir / "out").c_str(), 1);
  EXPECT_EQ(run_cli("simulate --config " + (dir / "stiff.json").string(), dir / "log"), 3) << slurp(dir / "log");
  ::unsetenv("QIG_OUTPUT_DIR");
}

TEST(Cli, CheckIsDeterministic) {
  const fs::path dir = scratch("check");
  EXPECT_EQ(run_cli("check --seed 7", dir / "a"), 0) << slurp(dir / "a");
  EXPECT_EQ(run_cli("check --seed 7", dir / "b"), 0);
  EXPECT_EQ(slurp(dir / "a"), slurp(dir / "b"));
  EXPECT_NE(slurp(dir / "a").find("all properties hold"), std::string::npos);
}

TEST(Cli, MpembaOutputsAndPlotRoundTrip) {
  const fs::path dir = scratch("mpemba");
  std::ofstream(dir / "cfg.json") << R"({"grid": {"t_final": 4, "dt": 0.002}, "emit_svg": true})";
  ::setenv("QIG_OUTPUT_DIR", (dir / "out").c_str(), 1);
  ASSERT_EQ(run_cli("mpemba --config " + (dir / "cfg.json").string(), dir / "log"), 0) << slurp(dir / "log");
  ::unsetenv("QIG_OUTPUT_DIR");
  const fs::path out = dir / "out";
  for (const char* f : {"fig1.csv", "fig2.csv", "fig3.csv", "fig4.csv", "fneq.csv", "summary.txt", "fig1.svg"})
    EXPECT_TRUE(fs::exists(out / f)) << f;
  const std::string summary = slurp(out / "summary.txt");
  EXPECT_NE(summary.find("crossing: t_M="), std::string::npos);
  const Table ref = read_csv((out / "reference.csv").string());
  const auto& l = ref.column("L_sld");
  for (std::size_t i = 1; i < l.size(); ++i) EXPECT_GE(l[i], l[i - 1]);
  // every CSV goes back through the plot subcommand
  for (const auto& e : fs::directory_iterator(out)) {
    if (e.path().extension() != ".csv") continue;
    const fs::path svg = dir / (e.path().stem().string() + "_plot.svg");
    EXPECT_EQ(run_cli("plot " + e.path().string() + " -o " + svg.string(), dir / "log"), 0) << e.path();
    EXPECT_NE(slurp(svg).find("</svg>"), std::string::npos);
  }
}
