// qig: command-line front end for the trajectory geometry toolkit.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "qig/analysis.hpp"
#include "qig/check.hpp"
#include "qig/io/config.hpp"
#include "qig/io/csv.hpp"
#include "qig/io/svg.hpp"
#include "qig/io/tables.hpp"
#include "qig/mpemba.hpp"

namespace fs = std::filesystem;
using namespace qig;

namespace {

constexpr int kOk = 0, kBadConfig = 2, kNumerical = 3;

fs::path prepare_output(const io::RunConfig& c) {
  const fs::path dir = io::output_directory(c);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw io::IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
  return dir;
}

void emit(const io::Table& t, const fs::path& dir, const std::string& stem, bool svg) {
  io::write_csv(t, (dir / (stem + ".csv")).string());
  if (svg) io::write_svg(t, (dir / (stem + ".svg")).string(), stem);
}

int simulate(const std::string& config_path) {
  const io::RunConfig cfg = io::load_config(config_path);
  if (!cfg.system && !cfg.mpemba)
    throw io::ConfigError(config_path, 0, "simulate needs a \"system\" or \"mpemba\" section");
  RunAnalysis run;
  if (cfg.system) {
    const TimeGrid grid = cfg.grid.value_or(TimeGrid{10.0, 1e-3});
    run = analyze(cfg.system->lindbladian(), DensityMatrix(cfg.system->initial_state), grid, cfg.metrics,
                  cfg.system->beta, cfg.system->measured());
  } else {
    const auto s = cfg.scenario();
    const auto sys = mpemba::build_scenario(s);
    run = analyze(sys.lindbladian, sys.reference, TimeGrid{s.horizon, s.dt}, cfg.metrics, sys.beta);
  }
  const fs::path dir = prepare_output(cfg);
  emit(io::trajectory_table(run.trajectory), dir, "trajectory", cfg.emit_svg);
  emit(io::state_table(run, cfg.metrics), dir, "geometry", cfg.emit_svg);
  std::cout << "wrote " << (dir / "trajectory.csv").string() << " and " << (dir / "geometry.csv").string() << "\n";
  return kOk;
}

int mpemba_run(const std::string& config_path) {
  io::RunConfig cfg;
  if (!config_path.empty()) cfg = io::load_config(config_path);
  const auto bundle = mpemba::run_experiment(cfg.scenario(), cfg.metrics);
  const fs::path dir = prepare_output(cfg);
  emit(io::fig1_table(bundle), dir, "fig1", cfg.emit_svg);
  emit(io::fig2_table(bundle), dir, "fig2", cfg.emit_svg);
  emit(io::fig3_table(bundle), dir, "fig3", cfg.emit_svg);
  emit(io::fig4_table(bundle), dir, "fig4", cfg.emit_svg);
  emit(io::fneq_table(bundle), dir, "fneq", cfg.emit_svg);
  emit(io::state_table(bundle.reference, bundle.metrics), dir, "reference", cfg.emit_svg);
  emit(io::state_table(bundle.rotated, bundle.metrics), dir, "rotated", cfg.emit_svg);
  const std::string summary = io::mpemba_summary(bundle);
  io::write_text((dir / "summary.txt").string(), summary);
  std::cout << summary;
  return kOk;
}

int plot(const std::string& csv, std::string out) {
  const io::Table t = io::read_csv(csv);
  if (out.empty()) out = fs::path(csv).replace_extension(".svg").string();
  io::write_svg(t, out, fs::path(csv).stem().string());
  std::cout << "wrote " << out << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Information geometry and thermodynamics of GKSL trajectories"};
  app.require_subcommand(1);

  std::string sim_config;
  auto* sim = app.add_subcommand("simulate", "integrate a configured system; writes trajectory.csv and geometry.csv");
  sim->add_option("--config", sim_config, "JSON configuration")->required();

  std::string mp_config;
  auto* mp = app.add_subcommand("mpemba", "quantum Mpemba experiment; writes fig1-4.csv, fneq.csv, summary.txt");
  mp->add_option("--config", mp_config, "JSON configuration (epsilon=5, T=10, gamma=1 when omitted)");

  std::uint64_t seed = 1;
  auto* chk = app.add_subcommand("check", "randomized property suite; exit 0 iff all properties hold");
  chk->add_option("--seed", seed, "random seed");

  std::string csv, svg_out;
  auto* plt = app.add_subcommand("plot", "line chart of a CSV file as SVG");
  plt->add_option("csv", csv, "input CSV")->required();
  plt->add_option("-o,--output", svg_out, "output SVG (default: input with .svg extension)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kBadConfig;
  }

  try {
    if (*sim) return simulate(sim_config);
    if (*mp) return mpemba_run(mp_config);
    if (*chk) return check::run_all(seed, std::cout) ? kOk : kNumerical;
    if (*plt) return plot(csv, svg_out);
  } catch (const io::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kBadConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumerical;
  }
  return kOk;
}
