#pragma once

// JSON run configuration.
//
//   {
//     "mpemba":  { "epsilon": 5, "temperature": 10, "gamma": 1,
//                  "r_ref": [x, y, z], "horizon": 12, "dt": 0.001 },
//     "system":  { "hamiltonian": M,
//                  "jump_pairs": [ { "L": M, "L_partner": M, "phi": 0.5 },
//                                  { "self_paired": M } ],
//                  "initial_state": M | { "bloch": [x, y, z] },
//                  "beta": 0.1,          // optional, enables F_neq
//                  "observable": M },    // optional, defaults to H
//     "metrics": ["sld", "wy", "hm"],
//     "grid":    { "t_final": 12, "dt": 0.001 },
//     "output":  "qig-out",
//     "emit_svg": false
//   }
//
// A matrix M is a list of rows; each entry is a number or an [re, im] pair.
// Every key is optional except that `simulate` needs "system" or "mpemba".

#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "qig/errors.hpp"
#include "qig/gksl.hpp"
#include "qig/info_geometry.hpp"
#include "qig/mpemba.hpp"
#include "qig/numerics.hpp"
#include "qig/state_algebra.hpp"

namespace qig::io {

using json = nlohmann::json;

/// Malformed configuration; `line` is 1-based, 0 when unknown.
class ConfigError : public ValidationError {
public:
  ConfigError(std::string source, std::size_t line, const std::string& what)
      : ValidationError(source + (line ? ":" + std::to_string(line) : std::string()) + ": " + what),
        line_(line) {}
  std::size_t line() const { return line_; }

private:
  std::size_t line_;
};

struct SystemSpec {
  ComplexMatrix hamiltonian;
  std::vector<JumpPair> pairs;
  ComplexMatrix initial_state;
  std::optional<double> beta;
  std::optional<ComplexMatrix> observable;

  Lindbladian lindbladian() const { return Lindbladian(Hamiltonian(hamiltonian), pairs); }
  const ComplexMatrix& measured() const { return observable ? *observable : hamiltonian; }
};

struct RunConfig {
  std::optional<mpemba::MpembaScenario> mpemba;
  std::optional<SystemSpec> system;
  std::vector<MetricKind> metrics{MetricKind::SLD, MetricKind::WY, MetricKind::HM};
  std::optional<TimeGrid> grid;
  std::string output = "qig-out";
  bool emit_svg = false;

  /// Scenario with the grid override applied (standard Mpemba defaults when absent).
  mpemba::MpembaScenario scenario() const {
    mpemba::MpembaScenario s = mpemba.value_or(mpemba::MpembaScenario{});
    if (grid) {
      s.horizon = grid->t_final;
      s.dt = grid->dt;
    }
    return s;
  }
};

/// QIG_OUTPUT_DIR wins over the configured directory.
inline std::string output_directory(const RunConfig& c) {
  if (const char* env = std::getenv("QIG_OUTPUT_DIR"); env && *env) return env;
  return c.output;
}

namespace detail {

using Path = std::vector<std::string>;

inline std::string join(const Path& p) {
  std::string s;
  for (const auto& k : p) s += (s.empty() ? "" : ".") + k;
  return s.empty() ? "<root>" : s;
}

/// Best-effort source line of a value: follows the object keys of the path
/// through the text in order. Array indices are not resolved.
inline std::size_t locate(const std::string& text, const Path& path) {
  std::size_t pos = 0;
  bool found = false;
  for (const auto& k : path) {
    if (!k.empty() && k.front() == '[') continue;
    const auto at = text.find('"' + k + '"', pos);
    if (at == std::string::npos) break;
    pos = at;
    found = true;
  }
  if (!found) return 0;
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(pos), '\n'));
}

class Reader {
public:
  Reader(std::string source, const std::string& text) : source_(std::move(source)), text_(text) {}

  [[noreturn]] void fail(const Path& at, const std::string& what) const {
    throw ConfigError(source_, locate(text_, at), join(at) + ": " + what);
  }

  void only_keys(const json& j, const Path& at, std::initializer_list<const char*> allowed) const {
    if (!j.is_object()) fail(at, "expected an object");
    for (const auto& [key, _] : j.items()) {
      bool ok = false;
      for (const char* a : allowed) ok = ok || key == a;
      if (!ok) fail(extend(at, key), "unknown key");
    }
  }

  double number(const json& j, const Path& at) const {
    if (!j.is_number()) fail(at, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) fail(at, "expected a finite number");
    return v;
  }

  double positive(const json& j, const Path& at) const {
    const double v = number(j, at);
    if (!(v > 0.0)) fail(at, "must be positive");
    return v;
  }

  Complex complex(const json& j, const Path& at) const {
    if (j.is_number()) return {number(j, at), 0.0};
    if (j.is_array() && j.size() == 2) return {number(j[0], at), number(j[1], at)};
    fail(at, "expected a number or an [re, im] pair");
  }

  ComplexMatrix matrix(const json& j, const Path& at) const {
    if (!j.is_array() || j.empty()) fail(at, "expected a nonempty list of rows");
    const auto n = static_cast<Index>(j.size());
    ComplexMatrix m(n, n);
    for (Index r = 0; r < n; ++r) {
      const json& row = j[static_cast<std::size_t>(r)];
      if (!row.is_array() || static_cast<Index>(row.size()) != n) fail(at, "matrix must be square");
      for (Index c = 0; c < n; ++c) m(r, c) = complex(row[static_cast<std::size_t>(c)], at);
    }
    return m;
  }

  BlochVector bloch(const json& j, const Path& at) const {
    if (!j.is_array() || j.size() != 3) fail(at, "expected [x, y, z]");
    return {number(j[0], at), number(j[1], at), number(j[2], at)};
  }

  static Path extend(Path p, std::string k) {
    p.push_back(std::move(k));
    return p;
  }

  /// Runs a library constructor, turning its validation errors into
  /// located config errors.
  template <class Fn>
  auto guarded(const Path& at, Fn&& fn) const {
    try {
      return fn();
    } catch (const ConfigError&) {
      throw;
    } catch (const ValidationError& e) {
      fail(at, e.what());
    }
  }

private:
  std::string source_;
  const std::string& text_;
};

inline mpemba::MpembaScenario read_scenario(const Reader& rd, const json& j, const Path& at) {
  rd.only_keys(j, at, {"epsilon", "temperature", "gamma", "r_ref", "horizon", "dt"});
  mpemba::MpembaScenario s;
  if (j.contains("epsilon")) s.epsilon = rd.number(j["epsilon"], Reader::extend(at, "epsilon"));
  if (j.contains("temperature")) s.temperature = rd.number(j["temperature"], Reader::extend(at, "temperature"));
  if (j.contains("gamma")) s.gamma = rd.number(j["gamma"], Reader::extend(at, "gamma"));
  if (j.contains("r_ref")) s.r_ref = rd.bloch(j["r_ref"], Reader::extend(at, "r_ref"));
  if (j.contains("horizon")) s.horizon = rd.number(j["horizon"], Reader::extend(at, "horizon"));
  if (j.contains("dt")) s.dt = rd.number(j["dt"], Reader::extend(at, "dt"));
  rd.guarded(at, [&] {
    s.validate();
    return 0;
  });
  return s;
}

inline SystemSpec read_system(const Reader& rd, const json& j, const Path& at) {
  rd.only_keys(j, at, {"hamiltonian", "jump_pairs", "initial_state", "beta", "observable"});
  SystemSpec s;
  for (const char* k : {"hamiltonian", "initial_state"})
    if (!j.contains(k)) rd.fail(at, std::string("missing \"") + k + "\"");
  const Path hp = Reader::extend(at, "hamiltonian");
  s.hamiltonian = rd.matrix(j["hamiltonian"], hp);
  rd.guarded(hp, [&] { return Hamiltonian(s.hamiltonian); });
  const Index n = s.hamiltonian.rows();
  auto sized = [&](const ComplexMatrix& m, const Path& p) {
    if (m.rows() != n) rd.fail(p, "dimension differs from the Hamiltonian");
    return m;
  };
  if (j.contains("jump_pairs")) {
    const Path jp = Reader::extend(at, "jump_pairs");
    if (!j["jump_pairs"].is_array()) rd.fail(jp, "expected a list");
    for (std::size_t k = 0; k < j["jump_pairs"].size(); ++k) {
      const json& e = j["jump_pairs"][k];
      const Path ep = Reader::extend(jp, "[" + std::to_string(k) + "]");
      if (e.is_object() && e.contains("self_paired")) {
        rd.only_keys(e, ep, {"self_paired"});
        const Path sp = Reader::extend(ep, "self_paired");
        const ComplexMatrix op = sized(rd.matrix(e["self_paired"], sp), sp);
        s.pairs.push_back(rd.guarded(sp, [&] { return JumpPair::self_paired(op); }));
        continue;
      }
      rd.only_keys(e, ep, {"L", "L_partner", "phi"});
      for (const char* key : {"L", "L_partner", "phi"})
        if (!e.contains(key)) rd.fail(ep, std::string("missing \"") + key + "\"");
      const ComplexMatrix op = sized(rd.matrix(e["L"], Reader::extend(ep, "L")), Reader::extend(ep, "L"));
      const ComplexMatrix partner =
          sized(rd.matrix(e["L_partner"], Reader::extend(ep, "L_partner")), Reader::extend(ep, "L_partner"));
      const double phi = rd.number(e["phi"], Reader::extend(ep, "phi"));
      s.pairs.push_back(rd.guarded(ep, [&] { return JumpPair(op, partner, phi); }));
    }
  }
  const Path ip = Reader::extend(at, "initial_state");
  const json& init = j["initial_state"];
  if (init.is_object()) {
    rd.only_keys(init, ip, {"bloch"});
    if (n != 2) rd.fail(ip, "a Bloch vector needs a two-level system");
    if (!init.contains("bloch")) rd.fail(ip, "missing \"bloch\"");
    const BlochVector r = rd.bloch(init["bloch"], Reader::extend(ip, "bloch"));
    s.initial_state = rd.guarded(ip, [&] { return bloch_to_density(r); }).matrix();
  } else {
    s.initial_state = sized(rd.matrix(init, ip), ip);
    rd.guarded(ip, [&] { return DensityMatrix(s.initial_state); });
  }
  if (j.contains("beta")) s.beta = rd.positive(j["beta"], Reader::extend(at, "beta"));
  if (j.contains("observable")) {
    const Path op = Reader::extend(at, "observable");
    s.observable = sized(rd.matrix(j["observable"], op), op);
    if (hermiticity_error(*s.observable) > tol::hermitian) rd.fail(op, "observable is not Hermitian");
  }
  return s;
}

}  // namespace detail

/// Parses configuration text; `source` names it in error messages.
inline RunConfig parse_config(const std::string& text, const std::string& source = "config") {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto upto = std::min<std::size_t>(e.byte, text.size());
    const auto line = 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto), '\n'));
    std::string msg = e.what();
    if (const auto p = msg.find("parse error"); p != std::string::npos) msg = msg.substr(p);
    throw ConfigError(source, line, msg);
  }
  const detail::Reader rd(source, text);
  rd.only_keys(root, {}, {"mpemba", "system", "metrics", "grid", "output", "emit_svg"});
  RunConfig c;
  if (root.contains("mpemba")) c.mpemba = detail::read_scenario(rd, root["mpemba"], {"mpemba"});
  if (root.contains("system")) c.system = detail::read_system(rd, root["system"], {"system"});
  if (root.contains("metrics")) {
    const json& m = root["metrics"];
    if (!m.is_array() || m.empty()) rd.fail({"metrics"}, "expected a nonempty list");
    c.metrics.clear();
    for (const auto& e : m) {
      if (!e.is_string()) rd.fail({"metrics"}, "metric names are strings");
      const MetricKind k = rd.guarded({"metrics"}, [&] { return parse_metric(e.get<std::string>()); });
      if (std::find(c.metrics.begin(), c.metrics.end(), k) != c.metrics.end()) rd.fail({"metrics"}, "duplicate metric");
      c.metrics.push_back(k);
    }
  }
  if (root.contains("grid")) {
    const json& g = root["grid"];
    rd.only_keys(g, {"grid"}, {"t_final", "dt"});
    if (!g.contains("t_final") || !g.contains("dt")) rd.fail({"grid"}, "needs \"t_final\" and \"dt\"");
    TimeGrid tg{rd.positive(g["t_final"], {"grid", "t_final"}), rd.positive(g["dt"], {"grid", "dt"})};
    if (tg.dt > tg.t_final) rd.fail({"grid", "dt"}, "dt exceeds t_final");
    if (tg.steps() < 2) rd.fail({"grid", "dt"}, "grid needs at least three samples");
    c.grid = tg;
  }
  if (root.contains("output")) {
    if (!root["output"].is_string()) rd.fail({"output"}, "expected a string");
    c.output = root["output"].get<std::string>();
  }
  if (root.contains("emit_svg")) {
    if (!root["emit_svg"].is_boolean()) rd.fail({"emit_svg"}, "expected true or false");
    c.emit_svg = root["emit_svg"].get<bool>();
  }
  return c;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, 0, "cannot open configuration file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

}  // namespace qig::io
