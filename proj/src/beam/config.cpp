//==============================================================================
// config.cpp — INI parsing, overrides, validation, initial data.
//==============================================================================
#include "beam/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "beam/checkpoint.hpp"
#include "beam/solver.hpp"
#include "beam/spectral.hpp"

namespace beam {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': not a number: '" + v + "'");
  }
}

long long to_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long long d = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': not an integer: '" + v + "'");
  }
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "on" || v == "true" || v == "1" || v == "yes") return true;
  if (v == "off" || v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("config key '" + key + "': not a boolean: '" + v + "'");
}

std::vector<double> to_dlist(const std::string& key, const std::string& v) {
  std::vector<double> out;
  for (const auto& item : split_list(v)) out.push_back(to_double(key, item));
  return out;
}

std::vector<int> to_ilist(const std::string& key, const std::string& v) {
  std::vector<int> out;
  for (const auto& item : split_list(v))
    out.push_back(static_cast<int>(to_int(key, item)));
  return out;
}

void assign(RunConfig& c, const std::string& key, const std::string& v) {
  if (key == "grid.n") {
    // cross-checked against grid.points in validate_config
    if (to_int(key, v) < 1 || to_int(key, v) > kMaxDim)
      throw ConfigError("grid.n must be between 1 and 4");
  } else if (key == "grid.points") {
    c.points = to_ilist(key, v);
  } else if (key == "grid.L") {
    c.lengths = to_dlist(key, v);
  } else if (key == "physics.m") {
    c.m = to_double(key, v);
  } else if (key == "physics.lambda") {
    c.lambda = to_double(key, v);
  } else if (key == "physics.p") {
    c.p = to_double(key, v);
  } else if (key == "time.dt") {
    c.dt = to_double(key, v);
  } else if (key == "time.T") {
    c.T = to_double(key, v);
  } else if (key == "time.snapshot_stride") {
    c.snapshot_stride = static_cast<int>(to_int(key, v));
  } else if (key == "time.state_stride") {
    c.state_stride = static_cast<int>(to_int(key, v));
  } else if (key == "initial.kind") {
    c.kind = v;
  } else if (key == "initial.amplitude") {
    c.amplitude = to_double(key, v);
  } else if (key == "initial.width") {
    c.width = to_double(key, v);
  } else if (key == "initial.center") {
    c.center = to_dlist(key, v);
  } else if (key == "initial.velocity") {
    c.velocity = to_dlist(key, v);
  } else if (key == "initial.mode") {
    c.mode = to_ilist(key, v);
  } else if (key == "initial.checkpoint") {
    c.checkpoint_path = v;
  } else if (key == "initial.seed") {
    c.seed = static_cast<std::uint64_t>(to_int(key, v));
  } else if (key == "diagnostics.track") {
    c.track = to_bool(key, v);
  } else if (key == "diagnostics.R") {
    c.R = to_double(key, v);
  } else if (key == "diagnostics.delta") {
    c.delta = to_double(key, v);
  } else if (key == "diagnostics.v_cap") {
    c.v_cap = to_double(key, v);
  } else if (key == "diagnostics.smooth_window") {
    c.smooth_window = static_cast<int>(to_int(key, v));
  } else if (key == "diagnostics.actions") {
    c.actions = to_bool(key, v);
  } else if (key == "diagnostics.action_R") {
    c.action_R = to_double(key, v);
  } else if (key == "diagnostics.ydot_from_centers") {
    c.ydot_from_centers = to_bool(key, v);
  } else if (key == "experiment.amplitudes") {
    c.amplitudes = to_dlist(key, v);
  } else if (key == "experiment.deltas") {
    c.deltas = to_dlist(key, v);
  } else if (key == "experiment.gap_tol_factor") {
    c.gap_tol_factor = to_double(key, v);
  } else if (key == "experiment.tail_fraction") {
    c.tail_fraction = to_double(key, v);
  } else if (key == "output.directory") {
    c.directory = v;
  } else if (key == "output.csv") {
    c.write_csv = to_bool(key, v);
  } else if (key == "output.json") {
    c.write_json = to_bool(key, v);
  } else if (key == "output.checkpoints") {
    c.write_checkpoints = to_bool(key, v);
  } else if (key == "run.allow_wraparound") {
    c.allow_wraparound = to_bool(key, v);
  } else {
    throw ConfigError("unknown config key: '" + key + "'");
  }
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <class T>
std::string join(const std::vector<T>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    if constexpr (std::is_same_v<T, double>)
      out += fmt(v[i]);
    else
      out += std::to_string(v[i]);
  }
  return out;
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
  RunConfig cfg;
  std::stringstream ss(text);
  std::string line, section;
  int lineno = 0;
  bool saw_points = false, saw_lengths = false;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("line " + std::to_string(lineno) + ": malformed section");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = section + "." + trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "grid.points") saw_points = true;
    if (key == "grid.L") saw_lengths = true;
    assign(cfg, key, value);
  }
  if (!saw_points) throw ConfigError("missing required key: grid.points");
  if (!saw_lengths) throw ConfigError("missing required key: grid.L");
  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config_text(ss.str());
}

void apply_override(RunConfig& cfg, const std::string& key_eq_value) {
  const auto eq = key_eq_value.find('=');
  if (eq == std::string::npos)
    throw ConfigError("override must look like section.key=value: " + key_eq_value);
  assign(cfg, trim(key_eq_value.substr(0, eq)), trim(key_eq_value.substr(eq + 1)));
}

void validate_config(RunConfig& cfg) {
  if (cfg.points.empty()) throw ConfigError("missing required key: grid.points");
  if (cfg.lengths.size() != cfg.points.size())
    throw ConfigError("grid.points and grid.L must have the same dimension");
  if (!(cfg.m > 0.0)) throw ConfigError("physics.m must be > 0 (got " + fmt(cfg.m) + ")");
  if (!(cfg.p > 1.0)) throw ConfigError("physics.p must be > 1 (got " + fmt(cfg.p) + ")");
  if (!(cfg.dt > 0.0)) throw ConfigError("time.dt must be positive");
  if (cfg.T < 0.0) throw ConfigError("time.T must be nonnegative");
  if (cfg.snapshot_stride < 1) throw ConfigError("time.snapshot_stride must be >= 1");

  Grid g = [&] {
    try {
      return Grid(cfg.points, cfg.lengths);
    } catch (const std::exception& e) {
      throw ConfigError(std::string("invalid grid: ") + e.what());
    }
  }();

  if (cfg.center.empty()) {
    cfg.center.resize(static_cast<std::size_t>(g.dim()));
    for (int a = 0; a < g.dim(); ++a)
      cfg.center[static_cast<std::size_t>(a)] = 0.5 * g.length(a);
  } else if (static_cast<int>(cfg.center.size()) != g.dim()) {
    throw ConfigError("initial.center dimension mismatch");
  }
  if (cfg.kind == "boosted_gaussian" && cfg.velocity.empty())
    throw ConfigError("initial.velocity required for boosted_gaussian");
  if (!cfg.velocity.empty() && static_cast<int>(cfg.velocity.size()) != g.dim())
    throw ConfigError("initial.velocity dimension mismatch");
  if (cfg.kind == "single_mode") {
    if (cfg.mode.empty()) throw ConfigError("initial.mode required for single_mode");
    if (static_cast<int>(cfg.mode.size()) != g.dim())
      throw ConfigError("initial.mode dimension mismatch");
  }
  if (cfg.kind == "checkpoint" && cfg.checkpoint_path.empty())
    throw ConfigError("initial.checkpoint required for kind=checkpoint");
  if (cfg.kind != "gaussian" && cfg.kind != "boosted_gaussian" &&
      cfg.kind != "single_mode" && cfg.kind != "checkpoint")
    throw ConfigError("unknown initial.kind: '" + cfg.kind + "'");

  const BudgetCheck b = check_wraparound(g, cfg.m, cfg.T);
  if (!b.ok && !cfg.allow_wraparound)
    throw ConfigError("wrap-around budget violated: v_max*T = " + fmt(0.5 * b.spread) +
                      " exceeds L/2 = " + fmt(0.5 * b.limit) +
                      " (v_max = " + fmt(b.vmax) +
                      "); enlarge the box, shorten T, or pass --allow-wraparound");
}

Grid make_grid(const RunConfig& cfg) { return Grid(cfg.points, cfg.lengths); }

EnergyState initial_state(const RunConfig& cfg) {
  const Grid g = make_grid(cfg);
  if (cfg.kind == "checkpoint") {
    LoadedCheckpoint ck = read_checkpoint(cfg.checkpoint_path);
    if (ck.state.grid() != g)
      throw ConfigError("checkpoint grid does not match the configured grid");
    return ck.state;
  }
  if (cfg.kind == "single_mode") {
    std::vector<double> xi(static_cast<std::size_t>(g.dim()));
    for (int a = 0; a < g.dim(); ++a) {
      const int k = cfg.mode[static_cast<std::size_t>(a)];
      if (std::abs(k) >= g.points(a) / 2)
        throw ConfigError("initial.mode exceeds the lattice");
      xi[static_cast<std::size_t>(a)] =
          2.0 * std::numbers::pi * k / g.length(a);
    }
    const double amp = cfg.amplitude;
    Field u = Field::from_function(g, [&](std::span<const double> x) {
      double phase = 0.0;
      for (int a = 0; a < g.dim(); ++a) phase += xi[static_cast<std::size_t>(a)] * x[a];
      return amp * std::cos(phase);
    });
    return EnergyState(std::move(u), Field::zeros(g));
  }
  // gaussian / boosted_gaussian
  const double w2 = 2.0 * cfg.width * cfg.width;
  const double amp = cfg.amplitude;
  Field u = Field::from_function(g, [&](std::span<const double> x) {
    double q = 0.0;
    for (int a = 0; a < g.dim(); ++a) {
      const double d = g.min_image(a, x[a] - cfg.center[static_cast<std::size_t>(a)]);
      q += d * d;
    }
    return amp * std::exp(-q / w2);
  });
  if (cfg.kind == "gaussian") return EnergyState(std::move(u), Field::zeros(g));
  // v = -(velocity . grad) u
  Field v = Field::zeros(g);
  const Field uspec = to_spectral(u);
  for (int a = 0; a < g.dim(); ++a) {
    const double c = cfg.velocity[static_cast<std::size_t>(a)];
    if (c == 0.0) continue;
    Field du = to_physical(derivative(uspec, a));
    du *= -c;
    v += du;
  }
  return EnergyState(std::move(u), std::move(v));
}

std::vector<std::string> RunConfig::header_lines() const {
  std::vector<std::string> out;
  out.push_back("format_version = 1");
  out.push_back("grid.n = " + std::to_string(points.size()));
  out.push_back("grid.points = " + join(points));
  out.push_back("grid.L = " + join(lengths));
  out.push_back("physics.m = " + fmt(m));
  out.push_back("physics.lambda = " + fmt(lambda));
  out.push_back("physics.p = " + fmt(p));
  out.push_back("time.dt = " + fmt(dt));
  out.push_back("time.T = " + fmt(T));
  out.push_back("time.snapshot_stride = " + std::to_string(snapshot_stride));
  out.push_back("time.state_stride = " + std::to_string(state_stride));
  out.push_back("initial.kind = " + kind);
  out.push_back("initial.amplitude = " + fmt(amplitude));
  out.push_back("initial.width = " + fmt(width));
  out.push_back("initial.center = " + join(center));
  if (!velocity.empty()) out.push_back("initial.velocity = " + join(velocity));
  if (!mode.empty()) out.push_back("initial.mode = " + join(mode));
  if (!checkpoint_path.empty()) out.push_back("initial.checkpoint = " + checkpoint_path);
  out.push_back("initial.seed = " + std::to_string(seed));
  out.push_back("diagnostics.track = " + std::string(track ? "on" : "off"));
  out.push_back("diagnostics.R = " + fmt(R));
  out.push_back("diagnostics.delta = " + fmt(delta));
  out.push_back("diagnostics.v_cap = " + fmt(v_cap));
  out.push_back("diagnostics.smooth_window = " + std::to_string(smooth_window));
  out.push_back("diagnostics.actions = " + std::string(actions ? "on" : "off"));
  out.push_back("diagnostics.action_R = " + fmt(action_R));
  out.push_back("diagnostics.ydot_from_centers = " +
                std::string(ydot_from_centers ? "on" : "off"));
  out.push_back("experiment.amplitudes = " + join(amplitudes));
  out.push_back("experiment.deltas = " + join(deltas));
  out.push_back("experiment.gap_tol_factor = " + fmt(gap_tol_factor));
  out.push_back("experiment.tail_fraction = " + fmt(tail_fraction));
  out.push_back("output.directory = " + directory);
  out.push_back("output.csv = " + std::string(write_csv ? "on" : "off"));
  out.push_back("output.json = " + std::string(write_json ? "on" : "off"));
  out.push_back("output.checkpoints = " + std::string(write_checkpoints ? "on" : "off"));
  out.push_back("run.allow_wraparound = " + std::string(allow_wraparound ? "on" : "off"));
  return out;
}

}  // namespace beam
