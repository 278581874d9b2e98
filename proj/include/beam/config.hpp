//==============================================================================
// config.hpp
// Run configuration: INI-style key/value file with sections, key overrides,
// validation (including the wrap-around budget), and initial-data synthesis.
//==============================================================================
#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "beam/propagator.hpp"

namespace beam {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  // [grid]
  std::vector<int> points;      // required
  std::vector<double> lengths;  // required
  // [physics]
  double m = 1.0;
  double lambda = 1.0;
  double p = 3.0;
  // [time]
  double dt = 1e-3;
  double T = 1.0;
  int snapshot_stride = 10;
  int state_stride = 1;
  // [initial]
  std::string kind = "gaussian";  // gaussian | boosted_gaussian | single_mode | checkpoint
  double amplitude = 1.0;
  double width = 1.0;
  std::vector<double> center;    // defaults to the box center
  std::vector<double> velocity;  // boost vector (boosted_gaussian)
  std::vector<int> mode;         // integer mode indices (single_mode)
  std::string checkpoint_path;
  std::uint64_t seed = 0;
  // [diagnostics]
  bool track = true;      // concentration center tracking
  double R = 2.0;         // concentration ball radius
  double delta = 0.5;     // concentration-radius threshold
  double v_cap = 8.0;     // smoothed-center rate cap
  int smooth_window = 5;
  bool actions = false;   // virial pass
  double action_R = 0.0;  // cutoff radius for the action pass; <= 0 => a == 1
  bool ydot_from_centers = false;
  // [experiment]
  std::vector<double> amplitudes = {1e-3, 1e-2, 1e-1};  // small-data ladder
  std::vector<double> deltas = {1e-4, 1e-3};            // forcing ladder
  double gap_tol_factor = 1e-3;  // scattering gap tolerance, times sqrt(E0)
  double tail_fraction = 0.1;    // tail window bound, fraction of cumulative
  // [output]
  std::string directory = "out";
  bool write_csv = true;
  bool write_json = true;
  bool write_checkpoints = false;

  bool allow_wraparound = false;

  int dim() const { return static_cast<int>(points.size()); }
  std::vector<std::string> header_lines() const;  // full resolved-config echo
};

// Parse; every key is validated against the known schema.
RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_file(const std::string& path);

// Apply "section.key=value" (the --override flag).
void apply_override(RunConfig& cfg, const std::string& key_eq_value);

// Fill derived defaults and check invariants (m > 0, p > 1, grid validity,
// wrap-around budget unless allowed).  Throws ConfigError.
void validate_config(RunConfig& cfg);

Grid make_grid(const RunConfig& cfg);
EnergyState initial_state(const RunConfig& cfg);

}  // namespace beam
