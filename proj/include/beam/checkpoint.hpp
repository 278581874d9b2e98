//==============================================================================
// checkpoint.hpp
// Binary state snapshots.  Layout (all multi-byte values little-endian):
//   magic "BEAM" | u32 version | u32 n | u32 points[n] | f64 L[n]
//   | f64 m | f64 lambda | f64 p | f64 t
//   | f64 u[N] | f64 v[N]        (row-major axis order)
//==============================================================================
#pragma once

#include <string>

#include "beam/propagator.hpp"

namespace beam {

inline constexpr std::uint32_t kCheckpointVersion = 1;

void write_checkpoint(const std::string& path, const EnergyState& s,
                      const Params& prm, double t);

struct LoadedCheckpoint {
  EnergyState state;
  Params params;
  double t = 0.0;
};
LoadedCheckpoint read_checkpoint(const std::string& path);

}  // namespace beam
