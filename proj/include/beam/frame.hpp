//==============================================================================
// frame.hpp
// Coordinate-frame rotation of fields by spectral resampling, and alignment
// of the momentum vector with the first axis.
//
// A rotation in one coordinate plane is factored into three shears (each a
// per-line spectral translation, exact for band-limited data) plus exact
// quarter-turn lattice permutations, all about the box center.  Faithful for
// states supported away from the box seam with spectral margin; both are
// checked by the frame-consistency tests, not enforced here.
//==============================================================================
#pragma once

#include <utility>
#include <vector>

#include "beam/propagator.hpp"

namespace beam {

// Rotate field content by theta in the (axis_a, axis_b) plane about the box
// center.  Quarter-turn reduction requires the two axes to share point count
// and length.
Field rotate_field(const Field& f, int axis_a, int axis_b, double theta);
EnergyState rotate_state(const EnergyState& s, int axis_a, int axis_b, double theta);

struct GivensStep {
  int axis_a = 0;
  int axis_b = 0;
  double theta = 0.0;
};

// Rotate the state so Mom is parallel to the first coordinate axis (a
// sequence of Givens rotations in the (0, j) planes).  States with
// |Mom| <= tol * max(E0, tiny) are returned unrotated.
struct FrameAlignment {
  bool rotated = false;
  std::vector<GivensStep> steps;
  std::vector<double> mom_before;
  std::vector<double> mom_after;
};
FrameAlignment align_momentum_frame(EnergyState& s, double m, double tol = 1e-10);

}  // namespace beam
