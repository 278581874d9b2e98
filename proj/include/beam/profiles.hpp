//==============================================================================
// profiles.hpp
// Constructive profile decomposition on synthetic sequences of linear
// solutions: ground-truth synthesis, greedy core search and extraction, and
// the energy/L^(p+1) bookkeeping checks.
//
// The weak-limit supremum behind the decomposition is realized discretely as
// the maximizer of localized free energy over a grid of candidate time
// shifts and all spatial translates; extraction windows the content near the
// maximizer with a smooth compactly supported weight of radius r_cap and
// recenters it at the box center.  Faithful for well-separated synthetic
// inputs; no claim is made for adversarial sequences.
//==============================================================================
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "beam/propagator.hpp"

namespace beam {

// Time/space recentering pair.  Y is the spatial displacement applied to the
// time-evolved profile when it is embedded into the sequence element.
struct Core {
  double S = 0.0;
  std::vector<double> Y;
};

struct ProfileItem {
  EnergyState data;           // profile initial data, centered at the box center
  std::vector<Core> cores;    // one per sequence index k
};

// Translation by an arbitrary displacement via the spectral phase (exact for
// band-limited fields; the unpaired Nyquist mode is zeroed).
Field translate_field(const Field& f, std::span<const double> shift);
EnergyState translate_state(const EnergyState& s, std::span<const double> shift);

// The embedding used by both synthesis and subtraction:
//     embed(p, S, Y) = translate(evolve_linear(p, S), Y).
EnergyState embed_profile(const EnergyState& data, const Core& core, double m);

// Restrict the state's spectrum to the dyadic window [n_lo, n_hi] (the
// discrete stand-in for the 1-oscillation hypothesis), and the energy
// fraction outside the doubled window [n_lo/2, 2*n_hi].
EnergyState band_limit_state(const EnergyState& s, double n_lo, double n_hi);
double band_tail_energy_fraction(const EnergyState& s, double n_lo, double n_hi,
                                 double m);

// w_k = sum_alpha embed(V^alpha, core_k^alpha) + noise for k = 0..K-1, with
// E0(noise) = noise_e0 * noise_e0.  Every profile must carry one core per
// sequence element; pairwise separations at the last k must reach min_gap,
// and the time shifts must respect the wrap-around budget of the profiles'
// spectral support.  An empty profile list gives pure noise.
std::vector<EnergyState> synthesize_sequence(const Grid& g,
                                             const std::vector<ProfileItem>& profiles,
                                             std::size_t K, double noise_e0, double m,
                                             std::uint64_t seed, double min_gap);

struct SearchWindow {
  double s_min = 0.0;
  double s_max = 0.0;
  double s_stride = 0.5;
  double r_cap = 4.0;
};

struct CoreSearchResult {
  Core core;
  EnergyState extracted;  // windowed content, recentered at the box center
  double score = 0.0;     // localized free energy captured in the r_cap ball
};
CoreSearchResult best_core_search(const EnergyState& w, double m,
                                  const SearchWindow& win);

struct ExtractionResult {
  std::vector<ProfileItem> profiles;       // data from the last sequence element
  std::vector<EnergyState> remainders;     // final remainder per k
  std::vector<std::vector<double>> scores;    // scores[k][alpha]
  std::vector<std::vector<double>> energies;  // E0 of the extracted pieces
  std::vector<int> count;                     // components found per k
};
ExtractionResult extract_profiles(const std::vector<EnergyState>& seq, double m,
                                  const SearchWindow& win, int A_max,
                                  double stop_threshold);

struct PythagoreanReport {
  std::vector<double> defect;  // per k, relative
  double worst = 0.0;
};
PythagoreanReport pythagorean_check(const std::vector<EnergyState>& seq,
                                    const ExtractionResult& ex, double m);

struct DecouplingReport {
  double t = 0.0;
  std::vector<double> defect;  // per k, relative L^(p+1) additivity defect
  bool decreasing = false;
};
DecouplingReport lp_decoupling_check(const std::vector<EnergyState>& seq,
                                     const ExtractionResult& ex, double t, double p,
                                     double m);

struct OrthogonalityReport {
  // separation[k][pair] with pairs (alpha < beta) lexicographic
  std::vector<std::vector<double>> separation;
  double min_at_last = 0.0;
};
OrthogonalityReport orthogonality_matrix(const std::vector<ProfileItem>& profiles);

}  // namespace beam
