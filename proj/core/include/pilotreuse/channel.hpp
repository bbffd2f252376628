#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pilotreuse/hexgrid.hpp"
#include "pilotreuse/random.hpp"

namespace pilotreuse {

struct ChannelConfig {
  double gamma = 3.7;
  std::int64_t trials = 100'000;
  std::uint64_t seed = 1;
  unsigned threads = 0;  // 0: hardware concurrency. Never changes results.

  void validate() const;
};

enum class RateSource { kMonteCarlo, kSyntheticLinear };

std::string to_string(RateSource s);
RateSource rate_source_from_string(const std::string& s);

// Per-depth asymptotic rates C_i in bits/symbol.
struct RateProfile {
  std::vector<double> C;
  std::vector<double> std_error;
  RateSource source = RateSource::kMonteCarlo;
  double gamma = 3.7;
  std::int64_t trials = 0;
  std::uint64_t seed = 0;

  int depth_count() const { return static_cast<int>(C.size()); }
  bool strictly_increasing() const;
};

// (1 / d)^gamma with d the (minimum-image) distance in cell radii.
double slow_fading(AxialCoord bs_cell, Point user_pos, const HexLattice& lattice,
                   double gamma);

// One draw of beta_jj^2 / sum_l beta_jl^2 for a user in `tagged` whose pilot
// is shared by one user in each cosharing cell at `depth`.
double sample_sir(int depth, AxialCoord tagged, const HexLattice& lattice,
                  const ChannelConfig& cfg, RandomStream& rng);
double sample_sir(int depth, const HexLattice& lattice, const ChannelConfig& cfg,
                  RandomStream& rng);

// C_i = mean of log2(1 + SIR) over cfg.trials draws at every depth. With
// wraparound the tagged cell is (0, 0); without it trial n uses cell n mod L.
// Trials run in fixed blocks, each with its own substream
// (seed, kRateProfile, depth, block), so results do not depend on threads.
RateProfile estimate_rate_profile(const HexLattice& lattice, const ChannelConfig& cfg);

RateProfile synthetic_linear_profile(double c0, double slope, int m);

}  // namespace pilotreuse
