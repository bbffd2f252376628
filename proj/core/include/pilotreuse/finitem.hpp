#pragma once

#include <cstdint>
#include <vector>

#include "pilotreuse/assignment.hpp"
#include "pilotreuse/hexgrid.hpp"
#include "pilotreuse/optimizer.hpp"

namespace pilotreuse {

struct FiniteMConfig {
  std::int64_t antennas = 128;  // M
  double rho_db = 5.0;
  int users = 1;                // K
  std::int64_t coherence = 200; // N_coh
  std::int64_t trials = 100'000;
  std::uint64_t seed = 1;
  double gamma = 3.7;
  unsigned threads = 0;

  double rho_linear() const;
  void validate() const;
};

// Aggregated distance-ratio moments seen from the tagged cell j. mu1, mu2
// and mu3 are indexed by reuse depth and sum over the cells that reuse a
// depth-i pilot (j excluded).
struct MuStats {
  double mu0 = 0.0;
  std::vector<double> mu1, mu2, mu3;
  double mu0_error = 0.0;
  std::vector<double> mu1_error, mu2_error, mu3_error;

  int depth_count() const { return static_cast<int>(mu1.size()); }
};

struct FiniteMResult {
  PilotAssignment p;
  std::int64_t antennas = 0;
  double net_rate = 0.0;           // bits/symbol per cell
  std::vector<double> per_depth_se;  // SE at every depth, overhead included
};

struct FiniteMOptimum {
  FiniteMResult best;
  bool heuristic = false;  // true when only two-depth shapes were searched
  std::uint64_t candidates = 0;
};

// Monte Carlo over uniform user positions: mu_jl^(w) = E[(r_l / r_j)^(gamma w)]
// with r_l the distance to the user's own BS and r_j the distance to BS j.
// Each cell pair and trial block draws from (seed, kMuStats, j, l, block).
// Without wraparound the aggregates are averaged over every tagged cell.
MuStats estimate_mu_stats(const HexLattice& lattice, double gamma, std::int64_t trials,
                          std::uint64_t seed, unsigned threads = 0);

// Effective interference-plus-noise of a depth-i user with M antennas and
// maximum-ratio combining.
double interference(int depth, std::int64_t antennas, int users, double rho_linear,
                    std::int64_t n_pil, const MuStats& mu);
// (1 - N_pil/N_coh) log2(1 + 1/I_i(M)).
double se_user(int depth, const FiniteMConfig& cfg, std::int64_t n_pil, const MuStats& mu);
FiniteMResult cnet_finite(const PilotAssignment& p, const FiniteMConfig& cfg, const MuStats& mu);

// Exhaustive argmax over vectors whose pilots fit in N_coh. When the full set
// exceeds `cap`, only vectors with non-zeros at two adjacent depths are tried
// and the result is flagged heuristic.
FiniteMOptimum optimal_assignment_finite(const FiniteMConfig& cfg, const HexLattice& lattice,
                                         const MuStats& mu, std::uint64_t cap = kEnumerationCap);

// Sorted per-user rates. Every trial places all users at fresh uniform
// positions and evaluates the rate formula with the realised distance ratios
// in place of their expectations, for each user of one tagged cell (cell
// n mod L in trial n).
std::vector<double> per_user_rate_cdf(const PilotAssignment& p, const FiniteMConfig& cfg,
                                      const HexLattice& lattice, std::int64_t trials,
                                      std::uint64_t seed);

struct ThroughputPoint {
  std::int64_t antennas = 0;
  int users = 0;
  PilotAssignment p;
  double per_user_rate = 0.0;
  bool heuristic = false;
};

struct ThroughputCurve {
  int antennas_per_user = 0;  // M / K
  std::vector<ThroughputPoint> points;
};

// For each ratio M/K and each M in the grid (M must be a multiple of the
// ratio), the per-user net rate of the finite-M optimum.
std::vector<ThroughputCurve> throughput_vs_m_sweep(const HexLattice& lattice, const MuStats& mu,
                                                   const std::vector<std::int64_t>& antennas,
                                                   const std::vector<int>& antennas_per_user,
                                                   std::int64_t coherence, double rho_db,
                                                   std::uint64_t cap = kEnumerationCap);

}  // namespace pilotreuse
