#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "pilotreuse/assignment.hpp"
#include "pilotreuse/channel.hpp"
#include "pilotreuse/hexgrid.hpp"
#include "pilotreuse/random.hpp"

namespace pilotreuse {

// Brute-force searches refuse to enumerate more vectors than this.
inline constexpr std::uint64_t kEnumerationCap = 10'000'000;

class EnumerationCapExceeded : public std::runtime_error {
 public:
  EnumerationCapExceeded(std::uint64_t size, std::uint64_t cap);
  std::uint64_t size() const { return size_; }
  std::uint64_t cap() const { return cap_; }

 private:
  std::uint64_t size_;
  std::uint64_t cap_;
};

struct NetRatePoint {
  std::int64_t coherence = 0;  // N_coh
  PilotAssignment p;
  double net_rate = 0.0;        // bits/symbol per cell
  double training_fraction = 0.0;
};

// Delta[n - 1] is the coherence time at which the optimal pilot length steps
// from 2(n-1)+K to 2n+K.
struct BreakpointTable {
  std::vector<double> delta;
  std::int64_t regimes = 0;  // N_{L,K} = (LK/3 - K) / 2
};

// sum_i 3^{-i} p_i C_i.
double csum(const PilotAssignment& p, const RateProfile& rates);
// (N_coh - N_pil) / N_coh * csum. Negative when the pilots do not fit.
double cnet(const PilotAssignment& p, const RateProfile& rates, std::int64_t coherence);

// The length-constrained optimum with its two non-zero entries placed at
// depths `first_depth` and `first_depth + 1`. optimal_for_length calls this
// with chi(N_p0, K); the split exists so verification can inject a wrong
// depth. Throws if the resulting vector is not valid.
PilotAssignment two_depth_vector(int cells, int users, std::int64_t pilot_length,
                                 int first_depth);
PilotAssignment optimal_for_length(int cells, int users, std::int64_t pilot_length);
// Moves one leaf from depth chi(N_p0) to three leaves at chi(N_p0) + 1.
PilotAssignment corollary_step(const PilotAssignment& p_star, std::int64_t pilot_length);

BreakpointTable breakpoints(int cells, int users, const RateProfile& rates);
// Full reuse below Delta_1, otherwise the optimum of the regime holding N_coh.
PilotAssignment optimal_assignment(int cells, int users, std::int64_t coherence,
                                   const RateProfile& rates);
PilotAssignment optimal_assignment(const BreakpointTable& table, int cells, int users,
                                   std::int64_t coherence);

enum class Objective { kSumRate, kNetRate };

struct BruteForceQuery {
  int cells = 0;
  int users = 0;
  Objective objective = Objective::kSumRate;
  std::optional<std::int64_t> pilot_length;  // restricts to Omega(N_p0)
  std::int64_t coherence = 0;                // used by kNetRate
};

// Exhaustive argmax; values within a relative 1e-12 count as ties and go to
// the lexicographically smallest vector.
PilotAssignment brute_force_optimal(const BruteForceQuery& query, const RateProfile& rates,
                                    std::uint64_t cap = kEnumerationCap);

// Each cell draws K distinct pilots out of n_pil uniformly at random.
PilotRealization random_assignment(int cells, int users, std::int64_t n_pil,
                                   RandomStream& rng);

struct RandomReuseRate {
  double mean_rate = 0.0;  // bits/symbol per user, over contaminated draws
  double std_error = 0.0;
  double uncontaminated_fraction = 0.0;
};

// Mean asymptotic per-user rate under random_assignment. A draw in which no
// other cell reuses the tagged user's pilot has unbounded SIR; such draws are
// counted and left out of the mean.
RandomReuseRate estimate_random_reuse_rate(const HexLattice& lattice, int users,
                                           std::int64_t n_pil, const ChannelConfig& cfg);
// (1 - N_pil/N_coh) * K * mean_rate.
double random_reuse_net_rate(const RandomReuseRate& r, int users, std::int64_t n_pil,
                             std::int64_t coherence);

std::vector<NetRatePoint> sweep_training_fraction(int cells, int users,
                                                  const std::vector<std::int64_t>& coherences,
                                                  const RateProfile& rates);

}  // namespace pilotreuse
