#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace pilotreuse {

// A Mersenne Twister stream keyed by a master seed and a path of integers.
//
// Substream rule: the engine is seeded through std::seed_seq with the words
// (seed_lo, seed_hi, path_0_lo, path_0_hi, ...). Every parallel work unit
// (depth, cell pair, trial block, ...) gets its own path, so the numbers a
// unit sees never depend on which worker runs it or how many workers exist.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed,
                        std::initializer_list<std::uint64_t> path = {});

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

// Stream purposes. Kept stable so saved seeds reproduce old runs.
enum class StreamPurpose : std::uint64_t {
  kRateProfile = 1,
  kMuStats = 2,
  kRateCdf = 3,
  kRandomReuse = 4,
};

}  // namespace pilotreuse
