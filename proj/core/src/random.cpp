#include "pilotreuse/random.hpp"

#include <vector>

namespace pilotreuse {

RandomStream::RandomStream(std::uint64_t seed,
                           std::initializer_list<std::uint64_t> path) {
  std::vector<std::uint32_t> words;
  words.reserve(2 + 2 * path.size());
  auto push = [&words](std::uint64_t w) {
    words.push_back(static_cast<std::uint32_t>(w));
    words.push_back(static_cast<std::uint32_t>(w >> 32));
  };
  push(seed);
  for (std::uint64_t w : path) push(w);
  std::seed_seq seq(words.begin(), words.end());
  engine_.seed(seq);
}

std::uint64_t RandomStream::below(std::uint64_t n) {
  // Rejection keeps the draw exactly uniform.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % n;
}

}  // namespace pilotreuse
