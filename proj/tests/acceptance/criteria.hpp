#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pilotreuse/channel.hpp"
#include "pilotreuse/finitem.hpp"

namespace acceptance {

struct CriterionResult {
  int id = 0;
  bool pass = false;
  std::string title;
  std::vector<std::string> details;
  // Every measured number at full precision; equal digests mean bit-equal runs.
  std::string digest;
  double seconds = 0.0;
};

// Expensive shared inputs, computed on first use.
class Context {
 public:
  explicit Context(unsigned threads) : threads_(threads) {}

  unsigned threads() const { return threads_; }
  const pilotreuse::RateProfile& profile81(bool wraparound);
  const pilotreuse::MuStats& mu(int cells);

 private:
  unsigned threads_;
  std::map<bool, pilotreuse::RateProfile> profiles_;
  std::map<int, pilotreuse::MuStats> mu_;
};

inline constexpr int kCriterionCount = 13;

CriterionResult run_criterion(int id, Context& ctx);

}  // namespace acceptance
