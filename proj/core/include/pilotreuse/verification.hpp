#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pilotreuse/channel.hpp"
#include "pilotreuse/optimizer.hpp"

namespace pilotreuse {

struct VerificationFailure {
  std::string property;
  std::string instance;  // e.g. "L=27 K=2 N_p0=9 C=1+6i"
  std::string detail;
};

struct PropertyOutcome {
  std::string name;
  std::uint64_t checked = 0;
  std::vector<VerificationFailure> failures;
};

struct VerificationReport {
  std::vector<PropertyOutcome> properties;
  // Closed form against brute force under a measured (non-linear) profile.
  // Informational: optimality is only guaranteed for linear profiles.
  std::vector<std::string> measured_disagreements;
  std::uint64_t measured_checked = 0;

  bool passed() const;
};

// Replaceable pieces of the closed form, so tests can check that a broken
// implementation is caught.
struct VerificationHooks {
  std::function<int(std::int64_t, int)> chi;  // defaults to pilotreuse::chi
};

struct VerificationSuite {
  int cells = 27;
  std::vector<int> users{1, 2, 3};
  std::vector<RateProfile> linear_profiles;
  std::optional<RateProfile> measured_profile;
  // Largest N_coh for the net-rate check; 0 means 4LK/3.
  std::int64_t max_coherence = 0;
  std::uint64_t cap = kEnumerationCap;
};

// The pilot-length set, transition bounds and round trip, the
// length-constrained closed form and its uniqueness, the one-step chain,
// breakpoint spacing and the coherence-time closed form, each against
// exhaustive enumeration.
VerificationReport run_verification(const VerificationSuite& suite,
                                    const VerificationHooks& hooks = {});

}  // namespace pilotreuse
