#include "pilotreuse/verification.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include "pilotreuse/assignment.hpp"

namespace pilotreuse {
namespace {

std::string describe(const RateProfile& r) {
  std::ostringstream out;
  out << "C=";
  if (r.source == RateSource::kSyntheticLinear && r.C.size() >= 2) {
    out << r.C[0] << '+' << (r.C[1] - r.C[0]) << 'i';
  } else {
    for (std::size_t i = 0; i < r.C.size(); ++i) out << (i ? "/" : "") << r.C[i];
  }
  return out.str();
}

std::string shape(int cells, int users) {
  return "L=" + std::to_string(cells) + " K=" + std::to_string(users);
}

class Recorder {
 public:
  explicit Recorder(std::string name) { outcome_.name = std::move(name); }
  void pass() { ++outcome_.checked; }
  void fail(std::string instance, std::string detail) {
    ++outcome_.checked;
    outcome_.failures.push_back({outcome_.name, std::move(instance), std::move(detail)});
  }
  void check(bool ok, const std::string& instance, const std::string& detail) {
    ok ? pass() : fail(instance, detail);
  }
  PropertyOutcome take() { return std::move(outcome_); }

 private:
  PropertyOutcome outcome_;
};

void check_enumeration(int cells, int users, Recorder& lengths, Recorder& transitions) {
  const int m = depth_count_for(cells);
  std::set<std::int64_t> seen;
  auto stream = enumerate_assignments(cells, users);
  while (auto p = stream.next()) {
    const std::string inst = shape(cells, users) + " p=" + format_vector(p->p);
    const std::int64_t n = pilot_length(*p);
    seen.insert(n);
    bool ok = is_valid(*p) && (n - users) % 2 == 0;
    const TransitionVector t = to_transition(*p);
    std::int64_t sum = 0;
    for (int i = 0; i < m - 1; ++i) {
      ok = ok && t.t[i] >= 0 && t.t[i] <= users * pow3(i);
      sum += t.t[i];
    }
    ok = ok && 2 * sum == n - users;
    ok = ok && from_transition(t, cells, users) == *p;
    ok = ok && to_transition(from_transition(t, cells, users)) == t;
    transitions.check(ok, inst, "transition bounds, sum or round trip violated");
  }
  const auto expected = valid_pilot_lengths(cells, users);
  lengths.check(std::vector<std::int64_t>(seen.begin(), seen.end()) == expected,
                shape(cells, users), "enumerated pilot lengths differ from {K, K+2, ..., LK/3}");
}

}  // namespace

bool VerificationReport::passed() const {
  for (const auto& p : properties)
    if (!p.failures.empty()) return false;
  return true;
}

VerificationReport run_verification(const VerificationSuite& suite,
                                    const VerificationHooks& hooks) {
  const auto chi_of = hooks.chi ? hooks.chi : [](std::int64_t n, int k) { return chi(n, k); };
  Recorder lengths("pilot-length-set");
  Recorder transitions("transition-bijection");
  Recorder length_optimum("length-constrained-optimum");
  Recorder structure("two-adjacent-depths");
  Recorder chain("one-step-chain");
  Recorder spacing("breakpoint-spacing");
  Recorder coherence_optimum("coherence-optimum");
  VerificationReport report;

  const int cells = suite.cells;
  const int m = depth_count_for(cells);
  for (int users : suite.users) {
    check_enumeration(cells, users, lengths, transitions);
    const std::int64_t top = static_cast<std::int64_t>(cells) * users / 3;

    for (std::int64_t n : valid_pilot_lengths(cells, users)) {
      const std::string inst = shape(cells, users) + " N_p0=" + std::to_string(n);
      PilotAssignment closed;
      int depth = 0;
      try {
        depth = chi_of(n, users);
        closed = two_depth_vector(cells, users, n, depth);
      } catch (const std::exception& e) {
        length_optimum.fail(inst, std::string("closed form failed: ") + e.what());
        continue;
      }
      bool adjacent = true;
      for (int i = 0; i < m; ++i)
        if (closed.p[i] != 0 && i != depth && i != depth + 1) adjacent = false;
      structure.check(adjacent, inst, "non-zero entry outside depths chi, chi+1: " +
                                          format_vector(closed.p));
      for (const RateProfile& rates : suite.linear_profiles) {
        const std::string where = inst + " " + describe(rates);
        const PilotAssignment brute = brute_force_optimal(
            {cells, users, Objective::kSumRate, n, 0}, rates, suite.cap);
        if (!(brute == closed)) {
          length_optimum.fail(where, "closed form " + format_vector(closed.p) +
                                         " but exhaustive search gives " + format_vector(brute.p));
          continue;
        }
        // Uniqueness: every other vector of that length is strictly worse.
        const double best = csum(closed, rates);
        int attaining = 0;
        auto stream = enumerate_assignments(cells, users, n);
        while (auto p = stream.next())
          if (csum(*p, rates) >= best - 1e-12 * std::max(1.0, std::abs(best))) ++attaining;
        length_optimum.check(attaining == 1, where,
                             std::to_string(attaining) + " vectors attain the optimum");
      }
      if (suite.measured_profile) {
        ++report.measured_checked;
        const PilotAssignment brute = brute_force_optimal(
            {cells, users, Objective::kSumRate, n, 0}, *suite.measured_profile, suite.cap);
        if (!(brute == closed))
          report.measured_disagreements.push_back(inst + ": closed form " +
                                                  format_vector(closed.p) + ", exhaustive " +
                                                  format_vector(brute.p));
      }
    }

    PilotAssignment p = full_reuse(cells, users);
    for (std::int64_t n = users; n + 2 <= top; n += 2) {
      const std::string inst = shape(cells, users) + " N_p0=" + std::to_string(n);
      try {
        p = corollary_step(p, n);
        chain.check(p == optimal_for_length(cells, users, n + 2), inst,
                    "step gives " + format_vector(p.p));
      } catch (const std::exception& e) {
        chain.fail(inst, e.what());
        break;
      }
    }

    std::vector<RateProfile> profiles = suite.linear_profiles;
    for (const RateProfile& rates : profiles) {
      const BreakpointTable table = breakpoints(cells, users, rates);
      for (std::int64_t n = 1; n < table.regimes; ++n) {
        const int eta = chi(2 * n + users - 2, users);
        const int eta_next = chi(2 * n + users, users);
        const double step = table.delta[n] - table.delta[n - 1];
        const std::string inst = shape(cells, users) + " n=" + std::to_string(n) + " " +
                                 describe(rates);
        if (!(step > 0.0)) spacing.fail(inst, "breakpoints not increasing");
        else if (eta == eta_next) spacing.check(std::abs(step - 4.0) < 1e-9, inst,
                                                "spacing " + std::to_string(step) + " != 4");
        else spacing.pass();
      }
      const std::int64_t last = suite.max_coherence > 0 ? suite.max_coherence : 4 * top;
      for (std::int64_t coh = 1; coh <= last; ++coh) {
        const PilotAssignment closed = optimal_assignment(table, cells, users, coh);
        const PilotAssignment brute = brute_force_optimal(
            {cells, users, Objective::kNetRate, std::nullopt, coh}, rates, suite.cap);
        coherence_optimum.check(brute == closed,
                                shape(cells, users) + " N_coh=" + std::to_string(coh) + " " +
                                    describe(rates),
                                "closed form " + format_vector(closed.p) +
                                    " but exhaustive search gives " + format_vector(brute.p));
      }
    }
    if (suite.measured_profile && suite.measured_profile->strictly_increasing()) {
      const std::int64_t last = suite.max_coherence > 0 ? suite.max_coherence : 4 * top;
      try {
        const BreakpointTable table = breakpoints(cells, users, *suite.measured_profile);
        for (std::int64_t coh = 1; coh <= last; ++coh) {
          ++report.measured_checked;
          const PilotAssignment closed = optimal_assignment(table, cells, users, coh);
          const PilotAssignment brute =
              brute_force_optimal({cells, users, Objective::kNetRate, std::nullopt, coh},
                                  *suite.measured_profile, suite.cap);
          if (!(brute == closed))
            report.measured_disagreements.push_back(
                shape(cells, users) + " N_coh=" + std::to_string(coh) + ": closed form " +
                format_vector(closed.p) + ", exhaustive " + format_vector(brute.p));
        }
      } catch (const std::domain_error& e) {
        report.measured_disagreements.push_back(shape(cells, users) + ": " + e.what());
      }
    }
  }

  for (Recorder* r : {&lengths, &transitions, &length_optimum, &structure, &chain, &spacing,
                      &coherence_optimum})
    report.properties.push_back(r->take());
  return report;
}

}  // namespace pilotreuse
