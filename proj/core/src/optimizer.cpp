#include "pilotreuse/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "parallel.hpp"

namespace pilotreuse {
namespace {

constexpr double kTieTolerance = 1e-12;
constexpr std::int64_t kBlockTrials = 2048;

void require_profile(int m, const RateProfile& rates) {
  if (rates.depth_count() != m)
    throw std::invalid_argument("rate profile has " + std::to_string(rates.depth_count()) +
                                " depths, expected " + std::to_string(m));
}

// sum_{s<=k} K 3^s; zero for k < 0.
std::int64_t covered(int users, int k) {
  std::int64_t total = 0;
  for (int s = 0; s <= k; ++s) total += users * pow3(s);
  return total;
}

}  // namespace

EnumerationCapExceeded::EnumerationCapExceeded(std::uint64_t size, std::uint64_t cap)
    : std::runtime_error("enumeration of " + std::to_string(size) +
                         " vectors exceeds the cap of " + std::to_string(cap)),
      size_(size),
      cap_(cap) {}

double csum(const PilotAssignment& p, const RateProfile& rates) {
  require_profile(p.depth_count(), rates);
  double total = 0.0;
  double weight = 1.0;
  for (int i = 0; i < p.depth_count(); ++i) {
    total += weight * static_cast<double>(p.p[i]) * rates.C[i];
    weight /= 3.0;
  }
  return total;
}

double cnet(const PilotAssignment& p, const RateProfile& rates, std::int64_t coherence) {
  if (coherence < 1) throw std::invalid_argument("coherence time must be at least 1");
  const double n = static_cast<double>(coherence);
  return (n - static_cast<double>(pilot_length(p))) / n * csum(p, rates);
}

PilotAssignment two_depth_vector(int cells, int users, std::int64_t n, int first_depth) {
  const int m = depth_count_for(cells);
  if (!is_valid_pilot_length(cells, users, n))
    throw std::invalid_argument("pilot length " + std::to_string(n) + " is not attainable");
  if (first_depth < 0 || first_depth >= m)
    throw std::invalid_argument("depth " + std::to_string(first_depth) + " out of range");
  const std::int64_t acts = (n - users) / 2;
  PilotAssignment p{cells, users, std::vector<std::int64_t>(m, 0)};
  p.p[first_depth] = covered(users, first_depth) - acts;
  const std::int64_t deeper = 3 * (acts - covered(users, first_depth - 1));
  if (first_depth + 1 < m) {
    p.p[first_depth + 1] = deeper;
  } else if (deeper != 0) {
    throw std::invalid_argument("no depth below " + std::to_string(first_depth));
  }
  if (!is_valid(p) || pilot_length(p) != n)
    throw std::invalid_argument("depth " + std::to_string(first_depth) +
                                " gives an invalid vector " + format_vector(p.p) +
                                " for pilot length " + std::to_string(n));
  return p;
}

PilotAssignment optimal_for_length(int cells, int users, std::int64_t n) {
  if (!is_valid_pilot_length(cells, users, n))
    throw std::invalid_argument("pilot length " + std::to_string(n) + " is not attainable");
  return two_depth_vector(cells, users, n, chi(n, users));
}

PilotAssignment corollary_step(const PilotAssignment& p_star, std::int64_t n) {
  if (!(p_star == optimal_for_length(p_star.cells, p_star.users, n)))
    throw std::invalid_argument(format_vector(p_star.p) +
                                " is not the optimum for pilot length " + std::to_string(n));
  const std::int64_t top = static_cast<std::int64_t>(p_star.cells) * p_star.users / 3;
  if (n + 2 > top)
    throw std::invalid_argument("pilot length " + std::to_string(n) + " is already the largest");
  const int k = chi(n, p_star.users);
  PilotAssignment next = p_star;
  next.p[k] -= 1;
  next.p[k + 1] += 3;
  return next;
}

BreakpointTable breakpoints(int cells, int users, const RateProfile& rates) {
  const int m = depth_count_for(cells);
  require_profile(m, rates);
  if (!rates.strictly_increasing())
    throw std::invalid_argument("rate profile is not strictly increasing");
  BreakpointTable table;
  table.regimes = (static_cast<std::int64_t>(cells) * users / 3 - users) / 2;
  for (std::int64_t n = 1; n <= table.regimes; ++n) {
    const int eta = chi(2 * n + users - 2, users);
    const double xi = static_cast<double>(pow3(eta)) * rates.C[eta] /
                      (rates.C[eta + 1] - rates.C[eta]);
    const double delta =
        2.0 * (2.0 * n - 1.0 - static_cast<double>(covered(users, eta - 1)) + users * xi) +
        users;
    if (!table.delta.empty() && !(delta > table.delta.back()))
      throw std::domain_error("rate profile gives non-increasing coherence breakpoints at n = " +
                              std::to_string(n));
    table.delta.push_back(delta);
  }
  return table;
}

PilotAssignment optimal_assignment(const BreakpointTable& table, int cells, int users,
                                   std::int64_t coherence) {
  if (coherence < 1) throw std::invalid_argument("coherence time must be at least 1");
  const double x = static_cast<double>(coherence);
  // Regimes are closed on the left; the slack absorbs rounding when N_coh
  // lands exactly on a breakpoint.
  auto reached = [x](double delta) { return x >= delta - 1e-9 * std::max(1.0, std::abs(delta)); };
  const auto it = std::partition_point(table.delta.begin(), table.delta.end(), reached);
  const auto n = static_cast<std::int64_t>(it - table.delta.begin());
  if (n == 0) return full_reuse(cells, users);
  return optimal_for_length(cells, users, 2 * n + users);
}

PilotAssignment optimal_assignment(int cells, int users, std::int64_t coherence,
                                   const RateProfile& rates) {
  return optimal_assignment(breakpoints(cells, users, rates), cells, users, coherence);
}

PilotAssignment brute_force_optimal(const BruteForceQuery& q, const RateProfile& rates,
                                    std::uint64_t cap) {
  require_profile(depth_count_for(q.cells), rates);
  if (q.objective == Objective::kNetRate && q.coherence < 1)
    throw std::invalid_argument("net-rate objective needs a coherence time");
  const std::uint64_t size = assignment_count(q.cells, q.users, q.pilot_length);
  if (size > cap) throw EnumerationCapExceeded(size, cap);
  auto stream = enumerate_assignments(q.cells, q.users, q.pilot_length);
  if (stream.warning())
    throw std::invalid_argument("pilot length " + std::to_string(*q.pilot_length) +
                                " is not attainable");
  std::optional<PilotAssignment> best;
  double best_value = 0.0;
  while (auto p = stream.next()) {
    const double value = q.objective == Objective::kSumRate ? csum(*p, rates)
                                                            : cnet(*p, rates, q.coherence);
    if (!best || value > best_value + kTieTolerance * std::max(1.0, std::abs(best_value))) {
      best = std::move(p);
      best_value = value;
    }
  }
  return *best;
}

PilotRealization random_assignment(int cells, int users, std::int64_t n_pil,
                                   RandomStream& rng) {
  depth_count_for(cells);
  if (users < 1) throw std::invalid_argument("K must be at least 1");
  if (n_pil < users)
    throw std::invalid_argument("cannot give " + std::to_string(users) +
                                " users distinct pilots out of " + std::to_string(n_pil));
  PilotRealization out;
  out.cells = cells;
  out.users = users;
  out.pilot_count = n_pil;
  out.pilot_of.resize(static_cast<std::size_t>(cells) * users);
  for (int c = 0; c < cells; ++c) {
    std::int32_t* slot = out.pilot_of.data() + static_cast<std::size_t>(c) * users;
    for (int k = 0; k < users; ++k) {
      std::int32_t x;
      do {
        x = static_cast<std::int32_t>(rng.below(static_cast<std::uint64_t>(n_pil)));
      } while (std::find(slot, slot + k, x) != slot + k);
      slot[k] = x;
    }
  }
  return out;
}

RandomReuseRate estimate_random_reuse_rate(const HexLattice& lattice, int users,
                                           std::int64_t n_pil, const ChannelConfig& cfg) {
  cfg.validate();
  const auto& cells = lattice.cells();
  const int count = lattice.cell_count();
  std::vector<Point> centres;
  for (AxialCoord c : cells) centres.push_back(lattice.center_unit(c));

  const std::int64_t blocks = (cfg.trials + kBlockTrials - 1) / kBlockTrials;
  struct Partial {
    double sum = 0.0, sum_sq = 0.0;
    std::int64_t used = 0, clean = 0;
  };
  std::vector<Partial> partial(static_cast<std::size_t>(blocks));
  detail::parallel_for(partial.size(), cfg.threads, [&](std::size_t block) {
    RandomStream rng(cfg.seed, {static_cast<std::uint64_t>(StreamPurpose::kRandomReuse),
                                static_cast<std::uint64_t>(n_pil),
                                static_cast<std::uint64_t>(block)});
    const std::int64_t begin = static_cast<std::int64_t>(block) * kBlockTrials;
    const std::int64_t end = std::min(cfg.trials, begin + kBlockTrials);
    Partial acc;
    for (std::int64_t n = begin; n < end; ++n) {
      const PilotRealization r = random_assignment(count, users, n_pil, rng);
      const int tagged = lattice.wraparound() ? 0 : static_cast<int>(n % count);
      const std::int32_t pilot = r.pilot(tagged, 0);
      const Point own = lattice.sample_offset_unit(rng);
      const double signal = std::pow(own.x * own.x + own.y * own.y, -cfg.gamma);
      double interference = 0.0;
      bool contaminated = false;
      for (int c = 0; c < count; ++c) {
        if (c == tagged) continue;
        bool shares = false;
        for (int k = 0; k < users; ++k) shares = shares || r.pilot(c, k) == pilot;
        if (!shares) continue;
        contaminated = true;
        const Point off = lattice.sample_offset_unit(rng);
        const double d2 = lattice.distance_sq_unit(
            centres[tagged], {centres[c].x + off.x, centres[c].y + off.y});
        interference += std::pow(d2, -cfg.gamma);
      }
      if (!contaminated) {
        ++acc.clean;
        continue;
      }
      const double rate = std::log2(1.0 + signal / interference);
      acc.sum += rate;
      acc.sum_sq += rate * rate;
      ++acc.used;
    }
    partial[block] = acc;
  });

  Partial total;
  for (const Partial& p : partial) {
    total.sum += p.sum;
    total.sum_sq += p.sum_sq;
    total.used += p.used;
    total.clean += p.clean;
  }
  RandomReuseRate out;
  out.uncontaminated_fraction = static_cast<double>(total.clean) / static_cast<double>(cfg.trials);
  if (total.used == 0) {
    out.mean_rate = std::numeric_limits<double>::infinity();
    return out;
  }
  const double n = static_cast<double>(total.used);
  out.mean_rate = total.sum / n;
  const double var =
      total.used > 1 ? std::max(0.0, (total.sum_sq - n * out.mean_rate * out.mean_rate) / (n - 1))
                     : 0.0;
  out.std_error = std::sqrt(var / n);
  return out;
}

double random_reuse_net_rate(const RandomReuseRate& r, int users, std::int64_t n_pil,
                             std::int64_t coherence) {
  if (coherence < 1) throw std::invalid_argument("coherence time must be at least 1");
  const double n = static_cast<double>(coherence);
  return (n - static_cast<double>(n_pil)) / n * users * r.mean_rate;
}

std::vector<NetRatePoint> sweep_training_fraction(int cells, int users,
                                                  const std::vector<std::int64_t>& coherences,
                                                  const RateProfile& rates) {
  if (coherences.empty()) throw std::invalid_argument("empty coherence range");
  const BreakpointTable table = breakpoints(cells, users, rates);
  std::vector<NetRatePoint> out;
  out.reserve(coherences.size());
  for (std::int64_t n : coherences) {
    NetRatePoint point;
    point.coherence = n;
    point.p = optimal_assignment(table, cells, users, n);
    point.net_rate = cnet(point.p, rates, n);
    point.training_fraction =
        static_cast<double>(pilot_length(point.p)) / static_cast<double>(n);
    out.push_back(std::move(point));
  }
  return out;
}

}  // namespace pilotreuse
