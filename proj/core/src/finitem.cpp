#include "pilotreuse/finitem.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "parallel.hpp"

namespace pilotreuse {
namespace {

constexpr std::int64_t kMuBlockTrials = 4096;
constexpr std::int64_t kCdfBlockTrials = 256;
constexpr double kTieTolerance = 1e-12;

void require_mu(int m, const MuStats& mu) {
  if (mu.depth_count() != m)
    throw std::invalid_argument("mu statistics have " + std::to_string(mu.depth_count()) +
                                " depths, expected " + std::to_string(m));
}

// Per-N_pil table of SE at every depth, so that the argmax does not
// recompute logarithms for each vector.
class SeTable {
 public:
  SeTable(const FiniteMConfig& cfg, const MuStats& mu, std::int64_t max_pilots) {
    const int m = mu.depth_count();
    se_.assign(static_cast<std::size_t>(max_pilots + 1) * m, 0.0);
    m_ = m;
    for (std::int64_t n = 1; n <= max_pilots; ++n)
      for (int i = 0; i < m; ++i) se_[n * m + i] = se_user(i, cfg, n, mu);
  }

  double net_rate(const PilotAssignment& p, std::int64_t n_pil) const {
    double total = 0.0;
    double weight = 1.0;
    for (int i = 0; i < m_; ++i) {
      total += weight * static_cast<double>(p.p[i]) * se_[n_pil * m_ + i];
      weight /= 3.0;
    }
    return total;
  }

 private:
  int m_ = 0;
  std::vector<double> se_;
};

std::vector<PilotAssignment> two_depth_candidates(int cells, int users) {
  const int m = depth_count_for(cells);
  std::vector<PilotAssignment> out;
  for (int i = 0; i + 1 < m; ++i) {
    const std::int64_t width = users * pow3(i);
    for (std::int64_t a = 0; a <= width; ++a) {
      PilotAssignment p{cells, users, std::vector<std::int64_t>(m, 0)};
      p.p[i] = a;
      p.p[i + 1] = 3 * (width - a);
      out.push_back(std::move(p));
    }
  }
  std::sort(out.begin(), out.end(),
            [](const PilotAssignment& a, const PilotAssignment& b) { return a.p < b.p; });
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

double FiniteMConfig::rho_linear() const { return std::pow(10.0, rho_db / 10.0); }

void FiniteMConfig::validate() const {
  if (antennas < 1) throw std::invalid_argument("antenna count must be at least 1");
  if (users < 1) throw std::invalid_argument("K must be at least 1");
  if (coherence < 1) throw std::invalid_argument("coherence time must be at least 1");
  if (trials < 1) throw std::invalid_argument("trials must be at least 1");
  if (!std::isfinite(rho_db)) throw std::invalid_argument("SNR must be finite");
  if (!(gamma > 0.0)) throw std::invalid_argument("path-loss exponent must be positive");
}

MuStats estimate_mu_stats(const HexLattice& lattice, double gamma, std::int64_t trials,
                          std::uint64_t seed, unsigned threads) {
  if (!(gamma > 0.0)) throw std::invalid_argument("path-loss exponent must be positive");
  if (trials < 1) throw std::invalid_argument("trials must be at least 1");
  const auto& cells = lattice.cells();
  const std::size_t count = cells.size();
  const std::size_t tagged_count = lattice.wraparound() ? 1 : count;
  const std::int64_t blocks = (trials + kMuBlockTrials - 1) / kMuBlockTrials;

  struct Moments {
    double x = 0.0, x2 = 0.0, x4 = 0.0;
  };
  // Unit = (tagged j, cell l, block). l == j is skipped: the ratio is 1.
  const std::size_t units = tagged_count * count * static_cast<std::size_t>(blocks);
  std::vector<Moments> partial(units);
  detail::parallel_for(units, threads, [&](std::size_t unit) {
    const std::size_t block = unit % blocks;
    const std::size_t l = (unit / blocks) % count;
    const std::size_t j = unit / blocks / count;
    if (l == j) return;
    RandomStream rng(seed, {static_cast<std::uint64_t>(StreamPurpose::kMuStats), j, l, block});
    const Point bs_j = lattice.center_unit(cells[j]);
    const Point bs_l = lattice.center_unit(cells[l]);
    const std::int64_t begin = static_cast<std::int64_t>(block) * kMuBlockTrials;
    const std::int64_t end = std::min(trials, begin + kMuBlockTrials);
    Moments acc;
    for (std::int64_t n = begin; n < end; ++n) {
      const Point off = lattice.sample_offset_unit(rng);
      const double own_sq = off.x * off.x + off.y * off.y;
      const double cross_sq = lattice.distance_sq_unit(bs_j, {bs_l.x + off.x, bs_l.y + off.y});
      const double x = std::pow(own_sq / cross_sq, gamma / 2.0);
      acc.x += x;
      acc.x2 += x * x;
      acc.x4 += x * x * x * x;
    }
    partial[unit] = acc;
  });

  const int m = lattice.depth_max();
  MuStats out;
  out.mu1.assign(m, 0.0);
  out.mu2.assign(m, 0.0);
  out.mu3.assign(m, 0.0);
  std::vector<double> var1(m, 0.0), var2(m, 0.0), var3(m, 0.0);
  double var0 = 0.0;
  const double n = static_cast<double>(trials);
  for (std::size_t j = 0; j < tagged_count; ++j) {
    std::vector<double> mean1(count, 1.0), mean2(count, 1.0), se1(count, 0.0), se2(count, 0.0);
    for (std::size_t l = 0; l < count; ++l) {
      if (l == j) continue;
      Moments total;
      for (std::int64_t b = 0; b < blocks; ++b) {
        const Moments& p = partial[(j * count + l) * blocks + b];
        total.x += p.x;
        total.x2 += p.x2;
        total.x4 += p.x4;
      }
      mean1[l] = total.x / n;
      mean2[l] = total.x2 / n;
      se1[l] = std::sqrt(std::max(0.0, mean2[l] - mean1[l] * mean1[l]) / n);
      se2[l] = std::sqrt(std::max(0.0, total.x4 / n - mean2[l] * mean2[l]) / n);
    }
    for (std::size_t l = 0; l < count; ++l) {
      out.mu0 += mean1[l];
      var0 += se1[l] * se1[l];
    }
    for (int depth = 0; depth < m; ++depth) {
      for (AxialCoord c : lattice.cosharing_cells(cells[j], depth)) {
        const auto l = static_cast<std::size_t>(lattice.index_of(c));
        out.mu1[depth] += mean1[l];
        out.mu2[depth] += mean1[l] * mean1[l];
        out.mu3[depth] += mean2[l];
        var1[depth] += se1[l] * se1[l];
        var2[depth] += 4.0 * mean1[l] * mean1[l] * se1[l] * se1[l];
        var3[depth] += se2[l] * se2[l];
      }
    }
  }
  const double scale = 1.0 / static_cast<double>(tagged_count);
  out.mu0 *= scale;
  out.mu0_error = std::sqrt(var0) * scale;
  for (int depth = 0; depth < m; ++depth) {
    out.mu1[depth] *= scale;
    out.mu2[depth] *= scale;
    out.mu3[depth] *= scale;
    out.mu1_error.push_back(std::sqrt(var1[depth]) * scale);
    out.mu2_error.push_back(std::sqrt(var2[depth]) * scale);
    out.mu3_error.push_back(std::sqrt(var3[depth]) * scale);
  }
  return out;
}

double interference(int depth, std::int64_t antennas, int users, double rho_linear,
                    std::int64_t n_pil, const MuStats& mu) {
  if (depth < 0 || depth >= mu.depth_count())
    throw std::out_of_range("depth " + std::to_string(depth) + " out of range");
  if (antennas < 1) throw std::invalid_argument("antenna count must be at least 1");
  if (!(rho_linear > 0.0)) throw std::invalid_argument("SNR must be positive");
  if (n_pil < 1) throw std::invalid_argument("pilot length must be at least 1");
  const double M = static_cast<double>(antennas);
  const double mu1 = mu.mu1[depth], mu2 = mu.mu2[depth], mu3 = mu.mu3[depth];
  return mu3 + (mu3 - mu2) / M +
         (users * mu.mu0 + 1.0 / rho_linear) *
             (1.0 + mu1 + 1.0 / (static_cast<double>(n_pil) * rho_linear)) / M;
}

double se_user(int depth, const FiniteMConfig& cfg, std::int64_t n_pil, const MuStats& mu) {
  cfg.validate();
  if (n_pil > cfg.coherence)
    throw std::invalid_argument("pilot length " + std::to_string(n_pil) +
                                " exceeds the coherence time " + std::to_string(cfg.coherence));
  const double overhead =
      1.0 - static_cast<double>(n_pil) / static_cast<double>(cfg.coherence);
  const double I = interference(depth, cfg.antennas, cfg.users, cfg.rho_linear(), n_pil, mu);
  return overhead * std::log2(1.0 + 1.0 / I);
}

FiniteMResult cnet_finite(const PilotAssignment& p, const FiniteMConfig& cfg, const MuStats& mu) {
  if (!is_valid(p)) throw std::invalid_argument("invalid assignment " + format_vector(p.p));
  require_mu(p.depth_count(), mu);
  if (p.users != cfg.users)
    throw std::invalid_argument("assignment and configuration disagree on K");
  const std::int64_t n_pil = pilot_length(p);
  FiniteMResult out;
  out.p = p;
  out.antennas = cfg.antennas;
  double weight = 1.0;
  for (int i = 0; i < p.depth_count(); ++i) {
    out.per_depth_se.push_back(se_user(i, cfg, n_pil, mu));
    out.net_rate += weight * static_cast<double>(p.p[i]) * out.per_depth_se.back();
    weight /= 3.0;
  }
  return out;
}

FiniteMOptimum optimal_assignment_finite(const FiniteMConfig& cfg, const HexLattice& lattice,
                                         const MuStats& mu, std::uint64_t cap) {
  cfg.validate();
  const int cells = lattice.cell_count();
  require_mu(lattice.depth_max(), mu);
  if (cfg.coherence < cfg.users)
    throw std::invalid_argument("coherence time " + std::to_string(cfg.coherence) +
                                " cannot hold " + std::to_string(cfg.users) + " pilots");
  const std::int64_t top = std::min<std::int64_t>(cfg.coherence,
                                                  static_cast<std::int64_t>(cells) * cfg.users / 3);
  const SeTable table(cfg, mu, top);

  FiniteMOptimum out;
  std::optional<PilotAssignment> best;
  double best_value = 0.0;
  auto consider = [&](PilotAssignment&& p) {
    const std::int64_t n_pil = pilot_length(p);
    if (n_pil > cfg.coherence) return;
    ++out.candidates;
    const double value = table.net_rate(p, n_pil);
    if (!best || value > best_value + kTieTolerance * std::max(1.0, std::abs(best_value))) {
      best = std::move(p);
      best_value = value;
    }
  };

  if (assignment_count(cells, cfg.users) <= cap) {
    auto stream = enumerate_assignments(cells, cfg.users);
    while (auto p = stream.next()) consider(std::move(*p));
  } else {
    out.heuristic = true;
    for (PilotAssignment& p : two_depth_candidates(cells, cfg.users)) consider(std::move(p));
  }
  out.best = cnet_finite(*best, cfg, mu);
  return out;
}

std::vector<double> per_user_rate_cdf(const PilotAssignment& p, const FiniteMConfig& cfg,
                                      const HexLattice& lattice, std::int64_t trials,
                                      std::uint64_t seed) {
  cfg.validate();
  if (trials < 1) throw std::invalid_argument("trials must be at least 1");
  if (p.users != cfg.users)
    throw std::invalid_argument("assignment and configuration disagree on K");
  const PilotRealization real = realize(p, lattice);
  const std::int64_t n_pil = real.pilot_count;
  if (n_pil > cfg.coherence)
    throw std::invalid_argument("pilot length " + std::to_string(n_pil) +
                                " exceeds the coherence time " + std::to_string(cfg.coherence));
  const int count = lattice.cell_count();
  const int users = p.users;
  const auto& cells = lattice.cells();
  std::vector<Point> centres;
  for (AxialCoord c : cells) centres.push_back(lattice.center_unit(c));

  // Sharers of user k in cell j: the cells whose user k holds the same pilot.
  std::vector<std::vector<int>> sharers(static_cast<std::size_t>(count) * users);
  for (int j = 0; j < count; ++j)
    for (int k = 0; k < users; ++k)
      for (int c = 0; c < count; ++c)
        if (c != j && real.pilot(c, k) == real.pilot(j, k))
          sharers[static_cast<std::size_t>(j) * users + k].push_back(c);

  const double rho = cfg.rho_linear();
  const double M = static_cast<double>(cfg.antennas);
  const double overhead =
      1.0 - static_cast<double>(n_pil) / static_cast<double>(cfg.coherence);
  const std::int64_t blocks = (trials + kCdfBlockTrials - 1) / kCdfBlockTrials;
  std::vector<double> samples(static_cast<std::size_t>(trials) * users);
  detail::parallel_for(static_cast<std::size_t>(blocks), cfg.threads, [&](std::size_t block) {
    RandomStream rng(seed, {static_cast<std::uint64_t>(StreamPurpose::kRateCdf), block});
    std::vector<double> ratio(static_cast<std::size_t>(count) * users);
    const std::int64_t begin = static_cast<std::int64_t>(block) * kCdfBlockTrials;
    const std::int64_t end = std::min(trials, begin + kCdfBlockTrials);
    for (std::int64_t n = begin; n < end; ++n) {
      const int j = static_cast<int>(n % count);
      double everyone = 0.0;
      for (int c = 0; c < count; ++c) {
        for (int k = 0; k < users; ++k) {
          const Point off = lattice.sample_offset_unit(rng);
          double x = 1.0;
          if (c != j) {
            const double own_sq = off.x * off.x + off.y * off.y;
            const double cross_sq = lattice.distance_sq_unit(
                centres[j], {centres[c].x + off.x, centres[c].y + off.y});
            x = std::pow(own_sq / cross_sq, cfg.gamma / 2.0);
          }
          ratio[static_cast<std::size_t>(c) * users + k] = x;
          everyone += x;
        }
      }
      for (int k = 0; k < users; ++k) {
        double s1 = 0.0, s2 = 0.0;
        for (int c : sharers[static_cast<std::size_t>(j) * users + k]) {
          const double x = ratio[static_cast<std::size_t>(c) * users + k];
          s1 += x;
          s2 += x * x;
        }
        // With realised ratios the squared-mean and mean-square sums coincide.
        const double I = s2 + (everyone + 1.0 / rho) *
                                  (1.0 + s1 + 1.0 / (static_cast<double>(n_pil) * rho)) / M;
        samples[static_cast<std::size_t>(n) * users + k] = overhead * std::log2(1.0 + 1.0 / I);
      }
    }
  });
  std::sort(samples.begin(), samples.end());
  return samples;
}

std::vector<ThroughputCurve> throughput_vs_m_sweep(const HexLattice& lattice, const MuStats& mu,
                                                   const std::vector<std::int64_t>& antennas,
                                                   const std::vector<int>& antennas_per_user,
                                                   std::int64_t coherence, double rho_db,
                                                   std::uint64_t cap) {
  if (antennas.empty() || antennas_per_user.empty())
    throw std::invalid_argument("empty antenna grid");
  std::vector<ThroughputCurve> out;
  for (int ratio : antennas_per_user) {
    if (ratio < 1) throw std::invalid_argument("M/K must be at least 1");
    ThroughputCurve curve;
    curve.antennas_per_user = ratio;
    for (std::int64_t M : antennas) {
      if (M < ratio || M % ratio != 0)
        throw std::invalid_argument("M = " + std::to_string(M) + " is not a multiple of M/K = " +
                                    std::to_string(ratio));
      FiniteMConfig cfg;
      cfg.antennas = M;
      cfg.users = static_cast<int>(M / ratio);
      cfg.coherence = coherence;
      cfg.rho_db = rho_db;
      const FiniteMOptimum opt = optimal_assignment_finite(cfg, lattice, mu, cap);
      curve.points.push_back({M, cfg.users, opt.best.p, opt.best.net_rate / cfg.users,
                              opt.heuristic});
    }
    out.push_back(std::move(curve));
  }
  return out;
}

}  // namespace pilotreuse
