#include "pilotreuse/channel.hpp"

#include <cmath>
#include <stdexcept>

#include "parallel.hpp"
#include "sir_sampler.hpp"

namespace pilotreuse {
namespace {

constexpr std::int64_t kBlockTrials = 2048;

}  // namespace

void ChannelConfig::validate() const {
  if (!(gamma > 2.0) || !std::isfinite(gamma))
    throw std::invalid_argument("path-loss exponent must exceed 2");
  if (trials < 1) throw std::invalid_argument("trials must be at least 1");
}

std::string to_string(RateSource s) {
  return s == RateSource::kMonteCarlo ? "monte-carlo" : "synthetic-linear";
}

RateSource rate_source_from_string(const std::string& s) {
  if (s == "monte-carlo") return RateSource::kMonteCarlo;
  if (s == "synthetic-linear") return RateSource::kSyntheticLinear;
  throw std::invalid_argument("unknown rate source '" + s + "'");
}

bool RateProfile::strictly_increasing() const {
  for (std::size_t i = 1; i < C.size(); ++i)
    if (!(C[i] > C[i - 1])) return false;
  return true;
}

double slow_fading(AxialCoord bs_cell, Point user_pos, const HexLattice& lattice,
                   double gamma) {
  const double d = lattice.distance(lattice.center(lattice.reduce(bs_cell)), user_pos);
  if (!(d > 0.0)) throw std::domain_error("user sits on the base station");
  return std::pow(d / lattice.cell_radius(), -gamma);
}

double sample_sir(int depth, AxialCoord tagged, const HexLattice& lattice,
                  const ChannelConfig& cfg, RandomStream& rng) {
  cfg.validate();
  return detail::SirSampler(lattice, tagged, depth, cfg.gamma).draw(rng);
}

double sample_sir(int depth, const HexLattice& lattice, const ChannelConfig& cfg,
                  RandomStream& rng) {
  return sample_sir(depth, {0, 0}, lattice, cfg, rng);
}

RateProfile estimate_rate_profile(const HexLattice& lattice, const ChannelConfig& cfg) {
  cfg.validate();
  const int m = lattice.depth_max();
  const auto& cells = lattice.cells();
  const std::size_t taggable = lattice.wraparound() ? 1 : cells.size();

  std::vector<std::vector<detail::SirSampler>> samplers(m);
  for (int depth = 0; depth < m; ++depth)
    for (std::size_t c = 0; c < taggable; ++c)
      samplers[depth].emplace_back(lattice, cells[c], depth, cfg.gamma);

  const std::int64_t blocks = (cfg.trials + kBlockTrials - 1) / kBlockTrials;
  struct Partial {
    double sum = 0.0;
    double sum_sq = 0.0;
  };
  std::vector<Partial> partial(static_cast<std::size_t>(blocks) * m);
  detail::parallel_for(partial.size(), cfg.threads, [&](std::size_t unit) {
    const int depth = static_cast<int>(unit / blocks);
    const std::int64_t block = static_cast<std::int64_t>(unit % blocks);
    RandomStream rng(cfg.seed, {static_cast<std::uint64_t>(StreamPurpose::kRateProfile),
                                static_cast<std::uint64_t>(depth),
                                static_cast<std::uint64_t>(block)});
    const std::int64_t begin = block * kBlockTrials;
    const std::int64_t end = std::min(cfg.trials, begin + kBlockTrials);
    Partial acc;
    for (std::int64_t n = begin; n < end; ++n) {
      const auto& sampler = samplers[depth][static_cast<std::size_t>(n) % taggable];
      const double rate = std::log2(1.0 + sampler.draw(rng));
      acc.sum += rate;
      acc.sum_sq += rate * rate;
    }
    partial[unit] = acc;
  });

  RateProfile out;
  out.source = RateSource::kMonteCarlo;
  out.gamma = cfg.gamma;
  out.trials = cfg.trials;
  out.seed = cfg.seed;
  const double n = static_cast<double>(cfg.trials);
  for (int depth = 0; depth < m; ++depth) {
    double sum = 0.0, sum_sq = 0.0;
    for (std::int64_t b = 0; b < blocks; ++b) {
      sum += partial[depth * blocks + b].sum;
      sum_sq += partial[depth * blocks + b].sum_sq;
    }
    const double mean = sum / n;
    const double var = cfg.trials > 1 ? std::max(0.0, (sum_sq - n * mean * mean) / (n - 1)) : 0.0;
    out.C.push_back(mean);
    out.std_error.push_back(std::sqrt(var / n));
  }
  return out;
}

RateProfile synthetic_linear_profile(double c0, double slope, int m) {
  if (!(slope > 0.0)) throw std::invalid_argument("slope must be positive");
  if (m < 2) throw std::invalid_argument("profile needs at least 2 depths");
  RateProfile out;
  out.source = RateSource::kSyntheticLinear;
  out.gamma = 0.0;
  for (int i = 0; i < m; ++i) {
    out.C.push_back(c0 + slope * i);
    out.std_error.push_back(0.0);
  }
  return out;
}

}  // namespace pilotreuse
