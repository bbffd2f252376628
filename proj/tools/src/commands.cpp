#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "io.hpp"
#include "pilotreuse/assignment.hpp"
#include "pilotreuse/channel.hpp"
#include "pilotreuse/finitem.hpp"
#include "pilotreuse/hexgrid.hpp"
#include "pilotreuse/optimizer.hpp"
#include "pilotreuse/verification.hpp"

namespace pilotreuse::cli {
namespace {

using nlohmann::json;

HexLattice lattice_for(const RunConfig& cfg) {
  return build_lattice_for_cells(cfg.cells, cfg.cell_radius, cfg.hole_ratio, !cfg.no_wraparound);
}

ChannelConfig channel_for(const RunConfig& cfg) {
  ChannelConfig c;
  c.gamma = cfg.gamma;
  c.trials = cfg.trials;
  c.seed = cfg.seed;
  c.threads = cfg.threads;
  return c;
}

RateProfile obtain_profile(const RunConfig& cfg) {
  RateProfile r = cfg.profile_path.empty()
                      ? estimate_rate_profile(lattice_for(cfg), channel_for(cfg))
                      : read_rate_profile(cfg.profile_path);
  if (r.depth_count() != depth_count_for(cfg.cells))
    throw std::invalid_argument("profile has " + std::to_string(r.depth_count()) +
                                " depths but L = " + std::to_string(cfg.cells) + " needs " +
                                std::to_string(depth_count_for(cfg.cells)));
  return r;
}

// Data sink: the --out file when declared, the data stream otherwise.
struct Sink {
  const RunConfig& cfg;
  std::ostream& out;
  std::ostream& err;

  std::ostream& summary() const { return cfg.out.empty() ? err : out; }
  void emit(const std::string& data, const std::string& suffix = "") const {
    if (cfg.out.empty()) {
      out << data;
    } else {
      write_file(cfg.out + suffix, data);
    }
  }
};

std::string csv_or_json(const RunConfig& cfg, const CsvTable& table, const json& j) {
  return cfg.format == "json" ? j.dump(2) + "\n" : table.str();
}

FiniteMConfig finite_for(const RunConfig& cfg, std::int64_t antennas, int users,
                         std::int64_t coherence) {
  FiniteMConfig f;
  f.antennas = antennas;
  f.users = users;
  f.coherence = coherence;
  f.rho_db = cfg.rho_db;
  f.gamma = cfg.gamma;
  f.trials = cfg.mu_trials;
  f.seed = cfg.seed;
  f.threads = cfg.threads;
  return f;
}

void note_heuristic(const FiniteMOptimum& opt, const RunConfig& cfg, std::ostream& err,
                    bool& noted) {
  if (!opt.heuristic || noted) return;
  noted = true;
  err << "note: enumerating every assignment for L=" << cfg.cells
      << " exceeds the cap of " << kEnumerationCap
      << "; searched two-adjacent-depth candidates only (heuristic result)\n";
}

}  // namespace

void RunConfig::validate() const {
  auto need = [](bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument(what);
  };
  need(log3_exact(cells) >= 2, "--L must be a power of 3 and at least 9");
  need(users >= 1, "--K must be at least 1");
  need(gamma > 2.0 && std::isfinite(gamma), "--gamma must exceed 2");
  need(trials >= 1, "--trials must be at least 1");
  need(hole_ratio >= 0.0 && hole_ratio < 1.0, "--hole-ratio must lie in [0, 1)");
  need(cell_radius > 0.0, "--cell-radius must be positive");
  need(format == "csv" || format == "json", "--format must be csv or json");
  if (command == "optimize") {
    if (coherence) need(*coherence >= 1, "--ncoh must be at least 1");
    need(coherence_min >= 1 && coherence_max >= coherence_min,
         "--ncoh-min/--ncoh-max must satisfy 1 <= min <= max");
    need(random_trials >= 0, "--random-trials must be non-negative");
  }
  if (command == "finite") {
    need(sweep == "regimes" || sweep == "rate-vs-m" || sweep == "throughput" ||
             sweep == "cdf" || sweep == "mu",
         "--sweep must be one of regimes, rate-vs-m, throughput, cdf, mu");
    need(antennas >= 1, "--M must be at least 1");
    need(!antenna_grid.empty(), "--M-grid must not be empty");
    for (auto m : antenna_grid) need(m >= 1, "--M-grid entries must be at least 1");
    need(!antennas_per_user.empty(), "--ratios must not be empty");
    for (int r : antennas_per_user) need(r >= 1, "--ratios entries must be at least 1");
    for (auto m : antenna_grid)
      for (int r : antennas_per_user)
        if (sweep == "throughput")
          need(m % r == 0, "--M-grid entries must be multiples of every --ratios entry");
    need(std::isfinite(rho_db), "--rho-db must be finite");
    need(mu_trials >= 1, "--mu-trials must be at least 1");
    need(cdf_trials >= 1, "--cdf-trials must be at least 1");
    if (coherence) need(*coherence >= users, "--ncoh must be at least K");
    need(coherence_min >= 1 && coherence_max >= coherence_min,
         "--ncoh-min/--ncoh-max must satisfy 1 <= min <= max");
    if (sweep == "regimes") need(coherence_min >= users, "--ncoh-min must be at least K");
    for (const auto& a : assignments) {
      if (a == "optimal" || a == "full") continue;
      PilotAssignment p{cells, users, parse_vector(a)};
      need(is_valid(p), "--assignment " + a + " is not a valid vector for this L and K");
    }
  }
  if (command == "verify") {
    need(max_users >= 1, "--k-max must be at least 1");
    need(!slopes.empty(), "--slopes must not be empty");
    for (double s : slopes) need(s > 0.0, "--slopes entries must be positive");
    for (double c : intercepts) need(c > 0.0, "--c0 entries must be positive");
    need(verify_coherence_max >= 0, "--verify-ncoh-max must be non-negative");
  }
}

int cmd_rates(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const Sink sink{cfg, out, err};
  const RateProfile r = estimate_rate_profile(lattice_for(cfg), channel_for(cfg));
  if (cfg.out.empty()) {
    if (cfg.format == "json") {
      out << to_json(r).dump(2) << '\n';
    } else {
      write_rate_csv(out, r);
    }
  } else {
    std::ostringstream csv;
    write_rate_csv(csv, r);
    write_file(cfg.out + ".json", to_json(r).dump(2) + "\n");
    write_file(cfg.out + ".csv", csv.str());
  }
  std::ostream& s = sink.summary();
  s << "depth  C_i (bits)  stderr   C_i - C_{i-1}\n";
  for (int i = 0; i < r.depth_count(); ++i) {
    s << i << "  " << format_number(r.C[i]) << "  " << format_number(r.std_error[i]);
    if (i > 0) s << "  " << format_number(r.C[i] - r.C[i - 1]);
    s << '\n';
  }
  if (!r.strictly_increasing())
    s << "warning: rates are not strictly increasing; raise --trials\n";
  return kExitOk;
}

int cmd_optimize(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const Sink sink{cfg, out, err};
  const RateProfile rates = obtain_profile(cfg);
  const BreakpointTable table = breakpoints(cfg.cells, cfg.users, rates);
  const HexLattice lattice = lattice_for(cfg);

  std::vector<std::int64_t> coherences;
  if (cfg.coherence) {
    coherences.push_back(*cfg.coherence);
  } else {
    for (auto n = cfg.coherence_min; n <= cfg.coherence_max; ++n) coherences.push_back(n);
  }

  std::map<std::int64_t, RandomReuseRate> random_cache;
  auto random_rate = [&](std::int64_t n_pil) -> const RandomReuseRate& {
    auto it = random_cache.find(n_pil);
    if (it == random_cache.end()) {
      ChannelConfig c = channel_for(cfg);
      c.trials = cfg.random_trials;
      it = random_cache.emplace(n_pil, estimate_random_reuse_rate(lattice, cfg.users, n_pil, c))
               .first;
    }
    return it->second;
  };

  CsvTable csv({"N_coh", "p", "N_pil", "C_net_optimal", "C_net_full_reuse", "C_net_random_mean"});
  json rows = json::array();
  const PilotAssignment full = full_reuse(cfg.cells, cfg.users);
  for (std::int64_t n : coherences) {
    const PilotAssignment p = optimal_assignment(table, cfg.cells, cfg.users, n);
    const std::int64_t n_pil = pilot_length(p);
    const double opt = cnet(p, rates, n);
    const double base = cnet(full, rates, n);
    std::string random_cell;
    json random_json = nullptr;
    if (cfg.random_trials > 0) {
      const double v = random_reuse_net_rate(random_rate(n_pil), cfg.users, n_pil, n);
      random_cell = format_number(v);
      random_json = v;
    }
    csv.add({std::to_string(n), format_vector(p.p), std::to_string(n_pil), format_number(opt),
             format_number(base), random_cell});
    rows.push_back({{"N_coh", n},
                    {"p", p.p},
                    {"N_pil", n_pil},
                    {"C_net_optimal", opt},
                    {"C_net_full_reuse", base},
                    {"C_net_random_mean", random_json}});
  }

  json regimes = json::array();
  for (std::size_t i = 0; i < table.delta.size(); ++i) {
    const auto n = static_cast<std::int64_t>(i + 1);
    regimes.push_back({{"n", n},
                       {"delta", table.delta[i]},
                       {"starts_at", static_cast<std::int64_t>(std::ceil(table.delta[i]))},
                       {"p", optimal_for_length(cfg.cells, cfg.users, 2 * n + cfg.users).p}});
  }
  json doc = {{"L", cfg.cells},   {"K", cfg.users},     {"profile", to_json(rates)},
              {"regimes", regimes}, {"rows", rows}};
  sink.emit(csv_or_json(cfg, csv, doc));

  std::ostream& s = sink.summary();
  s << "regime start (ceil Delta_n) -> optimal assignment, L=" << cfg.cells << " K=" << cfg.users
    << '\n';
  s << "  1 -> " << format_vector(full.p) << '\n';
  for (const auto& r : regimes)
    s << "  " << r["starts_at"].get<std::int64_t>() << " -> "
      << format_vector(r["p"].get<std::vector<std::int64_t>>()) << '\n';
  for (const auto& [n_pil, r] : random_cache)
    if (r.uncontaminated_fraction > 0)
      s << "note: random reuse with N_pil=" << n_pil << " left "
        << format_number(r.uncontaminated_fraction)
        << " of draws uncontaminated; they are excluded from its mean\n";
  return kExitOk;
}

int cmd_finite(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const Sink sink{cfg, out, err};
  const HexLattice lattice = lattice_for(cfg);
  const MuStats mu = estimate_mu_stats(lattice, cfg.gamma, cfg.mu_trials, cfg.seed, cfg.threads);
  std::ostream& s = sink.summary();
  bool noted = false;

  if (cfg.sweep == "mu") {
    CsvTable csv({"depth", "mu1", "mu2", "mu3", "mu1_stderr", "mu2_stderr", "mu3_stderr"});
    for (int i = 0; i < mu.depth_count(); ++i)
      csv.add({std::to_string(i), format_number(mu.mu1[i]), format_number(mu.mu2[i]),
               format_number(mu.mu3[i]), format_number(mu.mu1_error[i]),
               format_number(mu.mu2_error[i]), format_number(mu.mu3_error[i])});
    sink.emit(csv_or_json(cfg, csv, to_json(mu)));
    s << "mu0 = " << format_number(mu.mu0) << " (stderr " << format_number(mu.mu0_error)
      << ")\n";
    return kExitOk;
  }

  if (cfg.sweep == "regimes") {
    CsvTable csv({"N_coh", "N_coh_over_K", "p", "N_pil", "C_net", "heuristic"});
    json rows = json::array();
    std::string last;
    for (auto n = cfg.coherence_min; n <= cfg.coherence_max; ++n) {
      const FiniteMOptimum opt =
          optimal_assignment_finite(finite_for(cfg, cfg.antennas, cfg.users, n), lattice, mu);
      note_heuristic(opt, cfg, err, noted);
      const double ratio = static_cast<double>(n) / cfg.users;
      const std::string p = format_vector(opt.best.p.p);
      csv.add({std::to_string(n), format_number(ratio), p,
               std::to_string(pilot_length(opt.best.p)), format_number(opt.best.net_rate),
               opt.heuristic ? "1" : "0"});
      rows.push_back({{"N_coh", n},
                      {"N_coh_over_K", ratio},
                      {"p", opt.best.p.p},
                      {"C_net", opt.best.net_rate},
                      {"heuristic", opt.heuristic}});
      if (p != last) s << "N_coh/K >= " << format_number(ratio) << " -> " << p << '\n';
      last = p;
    }
    sink.emit(csv_or_json(cfg, csv, json{{"L", cfg.cells}, {"K", cfg.users},
                                         {"M", cfg.antennas}, {"rho_db", cfg.rho_db},
                                         {"rows", rows}}));
    return kExitOk;
  }

  if (cfg.sweep == "rate-vs-m") {
    const std::int64_t coherence = cfg.coherence.value_or(200);
    CsvTable csv({"M", "p", "C_net_optimal", "C_net_full_reuse", "gain"});
    json rows = json::array();
    const PilotAssignment full = full_reuse(cfg.cells, cfg.users);
    for (std::int64_t M : cfg.antenna_grid) {
      const FiniteMConfig f = finite_for(cfg, M, cfg.users, coherence);
      const FiniteMOptimum opt = optimal_assignment_finite(f, lattice, mu);
      note_heuristic(opt, cfg, err, noted);
      const double base = cnet_finite(full, f, mu).net_rate;
      const double gain = opt.best.net_rate / base - 1.0;
      csv.add({std::to_string(M), format_vector(opt.best.p.p), format_number(opt.best.net_rate),
               format_number(base), format_number(gain)});
      rows.push_back({{"M", M},
                      {"p", opt.best.p.p},
                      {"C_net_optimal", opt.best.net_rate},
                      {"C_net_full_reuse", base},
                      {"gain", gain}});
      s << "M=" << M << ": " << format_vector(opt.best.p.p) << " gain "
        << format_number(std::round(gain * 1000) / 10) << "%\n";
    }
    sink.emit(csv_or_json(cfg, csv, json{{"L", cfg.cells}, {"K", cfg.users},
                                         {"N_coh", coherence}, {"rows", rows}}));
    return kExitOk;
  }

  if (cfg.sweep == "throughput") {
    const std::int64_t coherence = cfg.coherence.value_or(2000);
    const auto curves = throughput_vs_m_sweep(lattice, mu, cfg.antenna_grid,
                                              cfg.antennas_per_user, coherence, cfg.rho_db);
    CsvTable csv({"M_over_K", "M", "K", "p", "per_user_rate", "heuristic"});
    json out_curves = json::array();
    for (const auto& c : curves) {
      json pts = json::array();
      for (const auto& p : c.points) {
        csv.add({std::to_string(c.antennas_per_user), std::to_string(p.antennas),
                 std::to_string(p.users), format_vector(p.p.p), format_number(p.per_user_rate),
                 p.heuristic ? "1" : "0"});
        pts.push_back({{"M", p.antennas},
                       {"K", p.users},
                       {"p", p.p.p},
                       {"per_user_rate", p.per_user_rate},
                       {"heuristic", p.heuristic}});
        if (p.heuristic && !noted) {
          noted = true;
          err << "note: some grid points exceed the enumeration cap of " << kEnumerationCap
              << "; they searched two-adjacent-depth candidates only (heuristic)\n";
        }
      }
      out_curves.push_back({{"M_over_K", c.antennas_per_user}, {"points", pts}});
    }
    sink.emit(csv_or_json(cfg, csv, json{{"L", cfg.cells}, {"N_coh", coherence},
                                         {"curves", out_curves}}));
    return kExitOk;
  }

  // cdf
  const std::int64_t coherence = cfg.coherence.value_or(200);
  const FiniteMConfig f = finite_for(cfg, cfg.antennas, cfg.users, coherence);
  CsvTable csv({"assignment", "p", "rank", "cdf", "rate"});
  json sets = json::array();
  for (const std::string& name : cfg.assignments) {
    PilotAssignment p;
    if (name == "optimal") {
      const FiniteMOptimum opt = optimal_assignment_finite(f, lattice, mu);
      note_heuristic(opt, cfg, err, noted);
      p = opt.best.p;
    } else if (name == "full") {
      p = full_reuse(cfg.cells, cfg.users);
    } else {
      p = PilotAssignment{cfg.cells, cfg.users, parse_vector(name)};
    }
    const auto samples = per_user_rate_cdf(p, f, lattice, cfg.cdf_trials, cfg.seed);
    const double n = static_cast<double>(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i)
      csv.add({name, format_vector(p.p), std::to_string(i),
               format_number(static_cast<double>(i + 1) / n), format_number(samples[i])});
    sets.push_back({{"assignment", name}, {"p", p.p}, {"rates", samples}});
    s << name << " " << format_vector(p.p) << ": median per-user rate "
      << format_number(samples[samples.size() / 2]) << '\n';
  }
  sink.emit(csv_or_json(cfg, csv, json{{"L", cfg.cells}, {"K", cfg.users}, {"M", cfg.antennas},
                                       {"N_coh", coherence}, {"sets", sets}}));
  return kExitOk;
}

int cmd_verify(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const Sink sink{cfg, out, err};
  VerificationSuite suite;
  suite.cells = cfg.cells;
  suite.users.clear();
  for (int k = 1; k <= cfg.max_users; ++k) suite.users.push_back(k);
  for (double c0 : cfg.intercepts)
    for (double slope : cfg.slopes)
      suite.linear_profiles.push_back(synthetic_linear_profile(c0, slope, depth_count_for(cfg.cells)));
  if (cfg.monte_carlo || !cfg.profile_path.empty()) suite.measured_profile = obtain_profile(cfg);
  suite.max_coherence = cfg.verify_coherence_max;

  const VerificationReport report = run_verification(suite);
  json props = json::array();
  for (const auto& p : report.properties) {
    json failures = json::array();
    for (const auto& f : p.failures)
      failures.push_back({{"instance", f.instance}, {"detail", f.detail}});
    props.push_back({{"name", p.name}, {"checked", p.checked}, {"failures", failures}});
  }
  json doc = {{"L", cfg.cells},
              {"K_max", cfg.max_users},
              {"passed", report.passed()},
              {"properties", props},
              {"measured_profile",
               {{"checked", report.measured_checked},
                {"disagreements", report.measured_disagreements}}}};
  sink.emit(doc.dump(2) + "\n");

  std::ostream& s = sink.summary();
  for (const auto& p : report.properties) {
    s << (p.failures.empty() ? "PASS " : "FAIL ") << p.name << " (" << p.checked << " checks)\n";
    for (std::size_t i = 0; i < std::min<std::size_t>(p.failures.size(), 5); ++i)
      s << "  " << p.failures[i].instance << ": " << p.failures[i].detail << '\n';
  }
  if (suite.measured_profile)
    s << "measured profile: " << report.measured_disagreements.size() << " disagreements in "
      << report.measured_checked << " comparisons\n";
  return report.passed() ? kExitOk : kExitVerification;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Hierarchical pilot reuse: rates, optimal assignments, finite-antenna sweeps",
               "pilotreuse"};
  app.fallthrough();
  app.require_subcommand(1, 1);
  app.set_config("--config", "", "key = value file; command-line flags take precedence");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.add_subcommand("rates", "Estimate per-depth asymptotic rates by Monte Carlo");
  app.add_subcommand("optimize", "Optimal assignment versus coherence time");
  app.add_subcommand("finite", "Finite-antenna sweeps: regimes, rate-vs-m, throughput, cdf, mu");
  app.add_subcommand("verify", "Check the closed forms against exhaustive search");

  app.add_option("--L", cfg.cells, "Number of cells (power of 3)");
  app.add_option("--K", cfg.users, "Users per cell");
  app.add_option("--gamma", cfg.gamma, "Path-loss exponent");
  app.add_option("--trials", cfg.trials, "Monte Carlo trials per depth");
  app.add_option("--seed", cfg.seed, "Master random seed");
  app.add_option("--hole-ratio", cfg.hole_ratio, "Exclusion radius around each BS, in cell radii");
  app.add_option("--cell-radius", cfg.cell_radius, "Cell radius in meters (results do not depend on it)");
  app.add_flag("--no-wraparound", cfg.no_wraparound, "Finite patch instead of a torus");
  app.add_option("--threads", cfg.threads, "Worker threads, 0 = all cores; results do not depend on it");
  app.add_option("--profile", cfg.profile_path, "Rate profile JSON to use instead of estimating one");
  app.add_option("--ncoh", cfg.coherence, "Single coherence time (symbols)");
  app.add_option("--ncoh-min", cfg.coherence_min, "First coherence time of a sweep");
  app.add_option("--ncoh-max", cfg.coherence_max, "Last coherence time of a sweep");
  app.add_option("--random-trials", cfg.random_trials, "Trials for the random-reuse baseline, 0 disables it");
  app.add_option("--sweep", cfg.sweep, "finite: regimes, rate-vs-m, throughput, cdf or mu");
  app.add_option("--M", cfg.antennas, "Antennas per base station");
  app.add_option("--M-grid", cfg.antenna_grid, "Antenna counts for rate-vs-m and throughput")->delimiter(',');
  app.add_option("--ratios", cfg.antennas_per_user, "M/K ratios for the throughput sweep")->delimiter(',');
  app.add_option("--rho-db", cfg.rho_db, "SNR in dB");
  app.add_option("--mu-trials", cfg.mu_trials, "Monte Carlo trials per cell pair for the mu statistics");
  app.add_option("--assignment", cfg.assignments, "cdf: optimal, full or a vector like 9-3-0-0")->delimiter(',');
  app.add_option("--cdf-trials", cfg.cdf_trials, "cdf: network drops");
  app.add_option("--k-max", cfg.max_users, "verify: check K = 1..k-max");
  app.add_option("--slopes", cfg.slopes, "verify: slopes of the linear test profiles")->delimiter(',');
  app.add_option("--c0", cfg.intercepts, "verify: intercepts of the linear test profiles")->delimiter(',');
  app.add_flag("--monte-carlo", cfg.monte_carlo, "verify: also compare under an estimated profile");
  app.add_option("--verify-ncoh-max", cfg.verify_coherence_max, "verify: largest N_coh, 0 = 4LK/3");
  app.add_option("--out", cfg.out, "Output path (prefix for rates); stdout when omitted");
  app.add_option("--format", cfg.format, "csv or json");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitValidation;
  }
  for (const auto* sub : app.get_subcommands()) cfg.command = sub->get_name();

  try {
    cfg.validate();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  try {
    if (cfg.command == "rates") return cmd_rates(cfg, out, err);
    if (cfg.command == "optimize") return cmd_optimize(cfg, out, err);
    if (cfg.command == "finite") return cmd_finite(cfg, out, err);
    return cmd_verify(cfg, out, err);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitComputation;
  }
}

}  // namespace pilotreuse::cli
