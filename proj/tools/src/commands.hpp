#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace pilotreuse::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitValidation = 1,
  kExitComputation = 2,
  kExitVerification = 3,
};

struct RunConfig {
  std::string command;

  int cells = 81;
  int users = 1;
  double gamma = 3.7;
  std::int64_t trials = 100'000;
  std::uint64_t seed = 1;
  double hole_ratio = 0.14;
  double cell_radius = 1.0;
  bool no_wraparound = false;
  unsigned threads = 0;
  std::string profile_path;

  std::optional<std::int64_t> coherence;
  std::int64_t coherence_min = 1;
  std::int64_t coherence_max = 110;
  std::int64_t random_trials = 20'000;

  std::string sweep = "regimes";
  std::int64_t antennas = 128;
  std::vector<std::int64_t> antenna_grid{40, 100, 200, 400, 600, 800, 1000, 1200, 1400, 1600, 1800, 2000};
  std::vector<int> antennas_per_user{20, 2};
  double rho_db = 5.0;
  std::int64_t mu_trials = 100'000;
  std::vector<std::string> assignments{"optimal", "full"};
  std::int64_t cdf_trials = 2'000;

  int max_users = 3;
  std::vector<double> slopes{1.0, 6.0, 10.0};
  std::vector<double> intercepts{1.0, 2.5};
  bool monte_carlo = false;
  std::int64_t verify_coherence_max = 0;

  std::string out;
  std::string format = "csv";

  // Checks every parameter the chosen command uses; throws
  // std::invalid_argument before any computation starts.
  void validate() const;
};

// Parses args (without the program name) and runs the chosen command. Data
// goes to the --out path when given, else to `out`; summaries go to `out`
// when data went to a file and to `err` otherwise.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int cmd_rates(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_optimize(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_finite(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_verify(const RunConfig& cfg, std::ostream& out, std::ostream& err);

}  // namespace pilotreuse::cli
