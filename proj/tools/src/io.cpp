#include "io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace pilotreuse::cli {

std::string format_number(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

nlohmann::json to_json(const RateProfile& r) {
  return {{"gamma", r.gamma},         {"trials", r.trials},     {"seed", r.seed},
          {"source", to_string(r.source)}, {"C", r.C}, {"stderr", r.std_error}};
}

RateProfile rate_profile_from_json(const nlohmann::json& j) {
  RateProfile r;
  r.C = j.at("C").get<std::vector<double>>();
  r.std_error = j.contains("stderr") ? j.at("stderr").get<std::vector<double>>()
                                     : std::vector<double>(r.C.size(), 0.0);
  if (r.std_error.size() != r.C.size())
    throw std::invalid_argument("profile: C and stderr lengths differ");
  r.gamma = j.value("gamma", 3.7);
  r.trials = j.value("trials", std::int64_t{0});
  r.seed = j.value("seed", std::uint64_t{0});
  r.source = rate_source_from_string(j.value("source", std::string("monte-carlo")));
  return r;
}

nlohmann::json to_json(const PilotAssignment& p) {
  return {{"L", p.cells}, {"K", p.users}, {"p", p.p}};
}

PilotAssignment assignment_from_json(const nlohmann::json& j) {
  PilotAssignment p{j.at("L").get<int>(), j.at("K").get<int>(),
                    j.at("p").get<std::vector<std::int64_t>>()};
  if (!is_valid(p)) throw std::invalid_argument("invalid assignment " + format_vector(p.p));
  return p;
}

nlohmann::json to_json(const MuStats& mu) {
  return {{"mu0", mu.mu0},         {"mu0_stderr", mu.mu0_error}, {"mu1", mu.mu1},
          {"mu1_stderr", mu.mu1_error}, {"mu2", mu.mu2},      {"mu2_stderr", mu.mu2_error},
          {"mu3", mu.mu3},         {"mu3_stderr", mu.mu3_error}};
}

void write_rate_csv(std::ostream& out, const RateProfile& r) {
  CsvTable t({"depth", "C", "stderr"});
  for (int i = 0; i < r.depth_count(); ++i)
    t.add({std::to_string(i), format_number(r.C[i]), format_number(r.std_error[i])});
  out << t.str();
}

RateProfile read_rate_profile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open profile '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("profile '" + path + "' is not valid JSON: " + e.what());
  }
  try {
    return rate_profile_from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("profile '" + path + "': " + e.what());
  }
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << contents;
  out.flush();
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

std::string CsvTable::str() const {
  std::ostringstream out;
  auto line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
    out << '\n';
  };
  line(header_);
  for (const auto& r : rows_) line(r);
  return out.str();
}

}  // namespace pilotreuse::cli
