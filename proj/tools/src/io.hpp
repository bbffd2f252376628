#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "pilotreuse/assignment.hpp"
#include "pilotreuse/channel.hpp"
#include "pilotreuse/finitem.hpp"

namespace pilotreuse::cli {

// Shortest decimal that round-trips, '.' separator regardless of locale.
std::string format_number(double x);

nlohmann::json to_json(const RateProfile& r);
RateProfile rate_profile_from_json(const nlohmann::json& j);
nlohmann::json to_json(const PilotAssignment& p);
PilotAssignment assignment_from_json(const nlohmann::json& j);
nlohmann::json to_json(const MuStats& mu);

// depth,C,stderr
void write_rate_csv(std::ostream& out, const RateProfile& r);

RateProfile read_rate_profile(const std::string& path);
// Writes atomically enough for our purposes; throws std::runtime_error on
// I/O failure.
void write_file(const std::string& path, const std::string& contents);

// Tiny CSV builder: header once, then rows of already formatted cells.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}
  void add(std::vector<std::string> row) { rows_.push_back(std::move(row)); }
  std::string str() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace pilotreuse::cli
