#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pilotreuse/hexgrid.hpp"

namespace pilotreuse {

// p_i = number of pilot-tree leaves at depth i, for L cells and K users per
// cell. Construction does not validate; use is_valid().
struct PilotAssignment {
  int cells = 0;  // L
  int users = 0;  // K
  std::vector<std::int64_t> p;

  int depth_count() const { return static_cast<int>(p.size()); }
  friend bool operator==(const PilotAssignment&, const PilotAssignment&) = default;
};

// t_i = number of 3-way partitioning acts at depth i; length m - 1.
struct TransitionVector {
  std::vector<std::int64_t> t;
  friend bool operator==(const TransitionVector&, const TransitionVector&) = default;
};

// Which pilot each user holds, plus where each structured pilot lives.
struct PilotLeaf {
  int tree = 0;  // user index k that the leaf serves
  CosetId coset;
};

struct PilotRealization {
  int cells = 0;
  int users = 0;
  std::int64_t pilot_count = 0;
  // pilot_of[cell_index * users + k]; cell_index as in HexLattice::cells().
  std::vector<std::int32_t> pilot_of;
  // One entry per pilot for structured realizations; empty for random ones.
  std::vector<PilotLeaf> leaves;

  std::int32_t pilot(int cell_index, int user) const {
    return pilot_of[static_cast<std::size_t>(cell_index) * users + user];
  }
};

// Number of depths m for L cells. Throws unless L = 3^m with m >= 2.
int depth_count_for(int cells);

// The two defining constraints, checked in exact integers. Throws
// std::invalid_argument when the vector length does not match L.
bool is_valid(const PilotAssignment& p);
std::int64_t pilot_length(const PilotAssignment& p);

TransitionVector to_transition(const PilotAssignment& p);
// Inverse of to_transition. Throws when t would give a negative entry.
PilotAssignment from_transition(const TransitionVector& t, int cells, int users);

PilotAssignment full_reuse(int cells, int users);

// Renders p as dash-joined integers, e.g. "0-2-3-0".
std::string format_vector(const std::vector<std::int64_t>& p);
// Parses the dash-joined form; throws on malformed input.
std::vector<std::int64_t> parse_vector(const std::string& text);

// Streams every valid vector once, in ascending lexicographic order of p,
// optionally restricted to one pilot length.
class AssignmentEnumerator {
 public:
  AssignmentEnumerator(int cells, int users,
                       std::optional<std::int64_t> pilot_length_filter = {});

  std::optional<PilotAssignment> next();
  // Set when the filter cannot be met (wrong parity or out of range); the
  // stream is then empty.
  bool warning() const { return warning_; }

 private:
  bool descend(std::size_t from);
  bool advance();
  PilotAssignment current() const;

  int cells_;
  int users_;
  int m_;
  std::optional<std::int64_t> target_;  // required sum of t, if filtered
  std::vector<std::int64_t> t_;
  std::vector<std::int64_t> prefix_;  // prefix_[i] = t_0 + ... + t_{i-1}
  bool started_ = false;
  bool done_ = false;
  bool warning_ = false;
};

AssignmentEnumerator enumerate_assignments(
    int cells, int users, std::optional<std::int64_t> pilot_length_filter = {});

// |P_{L,K}| (or |Omega(N)| when filtered), saturating at UINT64_MAX.
std::uint64_t assignment_count(int cells, int users,
                               std::optional<std::int64_t> pilot_length_filter = {});

// {K, K+2, ..., LK/3}.
std::vector<std::int64_t> valid_pilot_lengths(int cells, int users);
bool is_valid_pilot_length(int cells, int users, std::int64_t n);

// Smallest k with sum_{i<=k} K 3^i > (N - K) / 2. Throws on wrong parity or
// N < K.
int chi(std::int64_t pilot_length, int users);

// Maps leaves onto cosets: trees are split left to right, the leftmost p_i
// open nodes at each depth become leaves and the rest are split in three.
// Tree k starts its depth-1 children at coset k mod 3.
PilotRealization realize(const PilotAssignment& p, const HexLattice& lattice);

}  // namespace pilotreuse
