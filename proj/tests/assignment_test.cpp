#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <set>

#include "oracles.hpp"
#include "pilotreuse/assignment.hpp"

namespace pilotreuse {
namespace {

PilotAssignment vec(int cells, int users, std::vector<std::int64_t> p) {
  return {cells, users, std::move(p)};
}

std::vector<PilotAssignment> collect(int cells, int users,
                                     std::optional<std::int64_t> filter = {}) {
  std::vector<PilotAssignment> out;
  auto e = enumerate_assignments(cells, users, filter);
  while (auto p = e.next()) out.push_back(*p);
  return out;
}

TEST(Validity, Examples) {
  EXPECT_TRUE(is_valid(vec(81, 1, {1, 0, 0, 0})));
  EXPECT_TRUE(is_valid(vec(81, 1, {0, 1, 6, 0})));
  EXPECT_FALSE(is_valid(vec(81, 1, {0, 4, 0, 0})));
  EXPECT_FALSE(is_valid(vec(81, 1, {0, 0, 0, 28})));
  EXPECT_FALSE(is_valid(vec(81, 1, {2, -3, 0, 0})));
  EXPECT_TRUE(is_valid(vec(81, 2, {1, 3, 0, 0})));
  EXPECT_THROW(is_valid(vec(81, 1, {1, 0, 0})), std::invalid_argument);
  EXPECT_THROW(depth_count_for(3), std::invalid_argument);
  EXPECT_THROW(depth_count_for(28), std::invalid_argument);
  EXPECT_EQ(depth_count_for(243), 5);
}

TEST(PilotLength, Examples) {
  EXPECT_EQ(pilot_length(vec(81, 1, {0, 2, 3, 0})), 5);
  EXPECT_EQ(pilot_length(vec(81, 1, {1, 0, 0, 0})), 1);
  EXPECT_EQ(pilot_length(vec(81, 1, {0, 0, 0, 27})), 27);
  EXPECT_EQ(full_reuse(27, 4), vec(27, 4, {4, 0, 0}));
}

TEST(Transition, Examples) {
  EXPECT_EQ(to_transition(vec(81, 1, {0, 2, 3, 0})).t, (std::vector<std::int64_t>{1, 1, 0}));
  EXPECT_EQ(to_transition(vec(81, 3, {3, 0, 0, 0})).t, (std::vector<std::int64_t>{0, 0, 0}));
  EXPECT_EQ(to_transition(vec(81, 2, {0, 0, 0, 54})).t, (std::vector<std::int64_t>{2, 6, 18}));
  EXPECT_EQ(from_transition({{1, 1, 0}}, 81, 1), vec(81, 1, {0, 2, 3, 0}));
  EXPECT_EQ(from_transition({{0, 0}}, 27, 2), vec(27, 2, {2, 0, 0}));
  EXPECT_THROW(from_transition({{2, 0, 0}}, 81, 1), std::invalid_argument);
  EXPECT_THROW(from_transition({{0, 0}}, 81, 1), std::invalid_argument);
}

TEST(Format, RoundTrip) {
  EXPECT_EQ(format_vector({0, 2, 3, 0}), "0-2-3-0");
  EXPECT_EQ(parse_vector("10-0-12-0"), (std::vector<std::int64_t>{10, 0, 12, 0}));
  EXPECT_THROW(parse_vector(""), std::invalid_argument);
  EXPECT_THROW(parse_vector("1--2"), std::invalid_argument);
  EXPECT_THROW(parse_vector("1-x"), std::invalid_argument);
}

TEST(Enumeration, FilteredExamples) {
  const auto seven = collect(81, 1, 7);
  EXPECT_NE(std::find(seven.begin(), seven.end(), vec(81, 1, {0, 1, 6, 0})), seven.end());
  EXPECT_NE(std::find(seven.begin(), seven.end(), vec(81, 1, {0, 2, 2, 3})), seven.end());
  for (const auto& p : seven) EXPECT_EQ(pilot_length(p), 7);
  EXPECT_EQ(collect(81, 1, 1), (std::vector<PilotAssignment>{vec(81, 1, {1, 0, 0, 0})}));
}

TEST(Enumeration, BadFilterWarns) {
  for (std::int64_t n : {2, 0, 29, -1}) {
    auto e = enumerate_assignments(81, 1, n);
    EXPECT_FALSE(e.next().has_value()) << n;
    EXPECT_TRUE(e.warning()) << n;
  }
  auto ok = enumerate_assignments(81, 1, 27);
  ASSERT_TRUE(ok.next().has_value());
  EXPECT_FALSE(ok.warning());
  EXPECT_EQ(assignment_count(81, 1, 4), 0u);
}

struct Size {
  int cells;
  int users;
};

class BoxOracle : public ::testing::TestWithParam<Size> {};

// The enumeration must list exactly the box-constrained solutions, each
// once, in ascending lexicographic order.
TEST_P(BoxOracle, EnumerationMatches) {
  const auto [cells, users] = GetParam();
  const int m = depth_count_for(cells);
  const auto expected = oracle::box_assignments(m, users);
  const auto got = collect(cells, users);
  ASSERT_EQ(got.size(), expected.size());
  for (std::size_t n = 0; n < got.size(); ++n) ASSERT_EQ(got[n].p, expected[n]) << n;
  EXPECT_EQ(assignment_count(cells, users), expected.size());
  std::map<std::int64_t, std::uint64_t> by_length;
  for (const auto& p : expected) {
    std::int64_t n = 0;
    for (auto x : p) n += x;
    ++by_length[n];
  }
  for (auto [n, count] : by_length) {
    EXPECT_EQ(assignment_count(cells, users, n), count);
    EXPECT_EQ(collect(cells, users, n).size(), count);
  }
}

TEST_P(BoxOracle, LengthsStepByTwo) {
  const auto [cells, users] = GetParam();
  std::set<std::int64_t> seen;
  for (const auto& p : collect(cells, users)) seen.insert(pilot_length(p));
  std::vector<std::int64_t> expected;
  for (std::int64_t n = users; n <= cells * users / 3; n += 2) expected.push_back(n);
  EXPECT_EQ(std::vector<std::int64_t>(seen.begin(), seen.end()), expected);
  EXPECT_EQ(valid_pilot_lengths(cells, users), expected);
  for (std::int64_t n = 0; n <= cells * users / 3 + 2; ++n)
    EXPECT_EQ(is_valid_pilot_length(cells, users, n),
              std::binary_search(expected.begin(), expected.end(), n));
}

TEST_P(BoxOracle, TransitionBoundsAndRoundTrip) {
  const auto [cells, users] = GetParam();
  for (const auto& p : collect(cells, users)) {
    const TransitionVector t = to_transition(p);
    ASSERT_EQ(t.t.size(), p.p.size() - 1);
    std::int64_t sum = 0;
    for (std::size_t i = 0; i < t.t.size(); ++i) {
      EXPECT_GE(t.t[i], 0);
      EXPECT_LE(t.t[i], users * oracle::ipow3(static_cast<int>(i)));
      sum += t.t[i];
    }
    EXPECT_EQ(pilot_length(p), users + 2 * sum);
    EXPECT_EQ(from_transition(t, cells, users), p);
  }
}

INSTANTIATE_TEST_SUITE_P(Grid, BoxOracle,
                         ::testing::Values(Size{9, 1}, Size{9, 3}, Size{27, 1}, Size{27, 2},
                                           Size{81, 1}, Size{81, 2}, Size{243, 1}));

TEST(Enumeration, LargeCountsWithoutEnumerating) {
  EXPECT_GT(assignment_count(729, 10), 10'000'000u);
  EXPECT_EQ(assignment_count(387420489, 40), UINT64_MAX);
}

TEST(Transition, RandomRoundTrip) {
  RandomStream rng(17);
  for (int n = 0; n < 1000; ++n) {
    const int m = 2 + static_cast<int>(rng.below(5));
    const int users = 1 + static_cast<int>(rng.below(5));
    // Draw t inside the feasibility bounds, then map to p.
    std::vector<std::int64_t> t(m - 1);
    std::int64_t open = users;
    for (int i = 0; i < m - 1; ++i) {
      t[i] = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(open) + 1));
      open = 3 * t[i];
    }
    const PilotAssignment p = from_transition({t}, static_cast<int>(oracle::ipow3(m)), users);
    ASSERT_TRUE(is_valid(p));
    ASSERT_EQ(to_transition(p).t, t);
  }
}

TEST(Chi, Examples) {
  EXPECT_EQ(chi(7, 1), 1);
  EXPECT_EQ(chi(1, 1), 0);
  EXPECT_EQ(chi(3, 3), 0);
  EXPECT_THROW(chi(2, 1), std::invalid_argument);
  EXPECT_THROW(chi(1, 2), std::invalid_argument);
}

TEST(Chi, MatchesScan) {
  for (int users = 1; users <= 4; ++users)
    for (std::int64_t n = users; n <= 200; n += 2) {
      const std::int64_t s = (n - users) / 2;
      int k = 0;
      std::int64_t cum = users;
      while (!(cum > s)) cum += users * oracle::ipow3(++k);
      EXPECT_EQ(chi(n, users), k) << n;
    }
}

TEST(Realize, FullReuse) {
  const HexLattice lat = build_lattice(3, 1.0, 0.14, true);
  const PilotRealization r = realize(full_reuse(27, 3), lat);
  EXPECT_EQ(r.pilot_count, 3);
  for (int c = 0; c < 27; ++c)
    for (int k = 0; k < 3; ++k) EXPECT_EQ(r.pilot(c, k), k);
}

TEST(Realize, OneLeafPerDepthOneCoset) {
  const HexLattice lat = build_lattice(4, 1.0, 0.14, true);
  const PilotRealization r = realize(vec(81, 1, {0, 3, 0, 0}), lat);
  ASSERT_EQ(r.pilot_count, 3);
  for (int c = 0; c < 81; ++c)
    EXPECT_EQ(r.pilot(c, 0), lat.coset_of(lat.cells()[c], 1).index);
}

TEST(Realize, TreeExample) {
  const HexLattice lat = build_lattice(4, 1.0, 0.14, true);
  const PilotRealization r = realize(vec(81, 1, {0, 2, 3, 0}), lat);
  ASSERT_EQ(r.leaves.size(), 5u);
  std::map<int, int> cells_per_pilot;
  for (int c = 0; c < 81; ++c) ++cells_per_pilot[r.pilot(c, 0)];
  EXPECT_EQ(cells_per_pilot, (std::map<int, int>{{0, 27}, {1, 27}, {2, 9}, {3, 9}, {4, 9}}));
  std::set<std::int64_t> depth1;
  for (int id = 0; id < 2; ++id) {
    EXPECT_EQ(r.leaves[id].coset.depth, 1);
    depth1.insert(r.leaves[id].coset.index);
  }
  std::set<std::int64_t> parents;
  for (int id = 2; id < 5; ++id) {
    EXPECT_EQ(r.leaves[id].coset.depth, 2);
    parents.insert(r.leaves[id].coset.index / 3);
  }
  ASSERT_EQ(parents.size(), 1u);
  EXPECT_EQ(depth1.count(*parents.begin()), 0u);
}

// Any valid vector realizes as a proper colouring: each user in each cell
// gets a pilot, users in a cell are orthogonal, and a pilot's cells are
// exactly one coset of the leaf's depth.
TEST(Realize, ConsistentForEveryVector) {
  const HexLattice lat = build_lattice(3, 1.0, 0.14, true);
  for (int users : {1, 2, 3}) {
    for (const auto& p : collect(27, users)) {
      const PilotRealization r = realize(p, lat);
      ASSERT_EQ(r.pilot_count, pilot_length(p));
      std::vector<int> load(r.pilot_count, 0);
      for (int c = 0; c < 27; ++c) {
        std::set<int> mine;
        for (int k = 0; k < users; ++k) {
          const int id = r.pilot(c, k);
          ASSERT_GE(id, 0);
          ASSERT_LT(id, r.pilot_count);
          ASSERT_EQ(r.leaves[id].tree, k);
          mine.insert(id);
          ++load[id];
        }
        ASSERT_EQ(static_cast<int>(mine.size()), users);
      }
      for (std::size_t id = 0; id < load.size(); ++id)
        ASSERT_EQ(load[id], 27 / oracle::ipow3(r.leaves[id].coset.depth)) << format_vector(p.p);
    }
  }
}

TEST(Realize, RejectsMismatch) {
  const HexLattice lat = build_lattice(3, 1.0, 0.14, true);
  EXPECT_THROW(realize(full_reuse(81, 1), lat), std::invalid_argument);
  EXPECT_THROW(realize(vec(27, 1, {0, 4, 0}), lat), std::invalid_argument);
}

}  // namespace
}  // namespace pilotreuse
