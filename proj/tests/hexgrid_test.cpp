#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <set>

#include "oracles.hpp"
#include "pilotreuse/hexgrid.hpp"

namespace pilotreuse {
namespace {

const double kSqrt3 = std::sqrt(3.0);

TEST(Lattice, CellCounts) {
  EXPECT_EQ(build_lattice(4, 500.0, 0.14, true).cell_count(), 81);
  EXPECT_EQ(build_lattice(3, 500.0, 0.14, true).cell_count(), 27);
  const HexLattice nine = build_lattice(2, 500.0, 0.14, true);
  EXPECT_EQ(nine.cell_count(), 9);
  std::map<std::int64_t, int> sizes;
  for (AxialCoord c : nine.cells()) ++sizes[nine.coset_of(c, 1).index];
  EXPECT_EQ(sizes, (std::map<std::int64_t, int>{{0, 3}, {1, 3}, {2, 3}}));
}

TEST(Lattice, RejectsBadParameters) {
  EXPECT_THROW(build_lattice(1, 1.0, 0.14, true), std::invalid_argument);
  EXPECT_THROW(build_lattice(3, 0.0, 0.14, true), std::invalid_argument);
  EXPECT_THROW(build_lattice(3, 1.0, 1.0, true), std::invalid_argument);
  EXPECT_THROW(build_lattice(3, 1.0, -0.1, true), std::invalid_argument);
  EXPECT_THROW(build_lattice_for_cells(10, 1.0, 0.14, true), std::invalid_argument);
  EXPECT_THROW(build_lattice_for_cells(3, 1.0, 0.14, true), std::invalid_argument);
  EXPECT_EQ(build_lattice_for_cells(243, 1.0, 0.14, true).depth_max(), 5);
}

TEST(Lattice, NearestNeighbourSpacing) {
  const double r = 250.0;
  const HexLattice lat = build_lattice(4, r, 0.14, true);
  double best = 1e300;
  for (AxialCoord a : lat.cells())
    for (AxialCoord b : lat.cells())
      if (!(a == b)) best = std::min(best, lat.distance(lat.center(a), lat.center(b)));
  EXPECT_NEAR(best, kSqrt3 * r, 1e-9 * r);
}

TEST(Coset, RootAndRange) {
  const HexLattice lat = build_lattice(4, 1.0, 0.14, true);
  for (AxialCoord c : lat.cells()) EXPECT_EQ(lat.coset_of(c, 0), (CosetId{0, 0}));
  EXPECT_THROW(lat.coset_of({0, 0}, 4), std::out_of_range);
  EXPECT_THROW(lat.coset_of({0, 0}, -1), std::out_of_range);
}

class CosetPartition : public ::testing::TestWithParam<int> {};

TEST_P(CosetPartition, EqualSizesAndRefinement) {
  const int m = GetParam();
  const HexLattice lat = build_lattice(m, 1.0, 0.14, true);
  for (int depth = 0; depth < m; ++depth) {
    std::map<std::int64_t, int> sizes;
    for (AxialCoord c : lat.cells()) {
      const CosetId id = lat.coset_of(c, depth);
      ASSERT_GE(id.index, 0);
      ASSERT_LT(id.index, pow3(depth));
      ++sizes[id.index];
      if (depth + 1 < m) EXPECT_EQ(lat.coset_of(c, depth + 1).index / 3, id.index);
    }
    EXPECT_EQ(static_cast<std::int64_t>(sizes.size()), pow3(depth));
    for (auto [index, size] : sizes) EXPECT_EQ(size, lat.cell_count() / pow3(depth));
  }
}

// Same-coset cells form a sublattice whose spacing grows by sqrt(3) per
// depth: min distance at depth i is sqrt(3) * sqrt(3^i) cell radii.
TEST_P(CosetPartition, SpacingGrowsBySqrt3) {
  const int m = GetParam();
  const HexLattice lat = build_lattice(m, 1.0, 0.14, true);
  const int n1 = lat.extent_u(), n2 = lat.extent_v();
  double previous = 0.0;
  for (int depth = 0; depth < m; ++depth) {
    double best = 1e300;
    for (AxialCoord a : lat.cells())
      for (AxialCoord b : lat.cosharing_cells(a, depth)) {
        const double d2 = oracle::torus_dist_sq(oracle::centre(a.u, a.v),
                                                oracle::centre(b.u, b.v), n1, n2);
        best = std::min(best, std::sqrt(d2));
      }
    // The minimum image saturates once the coset spacing reaches the torus
    // size; only check depths below that.
    if (std::pow(kSqrt3, depth + 1) < std::min(n1, n2) * kSqrt3 - 1e-9 || depth == 0) {
      EXPECT_NEAR(best, std::pow(kSqrt3, depth + 1), 1e-9) << "depth " << depth;
      if (depth > 0) EXPECT_NEAR(best / previous, kSqrt3, 1e-9);
    }
    previous = best;
  }
}

INSTANTIATE_TEST_SUITE_P(Depths, CosetPartition, ::testing::Values(2, 3, 4, 5, 6));

// The colouring is defined on raw axial coordinates; the torus must not cut
// a coset: colouring any cell outside the domain directly gives the coset of
// its image inside the domain.
TEST(Coset, ConsistentAcrossTheSeam) {
  auto chain = [](int u, int v, int depth) {
    std::int64_t index = 0;
    for (int d = 0; d < depth; ++d) {
      const int c = ((u + 2 * v) % 3 + 3) % 3;
      const int vn = (v - u + c) / 3;
      u = u - c + vn;
      v = vn;
      index = index * 3 + c;
    }
    return index;
  };
  for (int m : {2, 3, 4, 5}) {
    const HexLattice lat = build_lattice(m, 1.0, 0.14, true);
    for (int u = -2 * lat.extent_u(); u < 3 * lat.extent_u(); ++u)
      for (int v = -2 * lat.extent_v(); v < 3 * lat.extent_v(); ++v)
        ASSERT_EQ(chain(u, v, m - 1), lat.coset_of({u, v}, m - 1).index)
            << "m=" << m << " cell (" << u << "," << v << ")";
  }
}

TEST(Cosharing, InterfererCounts) {
  const HexLattice l81 = build_lattice(4, 1.0, 0.14, true);
  const HexLattice l27 = build_lattice(3, 1.0, 0.14, true);
  EXPECT_EQ(l81.cosharing_cells({0, 0}, 0).size(), 80u);
  EXPECT_EQ(l81.cosharing_cells({4, 7}, 3).size(), 2u);
  EXPECT_EQ(l27.cosharing_cells({2, 1}, 1).size(), 8u);
  for (AxialCoord c : l81.cells())
    for (int depth = 0; depth < 4; ++depth) {
      const auto others = l81.cosharing_cells(c, depth);
      EXPECT_EQ(static_cast<std::int64_t>(others.size()), 81 / pow3(depth) - 1);
      for (AxialCoord o : others) {
        EXPECT_FALSE(o == c);
        EXPECT_EQ(l81.coset_of(o, depth), l81.coset_of(c, depth));
      }
    }
}

TEST(Distance, Basics) {
  const double r = 100.0;
  const HexLattice torus = build_lattice(4, r, 0.14, true);
  const Point a = torus.center({3, 4});
  EXPECT_EQ(torus.distance(a, a), 0.0);
  EXPECT_NEAR(torus.distance(torus.center({0, 0}), torus.center({1, 0})), kSqrt3 * r, 1e-9);
  // (8, 0) on the 9 x 9 torus is the (-1, 0) neighbour of (0, 0).
  EXPECT_NEAR(torus.distance(torus.center({0, 0}), torus.center({8, 0})), kSqrt3 * r, 1e-9);
  const HexLattice patch = build_lattice(4, r, 0.14, false);
  EXPECT_NEAR(patch.distance(patch.center({0, 0}), patch.center({8, 0})), 8 * kSqrt3 * r, 1e-9);
}

TEST(Distance, MatchesBruteForceImages) {
  const HexLattice lat = build_lattice(4, 1.0, 0.14, true);
  RandomStream rng(7);
  for (int n = 0; n < 2000; ++n) {
    const AxialCoord a = lat.cells()[rng.below(81)];
    const AxialCoord b = lat.cells()[rng.below(81)];
    const Point pa = lat.sample_user_position(a, rng);
    const Point pb = lat.center(b);
    const double expect = std::sqrt(
        oracle::torus_dist_sq({pa.x, pa.y}, {pb.x, pb.y}, lat.extent_u(), lat.extent_v()));
    EXPECT_NEAR(lat.distance(pa, pb), expect, 1e-9);
  }
}

TEST(Sampling, StaysInTheAnnularHexagon) {
  const double r = 3.0;
  const HexLattice lat = build_lattice(3, r, 0.14, true);
  RandomStream rng(11);
  const Point c = lat.center({2, 1});
  for (int n = 0; n < 50'000; ++n) {
    const Point p = lat.sample_user_position({2, 1}, rng);
    const double dx = (p.x - c.x) / r, dy = (p.y - c.y) / r;
    const double d = std::hypot(dx, dy);
    ASSERT_GE(d, 0.14 - 1e-12);
    ASSERT_LE(d, 1.0 + 1e-12);
    ASSERT_LE(std::abs(dx), kSqrt3 / 2 + 1e-12);
    ASSERT_LE(std::abs(dy), 1.0 - std::abs(dx) / kSqrt3 + 1e-12);
  }
}

TEST(Sampling, UniformOverTheRegion) {
  const int n = 200'000;
  {
    const HexLattice lat = build_lattice(2, 1.0, 0.0, true);
    RandomStream rng(3);
    double sx = 0, sy = 0;
    for (int i = 0; i < n; ++i) {
      const Point p = lat.sample_offset_unit(rng);
      sx += p.x;
      sy += p.y;
    }
    // Per-coordinate standard deviation is below 0.5 on the hexagon.
    EXPECT_NEAR(sx / n, 0.0, 4 * 0.5 / std::sqrt(n));
    EXPECT_NEAR(sy / n, 0.0, 4 * 0.5 / std::sqrt(n));
  }
  const HexLattice lat = build_lattice(2, 1.0, 0.14, true);
  RandomStream rng(5);
  int right = 0, upper = 0, inner = 0;
  for (int i = 0; i < n; ++i) {
    const Point p = lat.sample_offset_unit(rng);
    right += p.x > 0;
    upper += p.y > 0;
    inner += std::hypot(p.x, p.y) < 0.5;
  }
  const double sigma = std::sqrt(0.25 / n);
  EXPECT_NEAR(right / double(n), 0.5, 3 * sigma);
  EXPECT_NEAR(upper / double(n), 0.5, 3 * sigma);
  // Fraction inside radius 0.5: annulus area over hexagon-minus-hole area.
  const double pi = std::acos(-1.0);
  const double frac = pi * (0.25 - 0.14 * 0.14) / (1.5 * kSqrt3 - pi * 0.14 * 0.14);
  EXPECT_NEAR(inner / double(n), frac, 4 * std::sqrt(frac * (1 - frac) / n));
}

TEST(ClusterSize, Values) {
  EXPECT_EQ(cluster_size(1, 1), 3);
  EXPECT_EQ(cluster_size(3, 0), 9);
  EXPECT_EQ(cluster_size(1, 0), 1);
  EXPECT_EQ(cluster_size(2, 1), 7);
  EXPECT_THROW(cluster_size(0, 0), std::invalid_argument);
  EXPECT_THROW(cluster_size(-1, 2), std::invalid_argument);
}

TEST(Pow3, ExactAndChecked) {
  EXPECT_EQ(pow3(0), 1);
  EXPECT_EQ(pow3(4), 81);
  EXPECT_EQ(log3_exact(729), 6);
  EXPECT_EQ(log3_exact(730), -1);
  EXPECT_THROW(pow3(60), std::overflow_error);
}

}  // namespace
}  // namespace pilotreuse
