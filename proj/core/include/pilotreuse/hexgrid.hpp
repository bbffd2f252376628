#pragma once

#include <compare>
#include <cstdint>
#include <vector>

#include "pilotreuse/random.hpp"

namespace pilotreuse {

// Axial coordinates of a cell. The centre of (u, v) sits at
// u * (sqrt(3) r, 0) + v * (sqrt(3) r / 2, 3 r / 2).
struct AxialCoord {
  int u = 0;
  int v = 0;
  friend auto operator<=>(const AxialCoord&, const AxialCoord&) = default;
};

struct Point {
  double x = 0.0;
  double y = 0.0;
};

// Coset of the recursive 3-way partition. `index` is in [0, 3^depth) and the
// parent of a depth-(d+1) coset q is q / 3 at depth d.
struct CosetId {
  int depth = 0;
  std::int64_t index = 0;
  friend bool operator==(const CosetId&, const CosetId&) = default;
};

// L = 3^m pointy-top hexagonal cells on a rhombic patch of
// 3^ceil(m/2) x 3^floor(m/2) cells, optionally wrapped into a torus.
//
// Public geometry is in meters. The *_unit members work in units of the cell
// radius and are what the channel models use, so that their results do not
// depend on the radius at all (not even in the last bit).
class HexLattice {
 public:
  HexLattice(int depth_max, double cell_radius_m, double hole_ratio,
             bool wraparound);

  int depth_max() const { return depth_max_; }
  int cell_count() const { return static_cast<int>(cells_.size()); }
  int extent_u() const { return extent_u_; }
  int extent_v() const { return extent_v_; }
  double cell_radius() const { return cell_radius_; }
  double hole_ratio() const { return hole_ratio_; }
  bool wraparound() const { return wraparound_; }

  // Cells of the fundamental domain, u fastest.
  const std::vector<AxialCoord>& cells() const { return cells_; }
  bool contains(AxialCoord c) const;
  // Maps any cell onto the fundamental domain. Without wraparound the cell
  // must already be inside it.
  AxialCoord reduce(AxialCoord c) const;
  int index_of(AxialCoord c) const;

  Point center(AxialCoord c) const;
  CosetId coset_of(AxialCoord c, int depth) const;
  // Every other cell in the same depth-`depth` coset, in domain order.
  std::vector<AxialCoord> cosharing_cells(AxialCoord c, int depth) const;
  // Euclidean distance; minimum image over the 9 domain translates when
  // wrapped.
  double distance(Point a, Point b) const;
  // Uniform over the cell's hexagon minus the hole around the BS.
  Point sample_user_position(AxialCoord c, RandomStream& rng) const;

  Point center_unit(AxialCoord c) const;
  double distance_sq_unit(Point a, Point b) const;
  // Offset from the BS of a uniformly placed user, in cell radii.
  Point sample_offset_unit(RandomStream& rng) const;

 private:
  int depth_max_;
  int extent_u_;
  int extent_v_;
  double cell_radius_;
  double hole_ratio_;
  bool wraparound_;
  std::vector<AxialCoord> cells_;
  // Deepest coset index (depth m-1) per cell; shallower ones are prefixes.
  std::vector<std::int64_t> leaf_coset_;
  Point period_u_;
  Point period_v_;
};

HexLattice build_lattice(int m, double cell_radius_m, double hole_ratio,
                         bool wraparound);
// Same, from the cell count; L must be a power of three.
HexLattice build_lattice_for_cells(int cells, double cell_radius_m,
                                   double hole_ratio, bool wraparound);

// Cells in a hexagonal reuse cluster with shift parameters (i, j).
int cluster_size(int i, int j);

// Exact integer power of three; throws on overflow.
std::int64_t pow3(int e);
// m with 3^m == cells, or -1 if cells is not a power of three.
int log3_exact(std::int64_t cells);

}  // namespace pilotreuse
