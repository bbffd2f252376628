#include "pilotreuse/hexgrid.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace pilotreuse {
namespace {

constexpr double kSqrt3 = 1.7320508075688772;

int floor_mod(int a, int n) {
  const int r = a % n;
  return r < 0 ? r + n : r;
}

// Colour chain of a cell: the depth-1 colour is (u + 2v) mod 3; the cell is
// then re-expressed in coordinates of its colour's sublattice and coloured
// again. Digits are packed most significant first.
std::int64_t coset_chain(int u, int v, int depth) {
  std::int64_t index = 0;
  for (int d = 0; d < depth; ++d) {
    const int c = floor_mod(u + 2 * v, 3);
    const int v_next = (v - u + c) / 3;  // exact: v - u + c is a multiple of 3
    const int u_next = u - c + v_next;
    u = u_next;
    v = v_next;
    index = index * 3 + c;
  }
  return index;
}

}  // namespace

std::int64_t pow3(int e) {
  if (e < 0) throw std::invalid_argument("negative exponent");
  std::int64_t r = 1;
  for (int i = 0; i < e; ++i) {
    if (r > std::numeric_limits<std::int64_t>::max() / 3)
      throw std::overflow_error("3^" + std::to_string(e) + " overflows");
    r *= 3;
  }
  return r;
}

int log3_exact(std::int64_t cells) {
  if (cells < 1) return -1;
  int m = 0;
  while (cells % 3 == 0) {
    cells /= 3;
    ++m;
  }
  return cells == 1 ? m : -1;
}

HexLattice::HexLattice(int depth_max, double cell_radius_m, double hole_ratio,
                       bool wraparound)
    : depth_max_(depth_max),
      cell_radius_(cell_radius_m),
      hole_ratio_(hole_ratio),
      wraparound_(wraparound) {
  if (depth_max < 2)
    throw std::invalid_argument("lattice needs m >= 2 (at least 9 cells)");
  if (depth_max > 18) throw std::invalid_argument("lattice too large");
  if (!(cell_radius_m > 0.0) || !std::isfinite(cell_radius_m))
    throw std::invalid_argument("cell radius must be positive");
  if (!(hole_ratio >= 0.0 && hole_ratio < 1.0))
    throw std::invalid_argument("hole ratio must lie in [0, 1)");
  extent_u_ = static_cast<int>(pow3((depth_max + 1) / 2));
  extent_v_ = static_cast<int>(pow3(depth_max / 2));
  cells_.reserve(static_cast<std::size_t>(extent_u_) * extent_v_);
  leaf_coset_.reserve(cells_.capacity());
  for (int v = 0; v < extent_v_; ++v) {
    for (int u = 0; u < extent_u_; ++u) {
      cells_.push_back({u, v});
      leaf_coset_.push_back(coset_chain(u, v, depth_max - 1));
    }
  }
  period_u_ = {extent_u_ * kSqrt3, 0.0};
  period_v_ = {extent_v_ * kSqrt3 / 2.0, extent_v_ * 1.5};
}

bool HexLattice::contains(AxialCoord c) const {
  return c.u >= 0 && c.u < extent_u_ && c.v >= 0 && c.v < extent_v_;
}

AxialCoord HexLattice::reduce(AxialCoord c) const {
  if (contains(c)) return c;
  if (!wraparound_)
    throw std::out_of_range("cell (" + std::to_string(c.u) + "," +
                            std::to_string(c.v) + ") outside the patch");
  return {floor_mod(c.u, extent_u_), floor_mod(c.v, extent_v_)};
}

int HexLattice::index_of(AxialCoord c) const {
  const AxialCoord r = reduce(c);
  return r.v * extent_u_ + r.u;
}

Point HexLattice::center_unit(AxialCoord c) const {
  return {kSqrt3 * (c.u + 0.5 * c.v), 1.5 * c.v};
}

Point HexLattice::center(AxialCoord c) const {
  const Point p = center_unit(c);
  return {p.x * cell_radius_, p.y * cell_radius_};
}

CosetId HexLattice::coset_of(AxialCoord c, int depth) const {
  if (depth < 0 || depth > depth_max_ - 1)
    throw std::out_of_range("coset depth " + std::to_string(depth) +
                            " outside [0, m-1]");
  const std::int64_t leaf = leaf_coset_[index_of(c)];
  return {depth, leaf / pow3(depth_max_ - 1 - depth)};
}

std::vector<AxialCoord> HexLattice::cosharing_cells(AxialCoord c,
                                                    int depth) const {
  const AxialCoord self = reduce(c);
  const CosetId id = coset_of(self, depth);
  const std::int64_t scale = pow3(depth_max_ - 1 - depth);
  std::vector<AxialCoord> out;
  out.reserve(static_cast<std::size_t>(cells_.size() / pow3(depth)));
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    if (cells_[i] == self) continue;
    if (leaf_coset_[i] / scale == id.index) out.push_back(cells_[i]);
  }
  return out;
}

double HexLattice::distance_sq_unit(Point a, Point b) const {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  if (!wraparound_) return dx * dx + dy * dy;
  double best = std::numeric_limits<double>::infinity();
  for (int i = -1; i <= 1; ++i) {
    for (int j = -1; j <= 1; ++j) {
      const double x = dx + i * period_u_.x + j * period_v_.x;
      const double y = dy + i * period_u_.y + j * period_v_.y;
      best = std::min(best, x * x + y * y);
    }
  }
  return best;
}

double HexLattice::distance(Point a, Point b) const {
  const Point ua{a.x / cell_radius_, a.y / cell_radius_};
  const Point ub{b.x / cell_radius_, b.y / cell_radius_};
  return std::sqrt(distance_sq_unit(ua, ub)) * cell_radius_;
}

Point HexLattice::sample_offset_unit(RandomStream& rng) const {
  const double half_width = kSqrt3 / 2.0;
  const double hole_sq = hole_ratio_ * hole_ratio_;
  for (;;) {
    const double x = rng.uniform(-half_width, half_width);
    const double y = rng.uniform(-1.0, 1.0);
    if (std::abs(y) > 1.0 - std::abs(x) / kSqrt3) continue;
    if (x * x + y * y < hole_sq) continue;
    return {x, y};
  }
}

Point HexLattice::sample_user_position(AxialCoord c, RandomStream& rng) const {
  const Point centre = center_unit(reduce(c));
  const Point off = sample_offset_unit(rng);
  return {(centre.x + off.x) * cell_radius_, (centre.y + off.y) * cell_radius_};
}

HexLattice build_lattice(int m, double cell_radius_m, double hole_ratio,
                         bool wraparound) {
  return HexLattice(m, cell_radius_m, hole_ratio, wraparound);
}

HexLattice build_lattice_for_cells(int cells, double cell_radius_m,
                                   double hole_ratio, bool wraparound) {
  const int m = log3_exact(cells);
  if (m < 0)
    throw std::invalid_argument("cell count " + std::to_string(cells) +
                                " is not a power of 3");
  return HexLattice(m, cell_radius_m, hole_ratio, wraparound);
}

int cluster_size(int i, int j) {
  if (i < 0 || j < 0 || (i == 0 && j == 0))
    throw std::invalid_argument("cluster shifts must be non-negative, not both zero");
  return i * i + i * j + j * j;
}

}  // namespace pilotreuse
