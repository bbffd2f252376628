#pragma once

#include <cmath>
#include <vector>

#include "pilotreuse/hexgrid.hpp"
#include "pilotreuse/random.hpp"

namespace pilotreuse::detail {

// Geometry of one SIR draw, resolved once: the tagged BS and the centres of
// the cells that reuse the tagged user's pilot.
class SirSampler {
 public:
  SirSampler(const HexLattice& lattice, AxialCoord tagged, int depth, double gamma)
      : lattice_(&lattice), bs_(lattice.center_unit(lattice.reduce(tagged))), gamma_(gamma) {
    for (AxialCoord c : lattice.cosharing_cells(tagged, depth))
      interferers_.push_back(lattice.center_unit(c));
  }

  // Squared fading coefficients use d^2 directly: beta^2 = (d^2)^-gamma.
  double draw(RandomStream& rng) const {
    const Point own = lattice_->sample_offset_unit(rng);
    const double signal = std::pow(own.x * own.x + own.y * own.y, -gamma_);
    double interference = 0.0;
    for (const Point& c : interferers_) {
      const Point off = lattice_->sample_offset_unit(rng);
      const double d2 = lattice_->distance_sq_unit(bs_, {c.x + off.x, c.y + off.y});
      interference += std::pow(d2, -gamma_);
    }
    return signal / interference;
  }

  std::size_t interferer_count() const { return interferers_.size(); }

 private:
  const HexLattice* lattice_;
  Point bs_;
  double gamma_;
  std::vector<Point> interferers_;
};

}  // namespace pilotreuse::detail
