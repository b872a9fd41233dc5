#pragma once

#include <cmath>

#include "coopnet/errors.hpp"

namespace coopnet {

// Planar coordinates in units of the source-destination separation.
struct Position {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Position&, const Position&) = default;
};

inline double distance_sq(Position a, Position b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

inline double distance(Position a, Position b) { return std::sqrt(distance_sq(a, b)); }

// Power-law path loss ||a-b||^(-alpha). The exponent must exceed 2 or the
// interference integrals diverge.
struct PathLossLaw {
  double exponent = 4.0;

  // d2 is the squared distance; alpha = 4 avoids pow() in the simulators.
  double gain_from_dist_sq(double d2) const {
    if (exponent == 4.0) return 1.0 / (d2 * d2);
    return std::pow(d2, -0.5 * exponent);
  }

  double gain(double dist) const { return gain_from_dist_sq(dist * dist); }
};

void validate(const PathLossLaw& law);

// ||a-b||^(-alpha); throws DegenerateGeometry for coincident points.
double path_gain(Position a, Position b, const PathLossLaw& law);

// theta / (power * gain): the exponential exceedance rate of a fading link
// against interference. Doubling the transmit power halves it.
inline double reduced_threshold(double theta, double power_scale, double gain) {
  return theta / (power_scale * gain);
}

}  // namespace coopnet
