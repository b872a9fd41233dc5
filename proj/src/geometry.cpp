#include "coopnet/geometry.hpp"

namespace coopnet {

void validate(const PathLossLaw& law) {
  if (!(law.exponent > 2.0))
    throw ConfigError("path loss exponent must exceed 2, got " + std::to_string(law.exponent));
}

double path_gain(Position a, Position b, const PathLossLaw& law) {
  const double d2 = distance_sq(a, b);
  if (d2 == 0.0) throw DegenerateGeometry("path gain requested for coincident points");
  return law.gain_from_dist_sq(d2);
}

}  // namespace coopnet
