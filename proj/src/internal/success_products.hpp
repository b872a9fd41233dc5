#pragma once

#include <cmath>
#include <vector>

#include "coopnet/geometry.hpp"

namespace coopnet::internal {

// One multiplicative attenuation term (1 + theta * gain(x, node))^-power of a
// per-interferer success product. A subset's product has one destination
// factor and one factor per participating relay group.
struct Factor {
  Position node;
  double theta = 0.0;
  int power = 1;
};

inline double factor_product(const std::vector<Factor>& factors, const PathLossLaw& law, double x,
                             double y) {
  double prod = 1.0;
  for (const Factor& f : factors) {
    const double dx = x - f.node.x;
    const double dy = y - f.node.y;
    const double g = law.gain_from_dist_sq(dx * dx + dy * dy);
    const double base = 1.0 / (1.0 + f.theta * g);  // 0 at a node point, smooth elsewhere
    double acc = base;
    for (int i = 1; i < f.power; ++i) acc *= base;
    prod *= acc;
  }
  return prod;
}

// 1/(1+t1*g) - 1/(1+t2*g) without cancellation; finite at g = inf.
inline double destination_factor_difference(double t1, double t2, double g) {
  if (std::isinf(g)) return 0.0;
  return (t2 - t1) * g / ((1.0 + t1 * g) * (1.0 + t2 * g));
}

}  // namespace coopnet::internal
