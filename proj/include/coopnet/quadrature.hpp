#pragma once

#include <functional>
#include <vector>

#include "coopnet/geometry.hpp"

namespace coopnet {

// Controls the adaptive plane integrator. The integrands here are bounded,
// continuous, and decay like ||x||^(-alpha), so subdivision around the node
// positions plus a compactified radial axis is all that is needed.
struct QuadratureSpec {
  double relative_tolerance = 1e-8;
  double absolute_tolerance = 1e-12;
  int max_subdivisions = 20000;
  // First entry is the polar origin (the destination, by convention);
  // remaining entries seed radial/angular cuts.
  std::vector<Position> refinement_centers;
};

void validate(const QuadratureSpec& spec);

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  long evaluations = 0;
};

using PlaneFunction = std::function<double(double, double)>;

// Integral of f over the whole plane, in polar coordinates around the
// primary refinement center with the radius mapped onto [0, 1).
// decay_exponent is the path-loss exponent; it shapes the radial map so the
// transformed integrand vanishes at the far endpoint.
// Throws NonConvergence when max_subdivisions is exhausted.
QuadratureResult integrate_plane(const PlaneFunction& f, const QuadratureSpec& spec,
                                 double decay_exponent = 4.0);

// Same machinery restricted to ||x - center|| > min_radius; used for the
// window tail corrections.
QuadratureResult integrate_outside_disk(const PlaneFunction& f, Position center,
                                        double min_radius, const QuadratureSpec& spec,
                                        double decay_exponent = 4.0);

}  // namespace coopnet
