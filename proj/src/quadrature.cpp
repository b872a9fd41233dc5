#include "coopnet/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>
#include <string>
#include <vector>

#include "coopnet/errors.hpp"
#include "coopnet/util.hpp"

namespace coopnet {

void validate(const QuadratureSpec& spec) {
  if (!(spec.relative_tolerance > 0.0) || !(spec.absolute_tolerance > 0.0))
    throw ConfigError("quadrature tolerances must be positive");
  if (spec.max_subdivisions < 1) throw ConfigError("max_subdivisions must be at least 1");
}

namespace {

// Gauss-Kronrod 7-15 pair, positive half (QUADPACK values).
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Rule {
  double node[15];
  double kronrod[15];
  double gauss[15];  // zero at pure-Kronrod nodes
};

const Rule& rule15() {
  static const Rule r = [] {
    Rule out{};
    for (int i = 0; i < 7; ++i) {
      out.node[i] = -kXgk[i];
      out.node[14 - i] = kXgk[i];
      out.kronrod[i] = out.kronrod[14 - i] = kWgk[i];
      out.gauss[i] = out.gauss[14 - i] = (i % 2 == 1) ? kWg[i / 2] : 0.0;
    }
    out.node[7] = 0.0;
    out.kronrod[7] = kWgk[7];
    out.gauss[7] = kWg[3];
    return out;
  }();
  return r;
}

// Transformed integrand over (t, phi) in [t_lo, 1) x [0, 2pi): polar around
// `origin` with radius r = scale * (t/(1-t))^kappa.
struct PolarMap {
  Position origin;
  double scale = 1.0;
  double kappa = 1.0;

  double radius(double t) const {
    const double u = t / (1.0 - t);
    return kappa == 1.0 ? scale * u : scale * std::pow(u, kappa);
  }

  // r(t) * dr/dt, the full radial Jacobian factor.
  double radial_jacobian(double t) const {
    const double om = 1.0 - t;
    if (t <= 0.0 || om <= 0.0) return 0.0;
    const double u = t / om;
    if (kappa == 1.0) {
      const double r = scale * u;
      return r * scale / (om * om);
    }
    const double r = scale * std::pow(u, kappa);
    const double dr = scale * kappa * std::pow(u, kappa - 1.0) / (om * om);
    return r * dr;
  }

  double t_of_radius(double r) const {
    if (r <= 0.0) return 0.0;
    const double u = kappa == 1.0 ? r / scale : std::pow(r / scale, 1.0 / kappa);
    return u / (1.0 + u);
  }
};

struct Cell {
  double t0, t1, p0, p1;
  double value = 0.0;
  double error = 0.0;
  double err_t = 0.0;  // directional rule differences, used to pick the split axis
  double err_p = 0.0;
};

struct HeapEntry {
  double error;
  std::size_t index;
  bool operator<(const HeapEntry& other) const {
    if (error != other.error) return error < other.error;
    return index < other.index;
  }
};

template <class F>
void evaluate_cell(const F& f, const PolarMap& map, Cell& cell, long& evaluations) {
  const Rule& rule = rule15();
  const double ct = 0.5 * (cell.t0 + cell.t1), ht = 0.5 * (cell.t1 - cell.t0);
  const double cp = 0.5 * (cell.p0 + cell.p1), hp = 0.5 * (cell.p1 - cell.p0);

  double jac[15], rad[15], cosp[15], sinp[15];
  for (int i = 0; i < 15; ++i) {
    const double t = ct + ht * rule.node[i];
    jac[i] = map.radial_jacobian(t);
    rad[i] = map.radius(t);
    const double phi = cp + hp * rule.node[i];
    cosp[i] = std::cos(phi);
    sinp[i] = std::sin(phi);
  }

  // Row sums over phi with both weight sets, then contract over t.
  double kk = 0.0, kg = 0.0, gk = 0.0;
  for (int i = 0; i < 15; ++i) {
    if (jac[i] == 0.0) continue;
    double row_k = 0.0, row_g = 0.0;
    for (int j = 0; j < 15; ++j) {
      const double v = f(map.origin.x + rad[i] * cosp[j], map.origin.y + rad[i] * sinp[j]);
      row_k += rule.kronrod[j] * v;
      row_g += rule.gauss[j] * v;
    }
    row_k *= jac[i];
    row_g *= jac[i];
    kk += rule.kronrod[i] * row_k;
    kg += rule.kronrod[i] * row_g;
    gk += rule.gauss[i] * row_k;
  }
  evaluations += 15 * 15;

  const double area = ht * hp;
  cell.value = kk * area;
  cell.err_t = std::abs(kk - gk) * area;
  cell.err_p = std::abs(kk - kg) * area;
  cell.error = cell.err_t + cell.err_p;
}

std::vector<double> radial_cuts(const PolarMap& map, const QuadratureSpec& spec, double t_lo) {
  std::vector<double> cuts{t_lo};
  for (std::size_t i = 1; i < spec.refinement_centers.size(); ++i) {
    const double r = distance(map.origin, spec.refinement_centers[i]);
    const double t = map.t_of_radius(r);
    if (t > t_lo + 1e-9 && t < 1.0 - 1e-9) cuts.push_back(t);
  }
  const double mid = map.t_of_radius(map.scale);
  if (mid > t_lo + 1e-9) cuts.push_back(mid);
  cuts.push_back(1.0);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end(),
                         [](double a, double b) { return std::abs(a - b) < 1e-12; }),
             cuts.end());
  return cuts;
}

std::vector<double> angular_cuts(const PolarMap& map, const QuadratureSpec& spec) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  std::vector<double> cuts{0.0, 0.25 * two_pi, 0.5 * two_pi, 0.75 * two_pi};
  for (std::size_t i = 1; i < spec.refinement_centers.size(); ++i) {
    const Position c = spec.refinement_centers[i];
    if (distance(map.origin, c) < 1e-12) continue;
    double phi = std::atan2(c.y - map.origin.y, c.x - map.origin.x);
    if (phi < 0.0) phi += two_pi;
    cuts.push_back(phi);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end(),
                         [](double a, double b) { return std::abs(a - b) < 1e-12; }),
             cuts.end());
  if (two_pi - cuts.back() < 1e-12) cuts.pop_back();
  cuts.push_back(two_pi);
  return cuts;
}

QuadratureResult integrate_polar(const PlaneFunction& f, const QuadratureSpec& spec,
                                 double decay_exponent, Position origin, double min_radius) {
  validate(spec);
  if (!(decay_exponent > 2.0)) throw ConfigError("quadrature decay exponent must exceed 2");

  PolarMap map;
  map.origin = origin;
  map.kappa = std::max(1.0, 2.0 / (decay_exponent - 2.0));
  map.scale = std::max(1.0, min_radius);
  for (std::size_t i = 1; i < spec.refinement_centers.size(); ++i)
    map.scale = std::max(map.scale, 1.0 + distance(origin, spec.refinement_centers[i]));
  const double t_lo = min_radius > 0.0 ? map.t_of_radius(min_radius) : 0.0;

  const std::vector<double> tcuts = radial_cuts(map, spec, t_lo);
  const std::vector<double> pcuts = angular_cuts(map, spec);

  std::vector<Cell> cells;
  std::priority_queue<HeapEntry> heap;
  CompensatedSum total_value, total_error;
  long evaluations = 0;

  auto add_cell = [&](Cell cell) {
    evaluate_cell(f, map, cell, evaluations);
    total_value.add(cell.value);
    total_error.add(cell.error);
    heap.push({cell.error, cells.size()});
    cells.push_back(cell);
  };

  for (std::size_t i = 0; i + 1 < tcuts.size(); ++i)
    for (std::size_t j = 0; j + 1 < pcuts.size(); ++j)
      add_cell({tcuts[i], tcuts[i + 1], pcuts[j], pcuts[j + 1]});

  int splits = 0;
  for (;;) {
    const double tol =
        std::max(spec.absolute_tolerance, spec.relative_tolerance * std::abs(total_value.value()));
    if (total_error.value() <= tol || heap.empty()) break;
    if (splits >= spec.max_subdivisions)
      throw NonConvergence("plane integral did not converge after " + std::to_string(splits) +
                           " subdivisions (error " + std::to_string(total_error.value()) + ")");
    const HeapEntry top = heap.top();
    heap.pop();
    const Cell parent = cells[top.index];
    total_value.add(-parent.value);
    total_error.add(-parent.error);

    Cell a = parent, b = parent;
    if (parent.err_t >= parent.err_p) {
      const double mid = 0.5 * (parent.t0 + parent.t1);
      a.t1 = mid;
      b.t0 = mid;
    } else {
      const double mid = 0.5 * (parent.p0 + parent.p1);
      a.p1 = mid;
      b.p0 = mid;
    }
    add_cell(a);
    add_cell(b);
    ++splits;
  }

  return {total_value.value(), total_error.value(), evaluations};
}

}  // namespace

QuadratureResult integrate_plane(const PlaneFunction& f, const QuadratureSpec& spec,
                                 double decay_exponent) {
  const Position origin =
      spec.refinement_centers.empty() ? Position{0.0, 0.0} : spec.refinement_centers.front();
  return integrate_polar(f, spec, decay_exponent, origin, 0.0);
}

QuadratureResult integrate_outside_disk(const PlaneFunction& f, Position center, double min_radius,
                                        const QuadratureSpec& spec, double decay_exponent) {
  if (!(min_radius > 0.0)) throw ConfigError("annulus inner radius must be positive");
  // Re-anchor the polar origin onto the window center for the tail region.
  QuadratureSpec tail_spec = spec;
  tail_spec.refinement_centers.clear();
  tail_spec.refinement_centers.push_back(center);
  return integrate_polar(f, tail_spec, decay_exponent, center, min_radius);
}

}  // namespace coopnet
