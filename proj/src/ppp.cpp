#include "coopnet/ppp.hpp"

#include <numbers>

#include "coopnet/errors.hpp"

namespace coopnet {

void sample_ppp_into(double lambda, Position center, double radius, RngStream& rng,
                     PppRealization& out) {
  if (!(lambda >= 0.0)) throw ConfigError("ppp intensity must be non-negative");
  if (!(radius > 0.0)) throw ConfigError("ppp window radius must be positive");

  out.center = center;
  out.window_radius = radius;
  out.points.clear();
  const double mean = lambda * std::numbers::pi * radius * radius;
  const long count = rng.poisson(mean);
  out.points.reserve(count);
  for (long i = 0; i < count; ++i) {
    // Rejection from the bounding square: cheaper than polar (no sincos) and
    // exactly uniform.
    double ux, uy;
    do {
      ux = 2.0 * rng.uniform01() - 1.0;
      uy = 2.0 * rng.uniform01() - 1.0;
    } while (ux * ux + uy * uy > 1.0);
    out.points.push_back({center.x + radius * ux, center.y + radius * uy});
  }
}

PppRealization sample_ppp(double lambda, Position center, double radius, RngStream& rng) {
  PppRealization out;
  sample_ppp_into(lambda, center, radius, rng, out);
  return out;
}

void draw_slot_into(const Scenario& scenario, const PppRealization& ppp,
                    const ChannelParams& params, RngStream& rng, SlotDraw& draw) {
  const int n_relays = scenario.relay_count();
  const std::size_t n_interferers = ppp.points.size();

  draw.h_sd = rng.exponential();
  draw.h_sr.resize(n_relays);
  draw.h_rd.resize(n_relays);
  for (int k = 0; k < n_relays; ++k) {
    draw.h_sr[k] = rng.exponential();
    draw.h_rd[k] = rng.exponential();
  }

  draw.h_to_destination.resize(n_interferers);
  draw.h_to_relay.resize(n_interferers * n_relays);
  draw.active.resize(n_interferers);
  const double p = params.aloha_p;
  for (std::size_t u = 0; u < n_interferers; ++u) {
    draw.h_to_destination[u] = rng.exponential();
    for (int k = 0; k < n_relays; ++k) draw.h_to_relay[u * n_relays + k] = rng.exponential();
    draw.active[u] = p >= 1.0 ? 1 : (p <= 0.0 ? 0 : static_cast<std::uint8_t>(rng.bernoulli(p)));
  }
}

SlotDraw draw_slot(const Scenario& scenario, const PppRealization& ppp,
                   const ChannelParams& params, RngStream& rng) {
  SlotDraw draw;
  draw_slot_into(scenario, ppp, params, rng, draw);
  return draw;
}

}  // namespace coopnet
