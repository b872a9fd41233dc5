#include "coopnet/scenario.hpp"

#include <cmath>
#include <string>

#include "coopnet/errors.hpp"

namespace coopnet {

void validate(const ChannelParams& params) {
  if (!(params.theta > 0.0)) throw ConfigError("theta must be positive");
  if (!(params.lambda >= 0.0)) throw ConfigError("lambda must be non-negative");
  if (!(params.aloha_p >= 0.0 && params.aloha_p <= 1.0))
    throw ConfigError("aloha probability must lie in [0, 1]");
  if (!std::isfinite(params.theta) || !std::isfinite(params.lambda))
    throw ConfigError("channel parameters must be finite");
}

ChannelParams good_preset() {
  ChannelParams p;
  p.theta = 0.1;
  p.lambda = 0.5;
  p.aloha_p = 1.0;
  return p;
}

ChannelParams harsh_preset() {
  ChannelParams p;
  p.theta = 1.0;
  p.lambda = 1.0;
  p.aloha_p = 1.0;
  return p;
}

ChannelParams scenario_b_preset() {
  ChannelParams p;
  p.theta = 1.0;
  p.lambda = 0.75;
  p.aloha_p = 0.5;
  return p;
}

ChannelParams preset_by_name(std::string_view name) {
  if (name == "good") return good_preset();
  if (name == "harsh") return harsh_preset();
  if (name == "b" || name == "scenario_b") return scenario_b_preset();
  throw ConfigError("unknown preset '" + std::string(name) + "' (expected good, harsh or b)");
}

LinkGains link_gains(const Scenario& scenario) {
  LinkGains g;
  g.g_sd = path_gain(scenario.source, scenario.destination, scenario.path_loss);
  g.g_sr.reserve(scenario.relays.size());
  g.g_rd.reserve(scenario.relays.size());
  for (const Position& r : scenario.relays) {
    g.g_sr.push_back(path_gain(scenario.source, r, scenario.path_loss));
    g.g_rd.push_back(path_gain(r, scenario.destination, scenario.path_loss));
  }
  return g;
}

ReducedThresholds reduced_thresholds(const Scenario& scenario, double theta) {
  const LinkGains g = link_gains(scenario);
  ReducedThresholds t;
  t.sd = reduced_threshold(theta, scenario.source_power_scale, g.g_sd);
  t.sr.reserve(g.g_sr.size());
  t.rd.reserve(g.g_rd.size());
  for (double gain : g.g_sr)
    t.sr.push_back(reduced_threshold(theta, scenario.source_power_scale, gain));
  for (double gain : g.g_rd) t.rd.push_back(reduced_threshold(theta, 1.0, gain));
  return t;
}

namespace {

bool finite(Position p) { return std::isfinite(p.x) && std::isfinite(p.y); }

// Checks whether any nonempty subset sum of q lands within the floor of 1.
// 2^N enumeration, guarded by kMaxRelays.
bool has_singular_subset(const std::vector<double>& q, int* offending_relay) {
  const int n = static_cast<int>(q.size());
  for (std::uint32_t bits = 1; bits < (1u << n); ++bits) {
    double sum = 0.0;
    for (int k = 0; k < n; ++k)
      if ((bits >> k) & 1u) sum += q[k];
    if (std::abs(1.0 - sum) < kEtaDenominatorFloor) {
      if (offending_relay) {
        *offending_relay = 31 - __builtin_clz(bits);  // highest member
      }
      return true;
    }
  }
  return false;
}

}  // namespace

void validate_scenario(const Scenario& scenario, Combiner combiner) {
  validate(scenario.path_loss);
  if (!(scenario.source_power_scale > 0.0) || !std::isfinite(scenario.source_power_scale))
    throw ConfigError("source power scale must be positive and finite");
  if (!finite(scenario.source) || !finite(scenario.destination))
    throw DegenerateGeometry("source/destination coordinates must be finite");
  if (scenario.source == scenario.destination)
    throw DegenerateGeometry("source and destination coincide");
  for (std::size_t k = 0; k < scenario.relays.size(); ++k) {
    const Position r = scenario.relays[k];
    if (!finite(r))
      throw DegenerateGeometry("relay " + std::to_string(k) + " has non-finite coordinates");
    if (r == scenario.source)
      throw DegenerateGeometry("relay " + std::to_string(k) + " coincides with the source");
    if (r == scenario.destination)
      throw DegenerateGeometry("relay " + std::to_string(k) + " coincides with the destination");
  }

  if (combiner == Combiner::MRC && !scenario.relays.empty()) {
    if (scenario.relay_count() > kMaxRelays)
      throw TooManyRelays("MRC validation enumerates relay subsets; at most " +
                          std::to_string(kMaxRelays) + " relays are supported");
    const LinkGains g = link_gains(scenario);
    const double g_sd_eff = scenario.source_power_scale * g.g_sd;
    std::vector<double> q(g.g_rd.size());
    for (std::size_t k = 0; k < q.size(); ++k) q[k] = g_sd_eff / g.g_rd[k];
    int offending = -1;
    if (has_singular_subset(q, &offending))
      throw EtaSingular("a relay subset (highest member " + std::to_string(offending) +
                        ") makes the combined-exceedance coefficient singular");
  }
}

namespace {

// Moves `relay` a step `eps` away from `from` (or along +x if coincident).
Position displace_away(Position relay, Position from, double eps) {
  const double d = distance(relay, from);
  if (d == 0.0) return {relay.x + eps, relay.y};
  return {relay.x + eps * (relay.x - from.x) / d, relay.y + eps * (relay.y - from.y) / d};
}

}  // namespace

Scenario nudge_scenario(Scenario scenario, Combiner combiner, double epsilon) {
  if (!(epsilon > 0.0)) throw ConfigError("nudge epsilon must be positive");
  for (int attempt = 0; attempt < 64; ++attempt) {
    try {
      validate_scenario(scenario, combiner);
      return scenario;
    } catch (const DegenerateGeometry&) {
      for (Position& r : scenario.relays) {
        if (r == scenario.source) r = displace_away(r, scenario.source, epsilon);
        if (r == scenario.destination) r = displace_away(r, scenario.destination, epsilon);
      }
    } catch (const EtaSingular&) {
      // Push every relay slightly away from the destination; the subset sums
      // are strictly decreasing in the relay-destination distances.
      for (Position& r : scenario.relays) r = displace_away(r, scenario.destination, epsilon);
    }
  }
  throw EtaSingular("nudging failed to produce a valid geometry");
}

}  // namespace coopnet
