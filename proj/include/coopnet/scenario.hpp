#pragma once

#include <string_view>
#include <vector>

#include "coopnet/geometry.hpp"

namespace coopnet {

enum class Interference { Dependent, Independent };
enum class Combiner { SC, MRC };

struct ChannelParams {
  double theta = 1.0;    // SIR decoding threshold
  double lambda = 1.0;   // interferer density (nodes per unit area)
  double aloha_p = 1.0;  // per-slot transmit probability of each interferer
  Interference interference = Interference::Dependent;
  Combiner combiner = Combiner::SC;
};

void validate(const ChannelParams& params);

// The paper's two reference parameter sets, plus the mixed set used in the
// fixed-cluster sweeps.
ChannelParams good_preset();        // theta 0.1, lambda 0.5, p 1
ChannelParams harsh_preset();       // theta 1, lambda 1, p 1
ChannelParams scenario_b_preset();  // theta 1, lambda 0.75, p 0.5
ChannelParams preset_by_name(std::string_view name);

// Geometry of one experiment point. Distances are expressed in units of the
// source-destination separation; the default layout puts s at the origin and
// d at (1, 0). Interferers always transmit at unit power; the source's power
// multiplier is folded into the reduced thresholds of its outgoing links.
struct Scenario {
  Position source{0.0, 0.0};
  Position destination{1.0, 0.0};
  std::vector<Position> relays;
  double source_power_scale = 1.0;
  PathLossLaw path_loss{4.0};

  int relay_count() const { return static_cast<int>(relays.size()); }
};

struct LinkGains {
  double g_sd = 0.0;          // raw path gain, excludes the power multiplier
  std::vector<double> g_sr;   // source -> relay k
  std::vector<double> g_rd;   // relay k -> destination
};

LinkGains link_gains(const Scenario& scenario);

// theta over (power * gain) for every signal link.
struct ReducedThresholds {
  double sd = 0.0;
  std::vector<double> sr;
  std::vector<double> rd;
};

ReducedThresholds reduced_thresholds(const Scenario& scenario, double theta);

// Subset sums of g_sd_eff/g_rd closer to 1 than this are treated as
// singular combined-exceedance geometries.
inline constexpr double kEtaDenominatorFloor = 1e-9;

// Largest relay count the subset-enumerating engines accept.
inline constexpr int kMaxRelays = 12;

// Rejects relays sitting on an endpoint and non-finite coordinates; for MRC
// additionally rejects geometries where any nonempty relay subset makes the
// combined-exceedance coefficient singular.
void validate_scenario(const Scenario& scenario, Combiner combiner);

// Displaces offending relays radially by epsilon (away from the node they
// collide with, or away from the destination for singular subsets) until
// validation passes. Opt-in; validation never perturbs silently.
Scenario nudge_scenario(Scenario scenario, Combiner combiner, double epsilon = 1e-6);

}  // namespace coopnet
