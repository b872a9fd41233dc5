#pragma once

#include <cstdint>
#include <vector>

#include "coopnet/ppp.hpp"
#include "coopnet/retransmission.hpp"
#include "coopnet/scenario.hpp"

namespace coopnet {

struct EstimateWithError {
  double mean = 0.0;
  double std_error = 0.0;
  long trials = 0;
};

// Outcome of one slot. Per-relay fields are kept for both combiners so
// coupled-draw dominance checks can compare them on identical randomness.
struct SlotOutcome {
  bool direct_success = false;
  std::vector<std::uint8_t> sr_success;        // source decoded at relay k
  std::vector<std::uint8_t> rd_success;        // relay k's copy alone decodes at d
  std::vector<std::uint8_t> combined_success;  // source + relay k combined decode at d
  bool overall = false;                        // per the params' combiner

  bool overall_sc() const;
  bool overall_mrc() const;
};

// Applies the SC/MRC success-event definitions literally to one dependent
// slot: the same realization and draw feed every link.
SlotOutcome simulate_slot(const Scenario& scenario, const ChannelParams& params,
                          const PppRealization& ppp, const SlotDraw& draw);

// Independent-interference slot: each receiving node sees its own
// realization. The destination's realization is shared by the direct and the
// relay-to-destination detections within the slot.
struct IndependentSlotInputs {
  PppRealization ppp_destination;
  SlotDraw draw_destination;  // signal fadings + interferer fading/ALOHA toward d
  std::vector<PppRealization> ppp_relays;
  std::vector<std::vector<double>> h_to_relay;          // fading on relay k's realization
  std::vector<std::vector<std::uint8_t>> active_relay;  // ALOHA on relay k's realization
};

IndependentSlotInputs draw_independent_slot(const Scenario& scenario, const ChannelParams& params,
                                            Position window_center, double window_radius,
                                            RngStream& rng);

SlotOutcome simulate_slot(const Scenario& scenario, const ChannelParams& params,
                          const IndependentSlotInputs& inputs);

inline constexpr double kDefaultSimulationWindowRadius = 20.0;

struct MonteCarloOptions {
  double window_radius = kDefaultSimulationWindowRadius;
  int workers = 1;
};

// Single-slot delivery probability over (Phi, fading, ALOHA) jointly; fresh
// realization(s) every trial. Window centered at the s-d midpoint.
EstimateWithError estimate_delivery(const Scenario& scenario, const ChannelParams& params,
                                    long trials, RngStream& rng,
                                    const MonteCarloOptions& options = {});

// Joint SC/MRC estimates from the same draws (the acceptance matrix needs
// both and the slots are identical up to the combining rule).
struct DeliveryEstimatePair {
  EstimateWithError sc;
  EstimateWithError mrc;
};

DeliveryEstimatePair estimate_delivery_both_combiners(const Scenario& scenario,
                                                      const ChannelParams& params, long trials,
                                                      RngStream& rng,
                                                      const MonteCarloOptions& options = {});

// Empirical first-success attempt distribution, censored at t_max.
// Dependent model: Phi is frozen per trial, fading/ALOHA fresh per attempt.
// Independent model: everything is fresh per attempt (and per receiver).
AttemptDistribution estimate_attempts(const Scenario& scenario, const ChannelParams& params,
                                      int t_max, long trials, RngStream& rng,
                                      const MonteCarloOptions& options = {});

}  // namespace coopnet
