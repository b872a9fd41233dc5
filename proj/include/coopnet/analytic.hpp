#pragma once

#include <utility>
#include <vector>

#include "coopnet/quadrature.hpp"
#include "coopnet/scenario.hpp"
#include "coopnet/subsets.hpp"

namespace coopnet {

// Coefficient of the exact two-term decomposition of the joint MRC
// exceedance probability: eta = (1 - sum_k g_sd_eff/g_rd_k)^-1.
struct Eta {
  double value = 1.0;
  std::vector<int> relay_indices;
};

// Throws EtaSingular when the denominator is within kEtaDenominatorFloor
// of zero. The value may legitimately be negative or exceed 1.
Eta eta_for(const Scenario& scenario, const std::vector<int>& subset_relays);

// P[sum of source and relay signal powers at d exceeds beta, jointly for
// every relay in the subset]. Raw value, not clamped, so it can be composed.
double mrc_exceedance(const Scenario& scenario, const std::vector<int>& subset_relays,
                      double beta);

// Joint probability P[A] of the intersection of the success events in
// `subset`, for each combiner / interference-model pair. The empty subset
// yields 1.
double joint_prob_sc_dependent(const Scenario& scenario, const ChannelParams& params,
                               const SubsetMask& subset, const QuadratureSpec& spec);
double joint_prob_sc_independent(const Scenario& scenario, const ChannelParams& params,
                                 const SubsetMask& subset, const QuadratureSpec& spec);
double joint_prob_mrc_dependent(const Scenario& scenario, const ChannelParams& params,
                                const SubsetMask& subset, const QuadratureSpec& spec);
double joint_prob_mrc_independent(const Scenario& scenario, const ChannelParams& params,
                                  const SubsetMask& subset, const QuadratureSpec& spec);

// Dispatch on params.combiner / params.interference.
double joint_probability(const Scenario& scenario, const ChannelParams& params,
                         const SubsetMask& subset, const QuadratureSpec& spec);

struct DeliveryResult {
  double omega = 0.0;                      // clamped to [0, 1]
  double estimated_quadrature_error = 0.0;
  // Signed inclusion-exclusion contributions, aggregated over symmetric
  // subsets onto their lowest-index representative. Their sum is omega
  // (before clamping).
  std::vector<std::pair<SubsetMask, double>> per_subset_terms;
};

// Single-slot packet delivery probability: inclusion-exclusion over all
// nonempty subsets of {direct, relay-aided paths}. Requires N <= kMaxRelays.
DeliveryResult delivery_probability(const Scenario& scenario, const ChannelParams& params,
                                    const QuadratureSpec& spec);

// The five one-relay expressions (dependent interference), evaluated
// directly; regression oracle for the general-N path.
struct OneRelayProbabilities {
  double direct = 0.0;                // P[S0]
  double relay_sc = 0.0;              // P[S1 SC]
  double direct_and_relay_sc = 0.0;   // P[S0 and S1 SC]
  double relay_mrc = 0.0;             // P[S1 MRC]
  double direct_and_relay_mrc = 0.0;  // P[S0 and S1 MRC]

  double omega_sc() const { return direct + relay_sc - direct_and_relay_sc; }
  double omega_mrc() const { return direct + relay_mrc - direct_and_relay_mrc; }
};

OneRelayProbabilities one_relay_closed_forms(const Scenario& scenario,
                                             const ChannelParams& params,
                                             const QuadratureSpec& spec);

// p * Omega.
double throughput(const Scenario& scenario, const ChannelParams& params,
                  const QuadratureSpec& spec);

// Spec with refinement centers filled from the node positions (destination
// first, as the polar origin).
QuadratureSpec default_quadrature_spec(const Scenario& scenario);

// Test hook: flips the sign of every eta. Used by the acceptance runner to
// demonstrate that the MRC oracle checks catch a corrupted coefficient.
void set_eta_sign_corruption(bool enabled);

}  // namespace coopnet
