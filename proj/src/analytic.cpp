#include "coopnet/analytic.hpp"

#include <atomic>
#include <cmath>
#include <map>
#include <string>
#include <tuple>

#include "coopnet/errors.hpp"
#include "coopnet/util.hpp"
#include "internal/success_products.hpp"

namespace coopnet {

namespace {

using internal::Factor;
using internal::factor_product;

std::atomic<bool> g_corrupt_eta{false};

double maybe_corrupt(double eta) { return g_corrupt_eta.load() ? -eta : eta; }

// Everything derived from (scenario, params) that the subset terms share.
struct EngineContext {
  const Scenario* scenario = nullptr;
  ChannelParams params;
  QuadratureSpec spec;
  ReducedThresholds thetas;
  std::vector<RelayGroup> groups;
  std::vector<double> theta_sr_g;
  std::vector<double> theta_rd_g;
  std::vector<double> q_g;  // g_sd_eff / g_rd per group
  double alpha = 4.0;

  // Cache of single-factor integrals, keyed by the factor parameters; only
  // the independent model hits it but the key space is shared.
  mutable std::map<std::tuple<double, double, double>, QuadratureResult> single_factor_cache;
};

EngineContext make_context(const Scenario& scenario, const ChannelParams& params,
                           const QuadratureSpec& spec) {
  validate(params);
  EngineContext ctx;
  ctx.scenario = &scenario;
  ctx.params = params;
  ctx.spec = spec.refinement_centers.empty() ? [&] {
    QuadratureSpec filled = spec;
    filled.refinement_centers = default_quadrature_spec(scenario).refinement_centers;
    return filled;
  }()
                                             : spec;
  ctx.alpha = scenario.path_loss.exponent;
  ctx.thetas = reduced_thresholds(scenario, params.theta);
  ctx.groups = group_relays(scenario);
  const LinkGains gains = link_gains(scenario);
  const double g_sd_eff = scenario.source_power_scale * gains.g_sd;
  for (const RelayGroup& g : ctx.groups) {
    const int k = g.member_indices.front();
    ctx.theta_sr_g.push_back(ctx.thetas.sr[k]);
    ctx.theta_rd_g.push_back(ctx.thetas.rd[k]);
    ctx.q_g.push_back(g_sd_eff / gains.g_rd[k]);
  }
  return ctx;
}

struct Term {
  double value = 1.0;
  double error = 0.0;
};

std::vector<Factor> sr_factors(const EngineContext& ctx, const std::vector<int>& counts) {
  std::vector<Factor> factors;
  for (std::size_t g = 0; g < counts.size(); ++g)
    if (counts[g] > 0) factors.push_back({ctx.groups[g].pos, ctx.theta_sr_g[g], counts[g]});
  return factors;
}

QuadratureResult integrate_product(const EngineContext& ctx, std::vector<Factor> factors) {
  const double p = ctx.params.aloha_p;
  const PathLossLaw law = ctx.scenario->path_loss;
  PlaneFunction f = [p, law, factors = std::move(factors)](double x, double y) {
    return p * (1.0 - factor_product(factors, law, x, y));
  };
  return integrate_plane(f, ctx.spec, ctx.alpha);
}

Term exponentiate(const EngineContext& ctx, const QuadratureResult& integral) {
  const double lambda = ctx.params.lambda;
  Term t;
  t.value = std::exp(-lambda * integral.value);
  t.error = t.value * lambda * integral.error;
  return t;
}

// Integral of the difference between two products that share their relay
// factors and differ only in the destination threshold (T2 vs T1). Evaluated
// as one quadrature so the near-cancelling eta decomposition stays accurate
// even when eta is large.
QuadratureResult integrate_destination_difference(const EngineContext& ctx,
                                                  std::vector<Factor> shared, double t1,
                                                  double t2) {
  const double p = ctx.params.aloha_p;
  const PathLossLaw law = ctx.scenario->path_loss;
  const Position dest = ctx.scenario->destination;
  PlaneFunction f = [p, law, dest, t1, t2, shared = std::move(shared)](double x, double y) {
    const double dx = x - dest.x;
    const double dy = y - dest.y;
    const double g = law.gain_from_dist_sq(dx * dx + dy * dy);
    return p * factor_product(shared, law, x, y) * internal::destination_factor_difference(t1, t2, g);
  };
  return integrate_plane(f, ctx.spec, ctx.alpha);
}

double grouped_eta(const EngineContext& ctx, const std::vector<int>& counts) {
  double sum = 0.0;
  for (std::size_t g = 0; g < counts.size(); ++g) sum += counts[g] * ctx.q_g[g];
  const double denom = 1.0 - sum;
  if (std::abs(denom) < kEtaDenominatorFloor)
    throw EtaSingular("combined-exceedance coefficient singular (subset sum " +
                      std::to_string(sum) + ")");
  return maybe_corrupt(1.0 / denom);
}

double grouped_rd_sum(const EngineContext& ctx, const std::vector<int>& counts) {
  double sum = 0.0;
  for (std::size_t g = 0; g < counts.size(); ++g) sum += counts[g] * ctx.theta_rd_g[g];
  return sum;
}

Term sc_dependent_term(const EngineContext& ctx, bool direct, const std::vector<int>& counts) {
  std::vector<Factor> factors = sr_factors(ctx, counts);
  const double t_dest = (direct ? ctx.thetas.sd : 0.0) + grouped_rd_sum(ctx, counts);
  factors.insert(factors.begin(), {ctx.scenario->destination, t_dest, 1});
  return exponentiate(ctx, integrate_product(ctx, factors));
}

Term mrc_dependent_term(const EngineContext& ctx, bool direct, const std::vector<int>& counts) {
  if (direct) {
    // Direct success implies combined success, so only the direct threshold
    // appears at the destination.
    std::vector<Factor> factors = sr_factors(ctx, counts);
    factors.insert(factors.begin(), {ctx.scenario->destination, ctx.thetas.sd, 1});
    return exponentiate(ctx, integrate_product(ctx, factors));
  }
  const double eta = grouped_eta(ctx, counts);
  const double t1 = grouped_rd_sum(ctx, counts);
  const double t2 = ctx.thetas.sd;
  const std::vector<Factor> shared = sr_factors(ctx, counts);

  std::vector<Factor> with_t2 = shared;
  with_t2.insert(with_t2.begin(), {ctx.scenario->destination, t2, 1});
  const QuadratureResult i2 = integrate_product(ctx, with_t2);
  const QuadratureResult delta = integrate_destination_difference(ctx, shared, t1, t2);

  const double lambda = ctx.params.lambda;
  const double e2 = std::exp(-lambda * i2.value);
  const double growth = std::expm1(lambda * delta.value);
  Term t;
  t.value = e2 * (1.0 + eta * growth);
  t.error = e2 * lambda * i2.error * std::abs(1.0 + eta * growth) +
            e2 * std::abs(eta) * std::exp(lambda * delta.value) * lambda * delta.error;
  return t;
}

const QuadratureResult& single_factor_integral(const EngineContext& ctx, Position node,
                                               double theta) {
  const auto key = std::make_tuple(theta, node.x, node.y);
  auto it = ctx.single_factor_cache.find(key);
  if (it == ctx.single_factor_cache.end())
    it = ctx.single_factor_cache.emplace(key, integrate_product(ctx, {{node, theta, 1}})).first;
  return it->second;
}

Term sc_independent_term(const EngineContext& ctx, bool direct, const std::vector<int>& counts) {
  // One destination-side factor plus one independent factor per relay: the
  // source-relay detections see their own interference.
  const double t_dest = (direct ? ctx.thetas.sd : 0.0) + grouped_rd_sum(ctx, counts);
  const QuadratureResult& dest = single_factor_integral(ctx, ctx.scenario->destination, t_dest);
  double exponent = dest.value;
  double exponent_error = dest.error;
  for (std::size_t g = 0; g < counts.size(); ++g) {
    if (counts[g] == 0) continue;
    const QuadratureResult& rel =
        single_factor_integral(ctx, ctx.groups[g].pos, ctx.theta_sr_g[g]);
    exponent += counts[g] * rel.value;
    exponent_error += counts[g] * rel.error;
  }
  const double lambda = ctx.params.lambda;
  Term t;
  t.value = std::exp(-lambda * exponent);
  t.error = t.value * lambda * exponent_error;
  return t;
}

Term mrc_independent_term(const EngineContext& ctx, bool direct, const std::vector<int>& counts) {
  const double lambda = ctx.params.lambda;
  double sr_exponent = 0.0;
  double sr_error = 0.0;
  for (std::size_t g = 0; g < counts.size(); ++g) {
    if (counts[g] == 0) continue;
    const QuadratureResult& rel =
        single_factor_integral(ctx, ctx.groups[g].pos, ctx.theta_sr_g[g]);
    sr_exponent += counts[g] * rel.value;
    sr_error += counts[g] * rel.error;
  }
  if (direct) {
    const QuadratureResult& dest =
        single_factor_integral(ctx, ctx.scenario->destination, ctx.thetas.sd);
    Term t;
    t.value = std::exp(-lambda * (dest.value + sr_exponent));
    t.error = t.value * lambda * (dest.error + sr_error);
    return t;
  }
  const double eta = grouped_eta(ctx, counts);
  const double t1 = grouped_rd_sum(ctx, counts);
  const double t2 = ctx.thetas.sd;
  const QuadratureResult& i2 = single_factor_integral(ctx, ctx.scenario->destination, t2);
  const QuadratureResult delta = integrate_destination_difference(ctx, {}, t1, t2);

  const double sr_product = std::exp(-lambda * sr_exponent);
  const double e2 = std::exp(-lambda * i2.value);
  const double growth = std::expm1(lambda * delta.value);
  Term t;
  t.value = sr_product * e2 * (1.0 + eta * growth);
  t.error = std::abs(t.value) * lambda * (sr_error + i2.error) +
            sr_product * e2 * std::abs(eta) * std::exp(lambda * delta.value) * lambda * delta.error;
  return t;
}

Term subset_term(const EngineContext& ctx, bool direct, const std::vector<int>& counts) {
  const bool dependent = ctx.params.interference == Interference::Dependent;
  if (ctx.params.combiner == Combiner::SC)
    return dependent ? sc_dependent_term(ctx, direct, counts)
                     : sc_independent_term(ctx, direct, counts);
  return dependent ? mrc_dependent_term(ctx, direct, counts)
                   : mrc_independent_term(ctx, direct, counts);
}

void check_mask(const Scenario& scenario, const SubsetMask& mask) {
  if (mask.relay_bits >> scenario.relay_count())
    throw ConfigError("subset references a relay index beyond the scenario");
}

double joint_for(const Scenario& scenario, const ChannelParams& params, const SubsetMask& subset,
                 const QuadratureSpec& spec, Combiner combiner, Interference interference) {
  check_mask(scenario, subset);
  if (subset.empty()) return 1.0;
  ChannelParams effective = params;
  effective.combiner = combiner;
  effective.interference = interference;
  const EngineContext ctx = make_context(scenario, effective, spec);
  const std::vector<int> counts = counts_for_mask(ctx.groups, subset);
  return subset_term(ctx, subset.includes_direct, counts).value;
}

}  // namespace

QuadratureSpec default_quadrature_spec(const Scenario& scenario) {
  QuadratureSpec spec;
  spec.refinement_centers.push_back(scenario.destination);
  spec.refinement_centers.push_back(scenario.source);
  for (const Position& r : scenario.relays) spec.refinement_centers.push_back(r);
  return spec;
}

void set_eta_sign_corruption(bool enabled) { g_corrupt_eta.store(enabled); }

Eta eta_for(const Scenario& scenario, const std::vector<int>& subset_relays) {
  const LinkGains gains = link_gains(scenario);
  const double g_sd_eff = scenario.source_power_scale * gains.g_sd;
  double sum = 0.0;
  for (int k : subset_relays) {
    if (k < 0 || k >= scenario.relay_count())
      throw ConfigError("relay index " + std::to_string(k) + " out of range");
    sum += g_sd_eff / gains.g_rd[k];
  }
  const double denom = 1.0 - sum;
  if (std::abs(denom) < kEtaDenominatorFloor)
    throw EtaSingular("eta denominator " + std::to_string(denom) + " below floor");
  return {maybe_corrupt(1.0 / denom), subset_relays};
}

double mrc_exceedance(const Scenario& scenario, const std::vector<int>& subset_relays,
                      double beta) {
  if (beta < 0.0) throw ConfigError("exceedance level must be non-negative");
  const Eta eta = eta_for(scenario, subset_relays);
  const LinkGains gains = link_gains(scenario);
  const double g_sd_eff = scenario.source_power_scale * gains.g_sd;
  double relay_product = 1.0;
  for (int k : subset_relays) relay_product *= std::exp(-beta / gains.g_rd[k]);
  return eta.value * relay_product + (1.0 - eta.value) * std::exp(-beta / g_sd_eff);
}

double joint_prob_sc_dependent(const Scenario& scenario, const ChannelParams& params,
                               const SubsetMask& subset, const QuadratureSpec& spec) {
  return joint_for(scenario, params, subset, spec, Combiner::SC, Interference::Dependent);
}

double joint_prob_sc_independent(const Scenario& scenario, const ChannelParams& params,
                                 const SubsetMask& subset, const QuadratureSpec& spec) {
  return joint_for(scenario, params, subset, spec, Combiner::SC, Interference::Independent);
}

double joint_prob_mrc_dependent(const Scenario& scenario, const ChannelParams& params,
                                const SubsetMask& subset, const QuadratureSpec& spec) {
  return joint_for(scenario, params, subset, spec, Combiner::MRC, Interference::Dependent);
}

double joint_prob_mrc_independent(const Scenario& scenario, const ChannelParams& params,
                                  const SubsetMask& subset, const QuadratureSpec& spec) {
  return joint_for(scenario, params, subset, spec, Combiner::MRC, Interference::Independent);
}

double joint_probability(const Scenario& scenario, const ChannelParams& params,
                         const SubsetMask& subset, const QuadratureSpec& spec) {
  return joint_for(scenario, params, subset, spec, params.combiner, params.interference);
}

DeliveryResult delivery_probability(const Scenario& scenario, const ChannelParams& params,
                                    const QuadratureSpec& spec) {
  validate_scenario(scenario, params.combiner);
  if (scenario.relay_count() > kMaxRelays)
    throw TooManyRelays("inclusion-exclusion over " + std::to_string(scenario.relay_count()) +
                        " relays exceeds the supported maximum of " + std::to_string(kMaxRelays));

  const EngineContext ctx = make_context(scenario, params, spec);
  const std::vector<GroupedSubset> subsets = enumerate_grouped_subsets(ctx.groups);

  CompensatedSum omega;
  double error = 0.0;
  DeliveryResult result;
  result.per_subset_terms.reserve(subsets.size());
  for (const GroupedSubset& subset : subsets) {
    const Term term = subset_term(ctx, subset.includes_direct, subset.counts);
    const double sign = subset.cardinality() % 2 == 1 ? 1.0 : -1.0;
    const double contribution = sign * subset.multiplicity * term.value;
    omega.add(contribution);
    error += subset.multiplicity * term.error;
    result.per_subset_terms.emplace_back(subset.representative(ctx.groups), contribution);
  }
  result.omega = std::min(1.0, std::max(0.0, omega.value()));
  result.estimated_quadrature_error = error;
  return result;
}

OneRelayProbabilities one_relay_closed_forms(const Scenario& scenario, const ChannelParams& params,
                                             const QuadratureSpec& spec) {
  if (scenario.relay_count() != 1)
    throw ConfigError("one-relay expressions require exactly one relay");
  validate_scenario(scenario, Combiner::MRC);

  ChannelParams dependent = params;
  dependent.interference = Interference::Dependent;
  EngineContext ctx = make_context(scenario, dependent, spec);
  const Position dest = scenario.destination;
  const Position relay = scenario.relays.front();
  const double t_sd = ctx.thetas.sd;
  const double t_sr = ctx.thetas.sr.front();
  const double t_rd = ctx.thetas.rd.front();

  OneRelayProbabilities out;
  out.direct = exponentiate(ctx, integrate_product(ctx, {{dest, t_sd, 1}})).value;
  out.relay_sc =
      exponentiate(ctx, integrate_product(ctx, {{dest, t_rd, 1}, {relay, t_sr, 1}})).value;
  out.direct_and_relay_sc =
      exponentiate(ctx, integrate_product(ctx, {{dest, t_sd + t_rd, 1}, {relay, t_sr, 1}})).value;
  out.relay_mrc = mrc_dependent_term(ctx, false, {1}).value;
  out.direct_and_relay_mrc =
      exponentiate(ctx, integrate_product(ctx, {{dest, t_sd, 1}, {relay, t_sr, 1}})).value;
  return out;
}

double throughput(const Scenario& scenario, const ChannelParams& params,
                  const QuadratureSpec& spec) {
  return params.aloha_p * delivery_probability(scenario, params, spec).omega;
}

}  // namespace coopnet
