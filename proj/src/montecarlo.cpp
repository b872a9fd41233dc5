#include "coopnet/montecarlo.hpp"

#include <algorithm>
#include <cmath>

#include "coopnet/errors.hpp"
#include "coopnet/util.hpp"

namespace coopnet {

bool SlotOutcome::overall_sc() const {
  if (direct_success) return true;
  for (std::size_t k = 0; k < sr_success.size(); ++k)
    if (sr_success[k] && rd_success[k]) return true;
  return false;
}

bool SlotOutcome::overall_mrc() const {
  if (direct_success) return true;
  for (std::size_t k = 0; k < sr_success.size(); ++k)
    if (sr_success[k] && combined_success[k]) return true;
  return false;
}

namespace {

// Scenario constants shared by every trial.
struct SimConstants {
  Position destination;
  std::vector<Position> relays;
  double g_sd_eff = 1.0;           // includes the source power multiplier
  std::vector<double> g_sr_eff;    // source->relay, power multiplier included
  std::vector<double> g_rd;        // relay->destination, unit power
  PathLossLaw law;
  double theta = 1.0;
  double lambda = 1.0;
  double p = 1.0;
  bool dependent = true;
  Position window_center;
  double window_radius = 0.0;
  int n = 0;

  static SimConstants make(const Scenario& scenario, const ChannelParams& params,
                           const MonteCarloOptions& options) {
    validate(params);
    validate_scenario(scenario, params.combiner);
    if (!(options.window_radius > 0.0)) throw ConfigError("window radius must be positive");
    SimConstants c;
    c.destination = scenario.destination;
    c.relays = scenario.relays;
    const LinkGains gains = link_gains(scenario);
    c.g_sd_eff = scenario.source_power_scale * gains.g_sd;
    c.g_sr_eff.resize(gains.g_sr.size());
    for (std::size_t k = 0; k < gains.g_sr.size(); ++k)
      c.g_sr_eff[k] = scenario.source_power_scale * gains.g_sr[k];
    c.g_rd = gains.g_rd;
    c.law = scenario.path_loss;
    c.theta = params.theta;
    c.lambda = params.lambda;
    c.p = params.aloha_p;
    c.dependent = params.interference == Interference::Dependent;
    c.window_center = {0.5 * (scenario.source.x + scenario.destination.x),
                       0.5 * (scenario.source.y + scenario.destination.y)};
    c.window_radius = options.window_radius;
    c.n = scenario.relay_count();
    return c;
  }
};

// Per-worker buffers, reused across the trials of a block.
struct SimScratch {
  PppRealization ppp;
  std::vector<PppRealization> ppp_per_relay;
  std::vector<double> gain_d;   // interferer -> destination
  std::vector<double> gain_r;   // interferer x relay, row-major
  std::vector<double> i_relay;  // interference power at each relay
};

// Interference at the destination and every relay from a shared realization
// (dependent model). Fresh fading and ALOHA on every call.
void dependent_interference(const SimConstants& c, const SimScratch& s, RngStream& rng,
                            double* i_dest, std::vector<double>& i_relay) {
  const std::size_t m = s.ppp.points.size();
  double id = 0.0;
  std::fill(i_relay.begin(), i_relay.end(), 0.0);
  const bool gated = c.p < 1.0;
  for (std::size_t u = 0; u < m; ++u) {
    if (gated && !rng.bernoulli(c.p)) continue;
    id += rng.exponential() * s.gain_d[u];
    const double* gr = s.gain_r.data() + u * c.n;
    for (int k = 0; k < c.n; ++k) i_relay[k] += rng.exponential() * gr[k];
  }
  *i_dest = id;
}

void fill_gains(const SimConstants& c, SimScratch& s) {
  const std::size_t m = s.ppp.points.size();
  s.gain_d.resize(m);
  s.gain_r.resize(m * c.n);
  for (std::size_t u = 0; u < m; ++u) {
    const Position q = s.ppp.points[u];
    s.gain_d[u] = c.law.gain_from_dist_sq(distance_sq(q, c.destination));
    for (int k = 0; k < c.n; ++k)
      s.gain_r[u * c.n + k] = c.law.gain_from_dist_sq(distance_sq(q, c.relays[k]));
  }
}

// Interference from a receiver's private realization (independent model).
double independent_interference(const SimConstants& c, Position receiver, RngStream& rng,
                                PppRealization& ppp) {
  sample_ppp_into(c.lambda, c.window_center, c.window_radius, rng, ppp);
  const bool gated = c.p < 1.0;
  double total = 0.0;
  for (const Position& q : ppp.points) {
    if (gated && !rng.bernoulli(c.p)) continue;
    total += rng.exponential() * c.law.gain_from_dist_sq(distance_sq(q, receiver));
  }
  return total;
}

struct SlotResult {
  bool sc = false;
  bool mrc = false;
};

// One slot given the interference powers; draws the signal fadings.
SlotResult decide_slot(const SimConstants& c, RngStream& rng, double i_dest,
                       const std::vector<double>& i_relay) {
  SlotResult out;
  const double h_sd = rng.exponential();
  const double signal_sd = h_sd * c.g_sd_eff;
  const bool direct = signal_sd > c.theta * i_dest;
  out.sc = direct;
  out.mrc = direct;
  for (int k = 0; k < c.n; ++k) {
    const double h_sr = rng.exponential();
    const double h_rd = rng.exponential();
    if (h_sr * c.g_sr_eff[k] <= c.theta * i_relay[k]) continue;
    const double relay_signal = h_rd * c.g_rd[k];
    if (relay_signal > c.theta * i_dest) out.sc = true;
    if (signal_sd + relay_signal > c.theta * i_dest) out.mrc = true;
  }
  return out;
}

SlotResult run_single_slot(const SimConstants& c, SimScratch& s, RngStream& rng) {
  double i_dest = 0.0;
  s.i_relay.assign(c.n, 0.0);
  if (c.dependent) {
    sample_ppp_into(c.lambda, c.window_center, c.window_radius, rng, s.ppp);
    fill_gains(c, s);
    dependent_interference(c, s, rng, &i_dest, s.i_relay);
  } else {
    s.ppp_per_relay.resize(c.n);
    i_dest = independent_interference(c, c.destination, rng, s.ppp);
    for (int k = 0; k < c.n; ++k)
      s.i_relay[k] = independent_interference(c, c.relays[k], rng, s.ppp_per_relay[k]);
  }
  return decide_slot(c, rng, i_dest, s.i_relay);
}

}  // namespace

SlotOutcome simulate_slot(const Scenario& scenario, const ChannelParams& params,
                          const PppRealization& ppp, const SlotDraw& draw) {
  validate(params);
  const int n = scenario.relay_count();
  const LinkGains gains = link_gains(scenario);
  const double scale = scenario.source_power_scale;
  const std::size_t m = ppp.points.size();

  double i_dest = 0.0;
  std::vector<double> i_relay(n, 0.0);
  for (std::size_t u = 0; u < m; ++u) {
    if (!draw.active[u]) continue;
    const Position q = ppp.points[u];
    i_dest += draw.h_to_destination[u] *
              scenario.path_loss.gain_from_dist_sq(distance_sq(q, scenario.destination));
    for (int k = 0; k < n; ++k)
      i_relay[k] += draw.h_to_relay[u * n + k] *
                    scenario.path_loss.gain_from_dist_sq(distance_sq(q, scenario.relays[k]));
  }

  SlotOutcome out;
  const double signal_sd = draw.h_sd * scale * gains.g_sd;
  out.direct_success = signal_sd > params.theta * i_dest;
  out.sr_success.resize(n);
  out.rd_success.resize(n);
  out.combined_success.resize(n);
  for (int k = 0; k < n; ++k) {
    out.sr_success[k] = draw.h_sr[k] * scale * gains.g_sr[k] > params.theta * i_relay[k];
    const double relay_signal = draw.h_rd[k] * gains.g_rd[k];
    out.rd_success[k] = relay_signal > params.theta * i_dest;
    out.combined_success[k] = signal_sd + relay_signal > params.theta * i_dest;
  }
  out.overall = params.combiner == Combiner::SC ? out.overall_sc() : out.overall_mrc();
  return out;
}

IndependentSlotInputs draw_independent_slot(const Scenario& scenario, const ChannelParams& params,
                                            Position window_center, double window_radius,
                                            RngStream& rng) {
  IndependentSlotInputs in;
  in.ppp_destination = sample_ppp(params.lambda, window_center, window_radius, rng);
  draw_slot_into(scenario, in.ppp_destination, params, rng, in.draw_destination);
  const int n = scenario.relay_count();
  in.ppp_relays.resize(n);
  in.h_to_relay.resize(n);
  in.active_relay.resize(n);
  const double p = params.aloha_p;
  for (int k = 0; k < n; ++k) {
    in.ppp_relays[k] = sample_ppp(params.lambda, window_center, window_radius, rng);
    const std::size_t m = in.ppp_relays[k].points.size();
    in.h_to_relay[k].resize(m);
    in.active_relay[k].resize(m);
    for (std::size_t u = 0; u < m; ++u) {
      in.h_to_relay[k][u] = rng.exponential();
      in.active_relay[k][u] =
          p >= 1.0 ? 1 : (p <= 0.0 ? 0 : static_cast<std::uint8_t>(rng.bernoulli(p)));
    }
  }
  return in;
}

SlotOutcome simulate_slot(const Scenario& scenario, const ChannelParams& params,
                          const IndependentSlotInputs& inputs) {
  validate(params);
  const int n = scenario.relay_count();
  const LinkGains gains = link_gains(scenario);
  const double scale = scenario.source_power_scale;

  double i_dest = 0.0;
  for (std::size_t u = 0; u < inputs.ppp_destination.points.size(); ++u) {
    if (!inputs.draw_destination.active[u]) continue;
    i_dest += inputs.draw_destination.h_to_destination[u] *
              scenario.path_loss.gain_from_dist_sq(
                  distance_sq(inputs.ppp_destination.points[u], scenario.destination));
  }
  std::vector<double> i_relay(n, 0.0);
  for (int k = 0; k < n; ++k) {
    for (std::size_t u = 0; u < inputs.ppp_relays[k].points.size(); ++u) {
      if (!inputs.active_relay[k][u]) continue;
      i_relay[k] += inputs.h_to_relay[k][u] *
                    scenario.path_loss.gain_from_dist_sq(
                        distance_sq(inputs.ppp_relays[k].points[u], scenario.relays[k]));
    }
  }

  SlotOutcome out;
  const SlotDraw& draw = inputs.draw_destination;
  const double signal_sd = draw.h_sd * scale * gains.g_sd;
  out.direct_success = signal_sd > params.theta * i_dest;
  out.sr_success.resize(n);
  out.rd_success.resize(n);
  out.combined_success.resize(n);
  for (int k = 0; k < n; ++k) {
    out.sr_success[k] = draw.h_sr[k] * scale * gains.g_sr[k] > params.theta * i_relay[k];
    const double relay_signal = draw.h_rd[k] * gains.g_rd[k];
    out.rd_success[k] = relay_signal > params.theta * i_dest;
    out.combined_success[k] = signal_sd + relay_signal > params.theta * i_dest;
  }
  out.overall = params.combiner == Combiner::SC ? out.overall_sc() : out.overall_mrc();
  return out;
}

namespace {

constexpr long kTrialBlock = 4096;

EstimateWithError bernoulli_estimate(long successes, long trials) {
  const double mean = static_cast<double>(successes) / static_cast<double>(trials);
  return {mean, std::sqrt(mean * (1.0 - mean) / static_cast<double>(trials)), trials};
}

}  // namespace

DeliveryEstimatePair estimate_delivery_both_combiners(const Scenario& scenario,
                                                      const ChannelParams& params, long trials,
                                                      RngStream& rng,
                                                      const MonteCarloOptions& options) {
  if (trials < 1000) throw ConfigError("delivery estimation needs at least 1000 trials");
  const SimConstants c = SimConstants::make(scenario, params, options);

  const long blocks = block_count(trials, kTrialBlock);
  std::vector<std::uint64_t> block_seeds(blocks);
  for (long b = 0; b < blocks; ++b) block_seeds[b] = rng.next_u64();

  std::vector<long> sc_hits(blocks, 0), mrc_hits(blocks, 0);
  run_blocks(trials, kTrialBlock, options.workers, [&](long block, long begin, long end) {
    RngStream stream(block_seeds[block]);
    SimScratch scratch;
    long sc = 0, mrc = 0;
    for (long i = begin; i < end; ++i) {
      const SlotResult r = run_single_slot(c, scratch, stream);
      sc += r.sc;
      mrc += r.mrc;
    }
    sc_hits[block] = sc;
    mrc_hits[block] = mrc;
  });

  long sc_total = 0, mrc_total = 0;
  for (long b = 0; b < blocks; ++b) {
    sc_total += sc_hits[b];
    mrc_total += mrc_hits[b];
  }
  return {bernoulli_estimate(sc_total, trials), bernoulli_estimate(mrc_total, trials)};
}

EstimateWithError estimate_delivery(const Scenario& scenario, const ChannelParams& params,
                                    long trials, RngStream& rng,
                                    const MonteCarloOptions& options) {
  const DeliveryEstimatePair pair =
      estimate_delivery_both_combiners(scenario, params, trials, rng, options);
  return params.combiner == Combiner::SC ? pair.sc : pair.mrc;
}

AttemptDistribution estimate_attempts(const Scenario& scenario, const ChannelParams& params,
                                      int t_max, long trials, RngStream& rng,
                                      const MonteCarloOptions& options) {
  if (t_max < 1) throw ConfigError("t_max must be at least 1");
  if (trials < 1000) throw ConfigError("attempt estimation needs at least 1000 trials");
  const SimConstants c = SimConstants::make(scenario, params, options);
  const bool want_mrc = params.combiner == Combiner::MRC;

  const long blocks = block_count(trials, kTrialBlock);
  std::vector<std::uint64_t> block_seeds(blocks);
  for (long b = 0; b < blocks; ++b) block_seeds[b] = rng.next_u64();

  // Per block: counts of first success at attempt T (index T-1); censored
  // trials fall off the end.
  std::vector<std::vector<long>> first_counts(blocks, std::vector<long>(t_max, 0));
  run_blocks(trials, kTrialBlock, options.workers, [&](long block, long begin, long end) {
    RngStream stream(block_seeds[block]);
    SimScratch scratch;
    auto& counts = first_counts[block];
    for (long i = begin; i < end; ++i) {
      if (c.dependent) {
        sample_ppp_into(c.lambda, c.window_center, c.window_radius, stream, scratch.ppp);
        fill_gains(c, scratch);
        scratch.i_relay.assign(c.n, 0.0);
        for (int t = 0; t < t_max; ++t) {
          double i_dest = 0.0;
          dependent_interference(c, scratch, stream, &i_dest, scratch.i_relay);
          const SlotResult r = decide_slot(c, stream, i_dest, scratch.i_relay);
          if (want_mrc ? r.mrc : r.sc) {
            ++counts[t];
            break;
          }
        }
      } else {
        for (int t = 0; t < t_max; ++t) {
          const SlotResult r = run_single_slot(c, scratch, stream);
          if (want_mrc ? r.mrc : r.sc) {
            ++counts[t];
            break;
          }
        }
      }
    }
  });

  std::vector<long> totals(t_max, 0);
  for (long b = 0; b < blocks; ++b)
    for (int t = 0; t < t_max; ++t) totals[t] += first_counts[b][t];

  AttemptDistribution out;
  out.mc_replicates = trials;
  out.pmf.resize(t_max);
  out.cdf.resize(t_max);
  out.pmf_stderr.resize(t_max);
  out.cdf_stderr.resize(t_max);
  const double n = static_cast<double>(trials);
  long running = 0;
  for (int t = 0; t < t_max; ++t) {
    running += totals[t];
    const double pmf = static_cast<double>(totals[t]) / n;
    const double cdf = static_cast<double>(running) / n;
    out.pmf[t] = pmf;
    out.cdf[t] = cdf;
    out.pmf_stderr[t] = std::sqrt(pmf * (1.0 - pmf) / n);
    out.cdf_stderr[t] = std::sqrt(cdf * (1.0 - cdf) / n);
  }
  return out;
}

}  // namespace coopnet
