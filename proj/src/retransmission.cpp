#include "coopnet/retransmission.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "coopnet/errors.hpp"
#include "coopnet/montecarlo.hpp"
#include "coopnet/util.hpp"
#include "internal/success_products.hpp"

namespace coopnet {

namespace {

using internal::Factor;

// Signed inclusion-exclusion descriptor of one success-event subset,
// precomputed against a fixed window geometry. MRC relay-only subsets carry
// the two-product decomposition; everything else is a single product.
struct SubsetTerm {
  double sign_multiplicity = 0.0;
  bool two_products = false;
  double dest_t1 = 0.0;  // single product: the only destination threshold
  double dest_t2 = 0.0;  // two products: the direct-link threshold
  double eta = 1.0;
  std::vector<std::pair<int, int>> sr_powers;  // (group index, count)
  double log_kappa1 = 0.0;                     // window tail corrections
  double log_kappa2 = 0.0;
};

double tail_exponent(const Scenario& scenario, const ChannelParams& params,
                     const std::vector<Factor>& factors, Position center, double radius,
                     const QuadratureSpec& spec) {
  const double p = params.aloha_p;
  const PathLossLaw law = scenario.path_loss;
  PlaneFunction f = [p, law, factors](double x, double y) {
    return p * (1.0 - internal::factor_product(factors, law, x, y));
  };
  QuadratureSpec tail_spec = spec;
  tail_spec.relative_tolerance = std::max(spec.relative_tolerance, 1e-6);
  const QuadratureResult integral =
      integrate_outside_disk(f, center, radius, tail_spec, law.exponent);
  return -params.lambda * integral.value;
}

}  // namespace

struct ConditionalSuccessEvaluator::Impl {
  Scenario scenario;
  ChannelParams params;
  Position window_center;
  double window_radius = 0.0;
  std::vector<RelayGroup> groups;
  std::vector<double> theta_sr_g;
  std::vector<int> group_count;
  std::vector<SubsetTerm> terms;
  bool split_groups = false;

  Impl(const Scenario& scenario_in, const ChannelParams& params_in, Position center, double radius,
       const QuadratureSpec& spec, bool split)
      : scenario(scenario_in), params(params_in), window_center(center), window_radius(radius),
        split_groups(split) {
    validate(params);
    validate_scenario(scenario, params.combiner);
    if (params.interference != Interference::Dependent)
      throw ConfigError(
          "conditional success probabilities are defined for the dependent model only");
    if (scenario.relay_count() > kMaxRelays)
      throw TooManyRelays("conditional evaluator enumerates success-event subsets; at most " +
                          std::to_string(kMaxRelays) + " relays are supported");
    if (!(radius > 0.0)) throw ConfigError("window radius must be positive");

    groups = group_relays(scenario);
    if (split_groups) {
      std::vector<RelayGroup> singletons;
      for (const RelayGroup& g : groups)
        for (int idx : g.member_indices) singletons.push_back({g.pos, 1, {idx}});
      groups = std::move(singletons);
    }

    const ReducedThresholds thetas = reduced_thresholds(scenario, params.theta);
    const LinkGains gains = link_gains(scenario);
    const double g_sd_eff = scenario.source_power_scale * gains.g_sd;
    std::vector<double> theta_rd_g, q_g;
    for (const RelayGroup& g : groups) {
      const int k = g.member_indices.front();
      theta_sr_g.push_back(thetas.sr[k]);
      theta_rd_g.push_back(thetas.rd[k]);
      q_g.push_back(g_sd_eff / gains.g_rd[k]);
      group_count.push_back(g.multiplicity);
    }

    QuadratureSpec tail_spec = spec;
    tail_spec.refinement_centers = default_quadrature_spec(scenario).refinement_centers;

    for (const GroupedSubset& subset : enumerate_grouped_subsets(groups)) {
      SubsetTerm term;
      term.sign_multiplicity =
          (subset.cardinality() % 2 == 1 ? 1.0 : -1.0) * subset.multiplicity;
      double rd_sum = 0.0, q_sum = 0.0;
      std::vector<Factor> sr;
      for (std::size_t g = 0; g < subset.counts.size(); ++g) {
        const int c = subset.counts[g];
        if (c == 0) continue;
        term.sr_powers.emplace_back(static_cast<int>(g), c);
        sr.push_back({groups[g].pos, theta_sr_g[g], c});
        rd_sum += c * theta_rd_g[g];
        q_sum += c * q_g[g];
      }

      const bool mrc = params.combiner == Combiner::MRC;
      if (mrc && !subset.includes_direct && subset.total_relays() > 0) {
        term.two_products = true;
        term.dest_t1 = rd_sum;
        term.dest_t2 = thetas.sd;
        const double denom = 1.0 - q_sum;
        if (std::abs(denom) < kEtaDenominatorFloor)
          throw EtaSingular("singular relay subset in conditional evaluator");
        term.eta = 1.0 / denom;
        std::vector<Factor> f1 = sr, f2 = sr;
        f1.push_back({scenario.destination, term.dest_t1, 1});
        f2.push_back({scenario.destination, term.dest_t2, 1});
        term.log_kappa1 =
            tail_exponent(scenario, params, f1, window_center, window_radius, tail_spec);
        term.log_kappa2 =
            tail_exponent(scenario, params, f2, window_center, window_radius, tail_spec);
      } else {
        double dest_theta = subset.includes_direct ? thetas.sd : 0.0;
        if (mrc) {
          // direct success implies combined success; relay thresholds drop out
        } else {
          dest_theta += rd_sum;
        }
        term.dest_t1 = dest_theta;
        std::vector<Factor> f1 = sr;
        f1.push_back({scenario.destination, term.dest_t1, 1});
        term.log_kappa1 =
            tail_exponent(scenario, params, f1, window_center, window_radius, tail_spec);
      }
      terms.push_back(std::move(term));
    }
  }

  // Per-subset conditional probabilities (tail-corrected) and both sums.
  void evaluate_terms(const PppRealization& ppp, std::vector<double>* term_values,
                      double* p_corrected, double* p_raw) const {
    const std::size_t m = ppp.points.size();
    const std::size_t n_groups = groups.size();
    const PathLossLaw law = scenario.path_loss;
    const double p = params.aloha_p;

    std::vector<double> g_d(m);
    std::vector<double> g_r(m * n_groups);
    for (std::size_t u = 0; u < m; ++u) {
      g_d[u] = law.gain_from_dist_sq(distance_sq(ppp.points[u], scenario.destination));
      for (std::size_t g = 0; g < n_groups; ++g)
        g_r[u * n_groups + g] = law.gain_from_dist_sq(distance_sq(ppp.points[u], groups[g].pos));
    }

    CompensatedSum corrected, raw;
    if (term_values) term_values->clear();
    for (const SubsetTerm& term : terms) {
      double value_raw;
      double value_corrected;
      if (!term.two_products) {
        double log_prod = 0.0;
        for (std::size_t u = 0; u < m; ++u) {
          double prod = 1.0 / (1.0 + term.dest_t1 * g_d[u]);
          for (const auto& [g, c] : term.sr_powers) {
            const double base = 1.0 / (1.0 + theta_sr_g[g] * g_r[u * n_groups + g]);
            for (int i = 0; i < c; ++i) prod *= base;
          }
          log_prod += std::log(p * prod + 1.0 - p);
        }
        value_raw = std::exp(log_prod);
        value_corrected = std::exp(log_prod + term.log_kappa1);
      } else {
        // eta-weighted pair of products; combined through expm1 of the
        // log-difference so large eta does not amplify roundoff.
        double log1 = 0.0, log2 = 0.0;
        for (std::size_t u = 0; u < m; ++u) {
          double sr_prod = 1.0;
          for (const auto& [g, c] : term.sr_powers) {
            const double base = 1.0 / (1.0 + theta_sr_g[g] * g_r[u * n_groups + g]);
            for (int i = 0; i < c; ++i) sr_prod *= base;
          }
          const double b1 = p * sr_prod / (1.0 + term.dest_t1 * g_d[u]) + 1.0 - p;
          const double b2 = p * sr_prod / (1.0 + term.dest_t2 * g_d[u]) + 1.0 - p;
          log1 += std::log(b1);
          log2 += std::log(b2);
        }
        const double base_raw = std::exp(log2);
        value_raw = base_raw * (1.0 + term.eta * std::expm1(log1 - log2));
        const double base_corr = std::exp(log2 + term.log_kappa2);
        value_corrected =
            base_corr *
            (1.0 + term.eta * std::expm1(log1 + term.log_kappa1 - log2 - term.log_kappa2));
      }
      corrected.add(term.sign_multiplicity * value_corrected);
      raw.add(term.sign_multiplicity * value_raw);
      if (term_values) term_values->push_back(value_corrected);
    }
    *p_corrected = corrected.value();
    *p_raw = raw.value();
  }

  ConditionalSuccess evaluate(const PppRealization& ppp) const {
    double corrected = 0.0, raw = 0.0;
    evaluate_terms(ppp, nullptr, &corrected, &raw);
    ConditionalSuccess out;
    out.p_s = std::clamp(corrected, 0.0, 1.0);
    out.tail_correction =
        out.p_s > 0.0 ? (corrected - raw) / std::max(out.p_s, 1e-300) : 0.0;
    if (std::abs(corrected - raw) > ConditionalSuccessEvaluator::kWindowGuard *
                                        std::max(std::abs(corrected), 1e-12))
      throw WindowTooSmall("window tail moves the conditional success probability by " +
                           std::to_string(out.tail_correction) + " relatively");
    return out;
  }
};

ConditionalSuccessEvaluator::ConditionalSuccessEvaluator(const Scenario& scenario,
                                                         const ChannelParams& params,
                                                         Position window_center,
                                                         double window_radius,
                                                         const QuadratureSpec& spec)
    : impl_(new Impl(scenario, params, window_center, window_radius, spec, false)) {}

ConditionalSuccessEvaluator::~ConditionalSuccessEvaluator() = default;
ConditionalSuccessEvaluator::ConditionalSuccessEvaluator(ConditionalSuccessEvaluator&&) noexcept =
    default;

ConditionalSuccess ConditionalSuccessEvaluator::evaluate(const PppRealization& ppp) const {
  return impl_->evaluate(ppp);
}

ConditionalSuccess conditional_success(const PppRealization& ppp, const Scenario& scenario,
                                       const ChannelParams& params, const QuadratureSpec& spec) {
  if (!(ppp.window_radius > 0.0))
    throw ConfigError("conditional success needs the realization's window geometry");
  const ConditionalSuccessEvaluator evaluator(scenario, params, ppp.center, ppp.window_radius,
                                              spec);
  return evaluator.evaluate(ppp);
}

namespace {

Position window_center_for(const Scenario& scenario) {
  return {0.5 * (scenario.source.x + scenario.destination.x),
          0.5 * (scenario.source.y + scenario.destination.y)};
}

struct MomentAccumulator {
  std::vector<double> sum;
  std::vector<double> sum_sq;

  explicit MomentAccumulator(std::size_t n) : sum(n, 0.0), sum_sq(n, 0.0) {}
  void add(std::size_t i, double v) {
    sum[i] += v;
    sum_sq[i] += v * v;
  }
  void merge(const MomentAccumulator& other) {
    for (std::size_t i = 0; i < sum.size(); ++i) {
      sum[i] += other.sum[i];
      sum_sq[i] += other.sum_sq[i];
    }
  }
};

}  // namespace

AttemptDistribution attempt_distribution_dependent(const Scenario& scenario,
                                                   const ChannelParams& params, int t_max,
                                                   long replicates, RngStream& rng,
                                                   const QuadratureSpec& spec,
                                                   const RetransmissionOptions& options) {
  if (t_max < 1) throw ConfigError("t_max must be at least 1");
  if (replicates < 1) throw ConfigError("replicates must be at least 1");

  const Position center = window_center_for(scenario);
  const ConditionalSuccessEvaluator evaluator(scenario, params, center, options.window_radius,
                                              spec);

  constexpr long kBlock = 256;
  const long blocks = block_count(replicates, kBlock);
  std::vector<std::uint64_t> block_seeds(blocks);
  for (long b = 0; b < blocks; ++b) block_seeds[b] = rng.next_u64();

  // 2 * t_max lanes: pmf then cdf.
  std::vector<MomentAccumulator> partials(blocks, MomentAccumulator(2 * t_max));
  run_blocks(replicates, kBlock, options.workers, [&](long block, long begin, long end) {
    RngStream stream(block_seeds[block]);
    MomentAccumulator& acc = partials[block];
    for (long i = begin; i < end; ++i) {
      const PppRealization ppp =
          sample_ppp(params.lambda, center, options.window_radius, stream);
      const double p_s = evaluator.evaluate(ppp).p_s;
      double fail_pow = 1.0;  // (1 - p_s)^(T-1)
      for (int t = 0; t < t_max; ++t) {
        acc.add(t, fail_pow * p_s);
        fail_pow *= 1.0 - p_s;
        acc.add(t_max + t, 1.0 - fail_pow);
      }
    }
  });

  MomentAccumulator total(2 * t_max);
  for (const MomentAccumulator& acc : partials) total.merge(acc);

  AttemptDistribution out;
  out.mc_replicates = replicates;
  out.pmf.resize(t_max);
  out.cdf.resize(t_max);
  out.pmf_stderr.resize(t_max);
  out.cdf_stderr.resize(t_max);
  const double n = static_cast<double>(replicates);
  for (int t = 0; t < t_max; ++t) {
    const double mean_pmf = total.sum[t] / n;
    const double mean_cdf = total.sum[t_max + t] / n;
    out.pmf[t] = mean_pmf;
    out.cdf[t] = mean_cdf;
    const double var_pmf = std::max(0.0, total.sum_sq[t] / n - mean_pmf * mean_pmf);
    const double var_cdf =
        std::max(0.0, total.sum_sq[t_max + t] / n - mean_cdf * mean_cdf);
    out.pmf_stderr[t] = std::sqrt(var_pmf / n);
    out.cdf_stderr[t] = std::sqrt(var_cdf / n);
  }
  return out;
}

AttemptDistribution attempt_distribution_independent(double omega, int t_max) {
  if (t_max < 1) throw ConfigError("t_max must be at least 1");
  if (!(omega >= 0.0 && omega <= 1.0)) throw ConfigError("omega must lie in [0, 1]");
  AttemptDistribution out;
  out.pmf.resize(t_max);
  out.cdf.resize(t_max);
  out.pmf_stderr.assign(t_max, 0.0);
  out.cdf_stderr.assign(t_max, 0.0);
  double fail_pow = 1.0;
  for (int t = 0; t < t_max; ++t) {
    out.pmf[t] = fail_pow * omega;
    fail_pow *= 1.0 - omega;
    out.cdf[t] = 1.0 - fail_pow;
  }
  return out;
}

namespace {

double binomial_coefficient(int n, int k) {
  double out = 1.0;
  for (int i = 1; i <= k; ++i) out *= static_cast<double>(n - k + i) / i;
  return out;
}

// Sum over compositions (a_1, ..., a_m) of `total` of
// multinomial(total; a) * prod_i (signed_terms[i])^(a_i). Exponent 1 keeps
// plain left-to-right order so it reproduces the linear sum bit for bit.
double multinomial_power(const std::vector<double>& signed_terms, int total,
                         std::size_t index = 0) {
  if (total == 0) return 1.0;
  if (index + 1 == signed_terms.size()) {
    double power = 1.0;
    for (int i = 0; i < total; ++i) power *= signed_terms[index];
    return power;
  }
  if (total == 1) {
    double sum = 0.0;
    for (std::size_t i = index; i < signed_terms.size(); ++i) sum += signed_terms[i];
    return sum;
  }
  double sum = 0.0;
  for (int a = 0; a <= total; ++a) {
    double power = 1.0;
    for (int i = 0; i < a; ++i) power *= signed_terms[index];
    sum += binomial_coefficient(total, a) * power *
           multinomial_power(signed_terms, total - a, index + 1);
  }
  return sum;
}

}  // namespace

double expansion_cross_check(const Scenario& scenario, const ChannelParams& params, int t,
                             long replicates, RngStream& rng, const QuadratureSpec& spec,
                             double window_radius) {
  if (t < 1) throw ConfigError("attempt index must be at least 1");
  if (t > 3 || scenario.relay_count() > 2)
    throw ExpansionTooLarge(
        "the multinomial expansion is only evaluated for T <= 3 and N <= 2");
  if (replicates < 1) throw ConfigError("replicates must be at least 1");

  const Position center = window_center_for(scenario);
  // Ungrouped subsets so the expansion runs over the literal powerset.
  ConditionalSuccessEvaluator::Impl impl(scenario, params, center, window_radius, spec, true);

  double direct_sum = 0.0;
  double expanded_sum = 0.0;
  std::vector<double> term_values;
  std::vector<double> signed_terms;
  for (long i = 0; i < replicates; ++i) {
    const PppRealization ppp = sample_ppp(params.lambda, center, window_radius, rng);
    double p_corrected = 0.0, p_raw = 0.0;
    impl.evaluate_terms(ppp, &term_values, &p_corrected, &p_raw);

    signed_terms.clear();
    for (std::size_t j = 0; j < term_values.size(); ++j)
      signed_terms.push_back(impl.terms[j].sign_multiplicity * term_values[j]);

    // Plain left-to-right sum so the T = 1 expansion degenerates to the very
    // same floating-point value.
    double p_lin = 0.0;
    for (double v : signed_terms) p_lin += v;

    double fail_pow = 1.0;
    for (int k = 1; k < t; ++k) fail_pow *= 1.0 - p_lin;
    direct_sum += fail_pow * p_lin;

    double expanded = 0.0;
    for (int k = 0; k <= t - 1; ++k) {
      const double sign = k % 2 == 0 ? 1.0 : -1.0;
      expanded += binomial_coefficient(t - 1, k) * sign * multinomial_power(signed_terms, k + 1);
    }
    expanded_sum += expanded;
  }
  return std::abs(direct_sum - expanded_sum) / static_cast<double>(replicates);
}

}  // namespace coopnet
