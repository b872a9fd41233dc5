#pragma once

#include <memory>
#include <vector>

#include "coopnet/analytic.hpp"
#include "coopnet/ppp.hpp"

namespace coopnet {

// Success probability of one attempt given a fixed interferer realization.
struct ConditionalSuccess {
  double p_s = 0.0;
  // Relative change applied by the window tail correction; diagnostic.
  double tail_correction = 0.0;
};

// Distribution of the attempt index of the first success.
struct AttemptDistribution {
  std::vector<double> pmf;         // P[success at exactly T], T = 1..Tmax
  std::vector<double> cdf;         // P[success within T attempts]
  std::vector<double> pmf_stderr;  // zero for the exact geometric law
  std::vector<double> cdf_stderr;
  long mc_replicates = 0;

  int t_max() const { return static_cast<int>(pmf.size()); }
};

// Evaluates the exact conditional success probability p_s = P[success | Phi]
// by inclusion-exclusion over the per-interferer product formulas, with an
// analytic multiplicative correction for interference outside the sampling
// window. Dependent-interference model only.
//
// Precomputes the per-subset descriptors and tail factors once, so it can be
// reused across many realizations sharing the same window geometry.
class ConditionalSuccessEvaluator {
 public:
  ConditionalSuccessEvaluator(const Scenario& scenario, const ChannelParams& params,
                              Position window_center, double window_radius,
                              const QuadratureSpec& spec);
  ~ConditionalSuccessEvaluator();
  ConditionalSuccessEvaluator(ConditionalSuccessEvaluator&&) noexcept;

  // Throws WindowTooSmall when the tail correction moves p_s by more than
  // kWindowGuard relatively.
  ConditionalSuccess evaluate(const PppRealization& ppp) const;

  static constexpr double kWindowGuard = 1e-3;

  struct Impl;  // opaque; the expansion cross-check reuses it internally

 private:
  std::unique_ptr<Impl> impl_;
};

// One-shot convenience wrapper around the evaluator.
ConditionalSuccess conditional_success(const PppRealization& ppp, const Scenario& scenario,
                                       const ChannelParams& params, const QuadratureSpec& spec);

inline constexpr double kDefaultConditionalWindowRadius = 30.0;

// Options for the semi-analytic attempt-distribution estimator.
struct RetransmissionOptions {
  double window_radius = kDefaultConditionalWindowRadius;
  int workers = 1;
};

// P_S^T and its CDF under dependent interference: sample Phi, evaluate the
// conditional success probability exactly, and exponentiate it across
// attempts. The window is centered at the source-destination midpoint.
AttemptDistribution attempt_distribution_dependent(const Scenario& scenario,
                                                   const ChannelParams& params, int t_max,
                                                   long replicates, RngStream& rng,
                                                   const QuadratureSpec& spec,
                                                   const RetransmissionOptions& options = {});

// Independent interference: the attempt count is geometric with parameter
// omega. Exact, zero stderr.
AttemptDistribution attempt_distribution_independent(double omega, int t_max);

// Re-derives pmf[T] through the binomial/multinomial power expansions on the
// same sampled realizations as the direct path and returns the absolute
// difference. Only feasible for small T and N; algebraically the two paths
// are identical, so the difference is pure floating-point noise.
double expansion_cross_check(const Scenario& scenario, const ChannelParams& params, int t,
                             long replicates, RngStream& rng, const QuadratureSpec& spec,
                             double window_radius = kDefaultConditionalWindowRadius);

}  // namespace coopnet
