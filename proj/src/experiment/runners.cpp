#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include "coopnet/analytic.hpp"
#include "coopnet/errors.hpp"
#include "coopnet/experiment.hpp"
#include "coopnet/montecarlo.hpp"
#include "coopnet/retransmission.hpp"
#include "coopnet/rng.hpp"
#include "coopnet/util.hpp"
#include "csv.hpp"

namespace coopnet {

namespace {

using experiment::CsvWriter;
using experiment::format_value;

struct RunSettings {
  std::uint64_t seed = 20250815;
  int workers = 1;
  double rel_tol = 1e-8;
  double eta_nudge = 0.0;  // <= 0: validation errors propagate
  std::string out_base;
};

RunSettings settings_from(const Config& config, const std::string& kind) {
  RunSettings s;
  s.seed = static_cast<std::uint64_t>(config.get_long("seed", 20250815));
  s.workers = static_cast<int>(config.get_long("workers", 1));
  s.rel_tol = config.get_double("tol", 1e-8);
  s.eta_nudge = config.get_double("eta_nudge", 0.0);
  s.out_base = config.get_string("out", kind);
  if (s.rel_tol <= 0.0) throw ConfigError("config key 'tol' must be positive");
  return s;
}

Scenario base_scenario(const Config& config) {
  Scenario scenario;
  const auto source = config.get_positions("source", {{0.0, 0.0}});
  const auto destination = config.get_positions("destination", {{1.0, 0.0}});
  if (source.size() != 1) throw ConfigError("config key 'source' must hold one position");
  if (destination.size() != 1) throw ConfigError("config key 'destination' must hold one position");
  scenario.source = source.front();
  scenario.destination = destination.front();
  scenario.relays = config.get_positions("relays", {});
  scenario.source_power_scale = config.get_double("power_scale", 1.0);
  scenario.path_loss.exponent = config.get_double("alpha", 4.0);
  return scenario;
}

Combiner combiner_from(const std::string& token, const std::string& key) {
  if (token == "sc") return Combiner::SC;
  if (token == "mrc") return Combiner::MRC;
  throw ConfigError("config key '" + key + "': unknown combiner '" + token + "'");
}

Interference model_from(const std::string& token, const std::string& key) {
  if (token == "dependent" || token == "dep") return Interference::Dependent;
  if (token == "independent" || token == "ind") return Interference::Independent;
  throw ConfigError("config key '" + key + "': unknown interference model '" + token + "'");
}

std::string model_tag(Interference m) { return m == Interference::Dependent ? "dep" : "ind"; }

// Explicit theta/lambda/p keys override the preset values.
ChannelParams params_from(const Config& config, const std::string& preset_name) {
  ChannelParams params =
      preset_name.empty() ? ChannelParams{} : preset_by_name(preset_name);
  params.theta = config.get_double("theta", params.theta);
  params.lambda = config.get_double("lambda", params.lambda);
  params.aloha_p = config.get_double("p", params.aloha_p);
  validate(params);
  return params;
}

std::vector<std::string> preset_list(const Config& config) {
  if (config.has("presets")) return config.get_strings("presets", {});
  if (config.has("preset")) return {config.require_string("preset")};
  return {""};  // explicit theta/lambda/p (or defaults)
}

struct SweepAxis {
  std::vector<double> values;
};

SweepAxis sweep_axis(const Config& config, double fallback_from, double fallback_to,
                     long fallback_steps) {
  SweepAxis axis;
  const double from = config.get_double("sweep.from", fallback_from);
  const double to = config.get_double("sweep.to", fallback_to);
  const long steps = config.get_long("sweep.steps", fallback_steps);
  if (steps < 1) throw ConfigError("config key 'sweep.steps' must be at least 1");
  for (long i = 0; i < steps; ++i)
    axis.values.push_back(steps == 1 ? from
                                     : from + (to - from) * static_cast<double>(i) /
                                                  static_cast<double>(steps - 1));
  return axis;
}

QuadratureSpec spec_for(const Scenario& scenario, const RunSettings& settings) {
  QuadratureSpec spec = default_quadrature_spec(scenario);
  spec.relative_tolerance = settings.rel_tol;
  return spec;
}

Scenario maybe_nudge(Scenario scenario, Combiner combiner, const RunSettings& settings) {
  if (settings.eta_nudge > 0.0)
    return nudge_scenario(std::move(scenario), combiner, settings.eta_nudge);
  validate_scenario(scenario, combiner);
  return scenario;
}

[[noreturn]] void rethrow_at_point(const std::string& axis, double value,
                                   const std::string& series) {
  const std::string where =
      " [at " + axis + " = " + format_value(value) + ", series " + series + "]";
  try {
    throw;
  } catch (const EtaSingular& e) {
    throw EtaSingular(e.what() + where);
  } catch (const NonConvergence& e) {
    throw NonConvergence(e.what() + where);
  } catch (const DegenerateGeometry& e) {
    throw DegenerateGeometry(e.what() + where);
  } catch (const WindowTooSmall& e) {
    throw WindowTooSmall(e.what() + where);
  }
}

void report_written(const std::string& path, const CsvWriter& writer, std::size_t columns) {
  std::cout << "wrote " << path << " (" << writer.rows() << " rows, " << columns << " columns)\n";
}

std::string preset_suffix(const Config& config, const std::string& preset) {
  return (config.has("presets") || config.has("preset")) && !preset.empty() ? "_" + preset : "";
}

// ---------------------------------------------------------------------------
// point

int run_point(const Config& config) {
  const RunSettings settings = settings_from(config, "point");
  Scenario scenario = base_scenario(config);
  ChannelParams params = params_from(config, config.get_string("preset", ""));
  params.combiner = combiner_from(config.get_string("combiner", "sc"), "combiner");
  params.interference = model_from(config.get_string("model", "dependent"), "model");
  scenario = maybe_nudge(std::move(scenario), params.combiner, settings);
  const QuadratureSpec spec = spec_for(scenario, settings);

  const std::vector<std::string> engines = config.get_strings("engines", {"analytic"});
  const long trials = config.get_long("trials", 100000);
  const long replicates = config.get_long("replicates", 10000);
  const double window = config.get_double("window_radius", kDefaultSimulationWindowRadius);

  std::vector<std::string> columns{"theta", "lambda", "p"};
  std::vector<double> row{params.theta, params.lambda, params.aloha_p};
  for (const std::string& engine : engines) {
    if (engine == "analytic") {
      const DeliveryResult result = delivery_probability(scenario, params, spec);
      columns.insert(columns.end(), {"omega_analytic", "err_analytic"});
      row.insert(row.end(), {result.omega, result.estimated_quadrature_error});
    } else if (engine == "conditional") {
      if (replicates < 1) throw ConfigError("config key 'replicates' must be positive");
      const Position center{0.5 * (scenario.source.x + scenario.destination.x),
                            0.5 * (scenario.source.y + scenario.destination.y)};
      const double cond_window =
          config.get_double("window_radius", kDefaultConditionalWindowRadius);
      const ConditionalSuccessEvaluator evaluator(scenario, params, center, cond_window, spec);
      RngStream rng = derive_stream(settings.seed, 0, 1);
      double sum = 0.0, sum_sq = 0.0;
      for (long i = 0; i < replicates; ++i) {
        const PppRealization ppp = sample_ppp(params.lambda, center, cond_window, rng);
        const double p_s = evaluator.evaluate(ppp).p_s;
        sum += p_s;
        sum_sq += p_s * p_s;
      }
      const double mean = sum / replicates;
      const double var = std::max(0.0, sum_sq / replicates - mean * mean);
      columns.insert(columns.end(), {"omega_conditional", "se_conditional"});
      row.insert(row.end(), {mean, std::sqrt(var / replicates)});
    } else if (engine == "montecarlo") {
      if (trials < 1000) throw ConfigError("config key 'trials' must be at least 1000");
      RngStream rng = derive_stream(settings.seed, 0, 2);
      const EstimateWithError estimate =
          estimate_delivery(scenario, params, trials, rng, {window, settings.workers});
      columns.insert(columns.end(), {"omega_mc", "se_mc"});
      row.insert(row.end(), {estimate.mean, estimate.std_error});
    } else {
      throw ConfigError("config key 'engines': unknown engine '" + engine + "'");
    }
  }

  CsvWriter writer(columns, config.hash(), settings.seed);
  writer.add_row(row);
  const std::string path = settings.out_base + ".csv";
  writer.write(path);
  report_written(path, writer, columns.size());
  return kExitOk;
}

// ---------------------------------------------------------------------------
// relay_sweep: fixed relay geometry, sweep theta/lambda/p; one column pair per
// (lambda value, system flavor). Covers the single-relay figure family.

int run_relay_sweep(const Config& config) {
  const RunSettings settings = settings_from(config, "relay_sweep");
  const Scenario base = base_scenario(config);
  const std::string variable = config.get_string("sweep.variable", "p");
  if (variable != "p" && variable != "lambda" && variable != "theta")
    throw ConfigError("config key 'sweep.variable' must be p, lambda or theta");
  const SweepAxis axis = sweep_axis(config, variable == "p" ? 0.05 : 0.1, 1.0, 20);
  const std::vector<double> lambdas =
      config.get_doubles("lambdas", {config.get_double("lambda", 1.0)});
  const std::vector<std::string> combiner_tokens = config.get_strings("combiners", {"sc"});
  const bool baseline = config.get_bool("baseline", false);
  const Interference model = model_from(config.get_string("model", "dependent"), "model");

  Scenario coop = base;
  if (coop.relays.empty()) coop.relays = {{0.25, 0.0}};
  Scenario noncoop = base;
  noncoop.relays.clear();
  noncoop.source_power_scale = 2.0 * base.source_power_scale;

  struct SeriesDef {
    std::string token;
    Scenario scenario;
    Combiner combiner;
  };
  std::vector<SeriesDef> series;
  for (const std::string& token : combiner_tokens)
    series.push_back({token, coop, combiner_from(token, "combiners")});
  if (baseline) series.push_back({"noncoop", noncoop, Combiner::SC});

  std::vector<std::string> columns{variable};
  const bool tag_lambda = lambdas.size() > 1;
  for (double lam : lambdas)
    for (const SeriesDef& def : series) {
      std::string tag = def.token;
      if (tag_lambda) tag += "_lam" + format_value(lam);
      columns.push_back("omega_" + tag);
      columns.push_back("err_" + tag);
    }

  std::vector<std::vector<double>> rows(axis.values.size());
  run_blocks(static_cast<long>(axis.values.size()), 1, settings.workers,
             [&](long point, long, long) {
               const double value = axis.values[point];
               std::vector<double> row{value};
               for (double lam : lambdas)
                 for (const SeriesDef& def : series) {
                   ChannelParams params = params_from(config, config.get_string("preset", ""));
                   params.lambda = lam;
                   params.combiner = def.combiner;
                   params.interference = model;
                   if (variable == "p")
                     params.aloha_p = value;
                   else if (variable == "lambda")
                     params.lambda = value;
                   else
                     params.theta = value;
                   try {
                     validate(params);
                     const Scenario scenario =
                         maybe_nudge(def.scenario, params.combiner, settings);
                     const DeliveryResult result =
                         delivery_probability(scenario, params, spec_for(scenario, settings));
                     row.push_back(result.omega);
                     row.push_back(result.estimated_quadrature_error);
                   } catch (const ConfigError&) {
                     throw;
                   } catch (...) {
                     rethrow_at_point(variable, value, def.token);
                   }
                 }
               rows[point] = std::move(row);
             });

  CsvWriter writer(columns, config.hash(), settings.seed);
  for (const auto& row : rows) writer.add_row(row);
  const std::string path = settings.out_base + ".csv";
  writer.write(path);
  report_written(path, writer, columns.size());
  return kExitOk;
}

// ---------------------------------------------------------------------------
// cluster_sweep: N co-located relays at (R, 0); sweep R. One file per preset.

int run_cluster_sweep(const Config& config) {
  const RunSettings settings = settings_from(config, "cluster_sweep");
  const Scenario base = base_scenario(config);
  const SweepAxis axis = sweep_axis(config, 0.0, 1.0, 41);
  const std::vector<int> counts = config.get_ints("counts", {1, 3, 5});
  const std::vector<std::string> model_tokens =
      config.get_strings("models", {"dependent", "independent"});
  const std::vector<std::string> combiner_tokens = config.get_strings("combiners", {"sc"});
  const bool tag_combiner = combiner_tokens.size() > 1;

  for (const std::string& preset : preset_list(config)) {
    std::vector<std::string> columns{"R"};
    for (int n : counts)
      for (const std::string& m : model_tokens)
        for (const std::string& cb : combiner_tokens) {
          std::string tag = "N" + std::to_string(n) + "_" + model_tag(model_from(m, "models"));
          if (tag_combiner) tag += "_" + cb;
          columns.push_back("omega_" + tag);
          columns.push_back("err_" + tag);
        }

    std::vector<std::vector<double>> rows(axis.values.size());
    run_blocks(static_cast<long>(axis.values.size()), 1, settings.workers,
               [&](long point, long, long) {
                 const double r = axis.values[point];
                 std::vector<double> row{r};
                 for (int n : counts)
                   for (const std::string& m : model_tokens)
                     for (const std::string& cb : combiner_tokens) {
                       ChannelParams params = params_from(config, preset);
                       params.interference = model_from(m, "models");
                       params.combiner = combiner_from(cb, "combiners");
                       Scenario scenario = base;
                       scenario.relays.assign(n, Position{r, 0.0});
                       const std::string series =
                           "N" + std::to_string(n) + "_" + model_tag(params.interference);
                       try {
                         scenario = maybe_nudge(std::move(scenario), params.combiner, settings);
                         const DeliveryResult result =
                             delivery_probability(scenario, params, spec_for(scenario, settings));
                         row.push_back(result.omega);
                         row.push_back(result.estimated_quadrature_error);
                       } catch (const ConfigError&) {
                         throw;
                       } catch (...) {
                         rethrow_at_point("R", r, series);
                       }
                     }
                 rows[point] = std::move(row);
               });

    CsvWriter writer(columns, config.hash(), settings.seed);
    for (const auto& row : rows) writer.add_row(row);
    const std::string path = settings.out_base + preset_suffix(config, preset) + ".csv";
    writer.write(path);
    report_written(path, writer, columns.size());
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// fixed_cluster_sweep: N-1 relays parked at the cluster point, the last one
// sweeps along the source-destination line.

int run_fixed_cluster_sweep(const Config& config) {
  const RunSettings settings = settings_from(config, "fixed_cluster_sweep");
  const Scenario base = base_scenario(config);
  const SweepAxis axis = sweep_axis(config, 0.0, 1.0, 41);
  const std::vector<int> counts = config.get_ints("counts", {2, 3, 4, 5});
  const auto cluster = config.get_positions("cluster", {{0.2, 0.0}});
  if (cluster.size() != 1) throw ConfigError("config key 'cluster' must hold one position");
  const Combiner combiner = combiner_from(config.get_string("combiner", "sc"), "combiner");
  const Interference model = model_from(config.get_string("model", "dependent"), "model");

  for (const std::string& preset : preset_list(config)) {
    std::vector<std::string> columns{"x"};
    for (int n : counts) {
      columns.push_back("omega_N" + std::to_string(n));
      columns.push_back("err_N" + std::to_string(n));
    }

    std::vector<std::vector<double>> rows(axis.values.size());
    run_blocks(static_cast<long>(axis.values.size()), 1, settings.workers,
               [&](long point, long, long) {
                 const double x = axis.values[point];
                 std::vector<double> row{x};
                 for (int n : counts) {
                   if (n < 1) throw ConfigError("config key 'counts' must be positive");
                   ChannelParams params = params_from(config, preset);
                   params.combiner = combiner;
                   params.interference = model;
                   Scenario scenario = base;
                   scenario.relays.assign(n - 1, cluster.front());
                   scenario.relays.push_back({x, 0.0});
                   try {
                     scenario = maybe_nudge(std::move(scenario), combiner, settings);
                     const DeliveryResult result =
                         delivery_probability(scenario, params, spec_for(scenario, settings));
                     row.push_back(result.omega);
                     row.push_back(result.estimated_quadrature_error);
                   } catch (const ConfigError&) {
                     throw;
                   } catch (...) {
                     rethrow_at_point("x", x, "N" + std::to_string(n));
                   }
                 }
                 rows[point] = std::move(row);
               });

    CsvWriter writer(columns, config.hash(), settings.seed);
    for (const auto& row : rows) writer.add_row(row);
    const std::string path = settings.out_base + preset_suffix(config, preset) + ".csv";
    writer.write(path);
    report_written(path, writer, columns.size());
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// random_square: relays placed uniformly in a square of edge L centered
// midway; reports the placement average and spread of omega.

int run_random_square(const Config& config) {
  const RunSettings settings = settings_from(config, "random_square");
  const Scenario base = base_scenario(config);
  const SweepAxis axis = sweep_axis(config, 0.0, 1.0, 11);
  const std::vector<int> counts = config.get_ints("counts", {1, 2, 3, 4, 5});
  const long draws = config.get_long("draws", 50);
  if (draws < 1) throw ConfigError("config key 'draws' must be at least 1");
  const Combiner combiner = combiner_from(config.get_string("combiner", "mrc"), "combiner");
  const Interference model = model_from(config.get_string("model", "dependent"), "model");
  const Position square_center{0.5 * (base.source.x + base.destination.x),
                               0.5 * (base.source.y + base.destination.y)};

  for (const std::string& preset : preset_list(config)) {
    std::vector<std::string> columns{"L"};
    for (int n : counts) {
      columns.push_back("omega_N" + std::to_string(n) + "_mean");
      columns.push_back("omega_N" + std::to_string(n) + "_sd");
    }
    columns.push_back("redraws");

    std::vector<std::vector<double>> rows(axis.values.size());
    run_blocks(
        static_cast<long>(axis.values.size()), 1, settings.workers, [&](long point, long, long) {
          const double edge = axis.values[point];
          if (edge < 0.0) throw ConfigError("config key 'sweep.from': edge must be non-negative");
          std::vector<double> row{edge};
          long redraws = 0;
          for (std::size_t ni = 0; ni < counts.size(); ++ni) {
            const int n = counts[ni];
            ChannelParams params = params_from(config, preset);
            params.combiner = combiner;
            params.interference = model;
            double sum = 0.0, sum_sq = 0.0;
            for (long d = 0; d < draws; ++d) {
              RngStream rng =
                  derive_stream(settings.seed, point * 1000 + static_cast<long>(ni), d);
              Scenario scenario = base;
              // rejection on invalid placements (endpoint collisions,
              // singular subsets); each retry is recorded
              for (int attempt = 0;; ++attempt) {
                scenario.relays.clear();
                for (int k = 0; k < n; ++k)
                  scenario.relays.push_back(
                      {square_center.x + edge * (rng.uniform01() - 0.5),
                       square_center.y + edge * (rng.uniform01() - 0.5)});
                try {
                  validate_scenario(scenario, combiner);
                  break;
                } catch (const Error&) {
                  ++redraws;
                  if (attempt >= 100)
                    throw DegenerateGeometry("random placement kept failing validation");
                }
              }
              try {
                const double omega =
                    delivery_probability(scenario, params, spec_for(scenario, settings)).omega;
                sum += omega;
                sum_sq += omega * omega;
              } catch (const ConfigError&) {
                throw;
              } catch (...) {
                rethrow_at_point("L", edge, "N" + std::to_string(n));
              }
            }
            const double mean = sum / draws;
            const double var = std::max(0.0, sum_sq / draws - mean * mean);
            row.push_back(mean);
            row.push_back(std::sqrt(var));
          }
          row.push_back(static_cast<double>(redraws));
          rows[point] = std::move(row);
        });

    CsvWriter writer(columns, config.hash(), settings.seed);
    for (const auto& row : rows) writer.add_row(row);
    const std::string path = settings.out_base + preset_suffix(config, preset) + ".csv";
    writer.write(path);
    report_written(path, writer, columns.size());
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// throughput_sweep: p * omega against lambda * p.

int run_throughput_sweep(const Config& config) {
  const RunSettings settings = settings_from(config, "throughput_sweep");
  const Scenario base = base_scenario(config);
  const SweepAxis axis = sweep_axis(config, 0.05, 1.0, 20);
  const std::vector<double> lambdas = config.get_doubles("lambdas", {1.0, 3.0});
  const std::vector<int> counts = config.get_ints("counts", {1, 3, 5});
  const std::vector<std::string> model_tokens =
      config.get_strings("models", {"dependent", "independent"});
  const Combiner combiner = combiner_from(config.get_string("combiner", "mrc"), "combiner");
  const auto relay = config.get_positions("cluster", {{0.5, 0.0}});
  if (relay.size() != 1) throw ConfigError("config key 'cluster' must hold one position");

  std::vector<std::string> columns{"lambda", "p", "lambda_p"};
  for (int n : counts)
    for (const std::string& m : model_tokens) {
      const std::string tag =
          "N" + std::to_string(n) + "_" + model_tag(model_from(m, "models"));
      columns.push_back("tput_" + tag);
      columns.push_back("err_" + tag);
    }

  const long total_points = static_cast<long>(lambdas.size() * axis.values.size());
  std::vector<std::vector<double>> rows(total_points);
  run_blocks(total_points, 1, settings.workers, [&](long point, long, long) {
    const double lam = lambdas[point / axis.values.size()];
    const double p = axis.values[point % axis.values.size()];
    std::vector<double> row{lam, p, lam * p};
    for (int n : counts)
      for (const std::string& m : model_tokens) {
        ChannelParams params = params_from(config, config.get_string("preset", ""));
        if (!config.has("theta") && !config.has("preset")) params.theta = 0.5;
        params.lambda = lam;
        params.aloha_p = p;
        params.combiner = combiner;
        params.interference = model_from(m, "models");
        Scenario scenario = base;
        scenario.relays.assign(n, relay.front());
        const std::string series = "N" + std::to_string(n) + "_" + model_tag(params.interference);
        try {
          scenario = maybe_nudge(std::move(scenario), combiner, settings);
          const DeliveryResult result =
              delivery_probability(scenario, params, spec_for(scenario, settings));
          row.push_back(p * result.omega);
          row.push_back(p * result.estimated_quadrature_error);
        } catch (const ConfigError&) {
          throw;
        } catch (...) {
          rethrow_at_point("p", p, series + "_lam" + format_value(lam));
        }
      }
    rows[point] = std::move(row);
  });

  CsvWriter writer(columns, config.hash(), settings.seed);
  for (const auto& row : rows) writer.add_row(row);
  const std::string path = settings.out_base + ".csv";
  writer.write(path);
  report_written(path, writer, columns.size());
  return kExitOk;
}

// ---------------------------------------------------------------------------
// retransmission_cdf: attempt-count CDF per series; the non-cooperative
// baseline doubles the source power and drops the relays.

int run_retransmission_cdf(const Config& config) {
  const RunSettings settings = settings_from(config, "retransmission_cdf");
  const Scenario base = base_scenario(config);
  const int t_max = static_cast<int>(config.get_long("tmax", 5));
  if (t_max < 1) throw ConfigError("config key 'tmax' must be at least 1");
  const std::vector<int> counts = config.get_ints("counts", {3});
  const bool baseline = config.get_bool("baseline", false);
  const std::vector<std::string> model_tokens =
      config.get_strings("models", {"dependent", "independent"});
  const Combiner combiner = combiner_from(config.get_string("combiner", "mrc"), "combiner");
  const auto cluster = config.get_positions("cluster", {{0.5, 0.0}});
  if (cluster.size() != 1) throw ConfigError("config key 'cluster' must hold one position");
  const std::vector<std::string> engines = config.get_strings("engines", {"conditional"});
  const long replicates = config.get_long("replicates", 10000);
  const long trials = config.get_long("trials", 200000);
  const double window =
      config.get_double("window_radius", kDefaultConditionalWindowRadius);

  struct SeriesDef {
    std::string token;
    Scenario scenario;
    int n = 0;
  };
  std::vector<SeriesDef> series;
  for (int n : counts) {
    if (n < 0) throw ConfigError("config key 'counts' must be non-negative");
    Scenario s = base;
    s.relays.assign(n, cluster.front());
    series.push_back({"N" + std::to_string(n), std::move(s), n});
  }
  if (baseline) {
    Scenario s = base;
    s.relays.clear();
    s.source_power_scale = 2.0 * base.source_power_scale;
    series.push_back({"noncoop", std::move(s), 0});
  }

  for (const std::string& preset : preset_list(config)) {
    std::vector<std::string> columns{"T"};
    // column block per (series, model, engine)
    std::vector<AttemptDistribution> results;
    for (const SeriesDef& def : series)
      for (const std::string& m : model_tokens)
        for (const std::string& engine : engines) {
          ChannelParams params = params_from(config, preset);
          params.combiner = combiner;
          params.interference = model_from(m, "models");
          const std::string tag = def.token + "_" + model_tag(params.interference) + "_" +
                                  (engine == "conditional" ? "cond" : "mc");
          columns.push_back("cdf_" + tag);
          columns.push_back("se_" + tag);
          const std::size_t series_index = results.size();
          RngStream rng = derive_stream(settings.seed, 7000 + series_index, 0);
          try {
            const Scenario scenario = maybe_nudge(def.scenario, combiner, settings);
            const QuadratureSpec spec = spec_for(scenario, settings);
            if (engine == "conditional") {
              if (params.interference == Interference::Dependent) {
                results.push_back(attempt_distribution_dependent(
                    scenario, params, t_max, replicates, rng, spec,
                    {window, settings.workers}));
              } else {
                // independent attempts follow the geometric law exactly
                ChannelParams ind = params;
                const double omega = delivery_probability(scenario, ind, spec).omega;
                results.push_back(attempt_distribution_independent(omega, t_max));
              }
            } else if (engine == "montecarlo") {
              results.push_back(estimate_attempts(scenario, params, t_max, trials, rng,
                                                  {kDefaultSimulationWindowRadius,
                                                   settings.workers}));
            } else {
              throw ConfigError("config key 'engines': unknown engine '" + engine + "'");
            }
          } catch (const ConfigError&) {
            throw;
          } catch (...) {
            rethrow_at_point("T", t_max, tag);
          }
        }

    CsvWriter writer(columns, config.hash(), settings.seed);
    for (int t = 1; t <= t_max; ++t) {
      std::vector<double> row{static_cast<double>(t)};
      for (const AttemptDistribution& dist : results) {
        row.push_back(dist.cdf[t - 1]);
        row.push_back(dist.cdf_stderr[t - 1]);
      }
      writer.add_row(row);
    }
    const std::string path = settings.out_base + preset_suffix(config, preset) + ".csv";
    writer.write(path);
    report_written(path, writer, columns.size());
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------

int run_acceptance_kind(const Config& config) {
  AcceptanceOptions options;
  options.budget = config.get_double("acceptance.budget", 1.0);
  if (config.has("trials")) {
    // interpret a trials override as a direct budget on the 1e6-trial cells
    const long trials = config.get_long("trials", 0);
    if (trials <= 0) throw ConfigError("config key 'trials' must be positive");
    options.budget = static_cast<double>(trials) / 1e6;
  }
  if (!(options.budget > 0.0)) throw ConfigError("config key 'acceptance.budget' must be positive");
  options.only = config.get_ints("acceptance.only", {});
  options.seed = static_cast<std::uint64_t>(config.get_long("seed", 20250815));
  options.workers = static_cast<int>(config.get_long("workers", 1));
  const AcceptanceReport report = run_acceptance(options);
  return report.all_pass() ? kExitOk : kExitAcceptanceFailure;
}

}  // namespace

int run_experiment(const Config& config) {
  try {
    const std::string kind = config.require_string("kind");
    if (kind == "point") return run_point(config);
    if (kind == "relay_sweep") return run_relay_sweep(config);
    if (kind == "cluster_sweep") return run_cluster_sweep(config);
    if (kind == "fixed_cluster_sweep") return run_fixed_cluster_sweep(config);
    if (kind == "random_square") return run_random_square(config);
    if (kind == "throughput_sweep") return run_throughput_sweep(config);
    if (kind == "retransmission_cdf") return run_retransmission_cdf(config);
    if (kind == "acceptance") return run_acceptance_kind(config);
    throw ConfigError("unknown experiment kind '" + kind + "'");
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const TooManyRelays& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const Error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumericalFailure;
  }
}

}  // namespace coopnet
