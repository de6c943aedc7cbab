#include "chl/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "json.hpp"

#include "chl/disc.hpp"
#include "chl/parallel.hpp"

namespace chl {

Quantiles quantiles(std::vector<double> samples) {
  if (samples.empty()) return {};
  std::sort(samples.begin(), samples.end());
  const auto at = [&](double q) {
    const double pos = q * static_cast<double>(samples.size() - 1);
    const auto lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, samples.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return samples[lo] + frac * (samples[hi] - samples[lo]);
  };
  return Quantiles{at(0.05), at(0.25), at(0.5), at(0.75), at(0.95)};
}

double median(std::vector<double> samples) { return quantiles(std::move(samples)).median; }

ReplicaResult run_replica_summary(const RunConfig& config, std::uint32_t replica,
                                  bool with_geometry) {
  const std::vector<double> grid = config.effective_t_grid();
  const std::uint64_t steps = config.steps();
  const double nd = static_cast<double>(config.n);
  const double logn = std::log(nd);

  ReplicaResult result;
  result.replica = replica;
  result.stream_seed = replica_stream_seed(config.seed, replica);

  GrowthState state(config.n, result.stream_seed, config.t);

  // Checkpoint step for grid entry i, floored at 1 to stay inside the run.
  std::vector<std::uint64_t> targets(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    targets[i] = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(nd * grid[i]));
  }
  result.lambda_at.assign(grid.size(), 0.0);
  result.right_at.assign(grid.size(), 0.0);
  result.left_at.assign(grid.size(), 0.0);
  std::size_t next_target = 0;

  // Streaming stopping-time tracker.
  const double l_n = threshold_length(config.n);
  double stop_threshold = l_n;
  bool past_first = false;
  std::uint64_t prev_stop = 0;
  double prev_lambda = 0.0;

  std::vector<double> attachments;
  if (with_geometry) {
    attachments.reserve(steps);
    attachments.push_back(0.0);
  }

  const auto visit = [&](std::uint64_t k) {
    while (next_target < targets.size() && targets[next_target] == k) {
      result.lambda_at[next_target] = state.lambda();
      result.right_at[next_target] = state.right();
      result.left_at[next_target] = state.left();
      ++next_target;
    }
    if (state.lambda() >= stop_threshold) {
      if (!past_first) {
        result.t1_step = k;
        past_first = true;
      } else {
        const std::uint64_t gap = k - prev_stop;
        const double base = (nd / logn) * prev_lambda * prev_lambda;
        const double m_k = 2.0 * config.delta / (1.0 + config.eps_window) * base;
        const double n_k = 2.0 * config.delta * (1.0 + config.eps_window) * base;
        ++result.window_total;
        if (static_cast<double>(gap) >= m_k && static_cast<double>(gap) <= n_k) {
          ++result.window_hits;
        }
      }
      prev_stop = k;
      prev_lambda = state.lambda();
      stop_threshold = (1.0 + config.delta) * state.lambda();
    }
  };

  visit(1);
  for (std::uint64_t k = 2; k <= steps; ++k) {
    const StepRecord rec = state.step();
    if (with_geometry) attachments.push_back(rec.x);
    visit(k);
  }

  result.lambda_final = state.lambda();
  result.scales = scale_push_stats(state.right_ledger(), config.n);

  // Quadratic-growth fit lambda^2 ~ c t log n over the tail of the grid.
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] < 0.1) continue;
    const double u = grid[i] * logn;
    num += result.lambda_at[i] * result.lambda_at[i] * u;
    den += u * u;
  }
  result.ode_c = den > 0.0 ? num / den : 0.0;

  if (with_geometry) {
    result.geometry = summarize_geometry(attachments, config.n, config.envelope_eps,
                                         config.envelope_points);
  }
  return result;
}

EnsembleSummary run_ensemble(const RunConfig& config, bool with_geometry) {
  config.validate();
  const std::uint32_t replicas = config.replicas;
  std::vector<ReplicaResult> results(replicas);
  std::vector<std::string> errors(replicas);

  parallel_for(replicas, [&](std::size_t begin, std::size_t end) {
    for (std::size_t r = begin; r < end; ++r) {
      try {
        results[r] = run_replica_summary(config, static_cast<std::uint32_t>(r),
                                         with_geometry);
      } catch (const std::exception& e) {
        errors[r] = e.what();
      }
    }
  });
  for (std::uint32_t r = 0; r < replicas; ++r) {
    if (!errors[r].empty()) {
      throw std::runtime_error("ensemble: replica " + std::to_string(r) +
                               " (stream seed " +
                               std::to_string(replica_stream_seed(config.seed, r)) +
                               ") failed: " + errors[r]);
    }
  }

  EnsembleSummary summary;
  summary.n = config.n;
  summary.t = config.t;
  summary.replicas = replicas;
  summary.seed = config.seed;
  summary.delta = config.delta;
  summary.eps_window = config.eps_window;
  summary.t_grid = config.effective_t_grid();

  const double nd = static_cast<double>(config.n);
  const double logn = std::log(nd);
  summary.t1_bound = std::pow(logn, 7);

  summary.below_theorem_range.resize(summary.t_grid.size());
  for (std::size_t i = 0; i < summary.t_grid.size(); ++i) {
    summary.below_theorem_range[i] =
        summary.t_grid[i] < std::pow(logn, 9) / nd ? 1 : 0;
  }

  for (std::size_t i = 0; i < summary.t_grid.size(); ++i) {
    const double denom = std::sqrt(summary.t_grid[i] * logn);
    std::vector<double> lam, rr, ll, share;
    lam.reserve(replicas);
    for (const auto& res : results) {
      lam.push_back(res.lambda_at[i] / denom);
      rr.push_back(res.right_at[i] / denom);
      ll.push_back(res.left_at[i] / denom);
      share.push_back(res.right_at[i] / res.lambda_at[i]);
    }
    summary.lambda_ratio.push_back(quantiles(std::move(lam)));
    summary.right_ratio.push_back(quantiles(std::move(rr)));
    summary.left_ratio.push_back(quantiles(std::move(ll)));
    summary.right_share.push_back(quantiles(std::move(share)));
  }

  std::uint64_t hits = 0, total = 0;
  for (const auto& res : results) {
    hits += res.window_hits;
    total += res.window_total;
    summary.t1_steps.push_back(res.t1_step);
    summary.ode_c.push_back(res.ode_c);
    if (res.geometry) summary.geometry.push_back(*res.geometry);
  }
  summary.window_total = total;
  summary.window_hit_rate =
      total > 0 ? static_cast<double>(hits) / static_cast<double>(total) : 0.0;

  // Pool the per-scale statistics: counts add, means weight by count.
  std::map<std::int32_t, ScalePushStat> pooled;
  for (const auto& res : results) {
    for (const auto& stat : res.scales) {
      auto [it, fresh] = pooled.try_emplace(stat.j, stat);
      if (!fresh) {
        auto& agg = it->second;
        const double total_count =
            static_cast<double>(agg.count) + static_cast<double>(stat.count);
        agg.mean = (agg.mean * static_cast<double>(agg.count) +
                    stat.mean * static_cast<double>(stat.count)) /
                   total_count;
        agg.count += stat.count;
      }
    }
  }
  for (const auto& [j, stat] : pooled) summary.pooled_scales.push_back(stat);
  return summary;
}

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json quantiles_json(const std::vector<Quantiles>& qs) {
  ordered_json arr = ordered_json::array();
  for (const auto& q : qs) {
    arr.push_back(ordered_json{{"q05", q.q05},
                               {"q25", q.q25},
                               {"median", q.median},
                               {"q75", q.q75},
                               {"q95", q.q95}});
  }
  return arr;
}

}  // namespace

std::string ensemble_summary_to_json(const EnsembleSummary& summary) {
  ordered_json doc;
  doc["meta"] = ordered_json{{"tool", "chl"}, {"format", 1}};
  doc["config"] = ordered_json{{"n", summary.n},
                               {"t", summary.t},
                               {"replicas", summary.replicas},
                               {"seed", summary.seed},
                               {"delta", summary.delta},
                               {"eps-window", summary.eps_window}};
  doc["t_grid"] = summary.t_grid;
  doc["below_theorem_range"] = summary.below_theorem_range;
  doc["lambda_ratio"] = quantiles_json(summary.lambda_ratio);
  doc["right_ratio"] = quantiles_json(summary.right_ratio);
  doc["left_ratio"] = quantiles_json(summary.left_ratio);
  doc["right_share"] = quantiles_json(summary.right_share);
  doc["stopping"] = ordered_json{{"window_hit_rate", summary.window_hit_rate},
                                 {"window_total", summary.window_total},
                                 {"t1_steps", summary.t1_steps},
                                 {"t1_bound_log7", summary.t1_bound}};
  doc["ode_fit_c"] = ordered_json{{"per_replica", summary.ode_c},
                                  {"median", median(summary.ode_c)}};
  ordered_json scales = ordered_json::array();
  for (const auto& s : summary.pooled_scales) {
    scales.push_back(ordered_json{{"j", s.j},
                                  {"count", s.count},
                                  {"mean", s.mean},
                                  {"predicted_lo", s.predicted_lo},
                                  {"predicted_hi", s.predicted_hi},
                                  {"predicted_var_bound", s.predicted_var_bound}});
  }
  doc["scales"] = scales;
  if (!summary.geometry.empty()) {
    ordered_json geo = ordered_json::array();
    for (const auto& g : summary.geometry) {
      geo.push_back(ordered_json{{"diameter", g.diameter},
                                 {"max_height", g.max_height},
                                 {"hcap", g.hcap},
                                 {"t", g.t}});
    }
    doc["geometry"] = geo;
  }
  return doc.dump(2) + "\n";
}

std::string scaling_to_csv(const EnsembleSummary& summary) {
  std::string out =
      "t,below_theorem_range,lambda_ratio_q25,lambda_ratio_median,lambda_ratio_q75,"
      "right_ratio_median,left_ratio_median,right_share_median\n";
  for (std::size_t i = 0; i < summary.t_grid.size(); ++i) {
    out += std::to_string(summary.t_grid[i]);
    out += ',';
    out += summary.below_theorem_range[i] ? '1' : '0';
    out += ',';
    out += std::to_string(summary.lambda_ratio[i].q25);
    out += ',';
    out += std::to_string(summary.lambda_ratio[i].median);
    out += ',';
    out += std::to_string(summary.lambda_ratio[i].q75);
    out += ',';
    out += std::to_string(summary.right_ratio[i].median);
    out += ',';
    out += std::to_string(summary.left_ratio[i].median);
    out += ',';
    out += std::to_string(summary.right_share[i].median);
    out += '\n';
  }
  return out;
}

DiscEnsembleSummary run_disc_ensemble(const RunConfig& config, std::uint64_t max_steps) {
  config.validate();
  DiscEnsembleSummary summary;
  summary.n = config.n;
  summary.alpha = config.alpha;
  summary.replicas = config.replicas;
  summary.max_steps = max_steps == 0 ? 2 * config.n : max_steps;
  summary.prediction = tau_alpha_prediction(config.n, config.alpha);
  summary.tau.assign(config.replicas, -1);
  summary.collided.assign(config.replicas, 0);

  std::vector<std::string> errors(config.replicas);
  parallel_for(config.replicas, [&](std::size_t begin, std::size_t end) {
    for (std::size_t r = begin; r < end; ++r) {
      try {
        const std::uint64_t seed =
            replica_stream_seed(config.seed, static_cast<std::uint64_t>(r));
        const DiscRunResult res =
            disc_run(config.n, seed, config.alpha, summary.max_steps);
        if (res.tau) summary.tau[r] = static_cast<std::int64_t>(*res.tau);
        summary.collided[r] = res.arm_collision ? 1 : 0;
      } catch (const std::exception& e) {
        errors[r] = e.what();
      }
    }
  });
  for (std::uint32_t r = 0; r < config.replicas; ++r) {
    if (!errors[r].empty()) {
      throw std::runtime_error("disc ensemble: replica " + std::to_string(r) +
                               " (stream seed " +
                               std::to_string(replica_stream_seed(config.seed, r)) +
                               ") failed: " + errors[r]);
    }
  }

  std::vector<double> tau_over_n, ratio;
  for (const auto tau : summary.tau) {
    if (tau < 0) continue;
    const double td = static_cast<double>(tau);
    tau_over_n.push_back(td / static_cast<double>(summary.n));
    ratio.push_back(td / summary.prediction);
  }
  summary.tau_over_n_median = median(tau_over_n);
  summary.ratio_to_prediction_median = median(ratio);
  return summary;
}

std::string disc_summary_to_json(const DiscEnsembleSummary& summary) {
  ordered_json doc;
  doc["meta"] = ordered_json{{"tool", "chl"}, {"format", 1}};
  doc["config"] = ordered_json{{"n", summary.n},
                               {"alpha", summary.alpha},
                               {"replicas", summary.replicas},
                               {"max_steps", summary.max_steps}};
  doc["tau"] = summary.tau;
  doc["collided"] = summary.collided;
  doc["prediction"] = summary.prediction;
  doc["tau_over_n_median"] = summary.tau_over_n_median;
  doc["ratio_to_prediction_median"] = summary.ratio_to_prediction_median;
  return doc.dump(2) + "\n";
}

}  // namespace chl
