#include "wordconf/prob.hpp"

#include <cmath>
#include <numeric>

#include "wordconf/error.hpp"
#include "wordconf/kernels.hpp"

namespace wordconf {

Temperature::Temperature(double tau) : tau_(tau) {
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw usage_error("temperature must be a positive finite number, got " +
                      std::to_string(tau));
  }
}

void temperature_scale_inplace(std::span<double> p, Temperature tau,
                               std::span<double> scratch) {
  if (tau.value() == 1.0) return;  // exact identity
  const auto& k = kern::ops();
  const std::size_t n = p.size();
  k.log_floor(p.data(), scratch.data(), n);
  const double m = k.max(scratch.data(), n);
  const double inv_tau = 1.0 / tau.value();
  k.exp_affine(scratch.data(), inv_tau, -m * inv_tau, p.data(), n);
  const double z = k.sum(p.data(), n);
  k.scale(p.data(), 1.0 / z, n);
}

std::vector<double> temperature_scale(std::span<const double> p, Temperature tau) {
  std::vector<double> out(p.begin(), p.end());
  std::vector<double> scratch(p.size());
  temperature_scale_inplace(out, tau, scratch);
  return out;
}

namespace {

std::string subset_run_id(const std::vector<PosteriorRun>& runs,
                          std::span<const std::size_t> subset) {
  if (subset.size() == 1) return runs[subset[0]].run_id;
  std::string id = "mean(";
  for (std::size_t i = 0; i < subset.size(); ++i) {
    if (i) id.push_back(',');
    id += runs[subset[i]].run_id;
  }
  id.push_back(')');
  return id;
}

}  // namespace

PosteriorRun average_runs(const std::vector<PosteriorRun>& runs,
                          std::span<const std::size_t> subset,
                          std::size_t vocab_size) {
  if (subset.empty()) throw usage_error("run subset must be non-empty");
  const std::size_t n_steps = runs[subset[0]].steps.size();
  for (std::size_t idx : subset) {
    if (idx >= runs.size()) {
      throw usage_error("run index " + std::to_string(idx) + " out of range (" +
                        std::to_string(runs.size()) + " runs)");
    }
    if (runs[idx].steps.size() != n_steps) {
      throw data_error("run '" + runs[idx].run_id + "' has " +
                       std::to_string(runs[idx].steps.size()) +
                       " steps, expected " + std::to_string(n_steps));
    }
  }

  const auto& k = kern::ops();
  PosteriorRun out;
  out.run_id = subset_run_id(runs, subset);
  out.steps.reserve(n_steps);
  std::vector<double> acc(vocab_size);
  std::vector<double> tmp(vocab_size);
  const double inv_n = 1.0 / static_cast<double>(subset.size());
  for (std::size_t step = 0; step < n_steps; ++step) {
    densify(runs[subset[0]].steps[step], vocab_size, acc);
    for (std::size_t i = 1; i < subset.size(); ++i) {
      densify(runs[subset[i]].steps[step], vocab_size, tmp);
      k.accumulate(tmp.data(), acc.data(), vocab_size);
    }
    if (subset.size() > 1) k.scale(acc.data(), inv_n, vocab_size);
    out.steps.push_back(TokenPosterior::make_dense(acc));
  }
  return out;
}

std::vector<std::size_t> resolve_run_subset(const UtteranceRecord& rec,
                                            const PipelineOptions& options) {
  std::vector<std::size_t> subset = options.runs;
  if (subset.empty()) {
    if (options.combine) {
      subset.resize(rec.runs.size());
      std::iota(subset.begin(), subset.end(), 0);
    } else {
      subset.push_back(0);
    }
  }
  for (std::size_t idx : subset) {
    if (idx >= rec.runs.size()) {
      throw data_error("utt '" + rec.utt_id + "': run index " +
                       std::to_string(idx) + " out of range (" +
                       std::to_string(rec.runs.size()) + " runs)");
    }
  }
  if (!options.combine && subset.size() != 1) {
    throw usage_error("without --combine the run selection must name exactly one run");
  }
  return subset;
}

PosteriorRun transform_pipeline(const UtteranceRecord& rec,
                                const PipelineOptions& options,
                                std::size_t vocab_size) {
  const std::vector<std::size_t> subset = resolve_run_subset(rec, options);
  const std::size_t n_steps = rec.n_tokens();

  std::optional<Temperature> tau;
  if (options.tau) tau.emplace(*options.tau);

  // Scale first, then average; the order is fixed.
  std::vector<PosteriorRun> scaled;
  scaled.reserve(subset.size());
  std::vector<double> scratch(vocab_size);
  for (std::size_t idx : subset) {
    PosteriorRun run;
    run.run_id = rec.runs[idx].run_id;
    run.steps.reserve(n_steps);
    for (const TokenPosterior& step : rec.runs[idx].steps) {
      std::vector<double> row = densify(step, vocab_size);
      if (tau) temperature_scale_inplace(row, *tau, scratch);
      run.steps.push_back(TokenPosterior::make_dense(std::move(row)));
    }
    scaled.push_back(std::move(run));
  }

  if (!options.combine) return std::move(scaled.front());
  std::vector<std::size_t> all(scaled.size());
  std::iota(all.begin(), all.end(), 0);
  return average_runs(scaled, all, vocab_size);
}

}  // namespace wordconf
