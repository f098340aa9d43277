#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "wordconf/types.hpp"

namespace wordconf {

// Temperature for probability re-shaping. Strictly positive and finite.
class Temperature {
 public:
  explicit Temperature(double tau);
  double value() const { return tau_; }

 private:
  double tau_;
};

// In-place temperature scaling of a dense probability row:
//   p_i  ->  p_i^(1/tau) / sum_j p_j^(1/tau)
// computed in the log domain as exp((log p_i)/tau - logsumexp((log p)/tau)),
// so extreme temperatures neither overflow nor underflow. tau == 1 leaves the
// row bit-for-bit untouched. `scratch` must match p in size.
void temperature_scale_inplace(std::span<double> p, Temperature tau,
                               std::span<double> scratch);
std::vector<double> temperature_scale(std::span<const double> p, Temperature tau);

// Arithmetic mean of the selected runs, step by step, on densified rows.
// Every run must have the same step count. The result's run_id names the
// sources, e.g. "mean(a,b,c)".
PosteriorRun average_runs(const std::vector<PosteriorRun>& runs,
                          std::span<const std::size_t> subset,
                          std::size_t vocab_size);

struct PipelineOptions {
  std::optional<double> tau;         // scale first, if set
  bool combine = false;              // then average the selected runs
  std::vector<std::size_t> runs;     // empty: all runs if combine, else {0}
};

// Fixed order: densify, temperature-scale each step, then average. Without
// combining, the selection must name exactly one run. Output steps are dense.
PosteriorRun transform_pipeline(const UtteranceRecord& rec,
                                const PipelineOptions& options,
                                std::size_t vocab_size);

// Resolves the run selection for a record (bounds-checked).
std::vector<std::size_t> resolve_run_subset(const UtteranceRecord& rec,
                                            const PipelineOptions& options);

}  // namespace wordconf
