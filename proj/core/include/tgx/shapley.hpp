/*
 * Copyright 2026 The tgx authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef TGX_SHAPLEY_HPP
#define TGX_SHAPLEY_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "tgx/game.hpp"

namespace tgx {

// One row of the kernel regression: a coalition vector z with 0 < |z| < M,
// its kernel weight, and (after evaluation) the game value.
struct CoalitionSample {
  std::vector<std::uint8_t> z;
  double weight = 1.0;
  double value = 0.0;
};

struct KernelConfig {
  std::size_t budget = 0;  // rows; 0 means the default 2*M + 2048
  std::uint64_t seed = 0;
  bool paired_sampling = true;

  std::size_t resolved_budget(std::size_t num_players) const {
    return budget > 0 ? budget : 2 * num_players + 2048;
  }
};

// (M-1) / (C(M,s) * s * (M-s)); defined for 0 < s < M. The empty and grand
// coalitions carry infinite weight and enter the solve as hard constraints,
// never as rows.
double shapley_kernel_weight(std::size_t num_players, std::size_t coalition_size);

// Coalition rows for the kernel regression. When all 2^M - 2 proper nonempty
// coalitions fit in the budget they are enumerated with exact kernel weights;
// otherwise sizes are drawn proportional to the aggregate kernel mass per
// size, subsets uniformly within a size (paired with their complements when
// paired_sampling is on) and rows carry unit weight.
std::vector<CoalitionSample> sample_coalitions(std::size_t num_players,
                                               const KernelConfig& cfg);

struct KernelSolution {
  std::vector<double> phi;
  bool rank_deficient = false;
};

// Kernel-weighted least squares over evaluated rows with the intercept pinned
// to val_empty and efficiency enforced by variable elimination, so that
// sum(phi) = val_full - val_empty holds to solver precision. Rank-deficient
// systems return the minimum-norm solution with the diagnostic flag set.
KernelSolution kernelshap_solve(const std::vector<CoalitionSample>& samples,
                                std::size_t num_players, double val_empty,
                                double val_full);

// Exact Shapley values by direct enumeration of all coalitions; the oracle
// the sampling path is validated against. `val` maps a coalition bitmask to
// its value; num_players <= 20.
std::vector<double> shapley_exact(const std::function<double(std::uint32_t)>& val,
                                  std::size_t num_players);

struct EventExplanation {
  double base_value = 0.0;  // val(empty), zero by construction
  std::vector<double> phi;  // one per event player
  double grand_value = 0.0;
  std::size_t samples_used = 0;
  std::uint64_t seed = 0;
  bool rank_deficient = false;
};

// The event explainer: masks coalitions of subgraph events, evaluates the
// model, and fits the kernel regression. The sign of phi encodes direction of
// influence on the prediction, the magnitude its strength. Coalition rows are
// evaluated in parallel across `workers`; results do not depend on the worker
// count.
EventExplanation explain_events(const Model& model, const ComputationalSubgraph& sg,
                                const AverageEventStats& stats, MaskMode mode,
                                const KernelConfig& cfg, std::size_t workers = 1);

// As above but over an arbitrary pre-built game; shared by the CLI self-test
// and oracle-equivalence suites.
EventExplanation explain_game(const EventGame& game, const KernelConfig& cfg,
                              std::size_t workers = 1);

}  // namespace tgx

#endif  // TGX_SHAPLEY_HPP
