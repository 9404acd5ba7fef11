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

#ifndef TGX_OWEN_HPP
#define TGX_OWEN_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "tgx/game.hpp"
#include "tgx/shapley.hpp"

namespace tgx {

// A partition of flat players {0, ..., P-1} into disjoint groups, each given
// as a bitmask. Groups must cover the player set exactly.
struct GroupPartition {
  std::vector<std::uint32_t> groups;

  std::size_t num_players() const;
  void validate() const;
};

// Direct evaluation of the Owen value: the outer sum ranges over coalitions
// of whole other groups, the inner sum over subsets within the player's own
// group, both weighted by their permutation counts. Enumeration oracle;
// at most 20 total players.
std::vector<double> owen_exact(const std::function<double(std::uint32_t)>& val,
                               const GroupPartition& partition);

// The same quantity computed the two-step way: for every subset L of the
// target group, the exact Shapley value of that partially-present group in
// the game among groups, then exact Shapley values over the group's members
// with those values as the game. Returns one value per member of
// groups[group_index], ascending bit order. Independent route from
// owen_exact; the two must agree.
std::vector<double> owen_two_step_exact(
    const std::function<double(std::uint32_t)>& val,
    const GroupPartition& partition, std::size_t group_index);

struct OwenConfig {
  std::size_t k = 550;  // event-coalition samples
  std::size_t l = 0;    // feature-coalition rows; 0 means 2*|F| + 2048
  std::uint64_t seed = 0;
  bool size_stratified = true;

  std::size_t resolved_l(std::size_t num_feature_players) const {
    return l > 0 ? l : 2 * num_feature_players + 2048;
  }
};

struct FeatureExplanation {
  EventId event_id = 0;
  std::vector<double> omega;  // per feature player, canonical slot order
  double phi_event_estimate = 0.0;
  std::size_t k_used = 0;
  std::size_t l_used = 0;
  std::uint64_t seed = 0;
  bool rank_deficient = false;
};

struct TwoStepEstimate {
  std::vector<double> omega;
  double phi_estimate = 0.0;
  std::size_t k_used = 0;
  std::size_t l_used = 0;
  bool rank_deficient = false;
};

// Evaluation callback of the sampled two-step estimator: a coalition of the
// other groups (indices into 0..num_other-1), the feature mask of the target
// group, and whether the target participates at all.
using TwoStepEval = std::function<double(const std::vector<std::size_t>& others,
                                         std::uint32_t feature_mask,
                                         bool target_present)>;

// Sampled two-step Owen estimation over an abstract game. Draws k coalitions
// K of the other groups and l feature rows L (the grand feature coalition is
// always one of the l rows; the empty one is the pinned zero constraint).
// Evaluates the k baselines and the l*k grid - exactly k + k*l calls - and
// solves the kernel regression over row means. Grid cells are evaluated in
// parallel; the reduction order is fixed.
TwoStepEstimate owen_two_step_estimate(std::size_t num_other,
                                       std::size_t num_feature_players,
                                       const TwoStepEval& eval, std::size_t k,
                                       std::size_t l, std::uint64_t seed,
                                       bool size_stratified = true,
                                       std::size_t workers = 1);

// The feature explainer: Owen values of one event's feature players
// (feature columns, timestamp, source node), estimated with k sampled event
// coalitions and l feature rows. The sum of the returned omegas equals
// phi_event_estimate, the event's co-estimated Shapley value, to solver
// precision.
FeatureExplanation explain_event_features(const Model& model,
                                          const ComputationalSubgraph& sg,
                                          std::size_t event_player,
                                          const AverageEventStats& stats,
                                          const OwenConfig& cfg,
                                          std::size_t workers = 1);

// Exact two-step Owen values of one event's feature players, by full
// enumeration of both levels. Verification oracle for small subgraphs
// (at most 12 events and 12 feature players).
std::vector<double> owen_two_step_exact(const Model& model,
                                        const ComputationalSubgraph& sg,
                                        std::size_t event_player,
                                        const AverageEventStats& stats);

// The flat feature-level game over all |E| * |F| players of a subgraph
// (event-major layout), with the event-wise partition. val(0) = 0. Model
// calls are memoized; intended for oracle cross-checks on small subgraphs.
struct FlatFeatureGame {
  std::function<double(std::uint32_t)> val;
  GroupPartition partition;
  std::size_t num_events = 0;
  std::size_t players_per_event = 0;
};

FlatFeatureGame make_flat_feature_game(const Model& model,
                                       const ComputationalSubgraph& sg,
                                       const AverageEventStats& stats);

}  // namespace tgx

#endif  // TGX_OWEN_HPP
