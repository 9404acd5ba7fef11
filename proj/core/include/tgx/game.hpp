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

#ifndef TGX_GAME_HPP
#define TGX_GAME_HPP

#include <cstddef>
#include <cstdint>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "tgx/ctdg.hpp"
#include "tgx/masking.hpp"
#include "tgx/model.hpp"
#include "tgx/rng.hpp"

namespace tgx {

// The event-level cooperative game: players are the subgraph's events and
// val(S) = f(mask(S)) - f(mask(empty)). The empty coalition has value zero by
// construction. Value calls are memoized per coalition; the baseline is
// evaluated once, lazily.
class EventGame {
 public:
  EventGame(const Model& model, ComputationalSubgraph sg,
            AverageEventStats stats, MaskMode mode);

  std::size_t num_players() const { return sg_.events.size(); }
  const ComputationalSubgraph& subgraph() const { return sg_; }
  const AverageEventStats& stats() const { return stats_; }
  const Model& model() const { return model_; }
  MaskMode mode() const { return mode_; }

  double baseline() const;

  // val(S). Exactly zero for the empty coalition.
  double value(const EventCoalition& coalition) const;

  // Prediction on the masked subgraph keeping exactly `coalition`, without
  // baseline subtraction or memoization.
  double raw_prediction(const EventCoalition& coalition) const;

 private:
  const Model& model_;
  ComputationalSubgraph sg_;
  AverageEventStats stats_;
  MaskMode mode_;
  mutable std::optional<double> baseline_;
  mutable std::unordered_map<std::string, double> cache_;
  mutable std::mutex mu_;
};

// The feature-level game of one event: a Monte Carlo estimate of the event's
// Shapley value under a partial feature coalition. Holds the k sampled event
// coalitions K (excluding the target event) and the cached predictions
// y_minus_e on subgraphs where the target event is fully averaged.
class FeatureGame {
 public:
  FeatureGame(const EventGame& base, std::size_t target_event, std::size_t k,
              std::uint64_t seed, bool size_stratified = true);

  // Fills y_minus_e with k model calls. Must run before value()/cell().
  void evaluate_baselines(std::size_t workers = 1);

  std::size_t k() const { return coalitions_.size(); }
  std::size_t target_event() const { return target_event_; }
  std::size_t num_feature_players() const;
  const EventGame& event_game() const { return base_; }
  const std::vector<std::vector<std::size_t>>& coalitions() const { return coalitions_; }
  const std::vector<double>& baseline_predictions() const { return y_minus_e_; }

  // Prediction with events K_j plus the target event carrying only the
  // feature players in `li`; one model call.
  double cell(std::size_t j, const FeatureCoalition& li) const;

  // Mean over j of cell(j, li) - y_minus_e[j]: the estimated Shapley value of
  // the target event given feature coalition li. Zero for the empty coalition
  // (the fully masked event equals its average-event replacement).
  double value(const FeatureCoalition& li) const;

 private:
  const EventGame& base_;
  std::size_t target_event_;
  std::vector<std::vector<std::size_t>> coalitions_;  // indices, target excluded
  std::vector<double> y_minus_e_;
  bool baselines_ready_ = false;
};

// Draws a coalition from the other players (all except `excluded`): by
// default the size is uniform on {0, ..., m-1} and the subset uniform within
// the size, which makes mean marginal contributions an unbiased Shapley
// estimator. The uniform-subset law (each other player kept with probability
// 1/2) is available behind the flag.
std::vector<std::size_t> draw_event_coalition(std::size_t num_players,
                                              std::size_t excluded, Rng& rng,
                                              bool size_stratified);

}  // namespace tgx

#endif  // TGX_GAME_HPP
