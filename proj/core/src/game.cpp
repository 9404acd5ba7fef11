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

#include "tgx/game.hpp"

#include <stdexcept>

#include "tgx/parallel.hpp"
#include "tgx/rng.hpp"

namespace tgx {
namespace {

std::string coalition_key(const std::vector<std::size_t>& present, std::size_t n) {
  std::string key((n + 7) / 8, '\0');
  for (std::size_t p : present) key[p / 8] |= static_cast<char>(1 << (p % 8));
  return key;
}

}  // namespace

EventGame::EventGame(const Model& model, ComputationalSubgraph sg,
                     AverageEventStats stats, MaskMode mode)
    : model_(model), sg_(std::move(sg)), stats_(std::move(stats)), mode_(mode) {}

double EventGame::baseline() const {
  std::lock_guard<std::mutex> lock(mu_);
  if (!baseline_) {
    baseline_ = model_.predict(mask_events(sg_, EventCoalition{}, stats_, mode_));
  }
  return *baseline_;
}

double EventGame::raw_prediction(const EventCoalition& coalition) const {
  return model_.predict(mask_events(sg_, coalition, stats_, mode_));
}

double EventGame::value(const EventCoalition& coalition) const {
  if (coalition.present.empty()) return 0.0;
  const std::string key = coalition_key(coalition.present, num_players());
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
  }
  const double base = baseline();
  const double v = raw_prediction(coalition) - base;
  std::lock_guard<std::mutex> lock(mu_);
  cache_.emplace(key, v);
  return v;
}

std::vector<std::size_t> draw_event_coalition(std::size_t num_players,
                                              std::size_t excluded, Rng& rng,
                                              bool size_stratified) {
  std::vector<std::size_t> others;
  others.reserve(num_players - 1);
  for (std::size_t i = 0; i < num_players; ++i) {
    if (i != excluded) others.push_back(i);
  }
  std::vector<std::size_t> picked;
  if (size_stratified) {
    const std::size_t size = rng.uniform_index(others.size() + 1);
    const auto subset = rng.sample_subset(others.size(), size);
    picked.reserve(subset.size());
    for (std::size_t s : subset) picked.push_back(others[s]);
  } else {
    for (std::size_t o : others) {
      if (rng.uniform01() < 0.5) picked.push_back(o);
    }
  }
  return picked;
}

FeatureGame::FeatureGame(const EventGame& base, std::size_t target_event,
                         std::size_t k, std::uint64_t seed, bool size_stratified)
    : base_(base), target_event_(target_event) {
  if (target_event >= base.num_players()) {
    throw std::invalid_argument("target event index out of range");
  }
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  Rng rng(seed);
  coalitions_.reserve(k);
  for (std::size_t j = 0; j < k; ++j) {
    coalitions_.push_back(
        draw_event_coalition(base.num_players(), target_event, rng, size_stratified));
  }
}

std::size_t FeatureGame::num_feature_players() const {
  return feature_player_count(
      base_.subgraph().events[target_event_].event.features.size());
}

void FeatureGame::evaluate_baselines(std::size_t workers) {
  y_minus_e_.assign(coalitions_.size(), 0.0);
  parallel_for(coalitions_.size(), workers, [&](std::size_t j) {
    const auto masked = mask_events(base_.subgraph(),
                                    EventCoalition::of(coalitions_[j]),
                                    base_.stats(), MaskMode::kReplace);
    y_minus_e_[j] = base_.model().predict(masked);
  });
  baselines_ready_ = true;
}

double FeatureGame::cell(std::size_t j, const FeatureCoalition& li) const {
  std::vector<std::size_t> keep = coalitions_[j];
  keep.push_back(target_event_);
  auto masked = mask_events(base_.subgraph(), EventCoalition::of(std::move(keep)),
                            base_.stats(), MaskMode::kReplace);
  masked = mask_event_features(masked, target_event_, li, base_.stats());
  return base_.model().predict(masked);
}

double FeatureGame::value(const FeatureCoalition& li) const {
  if (!baselines_ready_) {
    throw std::logic_error("FeatureGame::evaluate_baselines() not called");
  }
  double sum = 0.0;
  for (std::size_t j = 0; j < coalitions_.size(); ++j) {
    sum += cell(j, li) - y_minus_e_[j];
  }
  return sum / static_cast<double>(coalitions_.size());
}

}  // namespace tgx
