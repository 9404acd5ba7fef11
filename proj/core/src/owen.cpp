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

#include "tgx/owen.hpp"

#include <bit>
#include <cmath>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <unordered_map>

#include "tgx/parallel.hpp"
#include "tgx/rng.hpp"

namespace tgx {
namespace {

double binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0.0;
  k = std::min(k, n - k);
  double result = 1.0;
  for (std::size_t i = 1; i <= k; ++i) {
    result *= static_cast<double>(n - i + 1) / static_cast<double>(i);
  }
  return result;
}

// s!(n-s-1)!/n! for a game of n players.
double permutation_weight(std::size_t n, std::size_t s) {
  return 1.0 / (static_cast<double>(n) * binomial(n - 1, s));
}

std::vector<std::size_t> mask_bits(std::uint32_t mask) {
  std::vector<std::size_t> bits;
  for (std::size_t i = 0; i < 32; ++i) {
    if (mask & (1u << i)) bits.push_back(i);
  }
  return bits;
}

}  // namespace

std::size_t GroupPartition::num_players() const {
  std::uint32_t all = 0;
  for (std::uint32_t g : groups) all |= g;
  return static_cast<std::size_t>(std::popcount(all));
}

void GroupPartition::validate() const {
  if (groups.empty()) throw std::invalid_argument("partition has no groups");
  std::uint32_t all = 0;
  for (std::uint32_t g : groups) {
    if (g == 0) throw std::invalid_argument("partition contains an empty group");
    if (all & g) throw std::invalid_argument("partition groups overlap");
    all |= g;
  }
  const auto p = static_cast<std::size_t>(std::popcount(all));
  if (p > 20) throw std::invalid_argument("enumeration oracle supports at most 20 players");
  if (all != ((p == 32 ? 0u : (1u << p)) - 1u)) {
    throw std::invalid_argument("partition must cover players 0..P-1 exactly");
  }
}

std::vector<double> owen_exact(const std::function<double(std::uint32_t)>& val,
                               const GroupPartition& partition) {
  partition.validate();
  const std::size_t num_groups = partition.groups.size();
  const std::size_t total = partition.num_players();

  std::vector<double> group_weight(num_groups);
  for (std::size_t h = 0; h < num_groups; ++h) {
    group_weight[h] = permutation_weight(num_groups, h);
  }

  std::vector<double> omega(total, 0.0);
  for (std::size_t j = 0; j < num_groups; ++j) {
    const std::uint32_t tj = partition.groups[j];
    const auto group_size = static_cast<std::size_t>(std::popcount(tj));
    std::vector<double> member_weight(group_size);
    for (std::size_t s = 0; s < group_size; ++s) {
      member_weight[s] = permutation_weight(group_size, s);
    }
    std::vector<std::size_t> other_groups;
    for (std::size_t o = 0; o < num_groups; ++o) {
      if (o != j) other_groups.push_back(o);
    }

    for (std::size_t i : mask_bits(tj)) {
      const std::uint32_t bit = 1u << i;
      const std::uint32_t within = tj & ~bit;
      double acc = 0.0;
      const std::uint32_t h_limit = 1u << other_groups.size();
      for (std::uint32_t h_sel = 0; h_sel < h_limit; ++h_sel) {
        std::uint32_t base = 0;
        for (std::size_t o = 0; o < other_groups.size(); ++o) {
          if (h_sel & (1u << o)) base |= partition.groups[other_groups[o]];
        }
        const double wh = group_weight[static_cast<std::size_t>(std::popcount(h_sel))];
        std::uint32_t sub = within;
        for (;;) {
          const double ws = member_weight[static_cast<std::size_t>(std::popcount(sub))];
          const std::uint32_t m = base | sub;
          acc += wh * ws * (val(m | bit) - val(m));
          if (sub == 0) break;
          sub = (sub - 1) & within;
        }
      }
      omega[i] = acc;
    }
  }
  return omega;
}

std::vector<double> owen_two_step_exact(
    const std::function<double(std::uint32_t)>& val,
    const GroupPartition& partition, std::size_t group_index) {
  partition.validate();
  if (group_index >= partition.groups.size()) {
    throw std::invalid_argument("group index out of range");
  }
  const std::size_t num_groups = partition.groups.size();
  const std::uint32_t tj = partition.groups[group_index];
  const auto group_size = static_cast<std::size_t>(std::popcount(tj));
  const std::vector<std::size_t> members = mask_bits(tj);

  std::vector<std::size_t> other_groups;
  for (std::size_t o = 0; o < num_groups; ++o) {
    if (o != group_index) other_groups.push_back(o);
  }
  std::vector<double> group_weight(num_groups);
  for (std::size_t h = 0; h < num_groups; ++h) {
    group_weight[h] = permutation_weight(num_groups, h);
  }

  // Step 1: exact Shapley value of the partially-present group, for every
  // subset L of its members.
  std::vector<double> phi_of_subset(1u << group_size, 0.0);
  for (std::uint32_t l_sel = 0; l_sel < (1u << group_size); ++l_sel) {
    std::uint32_t l_mask = 0;
    for (std::size_t b = 0; b < group_size; ++b) {
      if (l_sel & (1u << b)) l_mask |= 1u << members[b];
    }
    double acc = 0.0;
    const std::uint32_t h_limit = 1u << other_groups.size();
    for (std::uint32_t h_sel = 0; h_sel < h_limit; ++h_sel) {
      std::uint32_t base = 0;
      for (std::size_t o = 0; o < other_groups.size(); ++o) {
        if (h_sel & (1u << o)) base |= partition.groups[other_groups[o]];
      }
      const double wh = group_weight[static_cast<std::size_t>(std::popcount(h_sel))];
      acc += wh * (val(base | l_mask) - val(base));
    }
    phi_of_subset[l_sel] = acc;
  }

  // Step 2: Shapley values of the members in the game over those values.
  return shapley_exact(
      [&](std::uint32_t sub) { return phi_of_subset[sub]; }, group_size);
}

TwoStepEstimate owen_two_step_estimate(std::size_t num_other,
                                       std::size_t num_feature_players,
                                       const TwoStepEval& eval, std::size_t k,
                                       std::size_t l, std::uint64_t seed,
                                       bool size_stratified, std::size_t workers) {
  if (num_feature_players < 1) throw std::invalid_argument("need feature players");
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  if (l < 1) throw std::invalid_argument("l must be >= 1");

  // K: event coalitions excluding the target.
  Rng k_rng(derive_seed(seed, 0x4b));
  std::vector<std::vector<std::size_t>> K(k);
  for (std::size_t j = 0; j < k; ++j) {
    K[j] = draw_event_coalition(num_other + 1, num_other, k_rng, size_stratified);
  }

  // L: proper feature rows plus the mandatory grand-coalition row; the empty
  // coalition is the pinned val_empty = 0 constraint, never a row.
  const std::size_t f = num_feature_players;
  std::vector<CoalitionSample> rows;
  if (f > 1 && l > 1) {
    KernelConfig row_cfg;
    row_cfg.budget = l - 1;
    row_cfg.seed = derive_seed(seed, 0x4c);
    rows = sample_coalitions(f, row_cfg);
  }
  const std::uint32_t full_mask = (f >= 32) ? ~0u : ((1u << f) - 1);
  std::vector<std::uint32_t> row_masks;
  row_masks.reserve(rows.size() + 1);
  for (const auto& row : rows) {
    std::uint32_t m = 0;
    for (std::size_t i = 0; i < f; ++i) {
      if (row.z[i]) m |= 1u << i;
    }
    row_masks.push_back(m);
  }
  row_masks.push_back(full_mask);
  const std::size_t l_used = row_masks.size();

  // Exactly k + k * l_used evaluations: the baselines and the full grid.
  std::vector<double> y_minus(k);
  std::vector<double> grid(l_used * k);
  parallel_for(k + l_used * k, workers, [&](std::size_t t) {
    if (t < k) {
      y_minus[t] = eval(K[t], 0, false);
    } else {
      const std::size_t i = (t - k) / k;
      const std::size_t j = (t - k) % k;
      grid[i * k + j] = eval(K[j], row_masks[i], true);
    }
  });

  std::vector<double> phi_rows(l_used, 0.0);
  for (std::size_t i = 0; i < l_used; ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < k; ++j) sum += grid[i * k + j] - y_minus[j];
    phi_rows[i] = sum / static_cast<double>(k);
  }

  TwoStepEstimate out;
  out.k_used = k;
  out.l_used = l_used;
  out.phi_estimate = phi_rows.back();
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i].value = phi_rows[i];
  auto solution = kernelshap_solve(rows, f, 0.0, out.phi_estimate);
  out.omega = std::move(solution.phi);
  out.rank_deficient = solution.rank_deficient;
  return out;
}

FeatureExplanation explain_event_features(const Model& model,
                                          const ComputationalSubgraph& sg,
                                          std::size_t event_player,
                                          const AverageEventStats& stats,
                                          const OwenConfig& cfg, std::size_t workers) {
  if (event_player >= sg.events.size()) {
    throw std::invalid_argument("event player index out of range");
  }
  const std::size_t d = sg.events[event_player].event.features.size();
  const std::size_t f = feature_player_count(d);
  const std::size_t num_other = sg.events.size() - 1;

  std::vector<std::size_t> other_index;
  other_index.reserve(num_other);
  for (std::size_t i = 0; i < sg.events.size(); ++i) {
    if (i != event_player) other_index.push_back(i);
  }

  const TwoStepEval eval = [&](const std::vector<std::size_t>& others,
                               std::uint32_t feature_mask, bool target_present) {
    std::vector<std::size_t> keep;
    keep.reserve(others.size() + 1);
    for (std::size_t o : others) keep.push_back(other_index[o]);
    if (target_present) keep.push_back(event_player);
    auto masked = mask_events(sg, EventCoalition::of(std::move(keep)), stats,
                              MaskMode::kReplace);
    if (target_present) {
      masked = mask_event_features(masked, event_player,
                                   FeatureCoalition::from_mask(feature_mask, d), stats);
    }
    return model.predict(masked);
  };

  const auto est = owen_two_step_estimate(num_other, f, eval, cfg.k,
                                          cfg.resolved_l(f), cfg.seed,
                                          cfg.size_stratified, workers);
  FeatureExplanation out;
  out.event_id = sg.events[event_player].event.id;
  out.omega = est.omega;
  out.phi_event_estimate = est.phi_estimate;
  out.k_used = est.k_used;
  out.l_used = est.l_used;
  out.seed = cfg.seed;
  out.rank_deficient = est.rank_deficient;
  return out;
}

std::vector<double> owen_two_step_exact(const Model& model,
                                        const ComputationalSubgraph& sg,
                                        std::size_t event_player,
                                        const AverageEventStats& stats) {
  const std::size_t m = sg.events.size();
  if (event_player >= m) throw std::invalid_argument("event player index out of range");
  const std::size_t d = sg.events[event_player].event.features.size();
  const std::size_t f = feature_player_count(d);
  if (m > 12 || f > 12) {
    throw std::invalid_argument("exact two-step oracle limited to 12 events and "
                                "12 feature players");
  }

  std::vector<std::size_t> other_index;
  for (std::size_t i = 0; i < m; ++i) {
    if (i != event_player) other_index.push_back(i);
  }
  const std::size_t num_other = other_index.size();

  // Cache predictions on subgraphs without the target event; they are reused
  // by every feature subset.
  std::vector<double> without_target(1u << num_other);
  for (std::uint32_t s_sel = 0; s_sel < (1u << num_other); ++s_sel) {
    std::vector<std::size_t> keep;
    for (std::size_t o = 0; o < num_other; ++o) {
      if (s_sel & (1u << o)) keep.push_back(other_index[o]);
    }
    without_target[s_sel] = model.predict(mask_events(
        sg, EventCoalition::of(std::move(keep)), stats, MaskMode::kReplace));
  }

  std::vector<double> event_weight(m);
  for (std::size_t s = 0; s < m; ++s) event_weight[s] = permutation_weight(m, s);

  // Exact Shapley value of the event for each feature subset L.
  std::vector<double> phi_of_subset(1u << f, 0.0);
  for (std::uint32_t l_mask = 0; l_mask < (1u << f); ++l_mask) {
    const auto li = FeatureCoalition::from_mask(l_mask, d);
    double acc = 0.0;
    for (std::uint32_t s_sel = 0; s_sel < (1u << num_other); ++s_sel) {
      std::vector<std::size_t> keep;
      for (std::size_t o = 0; o < num_other; ++o) {
        if (s_sel & (1u << o)) keep.push_back(other_index[o]);
      }
      keep.push_back(event_player);
      auto masked = mask_events(sg, EventCoalition::of(std::move(keep)), stats,
                                MaskMode::kReplace);
      masked = mask_event_features(masked, event_player, li, stats);
      const double with_target = model.predict(masked);
      const auto size = static_cast<std::size_t>(std::popcount(s_sel));
      acc += event_weight[size] * (with_target - without_target[s_sel]);
    }
    phi_of_subset[l_mask] = acc;
  }

  return shapley_exact([&](std::uint32_t sub) { return phi_of_subset[sub]; }, f);
}

FlatFeatureGame make_flat_feature_game(const Model& model,
                                       const ComputationalSubgraph& sg,
                                       const AverageEventStats& stats) {
  const std::size_t m = sg.events.size();
  if (m == 0) throw std::invalid_argument("empty subgraph");
  const std::size_t d = sg.events[0].event.features.size();
  const std::size_t f = feature_player_count(d);
  if (m * f > 20) {
    throw std::invalid_argument("flat feature game limited to 20 total players");
  }

  FlatFeatureGame game;
  game.num_events = m;
  game.players_per_event = f;
  for (std::size_t i = 0; i < m; ++i) {
    std::uint32_t mask = 0;
    for (std::size_t s = 0; s < f; ++s) mask |= 1u << (i * f + s);
    game.partition.groups.push_back(mask);
  }

  struct Cache {
    std::unordered_map<std::uint32_t, double> values;
    std::mutex mu;
  };
  auto cache = std::make_shared<Cache>();
  game.val = [=, &model](std::uint32_t mask) {
    {
      std::lock_guard<std::mutex> lock(cache->mu);
      auto it = cache->values.find(mask);
      if (it != cache->values.end()) return it->second;
    }
    ComputationalSubgraph masked = sg;
    for (std::size_t i = 0; i < m; ++i) {
      const auto event_mask =
          static_cast<std::uint32_t>((mask >> (i * f)) & ((1u << f) - 1));
      masked = mask_event_features(masked, i,
                                   FeatureCoalition::from_mask(event_mask, d), stats);
    }
    double v = model.predict(masked);
    if (mask == 0) {
      v = 0.0;  // anchor: the all-masked graph is the reference prediction
    } else {
      ComputationalSubgraph empty = sg;
      for (std::size_t i = 0; i < m; ++i) {
        empty = mask_event_features(empty, i, FeatureCoalition{}, stats);
      }
      v -= model.predict(empty);
    }
    std::lock_guard<std::mutex> lock(cache->mu);
    cache->values.emplace(mask, v);
    return v;
  };
  return game;
}

}  // namespace tgx
