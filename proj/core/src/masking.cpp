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

#include "tgx/masking.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>

namespace tgx {

const char* to_string(MaskMode mode) {
  return mode == MaskMode::kReplace ? "replace" : "remove";
}

MaskMode mask_mode_from_string(const std::string& s) {
  if (s == "replace") return MaskMode::kReplace;
  if (s == "remove") return MaskMode::kRemove;
  throw std::invalid_argument("unknown mask mode '" + s + "'");
}

EventCoalition EventCoalition::full(std::size_t num_players) {
  EventCoalition c;
  c.present.resize(num_players);
  for (std::size_t i = 0; i < num_players; ++i) c.present[i] = i;
  return c;
}

EventCoalition EventCoalition::of(std::vector<std::size_t> indices) {
  std::sort(indices.begin(), indices.end());
  indices.erase(std::unique(indices.begin(), indices.end()), indices.end());
  return EventCoalition{std::move(indices)};
}

bool EventCoalition::contains(std::size_t player) const {
  return std::binary_search(present.begin(), present.end(), player);
}

std::size_t feature_player_count(std::size_t feature_dim) { return feature_dim + 2; }

FeaturePlayer feature_player_at(std::size_t slot, std::size_t feature_dim) {
  if (slot < feature_dim) return {FeaturePlayer::Kind::kFeature, slot};
  if (slot == feature_dim) return {FeaturePlayer::Kind::kTimestamp, 0};
  if (slot == feature_dim + 1) return {FeaturePlayer::Kind::kSourceNode, 0};
  throw std::invalid_argument("feature player slot " + std::to_string(slot) +
                              " out of range");
}

const char* to_string(FeaturePlayer::Kind kind) {
  switch (kind) {
    case FeaturePlayer::Kind::kFeature: return "feature";
    case FeaturePlayer::Kind::kTimestamp: return "timestamp";
    case FeaturePlayer::Kind::kSourceNode: return "source_node";
  }
  return "?";
}

FeatureCoalition FeatureCoalition::full(std::size_t feature_dim) {
  FeatureCoalition c;
  const std::size_t n = feature_player_count(feature_dim);
  c.present.resize(n);
  for (std::size_t i = 0; i < n; ++i) c.present[i] = i;
  return c;
}

FeatureCoalition FeatureCoalition::from_mask(std::uint32_t mask, std::size_t feature_dim) {
  FeatureCoalition c;
  const std::size_t n = feature_player_count(feature_dim);
  for (std::size_t i = 0; i < n; ++i) {
    if (mask & (1u << i)) c.present.push_back(i);
  }
  return c;
}

bool FeatureCoalition::contains(std::size_t slot) const {
  return std::binary_search(present.begin(), present.end(), slot);
}

AverageEventStats compute_average_stats(const TemporalGraph& g) {
  if (g.events.empty()) throw std::invalid_argument("empty graph has no average event");
  AverageEventStats stats;
  stats.mean_features.assign(g.feature_dim, 0.0);
  for (const Event& e : g.events) {
    for (std::size_t j = 0; j < g.feature_dim; ++j) {
      stats.mean_features[j] += e.features[j];
    }
  }
  for (double& v : stats.mean_features) v /= static_cast<double>(g.events.size());
  if (g.events.size() >= 2) {
    double sum = 0.0;
    for (std::size_t i = 1; i < g.events.size(); ++i) {
      sum += g.events[i].ts - g.events[i - 1].ts;
    }
    stats.mean_delta = sum / static_cast<double>(g.events.size() - 1);
  }
  return stats;
}

Event average_event(const SubgraphEvent& e, const AverageEventStats& stats) {
  Event out = e.event;
  out.ts = e.t_v - stats.mean_delta;
  out.features = stats.mean_features;
  return out;
}

namespace {

// Reachability under Remove mode: replays the extraction walk from the target
// over the frozen tree (hop, t_v, original timestamps), traversing kept
// occurrences only. Occurrences that every path leads through a removed event
// are dead.
std::vector<bool> reachable_through(const ComputationalSubgraph& sg,
                                    const std::vector<bool>& kept) {
  const std::size_t n = sg.events.size();
  std::vector<bool> alive(n, false);

  struct Expansion {
    NodeId node;
    double before;
    int hop;
  };
  std::vector<Expansion> frontier{{sg.target, sg.pred_time, 1}};
  std::set<std::tuple<NodeId, double, int>> expanded;
  for (std::size_t head = 0; head < frontier.size(); ++head) {
    const Expansion ex = frontier[head];
    if (!expanded.insert({ex.node, ex.before, ex.hop}).second) continue;
    for (std::size_t i = 0; i < n; ++i) {
      const SubgraphEvent& se = sg.events[i];
      if (!kept[i] || se.hop != ex.hop || se.t_v != ex.before) continue;
      if (se.event.src != ex.node && se.event.dst != ex.node) continue;
      alive[i] = true;
      if (ex.hop < sg.hops) {
        frontier.push_back({far_endpoint(se.event, ex.node), se.orig_ts, ex.hop + 1});
      }
    }
  }
  return alive;
}

}  // namespace

ComputationalSubgraph mask_events(const ComputationalSubgraph& sg,
                                  const EventCoalition& keep,
                                  const AverageEventStats& stats, MaskMode mode) {
  const std::size_t n = sg.events.size();
  for (std::size_t p : keep.present) {
    if (p >= n) throw std::invalid_argument("coalition index out of range");
  }
  std::vector<bool> kept(n, false);
  for (std::size_t p : keep.present) kept[p] = true;

  ComputationalSubgraph out = sg;
  if (mode == MaskMode::kReplace) {
    for (std::size_t i = 0; i < n; ++i) {
      if (kept[i]) continue;
      out.events[i].event = average_event(sg.events[i], stats);
      out.zeroed_nodes.insert(sg.events[i].event.src);
    }
    return out;
  }

  const std::vector<bool> alive = reachable_through(sg, kept);
  out.events.clear();
  for (std::size_t i = 0; i < n; ++i) {
    if (alive[i]) {
      out.events.push_back(sg.events[i]);
    } else {
      out.zeroed_nodes.insert(sg.events[i].event.src);
    }
  }
  return out;
}

ComputationalSubgraph mask_event_features(const ComputationalSubgraph& sg,
                                          std::size_t player,
                                          const FeatureCoalition& present,
                                          const AverageEventStats& stats) {
  if (player >= sg.events.size()) {
    throw std::invalid_argument("event player index out of range");
  }
  const std::size_t d = sg.events[player].event.features.size();
  const std::size_t num_slots = feature_player_count(d);
  for (std::size_t slot : present.present) {
    if (slot >= num_slots) {
      throw std::invalid_argument("feature player slot out of range");
    }
  }

  ComputationalSubgraph out = sg;
  SubgraphEvent& se = out.events[player];
  for (std::size_t j = 0; j < d; ++j) {
    if (!present.contains(j)) se.event.features[j] = stats.mean_features[j];
  }
  if (!present.contains(d)) se.event.ts = se.t_v - stats.mean_delta;
  if (!present.contains(d + 1)) out.zeroed_nodes.insert(se.event.src);
  return out;
}

}  // namespace tgx
