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

#ifndef TGX_MASKING_HPP
#define TGX_MASKING_HPP

#include <cstddef>
#include <cstdint>
#include <vector>

#include "tgx/ctdg.hpp"

namespace tgx {

// Dataset-wide averages backing the "average event" replacement: the
// component-wise mean feature vector and the mean timestamp difference
// between consecutive events of the full stream.
struct AverageEventStats {
  std::vector<double> mean_features;
  double mean_delta = 0.0;
};

// How a masked event leaves the subgraph: swapped for its average event
// (structure preserved) or deleted outright (may disconnect deeper hops).
enum class MaskMode { kReplace, kRemove };

const char* to_string(MaskMode mode);
MaskMode mask_mode_from_string(const std::string& s);

// Player indices (into ComputationalSubgraph::events) that stay unmasked.
struct EventCoalition {
  std::vector<std::size_t> present;  // unique, ascending

  static EventCoalition full(std::size_t num_players);
  static EventCoalition of(std::vector<std::size_t> indices);
  bool contains(std::size_t player) const;
};

// The fine-grained players of a single event: each event feature column, the
// event timestamp, and the source node in its role as information bridge.
struct FeaturePlayer {
  enum class Kind { kFeature, kTimestamp, kSourceNode };
  Kind kind = Kind::kFeature;
  std::size_t index = 0;  // feature column; meaningful for kFeature only

  friend bool operator==(const FeaturePlayer&, const FeaturePlayer&) = default;
};

// Canonical ordering: Feature(0), ..., Feature(d-1), Timestamp, SourceNode.
std::size_t feature_player_count(std::size_t feature_dim);  // d + 2
FeaturePlayer feature_player_at(std::size_t slot, std::size_t feature_dim);
const char* to_string(FeaturePlayer::Kind kind);

// Present feature players of one fixed event, as slots in canonical order.
struct FeatureCoalition {
  std::vector<std::size_t> present;  // unique, ascending, < d + 2

  static FeatureCoalition full(std::size_t feature_dim);
  static FeatureCoalition from_mask(std::uint32_t mask, std::size_t feature_dim);
  bool contains(std::size_t slot) const;
};

// Means over the full event stream; mean_delta over consecutive timestamp
// differences after the global sort (zero deltas from simultaneous events
// included). A single-event graph has mean_delta 0. Throws on empty graphs.
AverageEventStats compute_average_stats(const TemporalGraph& g);

// The replacement for a masked occurrence: same endpoints and id, timestamp
// t_v - mean_delta, mean features.
Event average_event(const SubgraphEvent& e, const AverageEventStats& stats);

// Masks every event outside `keep`. Replace mode swaps masked events for
// their average events; Remove mode deletes them together with the deeper-hop
// events that were only reachable through them. In both modes the source node
// of each masked event is added to zeroed_nodes. Events in `keep` are
// bit-identical to the input.
ComputationalSubgraph mask_events(const ComputationalSubgraph& sg,
                                  const EventCoalition& keep,
                                  const AverageEventStats& stats, MaskMode mode);

// Masks the absent feature players of the event at `player`: a missing
// timestamp becomes t_v - mean_delta, a missing feature column its dataset
// mean, a missing source-node player zeroes that node's features. All other
// events are untouched. Substitution does not depend on current values, so
// re-masking an already-masked player is a no-op.
ComputationalSubgraph mask_event_features(const ComputationalSubgraph& sg,
                                          std::size_t player,
                                          const FeatureCoalition& present,
                                          const AverageEventStats& stats);

}  // namespace tgx

#endif  // TGX_MASKING_HPP
