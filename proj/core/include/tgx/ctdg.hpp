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

#ifndef TGX_CTDG_HPP
#define TGX_CTDG_HPP

#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace tgx {

using NodeId = std::int64_t;
using EventId = std::int64_t;

// A timestamped, attributed interaction between two nodes. Events are the
// atomic unit of a continuous-time dynamic graph and the player unit of the
// event-level explanation game.
struct Event {
  EventId id = 0;
  NodeId src = 0;
  NodeId dst = 0;
  double ts = 0.0;
  double label = 0.0;
  std::vector<double> features;

  friend bool operator==(const Event&, const Event&) = default;
};

// A continuous-time dynamic graph: a node set plus a time-ordered event
// stream. Immutable after finalize(); safe for concurrent reads.
struct TemporalGraph {
  std::int64_t num_nodes = 0;
  std::size_t feature_dim = 0;
  std::vector<Event> events;  // sorted ascending by (ts, id) after finalize()

  std::size_t node_feature_dim = 0;
  // Dense num_nodes x node_feature_dim; empty means all-zero node features.
  std::vector<std::vector<double>> node_features;

  // Sorts events by (ts, id), validates invariants and builds the per-node
  // incidence index used by subgraph extraction.
  void finalize();

  // Event indices incident to `node`, ascending by (ts, id).
  std::span<const std::size_t> incident(NodeId node) const;

  bool finalized() const { return finalized_; }

 private:
  std::vector<std::vector<std::size_t>> incident_;
  bool finalized_ = false;
};

// Loads a graph from an event CSV with header src,dst,ts,label,f_0,...,f_{d-1}.
// When has_node_features is set, a sidecar CSV (node_id,g_0,...,g_{m-1}) is
// read from node_sidecar_path(path). Errors carry the offending line number.
TemporalGraph load_events(const std::string& path, bool has_node_features = false);

// Writes the event CSV (and, if the graph carries node features, the sidecar).
// Events are written in their sorted order so a round trip reproduces the
// graph exactly.
void write_events(const TemporalGraph& g, const std::string& path);

// data.csv -> data.nodes.csv
std::string node_sidecar_path(const std::string& events_path);

// One occurrence of an event inside a computational subgraph. `t_v` is the
// timestamp at which the event is observed along its path toward the target
// (prediction time for hop 1, the parent event's timestamp deeper). `orig_ts`
// freezes the extraction-time timestamp: masking may rewrite event.ts but the
// tree structure of the subgraph stays keyed to the original timeline.
struct SubgraphEvent {
  Event event;
  int hop = 1;
  double t_v = 0.0;
  double orig_ts = 0.0;

  friend bool operator==(const SubgraphEvent&, const SubgraphEvent&) = default;
};

// The time-restricted L-hop neighborhood a temporal model consumes when
// predicting for `target` at `pred_time`. `zeroed_nodes` lists nodes whose
// features were zeroed by masking (empty right after extraction).
struct ComputationalSubgraph {
  NodeId target = 0;
  double pred_time = 0.0;
  int hops = 1;
  std::vector<SubgraphEvent> events;
  std::set<NodeId> nodes;
  std::set<NodeId> zeroed_nodes;

  friend bool operator==(const ComputationalSubgraph&,
                         const ComputationalSubgraph&) = default;
};

// Extracts the computational subgraph around `target` at time `t`:
// hop-1 events are the events incident to the target with ts < t, most recent
// first; hop-(k+1) events are incident to the far endpoint of a hop-k event
// with ts strictly before that event's timestamp. An optional per-expansion
// cap keeps only the most recent events, mirroring TGNN neighbor samplers.
// Duplicate (event id, hop, t_v) occurrences are kept once.
ComputationalSubgraph extract_subgraph(
    const TemporalGraph& g, NodeId target, double t, int hops,
    std::optional<std::size_t> per_hop_cap = std::nullopt);

// Far endpoint of an event relative to the node it was reached from.
inline NodeId far_endpoint(const Event& e, NodeId near) {
  return e.src == near ? e.dst : e.src;
}

}  // namespace tgx

#endif  // TGX_CTDG_HPP
