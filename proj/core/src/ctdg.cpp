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

#include "tgx/ctdg.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <deque>
#include <fstream>
#include <map>
#include <stdexcept>
#include <tuple>

namespace tgx {
namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void parse_fail(const std::string& path, std::size_t line_no,
                             const std::string& what) {
  throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " + what);
}

double parse_double(const std::string& field, const std::string& path,
                    std::size_t line_no) {
  const std::string t = trim(field);
  double out = 0.0;
  const char* begin = t.data();
  const char* end = begin + t.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  if (ec != std::errc{} || ptr != end) {
    parse_fail(path, line_no, "cannot parse number '" + field + "'");
  }
  return out;
}

std::int64_t parse_int(const std::string& field, const std::string& path,
                       std::size_t line_no) {
  const std::string t = trim(field);
  std::int64_t out = 0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
  if (ec != std::errc{} || ptr != t.data() + t.size()) {
    parse_fail(path, line_no, "cannot parse integer '" + field + "'");
  }
  return out;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

}  // namespace

void TemporalGraph::finalize() {
  std::stable_sort(events.begin(), events.end(), [](const Event& a, const Event& b) {
    return std::tie(a.ts, a.id) < std::tie(b.ts, b.id);
  });
  for (const Event& e : events) {
    if (!std::isfinite(e.ts)) {
      throw std::runtime_error("event " + std::to_string(e.id) +
                               ": non-finite timestamp");
    }
    if (e.src < 0 || e.src >= num_nodes || e.dst < 0 || e.dst >= num_nodes) {
      throw std::runtime_error("event " + std::to_string(e.id) +
                               ": endpoint outside [0, num_nodes)");
    }
    if (e.features.size() != feature_dim) {
      throw std::runtime_error("event " + std::to_string(e.id) +
                               ": feature arity " + std::to_string(e.features.size()) +
                               " != " + std::to_string(feature_dim));
    }
  }
  incident_.assign(static_cast<std::size_t>(num_nodes), {});
  for (std::size_t i = 0; i < events.size(); ++i) {
    const Event& e = events[i];
    incident_[static_cast<std::size_t>(e.src)].push_back(i);
    if (e.dst != e.src) incident_[static_cast<std::size_t>(e.dst)].push_back(i);
  }
  finalized_ = true;
}

std::span<const std::size_t> TemporalGraph::incident(NodeId node) const {
  if (!finalized_) throw std::logic_error("TemporalGraph::finalize() not called");
  if (node < 0 || node >= num_nodes) {
    throw std::invalid_argument("unknown node id " + std::to_string(node));
  }
  const auto& v = incident_[static_cast<std::size_t>(node)];
  return {v.data(), v.size()};
}

std::string node_sidecar_path(const std::string& events_path) {
  const std::string suffix = ".csv";
  if (events_path.size() > suffix.size() &&
      events_path.compare(events_path.size() - suffix.size(), suffix.size(), suffix) == 0) {
    return events_path.substr(0, events_path.size() - suffix.size()) + ".nodes.csv";
  }
  return events_path + ".nodes.csv";
}

namespace {

// node_id,g_0,...,g_{m-1}
void load_node_features(const std::string& path, TemporalGraph& g) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open node feature file " + path);
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) parse_fail(path, 1, "missing header");
  ++line_no;
  const auto header = split_csv_line(trim(line));
  if (header.empty() || trim(header[0]) != "node_id") {
    parse_fail(path, 1, "expected header starting with node_id");
  }
  const std::size_t dim = header.size() - 1;
  std::vector<std::pair<NodeId, std::vector<double>>> rows;
  NodeId max_node = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      parse_fail(path, line_no, "expected " + std::to_string(header.size()) +
                                    " fields, got " + std::to_string(fields.size()));
    }
    const NodeId node = parse_int(fields[0], path, line_no);
    if (node < 0) parse_fail(path, line_no, "negative node id");
    std::vector<double> feat(dim);
    for (std::size_t j = 0; j < dim; ++j) {
      feat[j] = parse_double(fields[j + 1], path, line_no);
    }
    max_node = std::max(max_node, node);
    rows.emplace_back(node, std::move(feat));
  }
  g.node_feature_dim = dim;
  g.num_nodes = std::max(g.num_nodes, max_node + 1);
  g.node_features.assign(static_cast<std::size_t>(g.num_nodes),
                         std::vector<double>(dim, 0.0));
  for (auto& [node, feat] : rows) {
    g.node_features[static_cast<std::size_t>(node)] = std::move(feat);
  }
}

}  // namespace

TemporalGraph load_events(const std::string& path, bool has_node_features) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open event file " + path);

  TemporalGraph g;
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) parse_fail(path, 1, "missing header");
  ++line_no;
  const auto header = split_csv_line(trim(line));
  if (header.size() < 4 || trim(header[0]) != "src" || trim(header[1]) != "dst" ||
      trim(header[2]) != "ts" || trim(header[3]) != "label") {
    parse_fail(path, 1, "expected header src,dst,ts,label,f_0,...");
  }
  g.feature_dim = header.size() - 4;

  NodeId max_node = -1;
  EventId next_id = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      parse_fail(path, line_no,
                 "expected " + std::to_string(g.feature_dim) + " feature values, got " +
                     std::to_string(fields.size() >= 4 ? fields.size() - 4 : 0));
    }
    Event e;
    e.id = next_id++;
    e.src = parse_int(fields[0], path, line_no);
    e.dst = parse_int(fields[1], path, line_no);
    e.ts = parse_double(fields[2], path, line_no);
    if (!std::isfinite(e.ts)) parse_fail(path, line_no, "non-finite timestamp");
    e.label = parse_double(fields[3], path, line_no);
    if (e.src < 0 || e.dst < 0) parse_fail(path, line_no, "negative node id");
    e.features.resize(g.feature_dim);
    for (std::size_t j = 0; j < g.feature_dim; ++j) {
      e.features[j] = parse_double(fields[4 + j], path, line_no);
    }
    max_node = std::max({max_node, e.src, e.dst});
    g.events.push_back(std::move(e));
  }
  g.num_nodes = max_node + 1;

  if (has_node_features) load_node_features(node_sidecar_path(path), g);
  if (g.events.empty() && g.num_nodes <= 0) {
    throw std::runtime_error(path + ": no events and no node table; node count unknown");
  }
  g.finalize();
  return g;
}

void write_events(const TemporalGraph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << "src,dst,ts,label";
  for (std::size_t j = 0; j < g.feature_dim; ++j) out << ",f_" << j;
  out << "\n";
  for (const Event& e : g.events) {
    out << e.src << ',' << e.dst << ',' << format_double(e.ts) << ','
        << format_double(e.label);
    for (double f : e.features) out << ',' << format_double(f);
    out << "\n";
  }
  if (!out) throw std::runtime_error("write failed: " + path);
  if (g.node_feature_dim > 0) {
    const std::string npath = node_sidecar_path(path);
    std::ofstream nout(npath);
    if (!nout) throw std::runtime_error("cannot open " + npath + " for writing");
    nout << "node_id";
    for (std::size_t j = 0; j < g.node_feature_dim; ++j) nout << ",g_" << j;
    nout << "\n";
    for (NodeId n = 0; n < g.num_nodes; ++n) {
      nout << n;
      for (double f : g.node_features[static_cast<std::size_t>(n)]) {
        nout << ',' << format_double(f);
      }
      nout << "\n";
    }
    if (!nout) throw std::runtime_error("write failed: " + npath);
  }
}

ComputationalSubgraph extract_subgraph(const TemporalGraph& g, NodeId target,
                                       double t, int hops,
                                       std::optional<std::size_t> per_hop_cap) {
  if (target < 0 || target >= g.num_nodes) {
    throw std::invalid_argument("unknown node id " + std::to_string(target));
  }
  if (!std::isfinite(t)) throw std::invalid_argument("prediction time must be finite");
  if (hops < 1) throw std::invalid_argument("hop count must be >= 1");

  ComputationalSubgraph sg;
  sg.target = target;
  sg.pred_time = t;
  sg.hops = hops;
  sg.nodes.insert(target);

  struct Expansion {
    NodeId node;
    double before;
    int hop;  // hop level of the events this expansion produces
  };
  std::deque<Expansion> frontier;
  frontier.push_back({target, t, 1});
  std::set<std::tuple<NodeId, double, int>> expanded;
  std::set<std::tuple<EventId, int, double>> seen;

  while (!frontier.empty()) {
    const Expansion ex = frontier.front();
    frontier.pop_front();
    if (!expanded.insert({ex.node, ex.before, ex.hop}).second) continue;

    const auto idx = g.incident(ex.node);
    // Events with ts < before, most recent first: walk the ascending-sorted
    // incidence list backwards from the first index at or past `before`.
    auto upper = std::partition_point(idx.begin(), idx.end(), [&](std::size_t i) {
      return g.events[i].ts < ex.before;
    });
    std::size_t taken = 0;
    for (auto it = std::make_reverse_iterator(upper); it != idx.rend(); ++it) {
      if (per_hop_cap && taken >= *per_hop_cap) break;
      const Event& e = g.events[*it];
      ++taken;
      if (seen.insert({e.id, ex.hop, ex.before}).second) {
        SubgraphEvent se;
        se.event = e;
        se.hop = ex.hop;
        se.t_v = ex.before;
        se.orig_ts = e.ts;
        sg.events.push_back(std::move(se));
        sg.nodes.insert(e.src);
        sg.nodes.insert(e.dst);
      }
      if (ex.hop < hops) {
        frontier.push_back({far_endpoint(e, ex.node), e.ts, ex.hop + 1});
      }
    }
  }
  // BFS pushes whole hop levels in order, but deduplicated re-expansions can
  // interleave; present events sorted by (hop, discovery) for a stable layout.
  std::stable_sort(sg.events.begin(), sg.events.end(),
                   [](const SubgraphEvent& a, const SubgraphEvent& b) {
                     return a.hop < b.hop;
                   });
  return sg;
}

}  // namespace tgx
