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

#ifndef TGX_MODEL_HPP
#define TGX_MODEL_HPP

#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "tgx/ctdg.hpp"

namespace tgx {

// A black-box scalar predictor over computational subgraphs. predict() must
// be pure and deterministic for fixed inputs, and callable concurrently.
class Model {
 public:
  virtual ~Model() = default;
  virtual double predict(const ComputationalSubgraph& sg) const = 0;
};

// Configuration of the built-in two-layer, single-head temporal attention
// model. The projection weights are fixed pseudo-random values derived from
// weight_seed; the model is never trained.
struct ToyModelConfig {
  int layers = 2;
  int heads = 1;
  std::size_t slots = 3;      // padded neighbor slots per node
  double time_scale = 0.05;   // frequency of the cosine time encoding
  std::uint64_t weight_seed = 7;
};

// Untrained attention model that reproduces a timestamp-leakage pathology:
// neighbor slots without a real event are zero-padded with timestamp 0, so
// when a node has no observable history the uniform softmax over identical
// padded slots makes its embedding encode the absolute observation time.
// Nodes listed in zeroed_nodes contribute zero raw features and are treated
// as content-free when they appear as an event's far endpoint.
class ToyTemporalAttention final : public Model {
 public:
  ToyTemporalAttention(const ToyModelConfig& cfg, std::size_t feature_dim,
                       std::size_t node_feature_dim = 0);

  double predict(const ComputationalSubgraph& sg) const override;

  // Final embedding of the target node (before the linear readout).
  std::vector<double> target_embedding(const ComputationalSubgraph& sg) const;

  // The time-encoding vector cos(time_scale * delta) * u_t; the layer output
  // of a node with no observable neighbors observed at time delta.
  std::vector<double> time_encoding(double delta) const;

  const ToyModelConfig& config() const { return cfg_; }
  std::size_t hidden_dim() const { return kHiddenDim; }

 private:
  static constexpr std::size_t kHiddenDim = 8;

  std::vector<double> embed(const ComputationalSubgraph& sg, NodeId node,
                            double observed_at, int depth, int child_hop) const;

  ToyModelConfig cfg_;
  std::size_t feature_dim_;
  std::size_t node_feature_dim_;
  std::vector<double> w_self_;      // hidden x node_feature_dim
  std::vector<double> w_neighbor_;  // hidden x hidden
  std::vector<double> w_event_;     // hidden x feature_dim
  std::vector<double> time_dir_;    // hidden
  std::vector<double> w_out_;       // hidden
  double bias_out_ = 0.0;
};

// Counts predict() calls; used by cost-contract checks and instrumented runs.
class CountingModel final : public Model {
 public:
  explicit CountingModel(const Model& inner) : inner_(inner) {}
  double predict(const ComputationalSubgraph& sg) const override;
  std::uint64_t calls() const;

 private:
  const Model& inner_;
  mutable std::atomic<std::uint64_t> calls_{0};
};

// Serializes one prediction request as a single line of structured text:
// {"id":n,"target":v,"t":f,"events":[{"id","src","dst","ts","t_v","hop",
// "x":[...],"src_feat_zeroed":b}...]}
std::string bridge_encode(const ComputationalSubgraph& sg, std::uint64_t request_id);

struct BridgeResponse {
  std::uint64_t id = 0;
  double logit = 0.0;
};

// Parses {"id":n,"logit":f}; rejects malformed lines and non-finite logits.
BridgeResponse bridge_decode(const std::string& line);

// Runs an external model as a child process speaking the line protocol over
// its standard streams. One request is in flight at a time; concurrent
// explainer workers are serialized through an internal lock.
class BridgeModel final : public Model {
 public:
  explicit BridgeModel(const std::string& command, int timeout_ms = 30000);
  ~BridgeModel() override;
  BridgeModel(const BridgeModel&) = delete;
  BridgeModel& operator=(const BridgeModel&) = delete;

  double predict(const ComputationalSubgraph& sg) const override;

 private:
  struct Process;
  std::unique_ptr<Process> proc_;
  int timeout_ms_;
  mutable std::mutex mu_;
  mutable std::uint64_t next_id_ = 1;
};

// Model selector: "builtin:toy" (optionally builtin:toy?weight_seed=9&slots=4
// &time_scale=0.05) or "external:<command line>".
struct ModelHandle {
  enum class Kind { kBuiltin, kExternal };
  Kind kind = Kind::kBuiltin;
  ToyModelConfig toy;
  std::string address;  // command line for external models

  static ModelHandle parse(const std::string& spec);
  std::unique_ptr<Model> instantiate(std::size_t feature_dim,
                                     std::size_t node_feature_dim) const;
  std::string describe() const;
};

}  // namespace tgx

#endif  // TGX_MODEL_HPP
