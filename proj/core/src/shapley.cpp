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

#include "tgx/shapley.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

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

}  // namespace

double shapley_kernel_weight(std::size_t num_players, std::size_t coalition_size) {
  if (coalition_size == 0 || coalition_size >= num_players) {
    throw std::invalid_argument(
        "kernel weight undefined for the empty and grand coalitions");
  }
  const double m = static_cast<double>(num_players);
  const double s = static_cast<double>(coalition_size);
  return (m - 1.0) / (binomial(num_players, coalition_size) * s * (m - s));
}

std::vector<CoalitionSample> sample_coalitions(std::size_t num_players,
                                               const KernelConfig& cfg) {
  if (num_players < 1) throw std::invalid_argument("need at least one player");
  std::vector<CoalitionSample> rows;
  if (num_players == 1) return rows;  // no proper nonempty coalitions

  const std::size_t budget = cfg.resolved_budget(num_players);
  const bool enumerable =
      num_players < 26 && ((1ULL << num_players) - 2) <= budget;

  if (enumerable) {
    const std::uint64_t all = (1ULL << num_players) - 1;
    rows.reserve(all - 1);
    for (std::uint64_t mask = 1; mask < all; ++mask) {
      CoalitionSample row;
      row.z.assign(num_players, 0);
      for (std::size_t i = 0; i < num_players; ++i) {
        if (mask & (1ULL << i)) row.z[i] = 1;
      }
      row.weight = shapley_kernel_weight(
          num_players, static_cast<std::size_t>(std::popcount(mask)));
      rows.push_back(std::move(row));
    }
    return rows;
  }

  // Aggregate kernel mass of size s: C(M,s) * w(M,s) = (M-1)/(s*(M-s)).
  // Sampling sizes from this law and subsets uniformly within a size draws
  // rows from the kernel distribution, so each row gets unit weight.
  const std::size_t m = num_players;
  std::vector<double> cumulative(m - 1, 0.0);
  double total = 0.0;
  for (std::size_t s = 1; s < m; ++s) {
    total += static_cast<double>(m - 1) /
             (static_cast<double>(s) * static_cast<double>(m - s));
    cumulative[s - 1] = total;
  }

  Rng rng(cfg.seed);
  rows.reserve(budget);
  while (rows.size() < budget) {
    const double u = rng.uniform01() * total;
    std::size_t s = 1;
    while (s < m - 1 && cumulative[s - 1] <= u) ++s;
    const auto subset = rng.sample_subset(m, s);
    CoalitionSample row;
    row.z.assign(m, 0);
    for (std::size_t i : subset) row.z[i] = 1;
    rows.push_back(row);
    if (cfg.paired_sampling && rows.size() < budget) {
      CoalitionSample pair;
      pair.z.assign(m, 1);
      for (std::size_t i : subset) pair.z[i] = 0;
      rows.push_back(std::move(pair));
    }
  }
  return rows;
}

KernelSolution kernelshap_solve(const std::vector<CoalitionSample>& samples,
                                std::size_t num_players, double val_empty,
                                double val_full) {
  KernelSolution out;
  if (num_players == 0) return out;
  const double span = val_full - val_empty;
  if (num_players == 1) {
    out.phi = {span};
    return out;
  }
  if (samples.empty()) {
    throw std::invalid_argument("kernel solve needs at least one sample row");
  }

  // Eliminate the last player's coefficient through the efficiency constraint
  // phi_{M-1} = span - sum(phi_i), and the intercept through g(0) = val_empty.
  const std::size_t n = samples.size();
  const std::size_t p = num_players - 1;
  Eigen::MatrixXd design(n, p);
  Eigen::VectorXd target(n);
  for (std::size_t r = 0; r < n; ++r) {
    const CoalitionSample& row = samples[r];
    if (row.z.size() != num_players) {
      throw std::invalid_argument("coalition vector length mismatch");
    }
    const double w = std::sqrt(row.weight);
    const double z_last = row.z[p] ? 1.0 : 0.0;
    for (std::size_t i = 0; i < p; ++i) {
      design(r, i) = w * ((row.z[i] ? 1.0 : 0.0) - z_last);
    }
    target(r) = w * (row.value - val_empty - z_last * span);
  }

  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(design);
  const Eigen::VectorXd x = cod.solve(target);
  out.rank_deficient = cod.rank() < static_cast<Eigen::Index>(p);
  out.phi.resize(num_players);
  double sum = 0.0;
  for (std::size_t i = 0; i < p; ++i) {
    out.phi[i] = x(static_cast<Eigen::Index>(i));
    sum += out.phi[i];
  }
  out.phi[p] = span - sum;
  return out;
}

std::vector<double> shapley_exact(const std::function<double(std::uint32_t)>& val,
                                  std::size_t num_players) {
  if (num_players < 1 || num_players > 20) {
    throw std::invalid_argument("exact enumeration supports 1..20 players");
  }
  // s!(M-s-1)!/M! == 1 / (M * C(M-1, s)); exact in double at this scale.
  std::vector<double> weight(num_players);
  for (std::size_t s = 0; s < num_players; ++s) {
    weight[s] = 1.0 / (static_cast<double>(num_players) * binomial(num_players - 1, s));
  }
  std::vector<double> phi(num_players, 0.0);
  const std::uint32_t all = (num_players == 32) ? ~0u : ((1u << num_players) - 1);
  for (std::size_t i = 0; i < num_players; ++i) {
    const std::uint32_t bit = 1u << i;
    const std::uint32_t others = all & ~bit;
    // Enumerate subsets S of the other players via the submask walk.
    std::uint32_t sub = others;
    for (;;) {
      const auto size = static_cast<std::size_t>(std::popcount(sub));
      phi[i] += weight[size] * (val(sub | bit) - val(sub));
      if (sub == 0) break;
      sub = (sub - 1) & others;
    }
  }
  return phi;
}

EventExplanation explain_game(const EventGame& game, const KernelConfig& cfg,
                              std::size_t workers) {
  const std::size_t m = game.num_players();
  if (m == 0) throw std::invalid_argument("cannot explain an empty subgraph");

  EventExplanation out;
  out.seed = cfg.seed;
  out.base_value = 0.0;
  out.grand_value = game.value(EventCoalition::full(m));

  auto rows = sample_coalitions(m, cfg);
  out.samples_used = rows.size();
  if (m == 1) {
    out.phi = {out.grand_value};
    return out;
  }

  // Deduplicate coalitions so repeated rows cost one model call, then fan the
  // unique evaluations out across workers. Row order is fixed before the
  // parallel section; the solve consumes rows in that order.
  std::vector<std::vector<std::size_t>> unique_sets;
  std::vector<std::size_t> row_to_unique(rows.size());
  {
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      std::string key(rows[r].z.begin(), rows[r].z.end());
      auto [it, inserted] = index.emplace(std::move(key), unique_sets.size());
      if (inserted) {
        std::vector<std::size_t> present;
        for (std::size_t i = 0; i < m; ++i) {
          if (rows[r].z[i]) present.push_back(i);
        }
        unique_sets.push_back(std::move(present));
      }
      row_to_unique[r] = it->second;
    }
  }
  game.baseline();  // evaluate once before the parallel section
  std::vector<double> unique_values(unique_sets.size());
  parallel_for(unique_sets.size(), workers, [&](std::size_t u) {
    unique_values[u] = game.value(EventCoalition::of(unique_sets[u]));
  });
  for (std::size_t r = 0; r < rows.size(); ++r) {
    rows[r].value = unique_values[row_to_unique[r]];
  }

  auto solution = kernelshap_solve(rows, m, 0.0, out.grand_value);
  out.phi = std::move(solution.phi);
  out.rank_deficient = solution.rank_deficient;
  return out;
}

EventExplanation explain_events(const Model& model, const ComputationalSubgraph& sg,
                                const AverageEventStats& stats, MaskMode mode,
                                const KernelConfig& cfg, std::size_t workers) {
  EventGame game(model, sg, stats, mode);
  return explain_game(game, cfg, workers);
}

}  // namespace tgx
