// cfmimo: link-level simulator for cell-free massive MIMO-OFDM downlink
// Copyright (C) 2026 cfmimo contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "cfmimo/clustering.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "cfmimo/timing.hpp"

namespace cfmimo {

namespace {

// Indices of the m smallest keys; ties break to the lower index. Result is
// returned in ascending index order.
std::vector<int> smallest_m(const Eigen::Ref<const Vector>& keys, int m) {
  std::vector<int> idx(keys.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::partial_sort(idx.begin(), idx.begin() + m, idx.end(), [&keys](int a, int b) {
    if (keys(a) != keys(b)) return keys(a) < keys(b);
    return a < b;
  });
  idx.resize(m);
  std::sort(idx.begin(), idx.end());
  return idx;
}

void fill_served(ClusterPlan* plan, int q_count) {
  plan->served.assign(q_count, {});
  for (int k = 0; k < plan->num_users(); ++k) {
    for (int q : plan->serving[k]) plan->served[q].push_back(k);
  }
}

}  // namespace

ClusterPlan cluster_by_distance(const NetworkDrop& drop, int serving_set_size,
                                double sampling_distance) {
  const int q_count = drop.num_aps();
  const int k_count = drop.num_users();
  if (serving_set_size < 1 || serving_set_size > q_count) {
    throw std::invalid_argument("cluster_by_distance: serving_set_size must be in [1, Q]");
  }
  ClusterPlan plan;
  plan.serving_set_size = serving_set_size;
  plan.serving.resize(k_count);
  plan.clusters.resize(k_count);
  plan.cluster_count.assign(k_count, 0);

  for (int k = 0; k < k_count; ++k) {
    plan.serving[k] = smallest_m(drop.distances.col(k), serving_set_size);

    double d_near = drop.distances(plan.serving[k].front(), k);
    double d_far = d_near;
    for (int q : plan.serving[k]) {
      d_near = std::min(d_near, drop.distances(q, k));
      d_far = std::max(d_far, drop.distances(q, k));
    }
    const int num_clusters = quantized_offset(d_far, d_near, sampling_distance) + 1;
    plan.cluster_count[k] = num_clusters;
    plan.clusters[k].assign(num_clusters, {});
    for (int q : plan.serving[k]) {
      const int bin = quantized_offset(drop.distances(q, k), d_near, sampling_distance);
      plan.clusters[k][bin].push_back(q);
    }
  }
  fill_served(&plan, q_count);
  return plan;
}

ClusterPlan fixed_baseline(const NetworkDrop& drop, int serving_set_size) {
  const int q_count = drop.num_aps();
  const int k_count = drop.num_users();
  if (serving_set_size < 1 || serving_set_size > q_count) {
    throw std::invalid_argument("fixed_baseline: serving_set_size must be in [1, Q]");
  }
  ClusterPlan plan;
  plan.serving_set_size = serving_set_size;
  plan.serving.resize(k_count);
  plan.clusters.resize(k_count);
  plan.cluster_count.assign(k_count, 1);

  for (int k = 0; k < k_count; ++k) {
    // Largest beta == smallest -beta.
    plan.serving[k] = smallest_m(-drop.beta.col(k), serving_set_size);
    plan.clusters[k] = {plan.serving[k]};
  }
  fill_served(&plan, q_count);
  return plan;
}

}  // namespace cfmimo
