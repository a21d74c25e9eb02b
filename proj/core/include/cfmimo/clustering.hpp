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

#ifndef CFMIMO_CLUSTERING_HPP
#define CFMIMO_CLUSTERING_HPP

#include <vector>

#include "cfmimo/topology.hpp"

namespace cfmimo {

/// Per-user serving sets and their partition into coherent clusters. Cluster
/// index equals the quantized downlink offset of the member APs, so all APs
/// inside one cluster share one phase shift. Empty clusters are kept in the
/// index space; they simply contribute nothing.
struct ClusterPlan {
  std::vector<std::vector<int>> serving;  // per user: serving APs, ascending index
  std::vector<std::vector<int>> served;   // per AP: served users, ascending index
  std::vector<std::vector<std::vector<int>>> clusters;  // [k][l] -> APs, ascending
  std::vector<int> cluster_count;                       // L_k
  int serving_set_size = 0;                             // M_0

  int num_users() const { return static_cast<int>(serving.size()); }
  int num_aps() const { return static_cast<int>(served.size()); }
};

/// Distance-criteria clustering: each user picks its M_0 nearest APs, the
/// number of clusters is floor(spread / D) + 1, and an AP lands in cluster
/// floor((d - d_nearest) / D). Ties on distance break to the lower AP index.
ClusterPlan cluster_by_distance(const NetworkDrop& drop, int serving_set_size,
                                double sampling_distance);

/// User-centric baseline: top-M_0 APs by large-scale coefficient, one single
/// cluster per user (coherent transmission attempted despite offsets).
ClusterPlan fixed_baseline(const NetworkDrop& drop, int serving_set_size);

}  // namespace cfmimo

#endif  // CFMIMO_CLUSTERING_HPP
