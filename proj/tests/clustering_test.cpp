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
#include <set>

#include "doctest.h"

#include "cfmimo/timing.hpp"
#include "test_support.hpp"

using namespace cfmimo;

TEST_CASE("equidistant serving APs collapse into one cluster of size M0") {
  Matrix dist(5, 1);
  dist << 200.0, 200.0, 200.0, 200.0, 200.0;
  const NetworkDrop drop = test::drop_from_distances(dist, 1);
  const ClusterPlan plan = cluster_by_distance(drop, 4, 19.5);
  CHECK(plan.cluster_count[0] == 1);
  CHECK(plan.clusters[0][0].size() == 4);
  CHECK(plan.serving[0] == std::vector<int>{0, 1, 2, 3});  // tie broken to low index
}

TEST_CASE("distance spread below one sampling distance keeps a single cluster") {
  Matrix dist(3, 1);
  const double d_sample = 19.5;
  dist << 100.0, 100.0 + 0.4 * d_sample, 100.0 + 0.96 * d_sample;
  const NetworkDrop drop = test::drop_from_distances(dist, 1);
  const ClusterPlan plan = cluster_by_distance(drop, 3, d_sample);
  CHECK(plan.cluster_count[0] == 1);
  CHECK(plan.clusters[0][0].size() == 3);
}

TEST_CASE("cluster index equals the quantized offset plus one on random drops") {
  NetworkConfig net;
  net.num_aps = 30;
  net.num_users = 20;
  net.antennas_per_ap = 2;
  OfdmConfig ofdm;
  const NetworkDrop drop = generate_drop(net, 99);
  const ClusterPlan plan = cluster_by_distance(drop, 20, ofdm.sampling_distance());
  TimingModel timing;
  dl_offsets(drop, plan.serving, ofdm, &timing);
  for (int k = 0; k < net.num_users; ++k) {
    for (int l = 0; l < plan.cluster_count[k]; ++l) {
      for (int q : plan.clusters[k][l]) {
        CHECK(l == timing.dl_offset(q, k));
      }
    }
    CHECK(plan.cluster_count[k] == timing.dl_offset(timing.dl_farthest[k], k) + 1);
  }
}

TEST_CASE("partition property and intra-cluster spread hold in every drop") {
  NetworkConfig net;
  net.num_aps = 14;
  net.num_users = 9;
  net.antennas_per_ap = 2;
  OfdmConfig ofdm;
  const double d_sample = ofdm.sampling_distance();
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    const NetworkDrop drop = generate_drop(net, seed);
    const ClusterPlan plan = cluster_by_distance(drop, 10, d_sample);
    for (int k = 0; k < net.num_users; ++k) {
      std::set<int> covered;
      std::size_t total = 0;
      int nonempty = 0;
      for (const auto& cluster : plan.clusters[k]) {
        total += cluster.size();
        if (!cluster.empty()) nonempty++;
        for (int q : cluster) covered.insert(q);
        // Max pairwise difference of (d - d_nearest) inside a cluster < D.
        if (cluster.size() > 1) {
          double lo = 1e300;
          double hi = -1e300;
          for (int q : cluster) {
            lo = std::min(lo, drop.distances(q, k));
            hi = std::max(hi, drop.distances(q, k));
          }
          CHECK(hi - lo < d_sample);
        }
      }
      CHECK(total == plan.serving[k].size());
      CHECK(covered == std::set<int>(plan.serving[k].begin(), plan.serving[k].end()));
      CHECK(nonempty <= plan.cluster_count[k]);
    }
  }
}

TEST_CASE("a sampling distance beyond the spread gives one cluster everywhere") {
  NetworkConfig net;
  net.num_aps = 10;
  net.num_users = 5;
  net.antennas_per_ap = 2;
  const NetworkDrop drop = generate_drop(net, 4);
  const ClusterPlan plan = cluster_by_distance(drop, 10, 10.0 * net.area_side);
  for (int k = 0; k < net.num_users; ++k) {
    CHECK(plan.cluster_count[k] == 1);
    CHECK(plan.clusters[k][0].size() == 10);
  }
}

TEST_CASE("fixed baseline picks the strongest large-scale coefficients") {
  NetworkConfig net;
  net.num_aps = 12;
  net.num_users = 6;
  net.antennas_per_ap = 2;

  SUBCASE("without shadowing it reduces to the nearest-M0 rule") {
    net.pathloss.shadowing_sigma_db = 0.0;
    const NetworkDrop drop = generate_drop(net, 21);
    const ClusterPlan fixed = fixed_baseline(drop, 5);
    const ClusterPlan nearest = cluster_by_distance(drop, 5, 1.0);
    for (int k = 0; k < net.num_users; ++k) {
      CHECK(fixed.serving[k] == nearest.serving[k]);
      CHECK(fixed.cluster_count[k] == 1);
      CHECK(fixed.clusters[k][0] == fixed.serving[k]);
    }
  }

  SUBCASE("with shadowing the serving set follows the sorted betas") {
    const NetworkDrop drop = generate_drop(net, 22);
    const ClusterPlan fixed = fixed_baseline(drop, 5);
    for (int k = 0; k < net.num_users; ++k) {
      // Sorting oracle: the chosen set must contain the 5 largest betas.
      std::vector<int> order(net.num_aps);
      for (int q = 0; q < net.num_aps; ++q) order[q] = q;
      std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (drop.beta(a, k) != drop.beta(b, k)) return drop.beta(a, k) > drop.beta(b, k);
        return a < b;
      });
      std::vector<int> expected(order.begin(), order.begin() + 5);
      std::sort(expected.begin(), expected.end());
      CHECK(fixed.serving[k] == expected);
      CHECK(fixed.cluster_count[k] == 1);
    }
  }
}

TEST_CASE("serving and served sets are mutually consistent") {
  NetworkConfig net;
  net.num_aps = 9;
  net.num_users = 7;
  net.antennas_per_ap = 2;
  const NetworkDrop drop = generate_drop(net, 77);
  for (const ClusterPlan& plan :
       {cluster_by_distance(drop, 6, 19.5), fixed_baseline(drop, 6)}) {
    for (int k = 0; k < net.num_users; ++k) {
      for (int q : plan.serving[k]) {
        CHECK(std::count(plan.served[q].begin(), plan.served[q].end(), k) == 1);
      }
    }
    for (int q = 0; q < net.num_aps; ++q) {
      for (int k : plan.served[q]) {
        CHECK(std::count(plan.serving[k].begin(), plan.serving[k].end(), q) == 1);
      }
    }
  }
}
