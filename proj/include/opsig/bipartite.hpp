// Copyright 2026 The opsig Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <algorithm>
#include <cstdint>
#include <limits>
#include <queue>
#include <vector>

namespace opsig {

inline constexpr std::size_t unmatched = std::numeric_limits<std::size_t>::max();

struct BipartiteMatching {
    std::size_t cardinality = 0;
    std::vector<std::size_t> left_to_right; ///< `unmatched` for free left vertices
    std::vector<std::size_t> right_to_left;
};

/// Maximum-cardinality matching of a bipartite graph given as left-vertex
/// adjacency lists into [0, right_count). O(E * sqrt(V)).
inline BipartiteMatching hopcroft_karp(const std::vector<std::vector<std::size_t>>& left_adjacency,
                                       std::size_t right_count)
{
    constexpr auto inf = std::numeric_limits<std::size_t>::max();
    const auto left_count = left_adjacency.size();

    BipartiteMatching m;
    m.left_to_right.assign(left_count, unmatched);
    m.right_to_left.assign(right_count, unmatched);
    std::vector<std::size_t> dist(left_count);
    std::vector<std::size_t> next_edge(left_count);

    // Layers alternating paths from free left vertices; true when some free
    // right vertex is reachable.
    auto bfs = [&] {
        std::queue<std::size_t> queue;
        for (std::size_t u = 0; u < left_count; ++u) {
            if (m.left_to_right[u] == unmatched) {
                dist[u] = 0;
                queue.push(u);
            } else {
                dist[u] = inf;
            }
        }
        bool reachable_free = false;
        while (!queue.empty()) {
            auto u = queue.front();
            queue.pop();
            for (auto v : left_adjacency[u]) {
                auto w = m.right_to_left[v];
                if (w == unmatched) {
                    reachable_free = true;
                } else if (dist[w] == inf) {
                    dist[w] = dist[u] + 1;
                    queue.push(w);
                }
            }
        }
        return reachable_free;
    };

    // Vertex-disjoint shortest augmenting path from u along the BFS layers.
    auto dfs = [&](auto& self, std::size_t u) -> bool {
        for (auto& i = next_edge[u]; i < left_adjacency[u].size(); ++i) {
            auto v = left_adjacency[u][i];
            auto w = m.right_to_left[v];
            if (w == unmatched || (dist[w] == dist[u] + 1 && self(self, w))) {
                m.left_to_right[u] = v;
                m.right_to_left[v] = u;
                ++i;
                return true;
            }
        }
        dist[u] = inf;
        return false;
    };

    while (bfs()) {
        std::fill(next_edge.begin(), next_edge.end(), 0);
        for (std::size_t u = 0; u < left_count; ++u) {
            if (m.left_to_right[u] == unmatched && dfs(dfs, u)) {
                ++m.cardinality;
            }
        }
    }
    return m;
}

} // namespace opsig
