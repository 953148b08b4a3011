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

// Independent reference implementations used only by the tests.

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "opsig/listing.hpp"

namespace opsig::oracle {

/// Maximum matching by memoised search over (left index, used-right mask).
/// Right side must have at most 20 vertices.
inline std::size_t max_matching_dp(const std::vector<std::vector<std::size_t>>& adj, std::size_t right)
{
    const std::size_t left = adj.size();
    std::vector<std::uint32_t> masks(left, 0);
    for (std::size_t i = 0; i < left; ++i) {
        for (auto j : adj[i]) {
            masks[i] |= 1u << j;
        }
    }
    std::map<std::pair<std::size_t, std::uint32_t>, std::size_t> memo;
    std::function<std::size_t(std::size_t, std::uint32_t)> go = [&](std::size_t i, std::uint32_t used) -> std::size_t {
        if (i == left) {
            return 0;
        }
        auto key = std::pair{i, used};
        if (auto it = memo.find(key); it != memo.end()) {
            return it->second;
        }
        std::size_t best = go(i + 1, used);
        for (std::size_t j = 0; j < right; ++j) {
            if ((masks[i] >> j & 1u) && !(used >> j & 1u)) {
                best = std::max(best, 1 + go(i + 1, used | (1u << j)));
            }
        }
        memo[key] = best;
        return best;
    };
    return go(0, 0);
}

/// Kuhn's augmenting-path algorithm.
inline std::size_t kuhn_matching(const std::vector<std::vector<std::size_t>>& adj, std::size_t right)
{
    std::vector<std::size_t> owner(right, SIZE_MAX);
    std::vector<char> seen;
    std::function<bool(std::size_t)> augment = [&](std::size_t u) {
        for (auto v : adj[u]) {
            if (seen[v]) {
                continue;
            }
            seen[v] = 1;
            if (owner[v] == SIZE_MAX || augment(owner[v])) {
                owner[v] = u;
                return true;
            }
        }
        return false;
    };
    std::size_t size = 0;
    for (std::size_t u = 0; u < adj.size(); ++u) {
        seen.assign(right, 0);
        size += augment(u);
    }
    return size;
}

/// Leaders by direct reading of the definition, one instruction at a time.
inline std::set<std::uint32_t> leaders(const MethodListing& m)
{
    std::set<std::uint32_t> out;
    for (std::size_t i = 0; i < m.instructions.size(); ++i) {
        const auto& insn = m.instructions[i];
        if (insn.address == 0) {
            out.insert(0);
        }
        for (auto t : insn.targets) {
            out.insert(t);
        }
        if (insn.category != Category::Fall && i + 1 < m.instructions.size()) {
            out.insert(m.instructions[i + 1].address);
        }
    }
    return out;
}

/// Is `ngram` (space-joined tokens) a contiguous window of `tokens`?
inline bool window_present(const std::vector<std::string>& tokens, const std::string& ngram)
{
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        auto sp = ngram.find(' ', start);
        parts.push_back(ngram.substr(start, sp == std::string::npos ? std::string::npos : sp - start));
        if (sp == std::string::npos) {
            break;
        }
        start = sp + 1;
    }
    if (parts.size() > tokens.size()) {
        return false;
    }
    for (std::size_t i = 0; i + parts.size() <= tokens.size(); ++i) {
        if (std::equal(parts.begin(), parts.end(), tokens.begin() + static_cast<std::ptrdiff_t>(i))) {
            return true;
        }
    }
    return false;
}

/// Occurrences of `ngram` and total window count, by rescanning.
inline std::pair<std::size_t, std::size_t> window_count(const std::vector<std::string>& tokens, std::size_t size,
                                                        const std::string& ngram)
{
    if (tokens.size() < size) {
        return {0, 0};
    }
    std::size_t total = tokens.size() - size + 1;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < total; ++i) {
        std::string w = tokens[i];
        for (std::size_t k = 1; k < size; ++k) {
            w += ' ' + tokens[i + k];
        }
        hits += w == ngram;
    }
    return {hits, total};
}

/// Correspondence matrix by exhaustive sweeps: depths by repeated edge
/// relaxation, degrees by scanning every pair, parent rule re-checked over
/// the whole matrix until stable, elimination order by selection.
inline std::vector<std::vector<char>> correspondence(const std::vector<std::vector<std::size_t>>& ref,
                                                     const std::vector<std::vector<std::size_t>>& cand)
{
    auto edge = [](const std::vector<std::vector<std::size_t>>& g, std::size_t a, std::size_t b) {
        return std::find(g[a].begin(), g[a].end(), b) != g[a].end();
    };
    auto depths = [&](const std::vector<std::vector<std::size_t>>& g) {
        std::vector<std::size_t> d(g.size(), SIZE_MAX);
        if (!g.empty()) {
            d[0] = 0;
        }
        for (std::size_t round = 0; round < g.size(); ++round) {
            for (std::size_t a = 0; a < g.size(); ++a) {
                for (std::size_t b = 0; b < g.size(); ++b) {
                    if (d[a] != SIZE_MAX && edge(g, a, b) && d[a] + 1 < d[b]) {
                        d[b] = d[a] + 1;
                    }
                }
            }
        }
        return d;
    };
    auto in_degree = [&](const std::vector<std::vector<std::size_t>>& g, std::size_t v) {
        std::size_t k = 0;
        for (std::size_t a = 0; a < g.size(); ++a) {
            k += edge(g, a, v);
        }
        return k;
    };
    const std::size_t m = ref.size();
    const std::size_t n = cand.size();
    auto dr = depths(ref);
    auto dc = depths(cand);
    std::vector<std::vector<char>> cell(m, std::vector<char>(n, 0));
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            cell[i][j] = dr[i] != SIZE_MAX && dr[i] == dc[j] && in_degree(ref, i) == in_degree(cand, j) &&
                         cand[j].size() >= ref[i].size();
        }
    }
    auto parents_ok = [&] {
        bool changed = true;
        while (changed) {
            changed = false;
            for (std::size_t i = 0; i < m; ++i) {
                for (std::size_t j = 0; j < n; ++j) {
                    if (!cell[i][j]) {
                        continue;
                    }
                    for (std::size_t p = 0; p < m && cell[i][j]; ++p) {
                        if (!edge(ref, p, i)) {
                            continue;
                        }
                        bool any = false;
                        for (std::size_t q = 0; q < n; ++q) {
                            any = any || (edge(cand, q, j) && cell[p][q]);
                        }
                        if (!any) {
                            cell[i][j] = 0;
                            changed = true;
                        }
                    }
                }
            }
        }
    };
    parents_ok();
    std::vector<std::size_t> order;
    std::vector<char> taken(m, 0);
    if (m > 0) {
        order.push_back(0);
        taken[0] = 1;
    }
    while (order.size() < m) {
        std::size_t best = SIZE_MAX;
        for (std::size_t i = 0; i < m; ++i) {
            if (!taken[i] && (best == SIZE_MAX || ref[i].size() > ref[best].size())) {
                best = i;
            }
        }
        taken[best] = 1;
        order.push_back(best);
    }
    std::vector<char> claimed(n, 0);
    for (auto i : order) {
        std::vector<std::size_t> left;
        for (std::size_t j = 0; j < n; ++j) {
            if (cell[i][j] && claimed[j]) {
                cell[i][j] = 0;
            } else if (cell[i][j]) {
                left.push_back(j);
            }
        }
        if (left.size() == 1) {
            claimed[left[0]] = 1;
        }
    }
    parents_ok();
    return cell;
}

} // namespace opsig::oracle
