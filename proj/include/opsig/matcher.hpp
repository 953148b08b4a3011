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

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <limits>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "opsig/bipartite.hpp"
#include "opsig/cfg.hpp"
#include "opsig/rational.hpp"
#include "opsig/signature.hpp"

namespace opsig {

inline constexpr std::size_t unreachable_depth = std::numeric_limits<std::size_t>::max();

/// Breadth-first distance from node 0; unreachable nodes get unreachable_depth.
inline std::vector<std::size_t> depth_map(const Adjacency& graph)
{
    std::vector<std::size_t> depth(graph.size(), unreachable_depth);
    if (graph.empty()) {
        return depth;
    }
    std::deque<std::size_t> queue{0};
    depth[0] = 0;
    while (!queue.empty()) {
        auto u = queue.front();
        queue.pop_front();
        for (auto v : graph[u]) {
            if (depth[v] == unreachable_depth) {
                depth[v] = depth[u] + 1;
                queue.push_back(v);
            }
        }
    }
    return depth;
}

inline Adjacency predecessors(const Adjacency& graph)
{
    Adjacency preds(graph.size());
    for (std::size_t u = 0; u < graph.size(); ++u) {
        for (auto v : graph[u]) {
            preds[v].push_back(u);
        }
    }
    return preds;
}

/// Referent-by-candidate viability matrix.
class CorrespondenceMatrix {
public:
    CorrespondenceMatrix() = default;
    CorrespondenceMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), cells_(rows * cols, 0) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool operator()(std::size_t i, std::size_t j) const { return cells_[i * cols_ + j] != 0; }
    void set(std::size_t i, std::size_t j, bool value) { cells_[i * cols_ + j] = value ? 1 : 0; }

    std::vector<std::size_t> row(std::size_t i) const
    {
        std::vector<std::size_t> out;
        for (std::size_t j = 0; j < cols_; ++j) {
            if ((*this)(i, j)) {
                out.push_back(j);
            }
        }
        return out;
    }

    /// Rows as candidate lists, the bipartite graph handed to Hopcroft-Karp.
    std::vector<std::vector<std::size_t>> adjacency() const
    {
        std::vector<std::vector<std::size_t>> out(rows_);
        for (std::size_t i = 0; i < rows_; ++i) {
            out[i] = row(i);
        }
        return out;
    }

    /// One line per row, cells as 0/1 separated by spaces.
    std::string to_string() const
    {
        std::string out;
        for (std::size_t i = 0; i < rows_; ++i) {
            for (std::size_t j = 0; j < cols_; ++j) {
                out += (j == 0 ? "" : " ");
                out += (*this)(i, j) ? '1' : '0';
            }
            out += '\n';
        }
        return out;
    }

    bool operator==(const CorrespondenceMatrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<std::uint8_t> cells_;
};

/// Entry node first, then descending child count, ties by ascending index.
inline std::vector<std::size_t> processing_order(const Adjacency& referent)
{
    std::vector<std::size_t> order;
    for (std::size_t i = 1; i < referent.size(); ++i) {
        order.push_back(i);
    }
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return referent[a].size() > referent[b].size();
    });
    if (!referent.empty()) {
        order.insert(order.begin(), 0);
    }
    return order;
}

namespace detail {

/// Clears cells (i, j) where some referent parent of i has no viable
/// candidate parent of j, until no cell changes.
inline void enforce_parent_viability(CorrespondenceMatrix& cells, const Adjacency& ref, const Adjacency& ref_preds,
                                     const Adjacency& cand, const Adjacency& cand_preds)
{
    auto viable = [&](std::size_t i, std::size_t j) {
        for (auto p : ref_preds[i]) {
            bool found = false;
            for (auto q : cand_preds[j]) {
                if (cells(p, q)) {
                    found = true;
                    break;
                }
            }
            if (!found) {
                return false;
            }
        }
        return true;
    };

    std::deque<std::pair<std::size_t, std::size_t>> work;
    for (std::size_t i = 0; i < cells.rows(); ++i) {
        for (std::size_t j = 0; j < cells.cols(); ++j) {
            if (cells(i, j)) {
                work.emplace_back(i, j);
            }
        }
    }
    while (!work.empty()) {
        auto [i, j] = work.front();
        work.pop_front();
        if (!cells(i, j) || viable(i, j)) {
            continue;
        }
        cells.set(i, j, false);
        // Only pairs whose parents include (i, j) can lose support.
        for (auto c : ref[i]) {
            for (auto s : cand[j]) {
                if (cells(c, s)) {
                    work.emplace_back(c, s);
                }
            }
        }
    }
}

} // namespace detail

/// Viability of pairing referent node i with candidate node j: same depth,
/// same in-degree, candidate out-degree at least the referent's, and every
/// referent parent paired with some candidate parent. A row left with a
/// single candidate claims it; claimed candidates are struck from rows
/// processed later.
inline CorrespondenceMatrix build_correspondence(const Adjacency& referent, const Adjacency& candidate)
{
    const auto m = referent.size();
    const auto n = candidate.size();
    CorrespondenceMatrix cells(m, n);
    if (m == 0 || n == 0) {
        return cells;
    }

    auto ref_depth = depth_map(referent);
    auto cand_depth = depth_map(candidate);
    auto ref_preds = predecessors(referent);
    auto cand_preds = predecessors(candidate);

    for (std::size_t i = 0; i < m; ++i) {
        if (ref_depth[i] == unreachable_depth) {
            continue;
        }
        for (std::size_t j = 0; j < n; ++j) {
            cells.set(i, j, ref_depth[i] == cand_depth[j] && ref_preds[i].size() == cand_preds[j].size() &&
                                candidate[j].size() >= referent[i].size());
        }
    }
    detail::enforce_parent_viability(cells, referent, ref_preds, candidate, cand_preds);

    std::vector<bool> claimed(n, false);
    for (auto i : processing_order(referent)) {
        std::size_t remaining = 0;
        std::size_t last = 0;
        for (std::size_t j = 0; j < n; ++j) {
            if (!cells(i, j)) {
                continue;
            }
            if (claimed[j]) {
                cells.set(i, j, false);
            } else {
                ++remaining;
                last = j;
            }
        }
        if (remaining == 1) {
            claimed[last] = true;
        }
    }
    detail::enforce_parent_viability(cells, referent, ref_preds, candidate, cand_preds);
    return cells;
}

enum class Verdict { Known, Variant, NoMatch };

inline std::string_view to_string(Verdict v)
{
    switch (v) {
    case Verdict::Known: return "KNOWN";
    case Verdict::Variant: return "VARIANT";
    case Verdict::NoMatch: return "NO_MATCH";
    }
    return "?";
}

struct MatchResult {
    bool structural = false;
    std::vector<std::size_t> matching; ///< referent node -> candidate node, or `unmatched`
    std::size_t x = 0;                 ///< matched pairs with equal fingerprints
    std::size_t m = 0;                 ///< referent size
    std::size_t n = 0;                 ///< candidate size
    Verdict verdict = Verdict::NoMatch;

    Rational score() const { return m == 0 ? Rational{0} : Rational(static_cast<std::int64_t>(x), static_cast<std::int64_t>(m)); }
};

inline Verdict decide_verdict(bool structural, std::size_t x, std::size_t m, std::size_t n, Rational threshold)
{
    if (!structural || m == 0) {
        return Verdict::NoMatch;
    }
    if (x == m && m == n) {
        return Verdict::Known;
    }
    Rational score(static_cast<std::int64_t>(x), static_cast<std::int64_t>(m));
    return score >= threshold ? Verdict::Variant : Verdict::NoMatch;
}

/// Graph plus per-node fingerprints, borrowed from a Signature or a Cfg.
struct MarkedGraphView {
    const Adjacency& adjacency;
    std::vector<std::string_view> fingerprints;

    MarkedGraphView(const Signature& s) : adjacency(s.adjacency), fingerprints(s.fingerprints.begin(), s.fingerprints.end()) {}
    MarkedGraphView(const Cfg& c) : adjacency(c.successors)
    {
        for (const auto& b : c.blocks) {
            fingerprints.push_back(b.fingerprint);
        }
    }
};

/// True when the two graphs have at least one block fingerprint in common.
inline bool shares_fingerprint(const MarkedGraphView& a, const MarkedGraphView& b)
{
    std::set<std::string_view> seen(a.fingerprints.begin(), a.fingerprints.end());
    return std::any_of(b.fingerprints.begin(), b.fingerprints.end(), [&](auto f) { return seen.contains(f); });
}

/// Subgraph-isomorphism test of `referent` inside `candidate` refined by the
/// x/m fingerprint agreement over the matched node pairs.
inline MatchResult match(const MarkedGraphView& referent, const MarkedGraphView& candidate,
                         Rational threshold = Rational(1, 2))
{
    MatchResult r;
    r.m = referent.adjacency.size();
    r.n = candidate.adjacency.size();
    r.matching.assign(r.m, unmatched);
    if (r.m == 0 || r.n < r.m) {
        return r;
    }
    auto cells = build_correspondence(referent.adjacency, candidate.adjacency);
    auto matching = hopcroft_karp(cells.adjacency(), r.n);
    r.matching = matching.left_to_right;
    r.structural = matching.cardinality == r.m;
    for (std::size_t i = 0; i < r.m; ++i) {
        auto j = r.matching[i];
        if (j != unmatched && referent.fingerprints[i] == candidate.fingerprints[j]) {
            ++r.x;
        }
    }
    r.verdict = decide_verdict(r.structural, r.x, r.m, r.n, threshold);
    return r;
}

} // namespace opsig
