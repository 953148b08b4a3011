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

// Seeded random inputs for property tests.

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "opsig/cfg.hpp"
#include "opsig/listing.hpp"
#include "opsig/ngram.hpp"
#include "opsig/opcodes.hpp"

namespace opsig::gen {

using Rng = std::mt19937_64;

inline std::size_t uniform(Rng& rng, std::size_t lo, std::size_t hi)
{
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

inline bool chance(Rng& rng, double p)
{
    return std::bernoulli_distribution(p)(rng);
}

template <typename T>
const T& pick(Rng& rng, const std::vector<T>& pool)
{
    return pool[uniform(rng, 0, pool.size() - 1)];
}

inline const std::vector<std::string>& default_fall_pool()
{
    static const std::vector<std::string> pool = {
        "MOVE",         "MOVE_RESULT", "MOVE_RESULT_OBJECT", "CONST_4",     "CONST_16",  "IGET",
        "IGET_OBJECT",  "IPUT",        "IPUT_OBJECT",        "AGET_OBJECT", "APUT",      "NEW_INSTANCE",
        "INVOKE_DIRECT", "INVOKE_STATIC", "ADD_INT",         "MUL_INT",     "CHECK_CAST", "ARRAY_LENGTH",
    };
    return pool;
}

struct ListingOptions {
    std::size_t min_instructions = 1;
    std::size_t max_instructions = 24;
    double branch_probability = 0.25;
    std::vector<std::string> fall_pool = default_fall_pool();
};

inline Instruction make_instruction(std::uint32_t address, const std::string& mnemonic)
{
    Instruction insn;
    insn.address = address;
    insn.opcode = static_cast<std::uint8_t>(opcode_of(mnemonic).value_or(0));
    insn.mnemonic = mnemonic;
    insn.category = categorize(mnemonic);
    return insn;
}

/// A valid method: increasing addresses from 0, resolvable targets, and a
/// TERM or GOTO last instruction.
inline MethodListing random_method(Rng& rng, std::string descriptor, const ListingOptions& opt = {})
{
    static const std::vector<std::string> branches = {"IF_EQZ", "IF_NEZ", "IF_LT", "IF_GE", "GOTO",
                                                      "PACKED_SWITCH", "RETURN_VOID", "RETURN", "THROW"};
    static const std::vector<std::string> last = {"RETURN_VOID", "RETURN_OBJECT", "THROW", "GOTO"};
    MethodListing m;
    m.descriptor = std::move(descriptor);
    auto n = uniform(rng, opt.min_instructions, opt.max_instructions);
    std::uint32_t addr = 0;
    for (std::size_t i = 0; i < n; ++i) {
        std::string mn = i + 1 == n ? pick(rng, last)
                         : chance(rng, opt.branch_probability) ? pick(rng, branches)
                                                               : pick(rng, opt.fall_pool);
        auto insn = make_instruction(addr, mn);
        insn.width = static_cast<std::uint32_t>(uniform(rng, 1, 3));
        if (i + 1 == n) {
            insn.width = 1;
        }
        if (uniform(rng, 0, 2) == 0) {
            insn.operands = "v" + std::to_string(uniform(rng, 0, 15));
        }
        addr += insn.width;
        m.instructions.push_back(std::move(insn));
    }
    for (auto& insn : m.instructions) {
        auto target = [&] { return m.instructions[uniform(rng, 0, n - 1)].address; };
        switch (insn.category) {
        case Category::Cond:
        case Category::Goto:
            insn.targets = {target()};
            break;
        case Category::Switch: {
            auto k = uniform(rng, 1, 3);
            for (std::size_t t = 0; t < k; ++t) {
                auto a = target();
                if (std::find(insn.targets.begin(), insn.targets.end(), a) == insn.targets.end()) {
                    insn.targets.push_back(a);
                }
            }
            break;
        }
        default:
            break;
        }
    }
    return m;
}

/// n-node graph in which every node is reachable from node 0.
inline Adjacency random_reachable_graph(Rng& rng, std::size_t n, double extra_edge_probability = 0.15)
{
    Adjacency g(n);
    for (std::size_t v = 1; v < n; ++v) {
        g[uniform(rng, 0, v - 1)].push_back(v);
    }
    for (std::size_t u = 0; u < n; ++u) {
        for (std::size_t v = 1; v < n; ++v) {
            if (chance(rng, extra_edge_probability)) {
                g[u].push_back(v);
            }
        }
    }
    for (auto& s : g) {
        std::sort(s.begin(), s.end());
        s.erase(std::unique(s.begin(), s.end()), s.end());
    }
    return g;
}

inline std::vector<std::vector<std::size_t>> random_bipartite(Rng& rng, std::size_t left, std::size_t right, double p)
{
    std::vector<std::vector<std::size_t>> adj(left);
    for (std::size_t i = 0; i < left; ++i) {
        for (std::size_t j = 0; j < right; ++j) {
            if (chance(rng, p)) {
                adj[i].push_back(j);
            }
        }
    }
    return adj;
}

inline std::vector<std::string> random_tokens(Rng& rng, std::size_t n, unsigned lo = 0x01, unsigned hi = 0x3f)
{
    std::vector<std::string> out;
    for (std::size_t i = 0; i < n; ++i) {
        out.push_back(opcode_token(static_cast<std::uint8_t>(uniform(rng, lo, hi))));
    }
    return out;
}

/// Balanced corpus where every malware document carries one of four
/// malware-only bigrams and every benign document one of four benign-only
/// bigrams. Planted tokens are disjoint from the background alphabet.
inline std::vector<Document> planted_ngram_corpus(std::uint64_t seed, std::size_t size = 400)
{
    Rng rng(seed);
    const std::vector<std::vector<std::string>> planted[2] = {
        {{"f0", "f1"}, {"f2", "f3"}, {"f4", "f5"}, {"f6", "f7"}},
        {{"e0", "e1"}, {"e2", "e3"}, {"e4", "e5"}, {"e6", "e7"}},
    };
    std::vector<Document> docs;
    for (std::size_t i = 0; i < size; ++i) {
        Document d;
        d.label = i % 2 == 0 ? 1 : 0;
        d.id = "synthetic::Lcom/synth/C" + std::to_string(i) + ";->m()V";
        d.tokens = random_tokens(rng, uniform(rng, 12, 40));
        const auto& g = pick(rng, planted[d.label]);
        auto at = static_cast<std::ptrdiff_t>(uniform(rng, 0, d.tokens.size()));
        d.tokens.insert(d.tokens.begin() + at, g.begin(), g.end());
        docs.push_back(std::move(d));
    }
    return docs;
}

} // namespace opsig::gen
