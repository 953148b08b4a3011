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
#include <map>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "opsig/listing.hpp"
#include "opsig/md5.hpp"

namespace opsig {

/// Successor lists indexed by node; each list sorted ascending, no duplicates.
using Adjacency = std::vector<std::vector<std::size_t>>;

struct BasicBlock {
    std::size_t index = 0;
    std::uint32_t start_addr = 0;
    std::uint32_t end_addr = 0; ///< address of the last instruction
    std::vector<std::string> mnemonics;
    std::string fingerprint;

    bool operator==(const BasicBlock&) const = default;
};

struct Cfg {
    std::string descriptor;
    std::vector<BasicBlock> blocks;
    Adjacency successors;

    std::size_t size() const { return blocks.size(); }
    bool operator==(const Cfg&) const = default;
};

/// MD5 over the mnemonics concatenated without separator.
inline std::string fingerprint(std::span<const std::string> mnemonics)
{
    std::string joined;
    for (const auto& m : mnemonics) {
        joined += m;
    }
    return md5_hex(joined);
}

inline std::string fingerprint(const BasicBlock& block)
{
    return fingerprint(block.mnemonics);
}

/// Addresses that start a basic block: the entry, every branch target and
/// every instruction following a branch or terminator.
inline std::set<std::uint32_t> leaders(const MethodListing& method)
{
    std::set<std::uint32_t> out;
    const auto& insns = method.instructions;
    if (insns.empty()) {
        return out;
    }
    out.insert(insns.front().address);
    for (std::size_t i = 0; i < insns.size(); ++i) {
        out.insert(insns[i].targets.begin(), insns[i].targets.end());
        if (insns[i].category != Category::Fall && i + 1 < insns.size()) {
            out.insert(insns[i + 1].address);
        }
    }
    return out;
}

/// Maximal leader-to-leader runs, ordered by start address and fingerprinted.
inline std::vector<BasicBlock> split_blocks(const MethodListing& method)
{
    auto starts = leaders(method);
    std::vector<BasicBlock> blocks;
    for (const auto& insn : method.instructions) {
        if (starts.contains(insn.address)) {
            BasicBlock b;
            b.index = blocks.size();
            b.start_addr = insn.address;
            blocks.push_back(std::move(b));
        }
        blocks.back().end_addr = insn.address;
        blocks.back().mnemonics.push_back(insn.mnemonic);
    }
    for (auto& b : blocks) {
        b.fingerprint = fingerprint(b);
    }
    return blocks;
}

/// Marked control-flow graph of one method.
inline Cfg build_cfg(const MethodListing& method)
{
    Cfg cfg;
    cfg.descriptor = method.descriptor;
    cfg.blocks = split_blocks(method);
    cfg.successors.assign(cfg.blocks.size(), {});

    std::map<std::uint32_t, std::size_t> block_at;
    for (const auto& b : cfg.blocks) {
        block_at.emplace(b.start_addr, b.index);
    }
    auto block_of_target = [&](std::uint32_t addr) {
        auto it = block_at.find(addr);
        if (it == block_at.end()) {
            throw std::logic_error("branch into the middle of a block at " + std::to_string(addr));
        }
        return it->second;
    };

    std::size_t insn_index = 0;
    for (const auto& block : cfg.blocks) {
        while (method.instructions[insn_index].address != block.end_addr) {
            ++insn_index;
        }
        const auto& last = method.instructions[insn_index];
        auto& succ = cfg.successors[block.index];
        bool has_next = block.index + 1 < cfg.blocks.size();
        switch (last.category) {
        case Category::Fall:
        case Category::Cond:
        case Category::Switch:
            if (has_next) {
                succ.push_back(block.index + 1);
            }
            break;
        case Category::Goto:
        case Category::Term:
            break;
        }
        for (auto t : last.targets) {
            succ.push_back(block_of_target(t));
        }
        std::sort(succ.begin(), succ.end());
        succ.erase(std::unique(succ.begin(), succ.end()), succ.end());
    }
    return cfg;
}

inline std::vector<Cfg> build_cfgs(const std::vector<MethodListing>& methods)
{
    std::vector<Cfg> out;
    out.reserve(methods.size());
    for (const auto& m : methods) {
        out.push_back(build_cfg(m));
    }
    return out;
}

} // namespace opsig
