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
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "opsig/error.hpp"
#include "opsig/log.hpp"
#include "opsig/opcodes.hpp"

namespace opsig {

/// How control leaves an instruction.
enum class Category {
    Fall,   ///< continues with the next instruction
    Cond,   ///< two-way branch: explicit target plus implicit fall-through
    Goto,   ///< unconditional jump
    Switch, ///< table jump: every target plus fall-through
    Term,   ///< return or throw
};

inline std::string_view to_string(Category c)
{
    switch (c) {
    case Category::Fall: return "FALL";
    case Category::Cond: return "COND";
    case Category::Goto: return "GOTO";
    case Category::Switch: return "SWITCH";
    case Category::Term: return "TERM";
    }
    return "?";
}

/// Branch semantics of a mnemonic. Total: anything unrecognised falls through.
inline Category categorize(std::string_view mnemonic)
{
    if (mnemonic.starts_with("IF_")) {
        return Category::Cond;
    }
    if (mnemonic.starts_with("GOTO")) {
        return Category::Goto;
    }
    if (mnemonic == "PACKED_SWITCH" || mnemonic == "SPARSE_SWITCH") {
        return Category::Switch;
    }
    if (mnemonic.starts_with("RETURN") || mnemonic == "THROW") {
        return Category::Term;
    }
    return Category::Fall;
}

struct Instruction {
    std::uint32_t address = 0; ///< code-unit offset
    std::uint8_t opcode = 0;
    std::string mnemonic;
    std::string operands; ///< opaque; never hashed
    Category category = Category::Fall;
    std::vector<std::uint32_t> targets;
    std::uint32_t width = 1; ///< code units to the next sequential instruction

    bool operator==(const Instruction&) const = default;
};

struct MethodListing {
    std::string descriptor;
    std::vector<Instruction> instructions;

    bool operator==(const MethodListing&) const = default;
};

namespace detail {

inline std::string_view trim(std::string_view s)
{
    auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
    while (!s.empty() && is_space(s.front())) {
        s.remove_prefix(1);
    }
    while (!s.empty() && is_space(s.back())) {
        s.remove_suffix(1);
    }
    return s;
}

inline std::string_view next_token(std::string_view& s)
{
    s = trim(s);
    auto end = s.find_first_of(" \t");
    auto tok = s.substr(0, end);
    s.remove_prefix(end == std::string_view::npos ? s.size() : end);
    return tok;
}

inline bool parse_hex(std::string_view s, std::size_t min_digits, std::size_t max_digits, std::uint32_t& out)
{
    if (s.size() < min_digits || s.size() > max_digits) {
        return false;
    }
    auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), out, 16);
    return ec == std::errc{} && end == s.data() + s.size();
}

inline bool is_mnemonic_token(std::string_view s)
{
    if (s.empty() || s.front() < 'A' || s.front() > 'Z') {
        return false;
    }
    return std::all_of(s.begin(), s.end(), [](char c) {
        return (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
    });
}

/// Splits "operands -> 0014,0020" into operands and targets. Returns false
/// when there is no well-formed target list (everything is then operands).
inline bool split_targets(std::string_view rest, std::string_view& operands, std::vector<std::uint32_t>& targets)
{
    auto arrow = rest.rfind("->");
    if (arrow == std::string_view::npos || (arrow > 0 && rest[arrow - 1] != ' ' && rest[arrow - 1] != '\t')) {
        return false;
    }
    auto list = rest.substr(arrow + 2);
    if (list.empty() || (list.front() != ' ' && list.front() != '\t')) {
        return false;
    }
    list = trim(list);
    std::vector<std::uint32_t> parsed;
    while (true) {
        auto comma = list.find(',');
        std::uint32_t t = 0;
        if (!parse_hex(list.substr(0, comma), 4, 8, t)) {
            return false;
        }
        parsed.push_back(t);
        if (comma == std::string_view::npos) {
            break;
        }
        list.remove_prefix(comma + 1);
    }
    operands = trim(rest.substr(0, arrow));
    targets = std::move(parsed);
    return true;
}

inline Instruction parse_instruction(std::string_view line, std::size_t line_no)
{
    std::string_view rest = line;
    auto addr_tok = next_token(rest);
    auto op_tok = next_token(rest);
    auto mnem_tok = next_token(rest);
    rest = trim(rest);

    Instruction insn;
    std::uint32_t value = 0;
    if (!parse_hex(addr_tok, 4, 8, value)) {
        throw ParseError(line_no, "expected a 4-digit hex address, got '" + std::string(addr_tok) + "'");
    }
    insn.address = value;
    if (!parse_hex(op_tok, 2, 2, value)) {
        throw ParseError(line_no, "expected a 2-digit hex opcode, got '" + std::string(op_tok) + "'");
    }
    insn.opcode = static_cast<std::uint8_t>(value);
    if (!is_mnemonic_token(mnem_tok)) {
        throw ParseError(line_no, "expected an uppercase mnemonic, got '" + std::string(mnem_tok) + "'");
    }
    insn.mnemonic = std::string(mnem_tok);
    insn.category = categorize(mnem_tok);

    std::string_view operands = rest;
    split_targets(rest, operands, insn.targets);
    insn.operands = std::string(operands);

    auto n = insn.targets.size();
    switch (insn.category) {
    case Category::Cond:
    case Category::Goto:
        if (n != 1) {
            throw ParseError(line_no, insn.mnemonic + " needs exactly one branch target, got " + std::to_string(n));
        }
        break;
    case Category::Switch:
        if (n == 0) {
            throw ParseError(line_no, insn.mnemonic + " needs at least one branch target");
        }
        break;
    case Category::Fall:
    case Category::Term:
        if (n != 0) {
            throw ParseError(line_no, insn.mnemonic + " cannot carry branch targets");
        }
        break;
    }
    return insn;
}

inline void finish_method(MethodListing& method, const std::vector<std::size_t>& lines, std::size_t end_line)
{
    auto& insns = method.instructions;
    if (insns.empty() || insns.front().address != 0) {
        throw ParseError(insns.empty() ? end_line : lines.front(),
                         "method " + method.descriptor + " does not start at address 0000");
    }
    std::set<std::uint32_t> addresses;
    for (std::size_t i = 0; i < insns.size(); ++i) {
        if (i > 0 && insns[i].address <= insns[i - 1].address) {
            throw ParseError(lines[i], insns[i].address == insns[i - 1].address
                                           ? "duplicate address"
                                           : "addresses must be strictly increasing");
        }
        addresses.insert(insns[i].address);
    }
    for (std::size_t i = 0; i < insns.size(); ++i) {
        for (auto t : insns[i].targets) {
            if (!addresses.contains(t)) {
                std::ostringstream msg;
                msg << "dangling branch target " << std::hex << t;
                throw ParseError(lines[i], msg.str());
            }
        }
        insns[i].width = i + 1 < insns.size() ? insns[i + 1].address - insns[i].address : 1;
    }
    auto last = insns.back().category;
    if (last != Category::Term && last != Category::Goto) {
        throw ParseError(lines.back(), "method " + method.descriptor + " falls off its last instruction");
    }
}

} // namespace detail

/// Parses every `.method` ... `.end method` block of a listing document.
/// Throws ParseError (with a 1-based line number) on malformed input.
inline std::vector<MethodListing> parse_listing(std::string_view text)
{
    std::vector<MethodListing> methods;
    std::set<std::string> unknown;
    bool in_method = false;
    MethodListing current;
    std::vector<std::size_t> lines;
    std::size_t line_no = 0;

    std::size_t pos = 0;
    while (pos < text.size()) {
        auto nl = text.find('\n', pos);
        auto line = detail::trim(text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos));
        pos = nl == std::string_view::npos ? text.size() : nl + 1;
        ++line_no;
        if (line.empty() || line.front() == '#') {
            continue;
        }
        if (line.starts_with(".method")) {
            if (in_method) {
                throw ParseError(line_no, ".method inside method " + current.descriptor);
            }
            auto desc = detail::trim(line.substr(7));
            if (desc.empty() || (line[7] != ' ' && line[7] != '\t')) {
                throw ParseError(line_no, ".method needs a descriptor");
            }
            current = MethodListing{std::string(desc), {}};
            lines.clear();
            in_method = true;
        } else if (line == ".end method") {
            if (!in_method) {
                throw ParseError(line_no, ".end method without .method");
            }
            detail::finish_method(current, lines, line_no);
            methods.push_back(std::move(current));
            in_method = false;
        } else if (line.front() == '.') {
            throw ParseError(line_no, "unknown directive '" + std::string(line) + "'");
        } else {
            if (!in_method) {
                throw ParseError(line_no, "instruction outside of a method");
            }
            auto insn = detail::parse_instruction(line, line_no);
            if (!is_known_mnemonic(insn.mnemonic)) {
                unknown.insert(insn.mnemonic);
            }
            current.instructions.push_back(std::move(insn));
            lines.push_back(line_no);
        }
    }
    if (in_method) {
        throw ParseError(line_no, "unterminated method " + current.descriptor);
    }
    for (const auto& m : unknown) {
        log::warn("unknown mnemonic " + m + " treated as FALL");
    }
    return methods;
}

inline std::string format_instruction(const Instruction& insn)
{
    static constexpr char hex[] = "0123456789abcdef";
    auto hex_addr = [](std::uint32_t a) {
        std::string s;
        do {
            s.insert(s.begin(), hex[a & 0xf]);
            a >>= 4;
        } while (a != 0);
        while (s.size() < 4) {
            s.insert(s.begin(), '0');
        }
        return s;
    };
    std::string out = hex_addr(insn.address);
    out += ' ';
    out += hex[insn.opcode >> 4];
    out += hex[insn.opcode & 0xf];
    out += ' ';
    out += insn.mnemonic;
    if (!insn.operands.empty()) {
        out += ' ';
        out += insn.operands;
    }
    for (std::size_t i = 0; i < insn.targets.size(); ++i) {
        out += i == 0 ? " -> " : ",";
        out += hex_addr(insn.targets[i]);
    }
    return out;
}

/// Inverse of parse_listing.
inline std::string format_listing(const std::vector<MethodListing>& methods)
{
    std::string out;
    for (const auto& m : methods) {
        out += ".method " + m.descriptor + "\n";
        for (const auto& insn : m.instructions) {
            out += format_instruction(insn);
            out += '\n';
        }
        out += ".end method\n";
    }
    return out;
}

inline std::string read_text_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot read " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Reads and parses a listing file; parse errors are prefixed with the path.
inline std::vector<MethodListing> read_listing_file(const std::filesystem::path& path)
{
    auto text = read_text_file(path);
    try {
        return parse_listing(text);
    } catch (const ParseError& e) {
        throw ParseError(e.line(), e.detail(), path.string());
    }
}

} // namespace opsig
