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
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "opsig/cfg.hpp"
#include "opsig/error.hpp"
#include "opsig/md5.hpp"

namespace opsig {

/// A marked CFG: structure plus one block fingerprint per node.
struct Signature {
    std::string descriptor;
    Adjacency adjacency; ///< one (possibly empty) successor list per node
    std::vector<std::string> fingerprints;
    std::optional<std::string> family;

    std::size_t node_count() const { return fingerprints.size(); }
    bool operator==(const Signature&) const = default;
};

inline Signature make_signature(const Cfg& cfg, std::optional<std::string> family = std::nullopt)
{
    Signature sig;
    sig.descriptor = cfg.descriptor;
    sig.adjacency = cfg.successors;
    for (auto& succ : sig.adjacency) {
        std::sort(succ.begin(), succ.end());
        succ.erase(std::unique(succ.begin(), succ.end()), succ.end());
    }
    sig.fingerprints.reserve(cfg.blocks.size());
    for (const auto& b : cfg.blocks) {
        sig.fingerprints.push_back(b.fingerprint);
    }
    sig.family = std::move(family);
    return sig;
}

/// The two text lines of a signature.
struct EncodedSignature {
    std::string structure;    ///< `<descriptor>;<n>;<src>:<dst>,...;...`
    std::string fingerprints; ///< `[h0, h1, ...]`

    bool operator==(const EncodedSignature&) const = default;
};

inline EncodedSignature encode(const Signature& sig)
{
    EncodedSignature out;
    out.structure = sig.descriptor + ";" + std::to_string(sig.node_count()) + ";";
    for (std::size_t src = 0; src < sig.adjacency.size(); ++src) {
        std::vector<std::size_t> dsts = sig.adjacency[src];
        if (dsts.empty()) {
            continue;
        }
        std::sort(dsts.begin(), dsts.end());
        dsts.erase(std::unique(dsts.begin(), dsts.end()), dsts.end());
        out.structure += std::to_string(src) + ":";
        for (std::size_t i = 0; i < dsts.size(); ++i) {
            out.structure += (i == 0 ? "" : ",") + std::to_string(dsts[i]);
        }
        out.structure += ';';
    }
    out.fingerprints = "[";
    for (std::size_t i = 0; i < sig.fingerprints.size(); ++i) {
        out.fingerprints += (i == 0 ? "" : ", ") + sig.fingerprints[i];
    }
    out.fingerprints += "]";
    return out;
}

/// Both lines, each LF-terminated.
inline std::string encode_text(const Signature& sig)
{
    auto e = encode(sig);
    return e.structure + "\n" + e.fingerprints + "\n";
}

namespace detail {

inline std::optional<std::size_t> parse_index(std::string_view s)
{
    if (s.empty() || (s.size() > 1 && s.front() == '0')) {
        return std::nullopt;
    }
    std::size_t v = 0;
    auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || end != s.data() + s.size()) {
        return std::nullopt;
    }
    return v;
}

inline std::vector<std::string_view> split(std::string_view s, char sep)
{
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        auto next = s.find(sep, pos);
        out.push_back(s.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos));
        if (next == std::string_view::npos) {
            return out;
        }
        pos = next + 1;
    }
}

/// `src:d0,d1,...` with strictly ascending destinations.
inline std::optional<std::pair<std::size_t, std::vector<std::size_t>>> parse_adjacency_entry(std::string_view tok)
{
    auto colon = tok.find(':');
    if (colon == std::string_view::npos) {
        return std::nullopt;
    }
    auto src = parse_index(tok.substr(0, colon));
    if (!src) {
        return std::nullopt;
    }
    std::vector<std::size_t> dsts;
    for (auto part : split(tok.substr(colon + 1), ',')) {
        auto d = parse_index(part);
        if (!d || (!dsts.empty() && *d <= dsts.back())) {
            return std::nullopt;
        }
        dsts.push_back(*d);
    }
    return std::make_pair(*src, std::move(dsts));
}

} // namespace detail

/// Inverse of encode. Only canonical text is accepted.
inline Signature decode(std::string_view structure, std::string_view fingerprints)
{
    if (structure.empty() || structure.back() != ';') {
        throw ParseError(0, "signature structure must end with ';'");
    }
    auto tokens = detail::split(structure.substr(0, structure.size() - 1), ';');

    // Adjacency entries are read from the right so descriptors may contain ';'.
    std::vector<std::pair<std::size_t, std::vector<std::size_t>>> entries;
    std::size_t k = tokens.size();
    while (k > 0 && tokens[k - 1].find(':') != std::string_view::npos) {
        auto entry = detail::parse_adjacency_entry(tokens[k - 1]);
        if (!entry) {
            throw ParseError(0, "malformed adjacency entry '" + std::string(tokens[k - 1]) + "'");
        }
        entries.push_back(std::move(*entry));
        --k;
    }
    std::reverse(entries.begin(), entries.end());
    if (k < 2) {
        throw ParseError(0, "signature needs a descriptor and a node count");
    }
    auto count = detail::parse_index(tokens[k - 1]);
    if (!count || *count == 0) {
        throw ParseError(0, "malformed node count '" + std::string(tokens[k - 1]) + "'");
    }

    Signature sig;
    for (std::size_t i = 0; i + 1 < k; ++i) {
        sig.descriptor += (i == 0 ? "" : ";") + std::string(tokens[i]);
    }
    if (sig.descriptor.empty()) {
        throw ParseError(0, "empty descriptor");
    }
    sig.adjacency.assign(*count, {});
    std::optional<std::size_t> prev;
    for (auto& [src, dsts] : entries) {
        if (src >= *count || dsts.back() >= *count) {
            throw ParseError(0, "adjacency index out of range for " + std::to_string(*count) + " nodes");
        }
        if (prev && src <= *prev) {
            throw ParseError(0, "adjacency sources must be strictly ascending");
        }
        prev = src;
        sig.adjacency[src] = std::move(dsts);
    }

    if (fingerprints.size() < 2 || fingerprints.front() != '[' || fingerprints.back() != ']') {
        throw ParseError(0, "fingerprint list must be enclosed in [ ]");
    }
    auto inner = fingerprints.substr(1, fingerprints.size() - 2);
    if (!inner.empty()) {
        for (auto part : detail::split(inner, ',')) {
            if (!sig.fingerprints.empty()) {
                if (!part.starts_with(' ')) {
                    throw ParseError(0, "fingerprints must be separated by ', '");
                }
                part.remove_prefix(1);
            }
            if (!is_md5_hex(part)) {
                throw ParseError(0, "not a 32-digit lowercase hex digest: '" + std::string(part) + "'");
            }
            sig.fingerprints.emplace_back(part);
        }
    }
    if (sig.fingerprints.size() != *count) {
        throw ParseError(0, "fingerprint count " + std::to_string(sig.fingerprints.size()) +
                                " does not match node count " + std::to_string(*count));
    }
    return sig;
}

inline Signature decode(const EncodedSignature& e)
{
    return decode(e.structure, e.fingerprints);
}

/// Decodes the two-line text produced by encode_text.
inline Signature decode(std::string_view text)
{
    auto nl = text.find('\n');
    if (nl == std::string_view::npos) {
        throw ParseError(0, "signature text needs two lines");
    }
    auto second = text.substr(nl + 1);
    if (second.ends_with('\n')) {
        second.remove_suffix(1);
    }
    return decode(text.substr(0, nl), second);
}

struct Dictionary {
    std::vector<Signature> entries;
    std::vector<std::string> provenance; ///< free-text `#` lines

    bool operator==(const Dictionary&) const = default;
};

inline std::string format_dictionary(const Dictionary& dict)
{
    std::string out;
    for (const auto& line : dict.provenance) {
        out += "# " + line + "\n";
    }
    for (const auto& sig : dict.entries) {
        out += "@family";
        if (sig.family) {
            out += " " + *sig.family;
        }
        out += "\n" + encode_text(sig);
    }
    return out;
}

/// Validates every entry; errors carry the 1-based line of the bad entry.
inline Dictionary parse_dictionary(std::string_view text)
{
    Dictionary dict;
    std::set<std::pair<std::string, std::optional<std::string>>> seen;
    std::optional<std::string> family;
    std::string structure;
    enum class Expect { Family, Structure, Fingerprints } expect = Expect::Family;
    std::size_t line_no = 0;
    std::size_t entry_line = 0;

    std::size_t pos = 0;
    while (pos < text.size()) {
        auto nl = text.find('\n', pos);
        auto line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() : nl + 1;
        ++line_no;
        if (line.ends_with('\r')) {
            line.remove_suffix(1);
        }
        if (expect == Expect::Family) {
            if (line.empty()) {
                continue;
            }
            if (line.front() == '#') {
                line.remove_prefix(1);
                if (line.starts_with(' ')) {
                    line.remove_prefix(1);
                }
                dict.provenance.emplace_back(line);
                continue;
            }
            if (line != "@family" && !line.starts_with("@family ")) {
                throw ParseError(line_no, "expected '@family <label>'");
            }
            auto label = line.size() > 8 ? line.substr(8) : std::string_view{};
            family = label.empty() ? std::nullopt : std::optional<std::string>(label);
            entry_line = line_no;
            expect = Expect::Structure;
        } else if (expect == Expect::Structure) {
            structure = std::string(line);
            expect = Expect::Fingerprints;
        } else {
            Signature sig;
            try {
                sig = decode(structure, line);
            } catch (const ParseError& e) {
                throw ParseError(entry_line, e.detail());
            }
            sig.family = family;
            if (!seen.emplace(sig.descriptor, sig.family).second) {
                throw ParseError(entry_line, "duplicate entry " + sig.descriptor + " for family " +
                                                 family.value_or("(none)"));
            }
            dict.entries.push_back(std::move(sig));
            expect = Expect::Family;
        }
    }
    if (expect != Expect::Family) {
        throw ParseError(entry_line, "truncated dictionary entry");
    }
    return dict;
}

inline Dictionary dict_load(const std::filesystem::path& path)
{
    auto text = read_text_file(path);
    try {
        return parse_dictionary(text);
    } catch (const ParseError& e) {
        throw ParseError(e.line(), e.detail(), path.string());
    }
}

/// Appends signatures to a dictionary file, creating it when missing.
/// Rejects (descriptor, family) pairs already present. Returns the result.
inline Dictionary dict_add(const std::filesystem::path& path, std::span<const Signature> signatures,
                           std::vector<std::string> provenance = {"opsig signature dictionary"})
{
    Dictionary dict;
    bool exists = std::filesystem::exists(path);
    if (exists) {
        dict = dict_load(path);
    }
    std::set<std::pair<std::string, std::optional<std::string>>> seen;
    for (const auto& e : dict.entries) {
        seen.emplace(e.descriptor, e.family);
    }
    Dictionary added;
    if (!exists) {
        added.provenance = std::move(provenance);
    }
    for (const auto& sig : signatures) {
        if (!seen.emplace(sig.descriptor, sig.family).second) {
            throw DataError("duplicate dictionary entry " + sig.descriptor + " for family " +
                            sig.family.value_or("(none)"));
        }
        added.entries.push_back(sig);
    }
    std::ofstream out(path, std::ios::binary | std::ios::app);
    if (!out) {
        throw DataError("cannot write " + path.string());
    }
    out << format_dictionary(added);
    if (!out.flush()) {
        throw DataError("write failed for " + path.string());
    }
    if (!exists) {
        dict.provenance = std::move(added.provenance);
    }
    dict.entries.insert(dict.entries.end(), added.entries.begin(), added.entries.end());
    return dict;
}

/// One line per entry: family, descriptor, node count (tab-separated).
inline std::string dict_list(const Dictionary& dict)
{
    std::string out;
    for (const auto& e : dict.entries) {
        out += e.family.value_or("-") + "\t" + e.descriptor + "\t" + std::to_string(e.node_count()) + "\n";
    }
    return out;
}

} // namespace opsig
