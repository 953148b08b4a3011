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
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "opsig/error.hpp"
#include "opsig/listing.hpp"
#include "opsig/log.hpp"
#include "opsig/parallel.hpp"

namespace opsig {

/// One method as a sentence over the opcode alphabet.
struct Document {
    std::string id;
    std::vector<std::string> tokens; ///< opcode bytes as two lowercase hex digits
    int label = 0;                   ///< 0 benign, 1 malware
    std::optional<std::string> family;

    bool operator==(const Document&) const = default;
};

inline std::string opcode_token(std::uint8_t opcode)
{
    static constexpr char hex[] = "0123456789abcdef";
    return {hex[opcode >> 4], hex[opcode & 0xf]};
}

inline Document make_document(const MethodListing& method, std::string_view source, int label,
                              std::optional<std::string> family = std::nullopt)
{
    Document doc;
    doc.id = std::string(source) + "::" + method.descriptor;
    doc.tokens.reserve(method.instructions.size());
    for (const auto& insn : method.instructions) {
        doc.tokens.push_back(opcode_token(insn.opcode));
    }
    doc.label = label;
    doc.family = std::move(family);
    return doc;
}

/// Every contiguous window of `size` tokens, space-joined, in order.
inline std::vector<std::string> extract_ngrams(const Document& doc, std::size_t size)
{
    std::vector<std::string> out;
    if (size == 0 || doc.tokens.size() < size) {
        return out;
    }
    out.reserve(doc.tokens.size() - size + 1);
    for (std::size_t i = 0; i + size <= doc.tokens.size(); ++i) {
        std::string g = doc.tokens[i];
        for (std::size_t j = 1; j < size; ++j) {
            g += ' ';
            g += doc.tokens[i + j];
        }
        out.push_back(std::move(g));
    }
    return out;
}

/// Ngram occurrence counts of one document at one size.
struct TermFrequencies {
    std::map<std::string, std::size_t, std::less<>> counts;
    std::size_t total = 0;

    std::size_t count(std::string_view g) const
    {
        auto it = counts.find(g);
        return it == counts.end() ? 0 : it->second;
    }
    /// count / total, and 0 for a document with no ngrams.
    double tf(std::string_view g) const
    {
        return total == 0 ? 0.0 : static_cast<double>(count(g)) / static_cast<double>(total);
    }
};

inline TermFrequencies count_ngrams(const Document& doc, std::size_t size)
{
    TermFrequencies f;
    for (auto& g : extract_ngrams(doc, size)) {
        ++f.counts[std::move(g)];
        ++f.total;
    }
    return f;
}

inline double tf(std::string_view ngram, const Document& doc, std::size_t size)
{
    return count_ngrams(doc, size).tf(ngram);
}

/// Natural-log inverse document frequency; 0 when no document has the ngram.
inline double idf_from_counts(std::size_t documents, std::size_t containing)
{
    if (containing == 0 || documents == 0) {
        return 0.0;
    }
    return std::log(static_cast<double>(documents) / static_cast<double>(containing));
}

struct NgramStats {
    std::string ngram;
    std::map<std::size_t, double> tf;    ///< document index -> tf, documents containing the ngram only
    double idf = 0.0;
    std::map<std::size_t, double> tfidf; ///< same keys as tf
    std::size_t doc_count = 0;           ///< documents containing the ngram
};

/// Per-document counts plus corpus document frequencies at one ngram size.
class NgramIndex {
public:
    NgramIndex(std::span<const Document> docs, std::size_t size, std::size_t jobs = 1) : size_(size)
    {
        per_doc_.resize(docs.size());
        parallel_for(docs.size(), jobs, [&](std::size_t d) { per_doc_[d] = count_ngrams(docs[d], size); });
        for (const auto& f : per_doc_) {
            for (const auto& [g, c] : f.counts) {
                ++doc_freq_[g];
            }
        }
    }

    std::size_t ngram_size() const { return size_; }
    std::size_t document_count() const { return per_doc_.size(); }
    const TermFrequencies& frequencies(std::size_t doc) const { return per_doc_[doc]; }
    const std::map<std::string, std::size_t, std::less<>>& document_frequencies() const { return doc_freq_; }

    std::size_t document_frequency(std::string_view g) const
    {
        auto it = doc_freq_.find(g);
        return it == doc_freq_.end() ? 0 : it->second;
    }
    double idf(std::string_view g) const { return idf_from_counts(document_count(), document_frequency(g)); }
    double tf(std::string_view g, std::size_t doc) const { return per_doc_[doc].tf(g); }
    double tfidf(std::string_view g, std::size_t doc) const { return tf(g, doc) * idf(g); }

    NgramStats stats(std::string_view g) const
    {
        NgramStats s;
        s.ngram = std::string(g);
        s.idf = idf(g);
        for (std::size_t d = 0; d < per_doc_.size(); ++d) {
            if (auto c = per_doc_[d].count(g); c > 0) {
                auto t = per_doc_[d].tf(g);
                s.tf[d] = t;
                s.tfidf[d] = t * s.idf;
                ++s.doc_count;
            }
        }
        return s;
    }

private:
    std::size_t size_;
    std::vector<TermFrequencies> per_doc_;
    std::map<std::string, std::size_t, std::less<>> doc_freq_;
};

inline double idf(std::string_view ngram, std::span<const Document> corpus, std::size_t size)
{
    std::size_t containing = 0;
    for (const auto& doc : corpus) {
        if (count_ngrams(doc, size).count(ngram) > 0) {
            ++containing;
        }
    }
    return idf_from_counts(corpus.size(), containing);
}

struct RankedNgram {
    std::string ngram;
    double score = 0.0; ///< |mean tfidf over malware - mean tfidf over benign|
    double idf = 0.0;
    std::size_t doc_count = 0;
};

/// The `k` ngrams whose class-conditional mean TF-IDF differs most,
/// descending, ties broken lexicographically.
inline std::vector<RankedNgram> select_reference(std::span<const Document> corpus, std::size_t size, std::size_t k,
                                                 std::size_t jobs = 1)
{
    NgramIndex index(corpus, size, jobs);
    std::size_t class_docs[2] = {0, 0};
    for (const auto& doc : corpus) {
        ++class_docs[doc.label == 1 ? 1 : 0];
    }

    // Sum of tf per class; idf factors out of the class means.
    std::map<std::string_view, std::pair<double, double>> tf_sums;
    for (std::size_t d = 0; d < corpus.size(); ++d) {
        const auto& f = index.frequencies(d);
        for (const auto& [g, c] : f.counts) {
            auto& sums = tf_sums[g];
            auto t = static_cast<double>(c) / static_cast<double>(f.total);
            (corpus[d].label == 1 ? sums.second : sums.first) += t;
        }
    }

    std::vector<RankedNgram> ranked;
    ranked.reserve(tf_sums.size());
    for (const auto& [g, sums] : tf_sums) {
        RankedNgram r;
        r.ngram = std::string(g);
        r.idf = index.idf(g);
        r.doc_count = index.document_frequency(g);
        auto mean_benign = class_docs[0] == 0 ? 0.0 : sums.first * r.idf / static_cast<double>(class_docs[0]);
        auto mean_malware = class_docs[1] == 0 ? 0.0 : sums.second * r.idf / static_cast<double>(class_docs[1]);
        r.score = std::abs(mean_malware - mean_benign);
        ranked.push_back(std::move(r));
    }
    std::sort(ranked.begin(), ranked.end(), [](const RankedNgram& a, const RankedNgram& b) {
        return a.score != b.score ? a.score > b.score : a.ngram < b.ngram;
    });
    if (ranked.size() < k) {
        log::warn("only " + std::to_string(ranked.size()) + " distinct ngrams of size " + std::to_string(size) +
                  ", fewer than the requested " + std::to_string(k));
    } else {
        ranked.resize(k);
    }
    return ranked;
}

struct CensusRow {
    std::size_t size = 0;
    std::size_t distinct = 0;

    bool operator==(const CensusRow&) const = default;
};

/// Distinct-ngram count for every size in [min_size, max_size].
inline std::vector<CensusRow> ngram_census(std::span<const Document> corpus, std::size_t min_size = 1,
                                           std::size_t max_size = 9)
{
    std::vector<CensusRow> rows;
    for (auto s = min_size; s <= max_size; ++s) {
        std::set<std::string> distinct;
        for (const auto& doc : corpus) {
            for (auto& g : extract_ngrams(doc, s)) {
                distinct.insert(std::move(g));
            }
        }
        rows.push_back({s, distinct.size()});
    }
    return rows;
}

inline std::string format_census_csv(const std::vector<CensusRow>& rows)
{
    std::string out = "size,distinct_ngrams\n";
    for (const auto& r : rows) {
        out += std::to_string(r.size) + "," + std::to_string(r.distinct) + "\n";
    }
    return out;
}

inline std::string format_double(double v)
{
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return ec == std::errc{} ? std::string(buf, end) : std::string("nan");
}

inline std::string format_selection_csv(const std::vector<RankedNgram>& ranked)
{
    std::string out = "rank,ngram,score,idf,doc_count\n";
    for (std::size_t i = 0; i < ranked.size(); ++i) {
        const auto& r = ranked[i];
        out += std::to_string(i) + "," + r.ngram + "," + format_double(r.score) + "," + format_double(r.idf) + "," +
               std::to_string(r.doc_count) + "\n";
    }
    return out;
}

// ---- corpus assembly ------------------------------------------------------

inline std::vector<std::string> default_api_blocklist()
{
    return {"Landroid/", "Ljava/", "Lcom/google/"};
}

/// Platform methods are not mined.
inline bool is_blocked(std::string_view descriptor, std::span<const std::string> blocklist)
{
    return std::any_of(blocklist.begin(), blocklist.end(),
                       [&](const std::string& prefix) { return descriptor.starts_with(prefix); });
}

struct ManifestEntry {
    std::filesystem::path path;
    std::string source; ///< path as written in the manifest
    int label = 0;
    std::optional<std::string> family;
};

/// Tab-separated `<listing path>\t<0|1>[\t<family>]`; relative paths resolve
/// against the manifest's directory. `#` lines and blank lines are skipped.
inline std::vector<ManifestEntry> parse_manifest(std::string_view text, const std::filesystem::path& base_dir)
{
    std::vector<ManifestEntry> out;
    std::size_t pos = 0;
    std::size_t line_no = 0;
    while (pos < text.size()) {
        auto nl = text.find('\n', pos);
        auto line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() : nl + 1;
        ++line_no;
        if (line.ends_with('\r')) {
            line.remove_suffix(1);
        }
        if (detail::trim(line).empty() || line.front() == '#') {
            continue;
        }
        std::vector<std::string_view> fields;
        for (std::size_t start = 0;;) {
            auto tab = line.find('\t', start);
            fields.push_back(line.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start));
            if (tab == std::string_view::npos) {
                break;
            }
            start = tab + 1;
        }
        if (fields.size() < 2 || fields.size() > 3 || fields[0].empty()) {
            throw ParseError(line_no, "manifest line needs <path>\\t<class>[\\t<family>]");
        }
        if (fields[1] != "0" && fields[1] != "1") {
            throw ParseError(line_no, "class label must be 0 or 1, got '" + std::string(fields[1]) + "'");
        }
        ManifestEntry e;
        e.source = std::string(fields[0]);
        e.path = std::filesystem::path(e.source);
        if (e.path.is_relative()) {
            e.path = base_dir / e.path;
        }
        e.label = fields[1] == "1" ? 1 : 0;
        if (fields.size() == 3 && !fields[2].empty()) {
            e.family = std::string(fields[2]);
        }
        out.push_back(std::move(e));
    }
    return out;
}

inline std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path)
{
    auto text = read_text_file(path);
    try {
        return parse_manifest(text, path.parent_path());
    } catch (const ParseError& e) {
        throw ParseError(e.line(), e.detail(), path.string());
    }
}

/// A mined method with the listing it came from.
struct LabeledMethod {
    Document doc;
    MethodListing method;
};

inline std::vector<LabeledMethod> load_corpus(std::span<const ManifestEntry> manifest,
                                              std::span<const std::string> blocklist)
{
    std::vector<LabeledMethod> out;
    for (const auto& entry : manifest) {
        for (auto& method : read_listing_file(entry.path)) {
            if (is_blocked(method.descriptor, blocklist)) {
                continue;
            }
            auto doc = make_document(method, entry.source, entry.label, entry.family);
            out.push_back({std::move(doc), std::move(method)});
        }
    }
    return out;
}

inline std::vector<Document> documents_of(std::span<const LabeledMethod> corpus)
{
    std::vector<Document> docs;
    docs.reserve(corpus.size());
    for (const auto& m : corpus) {
        docs.push_back(m.doc);
    }
    return docs;
}

/// Reference ngrams, one per line.
inline void write_reference(const std::filesystem::path& path, std::span<const std::string> reference)
{
    std::ofstream out(path, std::ios::binary);
    for (const auto& g : reference) {
        out << g << '\n';
    }
    if (!out) {
        throw DataError("cannot write " + path.string());
    }
}

inline std::vector<std::string> read_reference(const std::filesystem::path& path)
{
    auto text = read_text_file(path);
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto nl = text.find('\n', pos);
        auto line = detail::trim(std::string_view(text).substr(pos, nl == std::string::npos ? std::string::npos : nl - pos));
        pos = nl == std::string::npos ? text.size() : nl + 1;
        if (!line.empty()) {
            out.emplace_back(line);
        }
    }
    if (out.empty()) {
        throw DataError("reference file " + path.string() + " is empty");
    }
    return out;
}

} // namespace opsig
