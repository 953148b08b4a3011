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
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "opsig/cfg.hpp"
#include "opsig/error.hpp"
#include "opsig/ngram.hpp"
#include "opsig/parallel.hpp"
#include "opsig/signature.hpp"

namespace opsig {

/// Presence of each reference ngram in one method.
struct FeatureVector {
    std::string doc_id;
    std::vector<std::uint8_t> bits;
    int label = 0;

    bool operator==(const FeatureVector&) const = default;
};

inline FeatureVector featurize(const Document& doc, std::span<const std::string> reference)
{
    FeatureVector v;
    v.doc_id = doc.id;
    v.label = doc.label;
    v.bits.assign(reference.size(), 0);

    // Windows are materialised once per distinct reference length.
    std::map<std::size_t, std::set<std::string, std::less<>>> windows;
    for (const auto& g : reference) {
        auto len = static_cast<std::size_t>(std::count(g.begin(), g.end(), ' ')) + 1;
        if (!windows.contains(len)) {
            auto all = extract_ngrams(doc, len);
            windows[len] = std::set<std::string, std::less<>>(all.begin(), all.end());
        }
    }
    for (std::size_t i = 0; i < reference.size(); ++i) {
        const auto& g = reference[i];
        auto len = static_cast<std::size_t>(std::count(g.begin(), g.end(), ' ')) + 1;
        v.bits[i] = windows[len].contains(g) ? 1 : 0;
    }
    return v;
}

inline std::vector<FeatureVector> featurize_all(std::span<const Document> docs, std::span<const std::string> reference,
                                                std::size_t jobs = 1)
{
    std::vector<FeatureVector> out(docs.size());
    parallel_for(docs.size(), jobs, [&](std::size_t i) { out[i] = featurize(docs[i], reference); });
    return out;
}

// ---- dataset files --------------------------------------------------------

struct Dataset {
    std::vector<std::string> reference;
    std::vector<FeatureVector> vectors;

    bool operator==(const Dataset&) const = default;
};

inline std::filesystem::path reference_sidecar(const std::filesystem::path& csv)
{
    auto p = csv;
    p += ".ngrams";
    return p;
}

namespace detail {

inline std::string csv_field(std::string_view s)
{
    if (s.find_first_of(",\"\n\r") == std::string_view::npos) {
        return std::string(s);
    }
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    out += '"';
    return out;
}

inline std::vector<std::string> split_csv_line(std::string_view line, std::size_t line_no)
{
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"' && cur.empty()) {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (quoted) {
        throw ParseError(line_no, "unterminated quoted field");
    }
    fields.push_back(std::move(cur));
    return fields;
}

} // namespace detail

/// `doc_id,g0,...,g{k-1},class`, plus the reference ngrams in `<csv>.ngrams`.
inline std::string format_dataset_csv(const Dataset& data)
{
    std::string out = "doc_id";
    for (std::size_t i = 0; i < data.reference.size(); ++i) {
        out += ",g" + std::to_string(i);
    }
    out += ",class\n";
    for (const auto& v : data.vectors) {
        out += detail::csv_field(v.doc_id);
        for (auto b : v.bits) {
            out += b ? ",1" : ",0";
        }
        out += "," + std::to_string(v.label) + "\n";
    }
    return out;
}

inline void write_dataset(const std::filesystem::path& csv, const Dataset& data)
{
    std::ofstream out(csv, std::ios::binary);
    out << format_dataset_csv(data);
    if (!out) {
        throw DataError("cannot write " + csv.string());
    }
    write_reference(reference_sidecar(csv), data.reference);
}

inline std::vector<FeatureVector> parse_dataset_csv(std::string_view text, std::size_t k)
{
    std::vector<FeatureVector> out;
    std::size_t pos = 0;
    std::size_t line_no = 0;
    bool header = true;
    while (pos < text.size()) {
        auto nl = text.find('\n', pos);
        auto line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() : nl + 1;
        ++line_no;
        if (line.ends_with('\r')) {
            line.remove_suffix(1);
        }
        if (line.empty()) {
            continue;
        }
        auto fields = detail::split_csv_line(line, line_no);
        if (fields.size() != k + 2) {
            throw ParseError(line_no, "expected " + std::to_string(k + 2) + " fields, got " +
                                          std::to_string(fields.size()));
        }
        if (header) {
            header = false;
            for (std::size_t i = 0; i < k; ++i) {
                if (fields[i + 1] != "g" + std::to_string(i)) {
                    throw ParseError(line_no, "bad header field '" + fields[i + 1] + "'");
                }
            }
            if (fields[0] != "doc_id" || fields.back() != "class") {
                throw ParseError(line_no, "header must be doc_id,g0..g{k-1},class");
            }
            continue;
        }
        FeatureVector v;
        v.doc_id = fields[0];
        v.bits.reserve(k);
        for (std::size_t i = 1; i <= k + 1; ++i) {
            if (fields[i] != "0" && fields[i] != "1") {
                throw ParseError(line_no, "expected 0 or 1, got '" + fields[i] + "'");
            }
            if (i <= k) {
                v.bits.push_back(fields[i] == "1" ? 1 : 0);
            } else {
                v.label = fields[i] == "1" ? 1 : 0;
            }
        }
        out.push_back(std::move(v));
    }
    return out;
}

inline Dataset read_dataset(const std::filesystem::path& csv)
{
    Dataset data;
    data.reference = read_reference(reference_sidecar(csv));
    auto text = read_text_file(csv);
    try {
        data.vectors = parse_dataset_csv(text, data.reference.size());
    } catch (const ParseError& e) {
        throw ParseError(e.line(), e.detail(), csv.string());
    }
    return data;
}

// ---- metrics --------------------------------------------------------------

struct Confusion {
    std::size_t tp = 0, fp = 0, tn = 0, fn = 0;

    void add(int truth, int predicted)
    {
        if (predicted == 1) {
            ++(truth == 1 ? tp : fp);
        } else {
            ++(truth == 1 ? fn : tn);
        }
    }
    double precision() const { return tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp); }
    double recall() const { return tp + fn == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn); }
    double f1() const { return f1_score(precision(), recall()); }

    static double f1_score(double p, double r) { return p + r > 0 ? 2 * p * r / (p + r) : 0.0; }
};

// ---- classifiers ----------------------------------------------------------

struct TreeParams {
    std::size_t max_depth = 16;
    std::size_t min_samples_split = 2;
};

/// CART over boolean features with Gini impurity.
class DecisionTree {
public:
    struct Node {
        int feature = -1; ///< -1 for leaves
        int absent = -1;  ///< child when the bit is 0
        int present = -1; ///< child when the bit is 1
        int prediction = 0;
    };

    DecisionTree() = default;
    DecisionTree(std::span<const FeatureVector> data, TreeParams params = {}) : params_(params)
    {
        if (data.empty()) {
            throw std::invalid_argument("cannot train a decision tree on no data");
        }
        features_ = data.front().bits.size();
        std::vector<std::size_t> rows(data.size());
        std::iota(rows.begin(), rows.end(), 0);
        grow(data, rows, 0);
    }

    int predict(std::span<const std::uint8_t> bits) const
    {
        int at = 0;
        while (nodes_[at].feature >= 0) {
            at = bits[nodes_[at].feature] ? nodes_[at].present : nodes_[at].absent;
        }
        return nodes_[at].prediction;
    }

    const std::vector<Node>& nodes() const { return nodes_; }

    std::size_t depth() const { return depth_of(0); }

private:
    static double gini(std::size_t pos, std::size_t total)
    {
        if (total == 0) {
            return 0.0;
        }
        auto p = static_cast<double>(pos) / static_cast<double>(total);
        return 2 * p * (1 - p);
    }

    int grow(std::span<const FeatureVector> data, const std::vector<std::size_t>& rows, std::size_t depth)
    {
        std::size_t pos = 0;
        for (auto r : rows) {
            pos += data[r].label == 1;
        }
        const auto total = rows.size();
        int id = static_cast<int>(nodes_.size());
        nodes_.push_back({});
        nodes_[id].prediction = 2 * pos >= total ? 1 : 0;
        if (pos == 0 || pos == total || depth >= params_.max_depth || total < params_.min_samples_split) {
            return id;
        }

        int best = -1;
        double best_impurity = 0.0;
        for (std::size_t f = 0; f < features_; ++f) {
            std::size_t on = 0;
            std::size_t on_pos = 0;
            for (auto r : rows) {
                if (data[r].bits[f]) {
                    ++on;
                    on_pos += data[r].label == 1;
                }
            }
            if (on == 0 || on == total) {
                continue;
            }
            auto off = total - on;
            auto impurity = (static_cast<double>(on) * gini(on_pos, on) +
                             static_cast<double>(off) * gini(pos - on_pos, off)) /
                            static_cast<double>(total);
            if (best < 0 || impurity < best_impurity) {
                best = static_cast<int>(f);
                best_impurity = impurity;
            }
        }
        if (best < 0) {
            return id;
        }

        std::vector<std::size_t> absent;
        std::vector<std::size_t> present;
        for (auto r : rows) {
            (data[r].bits[best] ? present : absent).push_back(r);
        }
        auto a = grow(data, absent, depth + 1);
        auto p = grow(data, present, depth + 1);
        nodes_[id].feature = best;
        nodes_[id].absent = a;
        nodes_[id].present = p;
        return id;
    }

    std::size_t depth_of(int at) const
    {
        if (nodes_.empty() || nodes_[at].feature < 0) {
            return 0;
        }
        return 1 + std::max(depth_of(nodes_[at].absent), depth_of(nodes_[at].present));
    }

    TreeParams params_;
    std::size_t features_ = 0;
    std::vector<Node> nodes_;
};

/// k nearest neighbours under Hamming distance, majority vote.
class KnnClassifier {
public:
    KnnClassifier(std::span<const FeatureVector> data, std::size_t k) : data_(data.begin(), data.end()), k_(k)
    {
        if (k == 0 || k % 2 == 0) {
            throw std::invalid_argument("k must be odd, got " + std::to_string(k));
        }
        if (k >= data.size()) {
            throw std::invalid_argument("k must be smaller than the training set (" + std::to_string(data.size()) + ")");
        }
    }

    int predict(std::span<const std::uint8_t> bits) const
    {
        std::vector<std::pair<std::size_t, std::size_t>> dist; // (distance, index)
        dist.reserve(data_.size());
        for (std::size_t i = 0; i < data_.size(); ++i) {
            std::size_t d = 0;
            const auto& other = data_[i].bits;
            for (std::size_t b = 0; b < bits.size(); ++b) {
                d += bits[b] != other[b];
            }
            dist.emplace_back(d, i);
        }
        std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k_), dist.end());
        std::size_t votes = 0;
        for (std::size_t i = 0; i < k_; ++i) {
            votes += data_[dist[i].second].label == 1;
        }
        return 2 * votes > k_ ? 1 : 0;
    }

    std::size_t k() const { return k_; }

private:
    std::vector<FeatureVector> data_;
    std::size_t k_;
};

struct ClassifierSpec {
    enum class Kind { Tree, Knn } kind = Kind::Tree;
    TreeParams tree;
    std::size_t knn_k = 5;
};

using Model = std::variant<DecisionTree, KnnClassifier>;

inline Model train(std::span<const FeatureVector> data, const ClassifierSpec& spec)
{
    if (spec.kind == ClassifierSpec::Kind::Knn) {
        return KnnClassifier(data, spec.knn_k);
    }
    return DecisionTree(data, spec.tree);
}

inline int predict(const Model& model, std::span<const std::uint8_t> bits)
{
    return std::visit([&](const auto& m) { return m.predict(bits); }, model);
}

// ---- evaluation -----------------------------------------------------------

struct FoldScore {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t size = 0;
};

struct EvalReport {
    double precision = 0.0; ///< holdout
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t folds = 0;
    std::vector<FoldScore> per_fold;
    double cv_f1 = 0.0; ///< mean of per-fold F1
    std::size_t train_size = 0;
    std::size_t holdout_size = 0;
};

/// Fold number for each entry of `labels`: members of each class are dealt
/// round-robin, so fold sizes and per-class counts differ by at most one.
inline std::vector<std::size_t> stratified_folds(std::span<const int> labels, std::size_t folds)
{
    std::vector<std::size_t> assignment(labels.size());
    std::size_t next = 0;
    for (int cls : {0, 1}) {
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if ((labels[i] == 1 ? 1 : 0) == cls) {
                assignment[i] = next++ % folds;
            }
        }
    }
    return assignment;
}

/// Stratified 80/20 holdout scored by a model trained on the 80%, plus
/// stratified `folds`-fold cross-validation over the 80%. Deterministic in `seed`.
inline EvalReport split_and_crossvalidate(std::span<const FeatureVector> vectors, const ClassifierSpec& spec,
                                          std::uint64_t seed = 42, std::size_t folds = 10, std::size_t jobs = 1)
{
    if (vectors.size() < 20) {
        throw std::invalid_argument("need at least 20 vectors, got " + std::to_string(vectors.size()));
    }
    std::vector<std::size_t> by_class[2];
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        by_class[vectors[i].label == 1 ? 1 : 0].push_back(i);
    }
    if (by_class[0].empty() || by_class[1].empty()) {
        throw std::invalid_argument("dataset holds a single class");
    }

    std::mt19937_64 rng(seed);
    std::vector<std::size_t> train_idx;
    std::vector<std::size_t> test_idx;
    for (auto& members : by_class) {
        std::shuffle(members.begin(), members.end(), rng);
        auto holdout = (2 * members.size() + 5) / 10; // round(0.2 * n)
        test_idx.insert(test_idx.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(holdout));
        train_idx.insert(train_idx.end(), members.begin() + static_cast<std::ptrdiff_t>(holdout), members.end());
    }

    auto gather = [&](const std::vector<std::size_t>& idx) {
        std::vector<FeatureVector> out;
        out.reserve(idx.size());
        for (auto i : idx) {
            out.push_back(vectors[i]);
        }
        return out;
    };
    auto score = [&](const Model& model, std::span<const FeatureVector> test) {
        Confusion c;
        for (const auto& v : test) {
            c.add(v.label, predict(model, v.bits));
        }
        return c;
    };

    EvalReport report;
    report.folds = folds;
    report.train_size = train_idx.size();
    report.holdout_size = test_idx.size();

    auto train_set = gather(train_idx);
    std::vector<int> train_labels;
    for (const auto& v : train_set) {
        train_labels.push_back(v.label);
    }
    auto assignment = stratified_folds(train_labels, folds);
    report.per_fold.resize(folds);
    parallel_for(folds, jobs, [&](std::size_t f) {
        std::vector<FeatureVector> fit;
        std::vector<FeatureVector> held;
        for (std::size_t i = 0; i < train_set.size(); ++i) {
            (assignment[i] == f ? held : fit).push_back(train_set[i]);
        }
        auto c = score(train(fit, spec), held);
        report.per_fold[f] = {c.precision(), c.recall(), c.f1(), held.size()};
    });
    for (const auto& f : report.per_fold) {
        report.cv_f1 += f.f1;
    }
    report.cv_f1 /= static_cast<double>(folds);

    auto c = score(train(train_set, spec), gather(test_idx));
    report.precision = c.precision();
    report.recall = c.recall();
    report.f1 = c.f1();
    return report;
}

/// Ids of the documents the model assigns to the malicious class.
inline std::vector<std::string> flag_characteristic_methods(std::span<const Document> corpus,
                                                            std::span<const std::string> reference, const Model& model)
{
    std::vector<std::string> out;
    for (const auto& doc : corpus) {
        if (predict(model, featurize(doc, reference).bits) == 1) {
            out.push_back(doc.id);
        }
    }
    return out;
}

/// Signatures of the flagged methods, one per distinct marked CFG (descriptor
/// and family are ignored when comparing). Family comes from the corpus.
inline std::vector<Signature> flagged_signatures(std::span<const LabeledMethod> corpus,
                                                 std::span<const std::string> flagged_ids)
{
    std::set<std::string_view> wanted(flagged_ids.begin(), flagged_ids.end());
    std::vector<Signature> out;
    std::set<std::pair<Adjacency, std::vector<std::string>>> seen;
    std::set<std::pair<std::string, std::optional<std::string>>> keys;
    for (const auto& m : corpus) {
        if (!wanted.contains(m.doc.id)) {
            continue;
        }
        auto sig = make_signature(build_cfg(m.method), m.doc.family);
        if (!seen.emplace(sig.adjacency, sig.fingerprints).second) {
            continue;
        }
        if (!keys.emplace(sig.descriptor, sig.family).second) {
            log::warn("skipping second signature for " + sig.descriptor + " in the same family");
            continue;
        }
        out.push_back(std::move(sig));
    }
    return out;
}

} // namespace opsig
