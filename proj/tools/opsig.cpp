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

// opsig command-line front end. Every subcommand is a thin adapter over the
// library in include/opsig.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "opsig/opsig.hpp"

namespace fs = std::filesystem;

namespace {

enum Exit { kOk = 0, kUsage = 1, kData = 2 };

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Flags {
    std::optional<std::string> config;
    std::optional<std::string> threshold;
    std::optional<std::size_t> ngram_size;
    std::optional<std::size_t> k;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> jobs;
    std::optional<std::string> dict;
    std::vector<std::string> blocklist;
    bool json = false;
};

opsig::Config resolve(const Flags& f)
{
    auto cfg = opsig::environment_config();
    if (f.config) {
        cfg = opsig::load_config_file(*f.config, cfg);
    }
    if (f.threshold) {
        try {
            cfg.threshold = opsig::Rational::parse(*f.threshold);
        } catch (const std::invalid_argument& e) {
            throw UsageError("--threshold: " + std::string(e.what()));
        }
    }
    if (f.ngram_size) {
        cfg.ngram_size = *f.ngram_size;
    }
    if (f.k) {
        cfg.reference_k = *f.k;
    }
    if (f.seed) {
        cfg.seed = *f.seed;
    }
    if (f.jobs) {
        cfg.jobs = *f.jobs;
    }
    if (f.dict) {
        cfg.dict = *f.dict;
    }
    if (!f.blocklist.empty()) {
        cfg.api_blocklist = f.blocklist;
        if (cfg.api_blocklist == std::vector<std::string>{"none"}) {
            cfg.api_blocklist.clear();
        }
    }
    try {
        opsig::validate(cfg);
    } catch (const opsig::DataError& e) {
        throw UsageError(e.what());
    }
    return cfg;
}

fs::path require_dict(const opsig::Config& cfg)
{
    if (!cfg.dict) {
        throw UsageError("no dictionary: pass --dict, set it in --config, or export OPSIG_DICT");
    }
    return *cfg.dict;
}

std::vector<opsig::Signature> sign_listings(const std::vector<std::string>& paths, const std::optional<std::string>& method,
                                            const std::optional<std::string>& family)
{
    std::vector<opsig::Signature> out;
    for (const auto& p : paths) {
        for (const auto& m : opsig::read_listing_file(p)) {
            if (method && m.descriptor != *method) {
                continue;
            }
            out.push_back(opsig::make_signature(opsig::build_cfg(m), family));
        }
    }
    if (method && out.empty()) {
        throw opsig::DataError("method " + *method + " not found");
    }
    return out;
}

std::string eval_report_text(const opsig::EvalReport& r)
{
    using opsig::format_double;
    std::string out = "split train=" + std::to_string(r.train_size) + " holdout=" + std::to_string(r.holdout_size) + "\n";
    out += "fold,size,precision,recall,f1\n";
    for (std::size_t i = 0; i < r.per_fold.size(); ++i) {
        const auto& f = r.per_fold[i];
        out += std::to_string(i) + "," + std::to_string(f.size) + "," + format_double(f.precision) + "," +
               format_double(f.recall) + "," + format_double(f.f1) + "\n";
    }
    out += "cv_f1 " + format_double(r.cv_f1) + "\n";
    out += "precision recall f1\n";
    out += format_double(r.precision) + " " + format_double(r.recall) + " " + format_double(r.f1) + "\n";
    return out;
}

nlohmann::ordered_json eval_report_json(const opsig::EvalReport& r)
{
    nlohmann::ordered_json j;
    j["precision"] = r.precision;
    j["recall"] = r.recall;
    j["f1"] = r.f1;
    j["folds"] = r.folds;
    j["cv_f1"] = r.cv_f1;
    auto folds = nlohmann::ordered_json::array();
    for (const auto& f : r.per_fold) {
        folds.push_back({{"size", f.size}, {"precision", f.precision}, {"recall", f.recall}, {"f1", f.f1}});
    }
    j["per_fold"] = std::move(folds);
    j["train_size"] = r.train_size;
    j["holdout_size"] = r.holdout_size;
    return j;
}

void add_common(CLI::App* sub, Flags& f)
{
    sub->add_option("--config", f.config, "JSON config file");
    sub->add_option("--jobs", f.jobs, "worker threads (0 = all cores)");
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"opsig: opcode-level signatures for Android malware detection"};
    app.require_subcommand(1);
    Flags f;

    std::vector<std::string> listings;
    std::optional<std::string> method;
    std::optional<std::string> family;
    std::string input;
    std::optional<std::string> out_path;
    std::optional<std::string> ref_path;
    bool census = false;
    std::string model_kind = "tree";
    std::size_t knn_k = 5;
    std::size_t max_depth = 16;
    std::optional<std::string> flag_manifest;
    std::optional<std::string> emit_dict;

    auto* sign = app.add_subcommand("sign", "print the signature of every method in a listing");
    sign->add_option("listing", listings, "listing file")->required();
    sign->add_option("--method", method, "only this method descriptor");
    sign->add_option("--family", family, "family label");
    add_common(sign, f);

    auto* dict_add = app.add_subcommand("dict-add", "append listing signatures to a dictionary");
    dict_add->add_option("listings", listings, "listing files")->required();
    dict_add->add_option("--method", method, "only this method descriptor");
    dict_add->add_option("--family", family, "family label");
    dict_add->add_option("--dict", f.dict, "dictionary file");
    add_common(dict_add, f);

    auto* dict_list = app.add_subcommand("dict-list", "list dictionary entries");
    dict_list->add_option("--dict", f.dict, "dictionary file");
    add_common(dict_list, f);

    auto* mine = app.add_subcommand("mine", "rank opcode ngrams of a labeled corpus by TF-IDF");
    mine->add_option("manifest", input, "manifest: <listing>\\t<0|1>[\\t<family>] per line")->required();
    mine->add_option("--ngram-size", f.ngram_size, "ngram size (1..9)");
    mine->add_option("--k", f.k, "reference size");
    mine->add_option("--blocklist", f.blocklist, "descriptor prefixes to skip ('none' disables)")->delimiter(',');
    mine->add_option("--out", out_path, "write the reference ngrams here");
    mine->add_flag("--census", census, "print distinct-ngram counts for sizes 1..9 instead");
    add_common(mine, f);

    auto* featurize = app.add_subcommand("featurize", "write a presence-vector dataset");
    featurize->add_option("manifest", input, "manifest")->required();
    featurize->add_option("--ref", ref_path, "reference ngrams")->required();
    featurize->add_option("--out", out_path, "dataset CSV")->required();
    featurize->add_option("--blocklist", f.blocklist, "descriptor prefixes to skip ('none' disables)")->delimiter(',');
    add_common(featurize, f);

    auto* train = app.add_subcommand("train", "train and evaluate a classifier on a dataset");
    train->add_option("dataset", input, "dataset CSV")->required();
    train->add_option("--model", model_kind, "tree or knn")->check(CLI::IsMember({"tree", "knn"}));
    train->add_option("--knn-k", knn_k, "neighbours for knn (odd)");
    train->add_option("--max-depth", max_depth, "tree depth cap");
    train->add_option("--seed", f.seed, "split seed");
    train->add_option("--flag", flag_manifest, "flag characteristic methods of this manifest");
    train->add_option("--emit-dict", emit_dict, "append flagged signatures to this dictionary");
    train->add_option("--family", family, "family for flagged signatures without one");
    train->add_option("--blocklist", f.blocklist, "descriptor prefixes to skip ('none' disables)")->delimiter(',');
    train->add_flag("--json", f.json, "JSON output");
    add_common(train, f);

    auto* scan = app.add_subcommand("scan", "scan a program against a dictionary");
    scan->add_option("program", input, "directory of .lst files, or one listing")->required();
    scan->add_option("--dict", f.dict, "dictionary file");
    scan->add_option("--threshold", f.threshold, "minimum x/m for VARIANT (e.g. 0.5 or 1/2)");
    scan->add_flag("--json", f.json, "JSON report");
    add_common(scan, f);

    auto* evaluate = app.add_subcommand("evaluate", "precision/recall over labdir/{infected,clean}");
    evaluate->add_option("labdir", input, "labeled program directory")->required();
    evaluate->add_option("--dict", f.dict, "dictionary file");
    evaluate->add_option("--threshold", f.threshold, "minimum x/m for VARIANT");
    evaluate->add_flag("--json", f.json, "JSON output");
    add_common(evaluate, f);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kUsage;
    }

    try {
        auto cfg = resolve(f);

        if (sign->parsed()) {
            for (const auto& sig : sign_listings(listings, method, family)) {
                std::cout << opsig::encode_text(sig);
            }
        } else if (dict_add->parsed()) {
            auto path = require_dict(cfg);
            auto sigs = sign_listings(listings, method, family);
            auto dict = opsig::dict_add(path, sigs);
            std::cout << "added " << sigs.size() << " signature(s); " << path.string() << " holds "
                      << dict.entries.size() << "\n";
        } else if (dict_list->parsed()) {
            std::cout << opsig::dict_list(opsig::dict_load(require_dict(cfg)));
        } else if (mine->parsed()) {
            auto corpus = opsig::load_corpus(opsig::read_manifest(input), cfg.api_blocklist);
            auto docs = opsig::documents_of(corpus);
            if (census) {
                std::cout << opsig::format_census_csv(opsig::ngram_census(docs));
            } else {
                auto ranked = opsig::select_reference(docs, cfg.ngram_size, cfg.reference_k, cfg.jobs);
                if (out_path) {
                    std::vector<std::string> ref;
                    for (const auto& r : ranked) {
                        ref.push_back(r.ngram);
                    }
                    opsig::write_reference(*out_path, ref);
                }
                std::cout << opsig::format_selection_csv(ranked);
            }
        } else if (featurize->parsed()) {
            auto reference = opsig::read_reference(*ref_path);
            auto corpus = opsig::load_corpus(opsig::read_manifest(input), cfg.api_blocklist);
            auto docs = opsig::documents_of(corpus);
            opsig::Dataset data{reference, opsig::featurize_all(docs, reference, cfg.jobs)};
            opsig::write_dataset(*out_path, data);
            std::cout << "wrote " << data.vectors.size() << " vectors of " << reference.size() << " bits to "
                      << *out_path << "\n";
        } else if (train->parsed()) {
            if (emit_dict && !flag_manifest) {
                throw UsageError("--emit-dict requires --flag");
            }
            auto data = opsig::read_dataset(input);
            opsig::ClassifierSpec spec;
            spec.kind = model_kind == "knn" ? opsig::ClassifierSpec::Kind::Knn : opsig::ClassifierSpec::Kind::Tree;
            spec.knn_k = knn_k;
            spec.tree.max_depth = max_depth;
            opsig::EvalReport report;
            try {
                report = opsig::split_and_crossvalidate(data.vectors, spec, cfg.seed, 10, cfg.jobs);
            } catch (const std::invalid_argument& e) {
                throw opsig::DataError(e.what());
            }
            auto j = eval_report_json(report);
            std::string text = eval_report_text(report);
            if (flag_manifest) {
                auto model = opsig::train(data.vectors, spec);
                auto corpus = opsig::load_corpus(opsig::read_manifest(*flag_manifest), cfg.api_blocklist);
                auto docs = opsig::documents_of(corpus);
                auto flagged = opsig::flag_characteristic_methods(docs, data.reference, model);
                j["flagged"] = flagged;
                for (const auto& id : flagged) {
                    text += "flagged " + id + "\n";
                }
                if (emit_dict) {
                    auto sigs = opsig::flagged_signatures(corpus, flagged);
                    for (auto& s : sigs) {
                        if (!s.family) {
                            s.family = family;
                        }
                    }
                    opsig::dict_add(*emit_dict, sigs, {"opsig train --flag " + *flag_manifest});
                    text += "emitted " + std::to_string(sigs.size()) + " signature(s) to " + *emit_dict + "\n";
                }
            }
            std::cout << (f.json ? j.dump(2) + "\n" : text);
        } else if (scan->parsed()) {
            auto dict = opsig::dict_load(require_dict(cfg));
            auto report = opsig::scan(opsig::load_program(input), dict, {cfg.threshold, cfg.jobs});
            std::cout << (f.json ? opsig::format_report_json(report) : opsig::format_report_text(report));
        } else if (evaluate->parsed()) {
            auto dict = opsig::dict_load(require_dict(cfg));
            auto programs = opsig::load_labeled_programs(input);
            auto t = opsig::evaluate(programs, dict, {cfg.threshold, cfg.jobs});
            if (f.json) {
                nlohmann::ordered_json j{{"precision", t.precision()}, {"recall", t.recall()},
                                         {"f_measure", t.f_measure()}, {"tp", t.tp},
                                         {"fp", t.fp}, {"tn", t.tn},
                                         {"fn", t.fn}};
                std::cout << j.dump(2) << "\n";
            } else {
                std::cout << opsig::format_detection_table(t);
            }
        }
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kData;
    }
    return kOk;
}
