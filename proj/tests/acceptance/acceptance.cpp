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

// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "generators.hpp"
#include "lab_corpus.hpp"
#include "opsig/opsig.hpp"
#include "oracles.hpp"

using namespace opsig;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool ok = true;
    std::string detail;

    void check(bool cond, const std::string& what)
    {
        if (!cond && ok) {
            detail = what;
        }
        ok = ok && cond;
    }
};

struct Criterion {
    std::string id;
    std::string title;
    double limit_seconds; ///< 0 = no runtime bound
    std::function<Outcome()> body;
};

std::string data_path(const std::string& name)
{
    return std::string(OPSIG_TEST_DATA) + "/" + name;
}

fs::path scratch()
{
    static fs::path root = [] {
        auto p = fs::temp_directory_path() / "opsig_acceptance";
        fs::remove_all(p);
        fs::create_directories(p);
        return p;
    }();
    return root;
}

const lab::Corpus& lab_corpus()
{
    static lab::Corpus c = lab::build(scratch() / "lab");
    return c;
}

const std::vector<LabeledProgram>& lab_programs()
{
    static std::vector<LabeledProgram> p = load_labeled_programs(lab_corpus().labdir);
    return p;
}

Outcome ac1()
{
    Outcome o;
    auto methods = read_listing_file(data_path("z_run.lst"));
    o.check(methods.size() == 1, "expected one method");
    auto cfg = build_cfg(methods.at(0));
    o.check(methods[0].instructions.size() == 15, "expected 15 instructions");
    o.check(cfg.size() == 3, "expected 3 blocks, got " + std::to_string(cfg.size()));
    auto e = encode(make_signature(cfg));
    o.check(e.structure == "Lnet/droidjack/server/z.run()V;3;0:1,2;1:2;", "structure line: " + e.structure);
    return o;
}

Outcome ac2()
{
    Outcome o;
    auto ref = decode(read_text_file(data_path("g1g2_referent.sig")));
    auto cand = build_cfg(read_listing_file(data_path("g1g2_candidate.lst")).at(0));
    o.check(ref.adjacency.size() == 6 && cand.size() == 8, "expected 6 referent and 8 candidate nodes");
    auto cells = build_correspondence(ref.adjacency, cand.successors);
    const std::vector<std::pair<std::size_t, std::size_t>> ones = {{0, 0}, {1, 2}, {2, 1}, {3, 3}, {4, 5}, {5, 6}};
    for (std::size_t i = 0; i < 6; ++i) {
        for (std::size_t j = 0; j < 8; ++j) {
            bool want = std::find(ones.begin(), ones.end(), std::pair{i, j}) != ones.end();
            o.check(cells(i, j) == want, "cell (" + std::to_string(i) + "," + std::to_string(j) + ") differs");
        }
    }
    auto hk = hopcroft_karp(cells.adjacency(), cand.size());
    o.check(hk.cardinality == 6, "HK cardinality " + std::to_string(hk.cardinality));
    o.check(match(ref, cand).structural, "not structural");
    return o;
}

Outcome ac3()
{
    Outcome o;
    std::size_t graphs = 0;
    std::vector<std::vector<std::size_t>> adj;
    // every edge subset of every shape with at most 20 edge slots
    for (std::size_t a = 1; a <= 7; ++a) {
        for (std::size_t b = 1; b <= 7; ++b) {
            if (a * b > 20) {
                continue;
            }
            adj.assign(a, {});
            for (std::uint32_t mask = 0; mask < (1u << (a * b)); ++mask) {
                for (std::size_t i = 0; i < a; ++i) {
                    adj[i].clear();
                    for (std::size_t j = 0; j < b; ++j) {
                        if (mask >> (i * b + j) & 1u) {
                            adj[i].push_back(j);
                        }
                    }
                }
                auto got = hopcroft_karp(adj, b).cardinality;
                if (got != oracle::kuhn_matching(adj, b)) {
                    o.check(false, std::to_string(a) + "x" + std::to_string(b) + " mask " + std::to_string(mask));
                    return o;
                }
                ++graphs;
            }
        }
    }
    // larger shapes up to 7x7: seeded samples at several densities
    gen::Rng rng(3);
    for (std::size_t a = 1; a <= 7; ++a) {
        for (std::size_t b = 1; b <= 7; ++b) {
            if (a * b <= 20) {
                continue;
            }
            for (int s = 0; s < 2000; ++s) {
                auto g = gen::random_bipartite(rng, a, b, 0.1 + 0.1 * (s % 8));
                auto got = hopcroft_karp(g, b).cardinality;
                if (got != oracle::max_matching_dp(g, b) || got != oracle::kuhn_matching(g, b)) {
                    o.check(false, "sampled " + std::to_string(a) + "x" + std::to_string(b));
                    return o;
                }
                ++graphs;
            }
        }
    }
    for (int s = 0; s < 200; ++s) {
        auto g = gen::random_bipartite(rng, 20, 20, 0.02 + 0.01 * (s % 20));
        auto got = hopcroft_karp(g, 20).cardinality;
        if (got != oracle::kuhn_matching(g, 20)) {
            o.check(false, "20+20 graph " + std::to_string(s));
            return o;
        }
        ++graphs;
    }
    o.detail = std::to_string(graphs) + " graphs";
    return o;
}

Outcome ac4()
{
    Outcome o;
    const std::string golden = "ad459c7ade0c9fe2c73e7c73f08c090a";
    auto got = fingerprint(std::vector<std::string>{"NEW_INSTANCE", "INVOKE_DIRECT", "SPUT_OBJECT"});
    o.check(got == golden, "got " + got);
    o.check(md5_hex("NEW_INSTANCEINVOKE_DIRECTSPUT_OBJECT") == golden, "md5_hex differs");
    return o;
}

int run_cli(const std::string& args, std::string& out)
{
    auto file = scratch() / "cli.out";
    auto cmd = "env -u OPSIG_DICT '" + std::string(OPSIG_CLI) + "' " + args + " >'" + file.string() + "' 2>/dev/null";
    int status = std::system(cmd.c_str());
    out = read_text_file(file);
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome ac5()
{
    Outcome o;
    const auto& c = lab_corpus();
    const auto& programs = lab_programs();
    o.check(c.infected == 30 && c.clean == 110, "corpus shape");
    std::size_t infected = std::count_if(programs.begin(), programs.end(), [](auto& p) { return p.infected; });
    o.check(programs.size() == 140 && infected == 30, "loaded " + std::to_string(programs.size()) + " programs");
    for (std::size_t v = 0; v < 3; ++v) {
        auto t = evaluate(programs, dict_load(c.dictionaries[v]), {Rational(1, 2), 1});
        o.check(t.tp == 30 && t.fn == 0 && t.fp == 0 && t.tn == 110,
                "dict v" + std::to_string(v + 1) + " tp/fp/fn " + std::to_string(t.tp) + "/" + std::to_string(t.fp) +
                    "/" + std::to_string(t.fn));
        o.check(t.precision() == 1.0 && t.recall() == 1.0 && t.f_measure() == 1.0, "P/R/F not 1");
        std::string out;
        int code = run_cli("evaluate '" + c.labdir.string() + "' --dict '" + c.dictionaries[v].string() +
                               "' --threshold 0.5",
                           out);
        o.check(code == 0 && out == "precision recall f_measure\n1 1 1\n", "cli output: " + out);
    }
    return o;
}

Outcome ac6()
{
    Outcome o;
    auto corpus = gen::planted_ngram_corpus(6, 400);
    for (std::size_t n = 1; n <= 4; ++n) {
        for (const auto& d : corpus) {
            auto f = count_ngrams(d, n);
            std::size_t sum = 0;
            double tf_sum = 0.0;
            for (const auto& [g, c] : f.counts) {
                sum += c;
                tf_sum += f.tf(g);
            }
            o.check(sum == f.total, "count identity");
            o.check(f.total == 0 || std::abs(tf_sum - 1.0) <= 1e-12, "tf sum " + format_double(tf_sum));
        }
    }

    // a token placed in every document
    auto universal = corpus;
    for (auto& d : universal) {
        d.tokens.push_back("ff");
    }
    o.check(idf("ff", universal, 1) == 0.0, "universal idf nonzero");
    auto s = NgramIndex(universal, 1).stats("ff");
    o.check(s.idf == 0.0 && s.doc_count == universal.size(), "index idf for universal ngram");

    // adding a document containing g never raises idf(g); adding one without never lowers it
    gen::Rng rng(16);
    std::vector<Document> growing(corpus.begin(), corpus.begin() + 20);
    for (int step = 0; step < 200; ++step) {
        Document extra{"extra" + std::to_string(step), gen::random_tokens(rng, gen::uniform(rng, 2, 30)), 0, {}};
        auto grams = extract_ngrams(extra, 2);
        std::set<std::string> inside(grams.begin(), grams.end());
        std::set<std::string> present;
        for (const auto& d : growing) {
            for (auto& g : extract_ngrams(d, 2)) {
                present.insert(std::move(g));
            }
        }
        NgramIndex before(growing, 2);
        growing.push_back(extra);
        NgramIndex after(growing, 2);
        for (const auto& g : present) {
            double was = before.stats(g).idf;
            double now = after.stats(g).idf;
            if (inside.contains(g)) {
                o.check(now <= was, "idf rose for " + g);
            } else {
                o.check(now >= was, "idf fell for " + g);
            }
        }
    }

    log::ScopedCapture quiet;
    auto base = format_selection_csv(select_reference(corpus, 2, 100));
    for (std::size_t jobs : {1u, 2u, 4u}) {
        o.check(format_selection_csv(select_reference(corpus, 2, 100, jobs)) == base,
                "selection differs at jobs=" + std::to_string(jobs));
    }
    return o;
}

std::vector<std::string> reference_of(const std::vector<Document>& corpus)
{
    log::ScopedCapture quiet;
    std::vector<std::string> reference;
    for (const auto& r : select_reference(corpus, 2, 100)) {
        reference.push_back(r.ngram);
    }
    return reference;
}

Outcome ac7()
{
    Outcome o;
    auto corpus = gen::planted_ngram_corpus(20260107, 400);
    auto reference = reference_of(corpus);
    o.check(reference.size() == 100, "reference size " + std::to_string(reference.size()));
    auto vectors = featurize_all(corpus, reference);
    auto r = split_and_crossvalidate(vectors, ClassifierSpec{}, 42);
    o.check(r.folds == 10 && r.per_fold.size() == 10, "expected 10 folds");
    o.check(r.cv_f1 >= 0.95, "cv F1 " + format_double(r.cv_f1));

    auto permuted = vectors;
    std::vector<int> labels;
    for (const auto& v : permuted) {
        labels.push_back(v.label);
    }
    std::shuffle(labels.begin(), labels.end(), std::mt19937_64(42));
    for (std::size_t i = 0; i < permuted.size(); ++i) {
        permuted[i].label = labels[i];
    }
    auto p = split_and_crossvalidate(permuted, ClassifierSpec{}, 42);
    o.check(p.cv_f1 >= 0.3 && p.cv_f1 <= 0.7, "permuted cv F1 " + format_double(p.cv_f1));
    if (o.ok) {
        o.detail = "cv F1 " + format_double(r.cv_f1) + ", permuted " + format_double(p.cv_f1);
    }
    return o;
}

Outcome ac8()
{
    Outcome o;
    const auto& c = lab_corpus();
    std::vector<Signature> referents;
    for (const auto& path : c.dictionaries) {
        for (auto& e : dict_load(path).entries) {
            referents.push_back(e);
        }
    }
    std::size_t skipped = 0, structural = 0;
    for (const auto& lp : lab_programs()) {
        for (const auto& method : lp.program.methods) {
            auto cfg = build_cfg(method);
            for (const auto& ref : referents) {
                if (shares_fingerprint(ref, cfg)) {
                    continue;
                }
                ++skipped;
                auto r = match(ref, cfg);
                structural += r.structural;
                o.check(r.x == 0, "pair " + lp.program.id + " " + method.descriptor + " has x=" + std::to_string(r.x));
            }
        }
    }
    o.check(skipped > 0, "no pairs skipped");
    if (o.ok) {
        o.detail = std::to_string(skipped) + " skipped pairs, " + std::to_string(structural) + " structural";
    }
    return o;
}

Outcome ac9()
{
    Outcome o;
    const auto& c = lab_corpus();
    const std::vector<Rational> sweep = {Rational(0), Rational(1, 4), Rational(1, 2), Rational(3, 4), Rational(1)};
    std::string counts;
    for (const auto& path : c.dictionaries) {
        auto dict = dict_load(path);
        std::size_t previous = SIZE_MAX;
        for (const auto& t : sweep) {
            std::size_t positives = 0;
            for (const auto& lp : lab_programs()) {
                auto report = scan(lp.program, dict, {t, 1});
                positives += report.verdict != ProgramVerdict::Clean;
                for (const auto& h : report.hits) {
                    // lattice: KNOWN implies structural with full agreement
                    o.check(h.verdict != Verdict::Known || (h.structural && h.x == h.m), "KNOWN without x = m");
                    o.check(h.verdict == Verdict::NoMatch || h.structural, "positive hit without structure");
                }
            }
            o.check(positives <= previous, "count rose at threshold " + t.to_string());
            previous = positives;
            counts += std::to_string(positives) + " ";
        }
        counts += "| ";
    }
    if (o.ok) {
        o.detail = "positives " + counts.substr(0, counts.size() - 3);
    }
    return o;
}

} // namespace

int main()
{
    const std::vector<Criterion> criteria = {
        {"AC1", "z.run golden blocks and structure line", 0.010, ac1},
        {"AC2", "g1g2 correspondence matrix and HK cardinality", 0, ac2},
        {"AC3", "Hopcroft-Karp equals augmenting-path oracle", 30, ac3},
        {"AC4", "MD5 fingerprint golden", 0, ac4},
        {"AC5", "lab evaluation P=R=F=1 for three dictionaries", 60, ac5},
        {"AC6", "TF-IDF properties", 0, ac6},
        {"AC7", "decision tree CV F1 and permutation control", 120, ac7},
        {"AC8", "pre-filter soundness on lab corpus", 0, ac8},
        {"AC9", "threshold sweep monotone positive count", 0, ac9},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.body();
        } catch (const std::exception& e) {
            o.ok = false;
            o.detail = std::string("exception: ") + e.what();
        }
        double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (c.limit_seconds > 0 && seconds > c.limit_seconds) {
            o.ok = false;
            o.detail = "runtime over " + format_double(c.limit_seconds) + " s" + (o.detail.empty() ? "" : "; " + o.detail);
        }
        failures += !o.ok;
        char timing[32];
        std::snprintf(timing, sizeof timing, "%.3f s", seconds);
        std::cout << (o.ok ? "[PASS] " : "[FAIL] ") << c.id << " " << c.title << " (" << timing << ")"
                  << (o.detail.empty() ? "" : ": " + o.detail) << std::endl;
    }
    fs::remove_all(scratch());
    std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
    return failures == 0 ? 0 : 1;
}
