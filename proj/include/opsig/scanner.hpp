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
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "json.hpp"

#include "opsig/cfg.hpp"
#include "opsig/error.hpp"
#include "opsig/listing.hpp"
#include "opsig/log.hpp"
#include "opsig/matcher.hpp"
#include "opsig/parallel.hpp"
#include "opsig/rational.hpp"
#include "opsig/signature.hpp"

namespace opsig {

/// A program is a directory of listing files (`*.lst`), or one listing file.
struct Program {
    std::string id;
    std::vector<MethodListing> methods;
    std::vector<std::string> warnings;
};

/// Unreadable or malformed listing files are skipped with a warning.
inline Program load_program(const std::filesystem::path& path)
{
    namespace fs = std::filesystem;
    Program program;
    program.id = path.filename().string();
    if (program.id.empty()) {
        program.id = path.parent_path().filename().string();
    }

    std::vector<fs::path> files;
    if (fs::is_directory(path)) {
        for (const auto& entry : fs::directory_iterator(path)) {
            if (entry.is_regular_file() && entry.path().extension() == ".lst") {
                files.push_back(entry.path());
            }
        }
        std::sort(files.begin(), files.end());
    } else if (fs::is_regular_file(path)) {
        files.push_back(path);
    } else {
        throw DataError("no such program: " + path.string());
    }

    for (const auto& file : files) {
        try {
            auto methods = read_listing_file(file);
            program.methods.insert(program.methods.end(), std::make_move_iterator(methods.begin()),
                                   std::make_move_iterator(methods.end()));
        } catch (const std::exception& e) {
            program.warnings.push_back(std::string("skipped listing: ") + e.what());
            log::warn(program.warnings.back());
        }
    }
    return program;
}

enum class ProgramVerdict { Clean, Variant, KnownMalware };

inline std::string_view to_string(ProgramVerdict v)
{
    switch (v) {
    case ProgramVerdict::Clean: return "CLEAN";
    case ProgramVerdict::Variant: return "VARIANT";
    case ProgramVerdict::KnownMalware: return "KNOWN_MALWARE";
    }
    return "?";
}

struct MethodHit {
    std::string method;
    std::string referent;
    std::optional<std::string> family;
    bool structural = false;
    std::size_t x = 0;
    std::size_t m = 0;
    Verdict verdict = Verdict::NoMatch;

    Rational score() const { return m == 0 ? Rational{0} : Rational(static_cast<std::int64_t>(x), static_cast<std::int64_t>(m)); }
};

struct ScanStats {
    std::size_t methods = 0;
    std::size_t comparisons = 0;     ///< isomorphism computations run
    std::size_t prefilter_skips = 0; ///< pairs without a shared fingerprint
};

struct ScanReport {
    std::string program;
    ProgramVerdict verdict = ProgramVerdict::Clean;
    std::vector<MethodHit> hits; ///< KNOWN and VARIANT only
    std::vector<std::string> families;
    ScanStats stats;
    std::vector<std::string> warnings;
};

struct ScanOptions {
    Rational threshold{1, 2};
    std::size_t jobs = 1;
};

/// Matches every method of `program` against every dictionary entry that
/// shares at least one block fingerprint with it.
inline ScanReport scan(const Program& program, const Dictionary& dictionary, const ScanOptions& options = {})
{
    ScanReport report;
    report.program = program.id;
    report.warnings = program.warnings;
    report.stats.methods = program.methods.size();
    if (dictionary.entries.empty()) {
        report.warnings.emplace_back("empty dictionary: nothing to match against");
    }

    std::vector<std::set<std::string_view>> entry_prints;
    entry_prints.reserve(dictionary.entries.size());
    for (const auto& e : dictionary.entries) {
        entry_prints.emplace_back(e.fingerprints.begin(), e.fingerprints.end());
    }

    struct Partial {
        std::vector<MethodHit> hits;
        std::size_t comparisons = 0;
        std::size_t skips = 0;
    };
    std::vector<Partial> partials(program.methods.size());
    parallel_for(program.methods.size(), options.jobs, [&](std::size_t mi) {
        auto cfg = build_cfg(program.methods[mi]);
        auto& out = partials[mi];
        for (std::size_t ei = 0; ei < dictionary.entries.size(); ++ei) {
            const auto& prints = entry_prints[ei];
            bool shared = std::any_of(cfg.blocks.begin(), cfg.blocks.end(),
                                      [&](const BasicBlock& b) { return prints.contains(b.fingerprint); });
            if (!shared) {
                ++out.skips;
                continue;
            }
            ++out.comparisons;
            const auto& entry = dictionary.entries[ei];
            auto r = match(entry, cfg, options.threshold);
            if (r.verdict != Verdict::NoMatch) {
                out.hits.push_back({cfg.descriptor, entry.descriptor, entry.family, r.structural, r.x, r.m, r.verdict});
            }
        }
    });

    std::set<std::string> families;
    for (auto& p : partials) {
        report.stats.comparisons += p.comparisons;
        report.stats.prefilter_skips += p.skips;
        for (auto& h : p.hits) {
            auto strength = h.verdict == Verdict::Known ? ProgramVerdict::KnownMalware : ProgramVerdict::Variant;
            report.verdict = std::max(report.verdict, strength);
            if (h.family) {
                families.insert(*h.family);
            }
            report.hits.push_back(std::move(h));
        }
    }
    std::stable_sort(report.hits.begin(), report.hits.end(), [](const MethodHit& a, const MethodHit& b) {
        return std::tie(a.method, a.family, a.referent) < std::tie(b.method, b.family, b.referent);
    });
    report.families.assign(families.begin(), families.end());
    return report;
}

inline nlohmann::ordered_json report_to_json(const ScanReport& report)
{
    nlohmann::ordered_json j;
    j["program"] = report.program;
    j["verdict"] = std::string(to_string(report.verdict));
    auto hits = nlohmann::ordered_json::array();
    for (const auto& h : report.hits) {
        nlohmann::ordered_json hit;
        hit["method"] = h.method;
        hit["referent"] = h.referent;
        hit["family"] = h.family ? nlohmann::ordered_json(*h.family) : nlohmann::ordered_json(nullptr);
        hit["structural"] = h.structural;
        hit["score"] = h.score().to_double();
        hit["verdict"] = std::string(to_string(h.verdict));
        hits.push_back(std::move(hit));
    }
    j["hits"] = std::move(hits);
    j["families"] = report.families;
    j["stats"] = {{"methods", report.stats.methods},
                  {"comparisons", report.stats.comparisons},
                  {"prefilter_skips", report.stats.prefilter_skips}};
    j["warnings"] = report.warnings;
    return j;
}

inline std::string format_report_json(const ScanReport& report)
{
    return report_to_json(report).dump(2) + "\n";
}

inline std::string format_report_text(const ScanReport& report)
{
    std::string out = "program: " + report.program + "\n";
    out += "verdict: " + std::string(to_string(report.verdict)) + "\n";
    if (!report.families.empty()) {
        out += "families:";
        for (const auto& f : report.families) {
            out += " " + f;
        }
        out += "\n";
    }
    for (const auto& h : report.hits) {
        out += "hit: " + h.method + " ~ " + h.referent + " family=" + h.family.value_or("-") +
               " score=" + std::to_string(h.x) + "/" + std::to_string(h.m) + " " + std::string(to_string(h.verdict)) +
               "\n";
    }
    out += "stats: methods=" + std::to_string(report.stats.methods) +
           " comparisons=" + std::to_string(report.stats.comparisons) +
           " prefilter_skips=" + std::to_string(report.stats.prefilter_skips) + "\n";
    for (const auto& w : report.warnings) {
        out += "warning: " + w + "\n";
    }
    return out;
}

// ---- evaluation -----------------------------------------------------------

struct LabeledProgram {
    Program program;
    bool infected = false;
};

/// `<dir>/infected/*` and `<dir>/clean/*`, each entry one program.
inline std::vector<LabeledProgram> load_labeled_programs(const std::filesystem::path& dir)
{
    namespace fs = std::filesystem;
    std::vector<LabeledProgram> out;
    bool any = false;
    for (auto [sub, infected] : {std::pair{"infected", true}, std::pair{"clean", false}}) {
        auto root = dir / sub;
        if (!fs::is_directory(root)) {
            continue;
        }
        any = true;
        std::vector<fs::path> entries;
        for (const auto& e : fs::directory_iterator(root)) {
            if (e.is_directory() || e.path().extension() == ".lst") {
                entries.push_back(e.path());
            }
        }
        std::sort(entries.begin(), entries.end());
        for (const auto& e : entries) {
            out.push_back({load_program(e), infected});
        }
    }
    if (!any) {
        throw DataError(dir.string() + " has neither infected/ nor clean/ subdirectories");
    }
    return out;
}

struct DetectionTable {
    std::size_t tp = 0, fp = 0, tn = 0, fn = 0;

    double precision() const { return tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp); }
    double recall() const { return tp + fn == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn); }
    double f_measure() const
    {
        auto p = precision();
        auto r = recall();
        return p + r > 0 ? 2 * p * r / (p + r) : 0.0;
    }
    std::size_t positives() const { return tp + fp; }
};

/// KNOWN_MALWARE and VARIANT verdicts both count as detections.
inline DetectionTable evaluate(std::span<const LabeledProgram> programs, const Dictionary& dictionary,
                               const ScanOptions& options = {})
{
    DetectionTable t;
    for (const auto& lp : programs) {
        bool flagged = scan(lp.program, dictionary, options).verdict != ProgramVerdict::Clean;
        if (flagged) {
            ++(lp.infected ? t.tp : t.fp);
        } else {
            ++(lp.infected ? t.fn : t.tn);
        }
    }
    return t;
}

inline std::string format_detection_table(const DetectionTable& t)
{
    auto num = [](double v) {
        char buf[32];
        auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
        return std::string(buf, end);
    };
    return "precision recall f_measure\n" + num(t.precision()) + " " + num(t.recall()) + " " + num(t.f_measure()) +
           "\n";
}

} // namespace opsig
