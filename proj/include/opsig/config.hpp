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

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "opsig/error.hpp"
#include "opsig/listing.hpp"
#include "opsig/ngram.hpp"
#include "opsig/rational.hpp"

namespace opsig {

struct Config {
    Rational threshold{1, 2};
    std::size_t ngram_size = 2;
    std::size_t reference_k = 100;
    std::uint64_t seed = 42;
    std::vector<std::string> api_blocklist = default_api_blocklist();
    std::size_t jobs = 1;
    std::optional<std::filesystem::path> dict;
};

inline void validate(const Config& c)
{
    if (c.threshold < Rational(0)) {
        throw DataError("threshold must be non-negative");
    }
    if (c.ngram_size < 1 || c.ngram_size > 9) {
        throw DataError("ngram_size must lie in 1..9");
    }
    if (c.reference_k == 0) {
        throw DataError("reference k must be positive");
    }
}

/// Overlays the keys present in a JSON config file onto `base`.
/// Recognized keys: threshold (number or "n/d"), ngram_size, k, seed, jobs,
/// dict, blocklist.
inline Config apply_config_json(Config base, std::string_view text, std::string_view origin = "config")
{
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw DataError(std::string(origin) + ": " + e.what());
    }
    if (!j.is_object()) {
        throw DataError(std::string(origin) + ": top level must be an object");
    }
    try {
        for (const auto& [key, value] : j.items()) {
            if (key == "threshold") {
                base.threshold = value.is_string() ? Rational::parse(value.get<std::string>())
                                                   : Rational::from_double(value.get<double>());
            } else if (key == "ngram_size") {
                base.ngram_size = value.get<std::size_t>();
            } else if (key == "k") {
                base.reference_k = value.get<std::size_t>();
            } else if (key == "seed") {
                base.seed = value.get<std::uint64_t>();
            } else if (key == "jobs") {
                base.jobs = value.get<std::size_t>();
            } else if (key == "dict") {
                base.dict = value.get<std::string>();
            } else if (key == "blocklist") {
                base.api_blocklist = value.get<std::vector<std::string>>();
            } else {
                throw DataError("unknown key '" + key + "'");
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string(origin) + ": " + e.what());
    } catch (const std::exception& e) {
        throw DataError(std::string(origin) + ": " + e.what());
    }
    validate(base);
    return base;
}

inline Config load_config_file(const std::filesystem::path& path, Config base = {})
{
    return apply_config_json(std::move(base), read_text_file(path), path.string());
}

/// Defaults with `OPSIG_DICT` applied.
inline Config environment_config()
{
    Config c;
    if (const char* d = std::getenv("OPSIG_DICT"); d != nullptr && *d != '\0') {
        c.dict = d;
    }
    return c;
}

} // namespace opsig
