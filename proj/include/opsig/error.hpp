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

#include <cstddef>
#include <stdexcept>
#include <string>

namespace opsig {

/// Malformed input text. `line()` is 1-based, or 0 when no line applies.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& what, const std::string& context = {})
        : std::runtime_error((context.empty() ? "" : context + ": ") +
                             (line == 0 ? what : "line " + std::to_string(line) + ": " + what)),
          line_(line), detail_(what)
    {
    }

    std::size_t line() const noexcept { return line_; }
    /// The message without line or context prefix.
    const std::string& detail() const noexcept { return detail_; }

private:
    std::size_t line_;
    std::string detail_;
};

/// Input that parses but cannot be used (duplicates, missing files, bad labels).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace opsig
