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

#include <functional>
#include <iostream>
#include <mutex>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace opsig::log {

using Sink = std::function<void(std::string_view)>;

namespace detail {

struct State {
    std::mutex mutex;
    Sink sink;
};

inline State& state()
{
    static State s;
    return s;
}

} // namespace detail

/// Replace the warning sink; an empty sink restores stderr output.
/// Returns the previous sink.
inline Sink set_warning_sink(Sink sink)
{
    auto& s = detail::state();
    std::lock_guard lock(s.mutex);
    return std::exchange(s.sink, std::move(sink));
}

inline void warn(std::string_view message)
{
    auto& s = detail::state();
    std::lock_guard lock(s.mutex);
    if (s.sink) {
        s.sink(message);
    } else {
        std::cerr << "warning: " << message << '\n';
    }
}

/// Captures warnings for the lifetime of the guard.
class ScopedCapture {
public:
    ScopedCapture()
        : previous_(set_warning_sink([this](std::string_view m) { messages_.emplace_back(m); }))
    {
    }
    ~ScopedCapture() { set_warning_sink(std::move(previous_)); }
    ScopedCapture(const ScopedCapture&) = delete;
    ScopedCapture& operator=(const ScopedCapture&) = delete;

    const std::vector<std::string>& messages() const { return messages_; }

private:
    std::vector<std::string> messages_;
    Sink previous_;
};

} // namespace opsig::log
