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

#include <charconv>
#include <compare>
#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace opsig {

/// Exact non-negative fraction. Scores (x/m) and thresholds are compared
/// without floating-point rounding.
class Rational {
public:
    constexpr Rational() = default;
    constexpr Rational(std::int64_t num, std::int64_t den = 1) : num_(num), den_(den)
    {
        if (den_ == 0) {
            throw std::invalid_argument("rational with zero denominator");
        }
        if (den_ < 0) {
            num_ = -num_;
            den_ = -den_;
        }
        auto g = std::gcd(num_ < 0 ? -num_ : num_, den_);
        if (g > 1) {
            num_ /= g;
            den_ /= g;
        }
    }

    constexpr std::int64_t num() const { return num_; }
    constexpr std::int64_t den() const { return den_; }
    constexpr double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

    friend constexpr bool operator==(const Rational& a, const Rational& b)
    {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend constexpr std::strong_ordering operator<=>(const Rational& a, const Rational& b)
    {
        auto lhs = static_cast<__int128>(a.num_) * b.den_;
        auto rhs = static_cast<__int128>(b.num_) * a.den_;
        return lhs <=> rhs;
    }

    /// "n/d" or lowest-terms integer.
    std::string to_string() const
    {
        return den_ == 1 ? std::to_string(num_) : std::to_string(num_) + "/" + std::to_string(den_);
    }

    /// Accepts "3", "0.5", "1.01", ".25" and "2/3".
    static Rational parse(std::string_view text)
    {
        auto bad = [&] { return std::invalid_argument("not a rational number: '" + std::string(text) + "'"); };
        if (text.empty()) {
            throw bad();
        }
        if (auto slash = text.find('/'); slash != std::string_view::npos) {
            auto n = parse_int(text.substr(0, slash));
            auto d = parse_int(text.substr(slash + 1));
            if (!n || !d || *d == 0) {
                throw bad();
            }
            return {*n, *d};
        }
        bool negative = false;
        if (text.front() == '-' || text.front() == '+') {
            negative = text.front() == '-';
            text.remove_prefix(1);
        }
        auto dot = text.find('.');
        auto whole = text.substr(0, dot);
        auto frac = dot == std::string_view::npos ? std::string_view{} : text.substr(dot + 1);
        if ((whole.empty() && frac.empty()) || frac.size() > 15) {
            throw bad();
        }
        std::int64_t num = 0;
        std::int64_t den = 1;
        for (auto part : {whole, frac}) {
            for (char c : part) {
                if (c < '0' || c > '9' || num > (INT64_MAX - 9) / 10) {
                    throw bad();
                }
                num = num * 10 + (c - '0');
            }
        }
        for (std::size_t i = 0; i < frac.size(); ++i) {
            den *= 10;
        }
        return {negative ? -num : num, den};
    }

    /// Shortest round-trip decimal of `value`, read back exactly.
    static Rational from_double(double value)
    {
        char buf[64];
        auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::fixed);
        if (ec != std::errc{}) {
            throw std::invalid_argument("cannot represent value as a rational");
        }
        return parse(std::string_view(buf, end));
    }

private:
    static std::optional<std::int64_t> parse_int(std::string_view s)
    {
        std::int64_t v = 0;
        auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc{} || end != s.data() + s.size()) {
            return std::nullopt;
        }
        return v;
    }

    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

} // namespace opsig
