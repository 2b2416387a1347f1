// Copyright 2026 The CCR Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/**
 * @file
 * Correlation Bell-type inequalities with exact rational coefficients.
 *
 * An inequality is a map g from setting vectors x to coefficients; it
 * reads sum_x g(x) <O_1(x_1) ... O_N(x_N)> <= B. Setting 0 means the party
 * is idle and contributes the identity, so terms can involve any subset
 * of parties.
 */

#pragma once

#include <algorithm>
#include <array>
#include <compare>
#include <cstddef>
#include <initializer_list>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "rational.hpp"

namespace ccr {

/// One setting per party; 0 is idle, 1..l_i are measurement settings.
class SettingVector {
  public:
    SettingVector() = default;
    SettingVector(std::initializer_list<int> values) : values_(values) {}
    explicit SettingVector(std::vector<int> values)
        : values_(std::move(values)) {}

    [[nodiscard]] auto size() const noexcept -> std::size_t {
        return values_.size();
    }
    auto operator[](std::size_t i) const -> int { return values_[i]; }
    auto operator[](std::size_t i) -> int & { return values_[i]; }
    [[nodiscard]] auto begin() const noexcept { return values_.begin(); }
    [[nodiscard]] auto end() const noexcept { return values_.end(); }
    [[nodiscard]] auto values() const noexcept -> const std::vector<int> & {
        return values_;
    }

    [[nodiscard]] auto idle_count() const -> std::size_t {
        return static_cast<std::size_t>(
            std::count(values_.begin(), values_.end(), 0));
    }

    /// Compact digit form, e.g. "11120".
    [[nodiscard]] auto to_string() const -> std::string {
        std::string s;
        for (int v : values_) {
            s += std::to_string(v);
        }
        return s;
    }

    auto operator<=>(const SettingVector &) const = default;
    auto operator==(const SettingVector &) const -> bool = default;

  private:
    std::vector<int> values_;
};

/**
 * Coefficient tensor g of a correlation inequality plus an optional
 * claimed classical bound.
 *
 * Terms are kept in an ordered map so every traversal (file output,
 * enumeration, sampling tables) is deterministic.
 */
class InequalitySpec {
  public:
    using TermMap = std::map<SettingVector, Rational>;

    InequalitySpec(std::vector<int> settings_per_party,
                   std::optional<Rational> classical_bound = std::nullopt)
        : settings_(std::move(settings_per_party)),
          bound_{classical_bound} {
        if (settings_.empty()) {
            throw UsageError("inequality needs at least one party");
        }
        for (int l : settings_) {
            if (l < 1) {
                throw UsageError("each party needs at least one setting");
            }
        }
    }

    [[nodiscard]] auto party_count() const noexcept -> std::size_t {
        return settings_.size();
    }
    [[nodiscard]] auto settings_per_party() const noexcept
        -> const std::vector<int> & {
        return settings_;
    }
    [[nodiscard]] auto terms() const noexcept -> const TermMap & {
        return terms_;
    }
    [[nodiscard]] auto term_count() const noexcept -> std::size_t {
        return terms_.size();
    }
    [[nodiscard]] auto empty() const noexcept -> bool { return terms_.empty(); }
    [[nodiscard]] auto claimed_bound() const noexcept
        -> const std::optional<Rational> & {
        return bound_;
    }
    void set_claimed_bound(std::optional<Rational> bound) { bound_ = bound; }

    /// Throws UsageError unless x has one entry per party within range.
    void check_range(const SettingVector &x) const {
        if (x.size() != settings_.size()) {
            throw UsageError("setting vector " + x.to_string() + " has " +
                             std::to_string(x.size()) + " entries, expected " +
                             std::to_string(settings_.size()));
        }
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (x[i] < 0 || x[i] > settings_[i]) {
                throw UsageError("setting vector " + x.to_string() +
                                 ": party " + std::to_string(i) +
                                 " setting out of range 0.." +
                                 std::to_string(settings_[i]));
            }
        }
    }

    /// Adds a new term. Zero coefficients and duplicates are rejected.
    void add_term(const SettingVector &x, const Rational &coefficient) {
        check_range(x);
        if (coefficient.numerator() == 0) {
            throw UsageError("term " + x.to_string() + " has zero coefficient");
        }
        if (!terms_.emplace(x, coefficient).second) {
            throw UsageError("duplicate term " + x.to_string());
        }
    }

    friend auto operator==(const InequalitySpec &a, const InequalitySpec &b)
        -> bool {
        return a.settings_ == b.settings_ && a.terms_ == b.terms_ &&
               a.bound_ == b.bound_;
    }

  private:
    std::vector<int> settings_;
    TermMap terms_;
    std::optional<Rational> bound_;
};

/// Party names used in text output: A, B, C, ...
inline auto party_name(std::size_t party) -> std::string {
    return std::string(1, static_cast<char>('A' + party));
}

inline auto coefficient(const InequalitySpec &spec, const SettingVector &x)
    -> Rational {
    spec.check_range(x);
    const auto it = spec.terms().find(x);
    return it == spec.terms().end() ? Rational{0} : it->second;
}

/// Exact sum_x |g(x)|.
inline auto abs_sum(const InequalitySpec &spec) -> Rational {
    Rational total{0};
    for (const auto &[x, g] : spec.terms()) {
        total += abs(g);
    }
    return total;
}

/// Referee distribution |g(x)| / sum |g|.
inline auto input_distribution(const InequalitySpec &spec)
    -> std::map<SettingVector, Rational> {
    if (spec.empty()) {
        throw UsageError("input_distribution: inequality has no terms");
    }
    const Rational norm = abs_sum(spec);
    std::map<SettingVector, Rational> dist;
    for (const auto &[x, g] : spec.terms()) {
        dist.emplace(x, abs(g) / norm);
    }
    return dist;
}

/// Sign(g(x)); the referee never distributes x with g(x) = 0.
inline auto sign_function(const InequalitySpec &spec, const SettingVector &x)
    -> int {
    const Rational g = coefficient(spec, x);
    if (g.numerator() == 0) {
        throw DomainError("sign_function: g(" + x.to_string() + ") = 0");
    }
    return g.numerator() > 0 ? 1 : -1;
}

/// q(x) = 1 - x(3 - x)/2: 1 for the idle setting, 0 for settings 1 and 2.
inline auto q_weight(int x) -> int {
    if (x < 0 || x > 2) {
        throw UsageError("q_weight: setting " + std::to_string(x) +
                         " outside {0,1,2}");
    }
    return 1 - (x * (3 - x)) / 2;
}

/// Applies the party cycle A->B->C->...->A: party i's setting moves to
/// party i+1.
inline auto cyclic_shift(const SettingVector &x) -> SettingVector {
    std::vector<int> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        out[(i + 1) % x.size()] = x[i];
    }
    return SettingVector(std::move(out));
}

/// Image of the whole tensor under the party cycle.
inline auto cyclic_shift(const InequalitySpec &spec) -> InequalitySpec {
    const auto &l = spec.settings_per_party();
    std::vector<int> shifted(l.size());
    for (std::size_t i = 0; i < l.size(); ++i) {
        shifted[(i + 1) % l.size()] = l[i];
    }
    InequalitySpec out(std::move(shifted), spec.claimed_bound());
    for (const auto &[x, g] : spec.terms()) {
        out.add_term(cyclic_shift(x), g);
    }
    return out;
}

/**
 * The five-party, two-setting inequality built only from four-party
 * correlations. Block k (k = 0..4) correlates parties k, k+1, k+2, k+3
 * (mod 5) with party k+4 idle; its 16 coefficients (in units of 1/16,
 * settings of the four parties in lexicographic order 1111..2222) are
 * the same for every block. Classical bound 1.
 */
inline auto build_pentagon_inequality() -> InequalitySpec {
    constexpr std::array<int, 16> block{+1, -1, +3, -3, +1, -1, +3, -3,
                                        +1, -1, -1, +1, +1, -1, -1, +1};
    constexpr std::size_t parties = 5;
    InequalitySpec spec(std::vector<int>(parties, 2), Rational{1});
    for (std::size_t first = 0; first < parties; ++first) {
        for (std::size_t k = 0; k < block.size(); ++k) {
            std::vector<int> x(parties, 0);
            for (std::size_t pos = 0; pos < 4; ++pos) {
                // bit (3 - pos) of k selects setting 2 for the pos-th party
                x[(first + pos) % parties] =
                    1 + static_cast<int>((k >> (3 - pos)) & 1U);
            }
            spec.add_term(SettingVector(std::move(x)), Rational{block[k], 16});
        }
    }
    return spec;
}

/**
 * Closed-form sign of the pentagon target function. With party j idle,
 * and a, c, d the settings of parties j+1, j+3, j+4 (mod 5), the sign is
 * (-1)^(a(1-d) + (1-a)(c(1-d) + (1-c)d)). Party j+2 only changes the
 * coefficient magnitude. Exponents are reduced mod 2, negative values
 * included.
 *
 * NOTE: the same pattern is applied to every idle party. A version whose
 * non-first terms are not cyclic shifts of the first one disagrees with
 * the coefficient table; see README.
 */
inline auto closed_form_sign(const SettingVector &x) -> int {
    constexpr std::size_t parties = 5;
    if (x.size() != parties) {
        throw DomainError("closed_form_sign: expected 5 settings, got " +
                          std::to_string(x.size()));
    }
    if (x.idle_count() != 1) {
        throw DomainError("closed_form_sign: " + x.to_string() +
                          " must have exactly one idle party");
    }
    int sum = 0;
    for (std::size_t idle = 0; idle < parties; ++idle) {
        const int weight = q_weight(x[idle]);
        if (weight == 0) {
            continue;
        }
        const int a = x[(idle + 1) % parties];
        const int c = x[(idle + 3) % parties];
        const int d = x[(idle + 4) % parties];
        const int exponent =
            a * (1 - d) + (1 - a) * (c * (1 - d) + (1 - c) * d);
        sum += weight * ((exponent % 2 == 0) ? 1 : -1);
    }
    return sum;
}

} // namespace ccr
