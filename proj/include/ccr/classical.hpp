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
 * Exhaustive classical analysis of a correlation inequality: the local
 * hidden variable (LHV) bound and the best deterministic one-bit
 * messaging strategy for the matching communication game.
 */

#pragma once

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <future>
#include <numeric>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "errors.hpp"
#include "inequality.hpp"
#include "rational.hpp"

namespace ccr {

/// Default limit on the number of candidates an exhaustive search visits.
inline constexpr std::uint64_t default_enumeration_cap = std::uint64_t{1}
                                                         << 26;

struct SearchOptions {
    std::uint64_t cap = default_enumeration_cap;
    unsigned threads = 1;
};

/**
 * Sign table per party: `table(i)[s]` for s = 0..l_i. Used both as a
 * messaging strategy (partner i sends y_i * table(i)[x_i]) and, with
 * entry 0 pinned to +1, as an LHV assignment.
 */
class SignTables {
  public:
    SignTables() = default;
    explicit SignTables(std::vector<std::vector<int>> tables)
        : tables_(std::move(tables)) {
        for (const auto &t : tables_) {
            for (int v : t) {
                if (v != 1 && v != -1) {
                    throw UsageError("sign table entries must be +1 or -1");
                }
            }
        }
    }

    /// All entries +1, one table of size l_i + 1 per party.
    static auto constant(const std::vector<int> &settings, int value = 1)
        -> SignTables {
        std::vector<std::vector<int>> t;
        for (int l : settings) {
            t.emplace_back(static_cast<std::size_t>(l) + 1, value);
        }
        return SignTables(std::move(t));
    }

    [[nodiscard]] auto party_count() const noexcept -> std::size_t {
        return tables_.size();
    }
    [[nodiscard]] auto table(std::size_t party) const
        -> const std::vector<int> & {
        return tables_.at(party);
    }
    [[nodiscard]] auto operator()(std::size_t party, int setting) const
        -> int {
        return tables_[party][static_cast<std::size_t>(setting)];
    }
    [[nodiscard]] auto tables() const noexcept
        -> const std::vector<std::vector<int>> & {
        return tables_;
    }

    /// Negates every entry of every table.
    [[nodiscard]] auto negated() const -> SignTables {
        auto t = tables_;
        for (auto &row : t) {
            for (auto &v : row) {
                v = -v;
            }
        }
        return SignTables(std::move(t));
    }

    /// Throws UsageError unless the tables cover every setting of spec.
    void check_covers(const InequalitySpec &spec) const {
        const auto &l = spec.settings_per_party();
        if (tables_.size() != l.size()) {
            throw UsageError("expected " + std::to_string(l.size()) +
                             " sign tables, got " +
                             std::to_string(tables_.size()));
        }
        for (std::size_t i = 0; i < l.size(); ++i) {
            if (tables_[i].size() != static_cast<std::size_t>(l[i]) + 1) {
                throw UsageError("sign table of party " + party_name(i) +
                                 " must have " + std::to_string(l[i] + 1) +
                                 " entries");
            }
        }
    }

    /// Product of table(i)[x_i] over all parties.
    [[nodiscard]] auto product(const SettingVector &x) const -> int {
        int p = 1;
        for (std::size_t i = 0; i < x.size(); ++i) {
            p *= (*this)(i, x[i]);
        }
        return p;
    }

    auto operator==(const SignTables &) const -> bool = default;

  private:
    std::vector<std::vector<int>> tables_;
};

/// One-bit messaging strategy: party i sends y_i * s_i(x_i).
class MessagingStrategy : public SignTables {
  public:
    using SignTables::SignTables;
    MessagingStrategy(SignTables t) : SignTables(std::move(t)) {}
};

/// Deterministic local values; the idle setting is always +1.
class LhvAssignment : public SignTables {
  public:
    explicit LhvAssignment(std::vector<std::vector<int>> tables)
        : LhvAssignment(SignTables(std::move(tables))) {}
    LhvAssignment(SignTables t) : SignTables(std::move(t)) {
        for (const auto &row : tables()) {
            if (!row.empty() && row.front() != 1) {
                throw UsageError("LHV value of the idle setting must be +1");
            }
        }
    }
};

/// Text encoding: one group per party of '+'/'-' for s(0), s(1), ...,
/// groups separated by ','. Example: "+++,+++,+++,+++,-+-".
inline auto encode(const SignTables &t) -> std::string {
    std::string out;
    for (std::size_t i = 0; i < t.party_count(); ++i) {
        if (i != 0) {
            out.push_back(',');
        }
        for (int v : t.table(i)) {
            out.push_back(v > 0 ? '+' : '-');
        }
    }
    return out;
}

inline auto decode_strategy(std::string_view text) -> MessagingStrategy {
    std::vector<std::vector<int>> tables(1);
    for (char c : text) {
        switch (c) {
        case '+':
            tables.back().push_back(1);
            break;
        case '-':
            tables.back().push_back(-1);
            break;
        case ',':
            tables.emplace_back();
            break;
        default:
            throw UsageError(std::string("strategy encoding: unexpected '") +
                             c + "'");
        }
    }
    return MessagingStrategy(std::move(tables));
}

/// sum_x g(x) prod_i a_i(x_i), exact.
inline auto lhv_value(const InequalitySpec &spec, const LhvAssignment &a)
    -> Rational {
    a.check_covers(spec);
    Rational total{0};
    for (const auto &[x, g] : spec.terms()) {
        total += g * a.product(x);
    }
    return total;
}

/// sum_x g(x) prod_i s_i(x_i), the classical correlation of a strategy.
inline auto strategy_correlation(const InequalitySpec &spec,
                                 const MessagingStrategy &s) -> Rational {
    s.check_covers(spec);
    Rational total{0};
    for (const auto &[x, g] : spec.terms()) {
        total += g * s.product(x);
    }
    return total;
}

/// Success probability 1/2 (1 + sum_x g(x) prod s_i(x_i) / sum |g|).
inline auto strategy_success(const InequalitySpec &spec,
                             const MessagingStrategy &s) -> Rational {
    if (spec.empty()) {
        throw UsageError("strategy_success: inequality has no terms");
    }
    return Rational{1, 2} *
           (Rational{1} + strategy_correlation(spec, s) / abs_sum(spec));
}

/// Same quantity computed as the referee-weighted probability that
/// Sign(g(x)) * prod s_i(x_i) = +1.
inline auto strategy_success_weighted(const InequalitySpec &spec,
                                      const MessagingStrategy &s)
    -> Rational {
    s.check_covers(spec);
    Rational total{0};
    for (const auto &[x, p] : input_distribution(spec)) {
        if (sign_function(spec, x) * s.product(x) == 1) {
            total += p;
        }
    }
    return total;
}

namespace detail {

/// Terms with integer weights g(x) * scale, scale = lcm of denominators.
struct CompiledTerms {
    std::vector<std::vector<int>> settings;
    std::vector<std::int64_t> weights;
    std::int64_t scale = 1;

    explicit CompiledTerms(const InequalitySpec &spec) {
        for (const auto &[x, g] : spec.terms()) {
            scale = std::lcm(scale, g.denominator());
        }
        for (const auto &[x, g] : spec.terms()) {
            settings.push_back(x.values());
            weights.push_back(g.numerator() * (scale / g.denominator()));
        }
    }
};

struct SearchResult {
    std::int64_t best = 0;
    std::uint64_t best_index = 0;
    std::uint64_t optimal_count = 0;
    bool any = false;

    void offer(std::int64_t value, std::uint64_t index) {
        if (!any || value > best || (value == best && index < best_index)) {
            if (!any || value != best) {
                optimal_count = 0;
            }
            best = value;
            best_index = index;
            any = true;
        }
        if (value == best) {
            ++optimal_count;
        }
    }

    void merge(const SearchResult &other) {
        if (!other.any) {
            return;
        }
        if (!any || other.best > best) {
            *this = other;
        } else if (other.best == best) {
            best_index = std::min(best_index, other.best_index);
            optimal_count += other.optimal_count;
        }
    }
};

/**
 * Exhaustive maximization of sum_t w_t prod_i table_i(x_{t,i}) over all
 * sign tables whose free slots are settings first_slot..l_i.
 *
 * Candidates are indexed so that increasing index is lexicographic order
 * on (party A slots, party B slots, ...) with +1 < -1; a set bit means -1.
 * Ties resolve to the smallest index. Partial per-term products are kept
 * per depth, so the innermost party is updated in O(terms).
 */
class SignTableSearch {
  public:
    SignTableSearch(const InequalitySpec &spec, int first_slot,
                    const SearchOptions &options)
        : terms_(spec), first_slot_{first_slot} {
        for (int l : spec.settings_per_party()) {
            free_slots_.push_back(l + 1 - first_slot);
        }
        const int bits = std::accumulate(free_slots_.begin(),
                                         free_slots_.end(), 0);
        if (bits >= 63 || (std::uint64_t{1} << bits) > options.cap) {
            throw SizeError("exhaustive search over 2^" +
                            std::to_string(bits) +
                            " sign tables exceeds the enumeration cap of " +
                            std::to_string(options.cap) +
                            "; raise it with --cap");
        }
        total_bits_ = bits;
        threads_ = std::max(1U, options.threads);
    }

    [[nodiscard]] auto run() const -> SearchResult {
        const std::uint64_t outer = std::uint64_t{1} << free_slots_.front();
        const unsigned workers = static_cast<unsigned>(
            std::min<std::uint64_t>(threads_, outer));
        if (workers <= 1) {
            return run_outer(0, 1);
        }
        std::vector<std::future<SearchResult>> jobs;
        for (unsigned w = 0; w < workers; ++w) {
            jobs.push_back(std::async(std::launch::async,
                                      [this, w, workers] {
                                          return run_outer(w, workers);
                                      }));
        }
        SearchResult result;
        for (auto &job : jobs) {
            result.merge(job.get());
        }
        return result;
    }

    /// Sign tables for a candidate index.
    [[nodiscard]] auto decode(std::uint64_t index) const -> SignTables {
        std::vector<std::vector<int>> tables;
        int remaining = total_bits_;
        for (int k : free_slots_) {
            remaining -= k;
            const auto table = (index >> remaining) & ((std::uint64_t{1} << k) - 1);
            tables.push_back(table_values(table, k));
        }
        return SignTables(std::move(tables));
    }

    [[nodiscard]] auto scale() const noexcept -> std::int64_t {
        return terms_.scale;
    }

  private:
    /// Full table (slots 0..l) for a free-slot pattern.
    [[nodiscard]] auto table_values(std::uint64_t pattern, int k) const
        -> std::vector<int> {
        std::vector<int> values(static_cast<std::size_t>(k + first_slot_), 1);
        for (int j = 0; j < k; ++j) {
            const bool negative = ((pattern >> (k - 1 - j)) & 1U) != 0;
            values[static_cast<std::size_t>(j + first_slot_)] =
                negative ? -1 : 1;
        }
        return values;
    }

    [[nodiscard]] auto run_outer(unsigned offset, unsigned stride) const
        -> SearchResult {
        SearchResult result;
        const std::size_t term_count = terms_.weights.size();
        const std::size_t parties = free_slots_.size();
        // products[p] holds per-term partial products after parties 0..p-1.
        std::vector<std::vector<int>> products(
            parties + 1, std::vector<int>(term_count, 1));
        const std::uint64_t outer = std::uint64_t{1} << free_slots_.front();
        for (std::uint64_t t = offset; t < outer; t += stride) {
            apply(0, t, products[0], products[1]);
            descend(1, t, products, result);
        }
        return result;
    }

    void apply(std::size_t party, std::uint64_t pattern,
               const std::vector<int> &in, std::vector<int> &out) const {
        const auto values = table_values(pattern, free_slots_[party]);
        for (std::size_t t = 0; t < in.size(); ++t) {
            out[t] = in[t] * values[static_cast<std::size_t>(
                                 terms_.settings[t][party])];
        }
    }

    void descend(std::size_t party, std::uint64_t prefix,
                 std::vector<std::vector<int>> &products,
                 SearchResult &result) const {
        if (party == free_slots_.size()) {
            std::int64_t value = 0;
            const auto &p = products[party];
            for (std::size_t t = 0; t < p.size(); ++t) {
                value += terms_.weights[t] * p[t];
            }
            result.offer(value, prefix);
            return;
        }
        const int k = free_slots_[party];
        for (std::uint64_t t = 0; t < (std::uint64_t{1} << k); ++t) {
            apply(party, t, products[party], products[party + 1]);
            descend(party + 1, (prefix << k) | t, products, result);
        }
    }

    CompiledTerms terms_;
    int first_slot_;
    std::vector<int> free_slots_;
    int total_bits_ = 0;
    unsigned threads_ = 1;
};

} // namespace detail

struct LhvBound {
    Rational value;
    LhvAssignment witness;
};

/// Maximum of the inequality's left side over all deterministic LHV
/// assignments, with the lexicographically smallest maximizer.
inline auto lhv_bound(const InequalitySpec &spec,
                      const SearchOptions &options = {}) -> LhvBound {
    const detail::SignTableSearch search(spec, 1, options);
    const auto result = search.run();
    return {Rational{result.best, search.scale()},
            LhvAssignment(search.decode(result.best_index))};
}

struct StrategyOptimum {
    MessagingStrategy strategy;
    Rational success;
    /// Number of strategies attaining the optimum.
    std::uint64_t optimal_count = 0;
};

/// Best deterministic messaging strategy by exhaustive enumeration.
inline auto best_strategy(const InequalitySpec &spec,
                          const SearchOptions &options = {})
    -> StrategyOptimum {
    if (spec.empty()) {
        throw UsageError("best_strategy: inequality has no terms");
    }
    const detail::SignTableSearch search(spec, 0, options);
    const auto result = search.run();
    const Rational correlation{result.best, search.scale()};
    return {MessagingStrategy(search.decode(result.best_index)),
            Rational{1, 2} * (Rational{1} + correlation / abs_sum(spec)),
            result.optimal_count};
}

struct SymmetricEntry {
    std::vector<int> table;
    Rational success;
};

/// Success probability of every strategy in which all parties share one
/// table, in lexicographic table order.
inline auto symmetric_strategy_report(const InequalitySpec &spec)
    -> std::vector<SymmetricEntry> {
    const auto &l = spec.settings_per_party();
    if (std::adjacent_find(l.begin(), l.end(), std::not_equal_to<>()) !=
        l.end()) {
        throw UsageError("symmetric strategies need equal setting counts");
    }
    const int size = l.front() + 1;
    if (size >= 31) {
        throw SizeError("symmetric strategy table too large");
    }
    std::vector<SymmetricEntry> report;
    for (std::uint32_t pattern = 0; pattern < (1U << size); ++pattern) {
        std::vector<int> table(static_cast<std::size_t>(size));
        for (int j = 0; j < size; ++j) {
            table[static_cast<std::size_t>(j)] =
                ((pattern >> (size - 1 - j)) & 1U) != 0 ? -1 : 1;
        }
        const MessagingStrategy s(
            std::vector<std::vector<int>>(l.size(), table));
        report.push_back({table, strategy_success(spec, s)});
    }
    return report;
}

} // namespace ccr
