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
 * Simulation of the communication game: a referee hands every partner a
 * setting x_i and a random sign y_i, each partner sends one sign to the
 * decider, and the decider outputs the product of the messages.
 *
 * Quantum partners measure their share of the top-eigenspace mixture
 * (fresh copy every round); classical partners follow a sign table.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <future>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <json.hpp>

#include "classical.hpp"
#include "errors.hpp"
#include "inequality.hpp"
#include "operator_algebra.hpp"
#include "quantum.hpp"
#include "rational.hpp"
#include "rng.hpp"

namespace ccr {

enum class GameMode { QuantumProduct, QuantumSumForm, Classical };

inline auto to_string(GameMode mode) -> std::string {
    switch (mode) {
    case GameMode::QuantumProduct:
        return "quantum-product";
    case GameMode::QuantumSumForm:
        return "quantum-sumform";
    case GameMode::Classical:
        return "classical";
    }
    return "unknown";
}

inline auto parse_game_mode(std::string_view text) -> GameMode {
    if (text == "quantum-product") {
        return GameMode::QuantumProduct;
    }
    if (text == "quantum-sumform") {
        return GameMode::QuantumSumForm;
    }
    if (text == "classical") {
        return GameMode::Classical;
    }
    throw UsageError("unknown mode '" + std::string(text) + "'");
}

struct GameRound {
    SettingVector x;
    std::vector<int> y;
    std::vector<int> messages;
    int answer = 1;
    int target = 1;
    bool success = false;
};

struct SimulationReport {
    std::uint64_t trials = 0;
    std::uint64_t successes = 0;
    double empirical_rate = 0.0;
    double std_error = 0.0;
    double analytic_rate = 0.0;
    std::uint64_t seed = 0;
    GameMode mode = GameMode::QuantumProduct;
    /// Filled only when requested.
    std::vector<GameRound> rounds;
};

/// Draws x with probability |g(x)| / sum |g| using exact integer weights.
class InputSampler {
  public:
    explicit InputSampler(const InequalitySpec &spec) {
        if (spec.empty()) {
            throw UsageError("cannot sample inputs of an empty inequality");
        }
        std::int64_t scale = 1;
        for (const auto &[x, g] : spec.terms()) {
            scale = std::lcm(scale, g.denominator());
        }
        std::uint64_t total = 0;
        for (const auto &[x, g] : spec.terms()) {
            const auto w = static_cast<std::uint64_t>(
                std::abs(g.numerator()) * (scale / g.denominator()));
            total += w;
            settings_.push_back(x);
            cumulative_.push_back(total);
        }
        parties_ = spec.party_count();
    }

    auto operator()(TrialStream &rng) const -> const SettingVector & {
        const auto r = rng.below(cumulative_.back());
        const auto it =
            std::upper_bound(cumulative_.begin(), cumulative_.end(), r);
        return settings_[static_cast<std::size_t>(it - cumulative_.begin())];
    }

    [[nodiscard]] auto party_count() const noexcept -> std::size_t {
        return parties_;
    }

  private:
    std::vector<SettingVector> settings_;
    std::vector<std::uint64_t> cumulative_;
    std::size_t parties_ = 0;
};

struct RefereeInputs {
    SettingVector x;
    std::vector<int> y;
};

/// x from the referee distribution, then one uniform sign per party.
inline auto sample_inputs(const InputSampler &sampler, TrialStream &rng)
    -> RefereeInputs {
    RefereeInputs in{sampler(rng), {}};
    in.y.resize(sampler.party_count());
    for (auto &s : in.y) {
        s = rng.sign();
    }
    return in;
}

inline auto sample_inputs(const InequalitySpec &spec, TrialStream &rng)
    -> RefereeInputs {
    return sample_inputs(InputSampler(spec), rng);
}

/**
 * Joint outcome probabilities of the active parties for setting x.
 * Outcome index bit (k_max - k) set means active party k saw -1.
 */
struct OutcomeDistribution {
    std::vector<std::size_t> active;
    std::vector<double> probabilities;

    [[nodiscard]] auto outcome(std::size_t index, std::size_t k) const
        -> int {
        return ((index >> (active.size() - 1 - k)) & 1U) != 0 ? -1 : 1;
    }

    /// sum_o p(o) prod_k o_k.
    [[nodiscard]] auto correlation() const -> double {
        double total = 0.0;
        for (std::size_t i = 0; i < probabilities.size(); ++i) {
            int parity = 1;
            for (std::size_t k = 0; k < active.size(); ++k) {
                parity *= outcome(i, k);
            }
            total += parity * probabilities[i];
        }
        return total;
    }
};

inline constexpr double probability_clamp_tolerance = 1e-12;
inline constexpr double probability_sum_tolerance = 1e-10;

inline auto measurement_distribution(const DensityState &state,
                                     const SettingVector &x,
                                     const ObservableAssignment &assign)
    -> OutcomeDistribution {
    if (x.size() != state.qubits() || assign.party_count() != x.size()) {
        throw UsageError("measurement_distribution: party count mismatch");
    }
    OutcomeDistribution dist;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] != 0) {
            dist.active.push_back(i);
        }
    }
    const std::size_t outcomes = std::size_t{1} << dist.active.size();
    const ComplexMatrix id = pauli(PauliLabel::I);
    std::vector<ComplexMatrix> plus(x.size(), id);
    std::vector<ComplexMatrix> minus(x.size(), id);
    for (std::size_t i : dist.active) {
        const auto o = assign.local(i, x[i]);
        plus[i] = 0.5 * (id + o);
        minus[i] = 0.5 * (id - o);
    }
    dist.probabilities.resize(outcomes);
    std::vector<ComplexMatrix> factors(x.size(), id);
    double sum = 0.0;
    for (std::size_t index = 0; index < outcomes; ++index) {
        for (std::size_t k = 0; k < dist.active.size(); ++k) {
            const auto party = dist.active[k];
            factors[party] = dist.outcome(index, k) > 0 ? plus[party]
                                                        : minus[party];
        }
        double p = expectation(state, kron(factors));
        if (p < -probability_clamp_tolerance) {
            throw NumericalError("negative outcome probability " +
                                 std::to_string(p));
        }
        p = std::max(p, 0.0);
        dist.probabilities[index] = p;
        sum += p;
    }
    if (std::abs(sum - 1.0) > probability_sum_tolerance) {
        throw NumericalError("outcome probabilities sum to " +
                             std::to_string(sum));
    }
    return dist;
}

/**
 * Target for the sum-form game: f''(x, y) = sum_i (prod_j y_j) y_i
 * [x_i = 0] f_i(x), where f_i must not depend on x_i.
 */
class SumFormTarget {
  public:
    using Block = std::function<int(const SettingVector &)>;

    explicit SumFormTarget(std::vector<Block> blocks)
        : blocks_(std::move(blocks)) {}

    /// f_i(x) = Sign(g(x with x_i set to 0)): the block of terms in which
    /// party i is idle.
    static auto from_spec(const InequalitySpec &spec) -> SumFormTarget {
        std::vector<Block> blocks;
        for (std::size_t i = 0; i < spec.party_count(); ++i) {
            blocks.emplace_back([spec, i](const SettingVector &x) {
                SettingVector z = x;
                z[i] = 0;
                return sign_function(spec, z);
            });
        }
        return SumFormTarget(std::move(blocks));
    }

    /// Checks f_i is defined and constant in x_i at every term of spec
    /// where party i is idle. Throws ValidationError otherwise.
    void validate(const InequalitySpec &spec) const {
        if (blocks_.size() != spec.party_count()) {
            throw ValidationError("sum-form target needs one block per party");
        }
        const auto &l = spec.settings_per_party();
        for (const auto &[x, g] : spec.terms()) {
            for (std::size_t i = 0; i < x.size(); ++i) {
                if (x[i] != 0) {
                    continue;
                }
                SettingVector probe = x;
                const int reference = blocks_[i](probe);
                for (int v = 1; v <= l[i]; ++v) {
                    probe[i] = v;
                    if (blocks_[i](probe) != reference) {
                        throw ValidationError(
                            "sum-form block " + party_name(i) +
                            " depends on its own setting at " + x.to_string());
                    }
                }
            }
        }
    }

    [[nodiscard]] auto operator()(const SettingVector &x,
                                  std::span<const int> y) const -> int {
        int all = 1;
        for (int s : y) {
            all *= s;
        }
        int total = 0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (x[i] == 0) {
                total += all * y[i] * blocks_[i](x);
            }
        }
        if (total != 1 && total != -1) {
            throw DomainError("sum-form target is not a sign at " +
                              x.to_string());
        }
        return total;
    }

  private:
    std::vector<Block> blocks_;
};

/// Shared, read-only context of the quantum game.
class QuantumGame {
  public:
    QuantumGame(InequalitySpec spec, ObservableAssignment assign)
        : spec_(std::move(spec)), assign_(std::move(assign)),
          bell_(build_bell_operator(spec_, assign_)),
          state_(top_eigenspace_mixture(bell_)),
          sumform_(SumFormTarget::from_spec(spec_)) {
        for (const auto &[x, g] : spec_.terms()) {
            auto dist = measurement_distribution(state_, x, assign_);
            std::vector<double> cumulative(dist.probabilities.size());
            std::partial_sum(dist.probabilities.begin(),
                             dist.probabilities.end(), cumulative.begin());
            tables_.emplace(x, Table{std::move(dist), std::move(cumulative)});
        }
    }

    [[nodiscard]] auto spec() const noexcept -> const InequalitySpec & {
        return spec_;
    }
    [[nodiscard]] auto assignment() const noexcept
        -> const ObservableAssignment & {
        return assign_;
    }
    [[nodiscard]] auto bell_operator() const noexcept -> const BellOperator & {
        return bell_;
    }
    [[nodiscard]] auto state() const noexcept -> const DensityState & {
        return state_;
    }
    [[nodiscard]] auto sumform() const noexcept -> const SumFormTarget & {
        return sumform_;
    }
    void set_sumform(SumFormTarget target) {
        target.validate(spec_);
        sumform_ = std::move(target);
    }

    [[nodiscard]] auto distribution(const SettingVector &x) const
        -> OutcomeDistribution {
        const auto it = tables_.find(x);
        if (it != tables_.end()) {
            return it->second.dist;
        }
        return measurement_distribution(state_, x, assign_);
    }

    /// Per-party outcomes (+1 for idle parties) sampled by inverting the
    /// cumulative outcome table with one uniform draw.
    auto measure(const SettingVector &x, TrialStream &rng) const
        -> std::vector<int> {
        const auto it = tables_.find(x);
        if (it == tables_.end()) {
            auto dist = measurement_distribution(state_, x, assign_);
            std::vector<double> cumulative(dist.probabilities.size());
            std::partial_sum(dist.probabilities.begin(),
                             dist.probabilities.end(), cumulative.begin());
            return draw(Table{std::move(dist), std::move(cumulative)}, x,
                        rng);
        }
        return draw(it->second, x, rng);
    }

  private:
    struct Table {
        OutcomeDistribution dist;
        std::vector<double> cumulative;
    };

    static auto draw(const Table &table, const SettingVector &x,
                     TrialStream &rng) -> std::vector<int> {
        const double u = rng.uniform() * table.cumulative.back();
        auto it = std::upper_bound(table.cumulative.begin(),
                                   table.cumulative.end(), u);
        if (it == table.cumulative.end()) {
            --it;
        }
        const auto index =
            static_cast<std::size_t>(it - table.cumulative.begin());
        std::vector<int> outcomes(x.size(), 1);
        for (std::size_t k = 0; k < table.dist.active.size(); ++k) {
            outcomes[table.dist.active[k]] = table.dist.outcome(index, k);
        }
        return outcomes;
    }

    InequalitySpec spec_;
    ObservableAssignment assign_;
    BellOperator bell_;
    DensityState state_;
    SumFormTarget sumform_;
    std::map<SettingVector, Table> tables_;
};

inline auto product(std::span<const int> signs) -> int {
    int p = 1;
    for (int s : signs) {
        p *= s;
    }
    return p;
}

/**
 * Round with given measurement outcomes. Active partners send y_i o_i.
 * The idle partner sends y_i in product mode (target prod y * f(x)) and
 * +1 in sum-form mode (target f''(x, y)).
 */
inline auto quantum_round_with_outcomes(const QuantumGame &game,
                                        const SettingVector &x,
                                        std::span<const int> y,
                                        std::span<const int> outcomes,
                                        GameMode mode) -> GameRound {
    const auto &spec = game.spec();
    spec.check_range(x);
    if (mode == GameMode::Classical) {
        throw UsageError("quantum_round: classical mode requested");
    }
    if (y.size() != x.size() || outcomes.size() != x.size()) {
        throw UsageError("quantum_round: one sign per party required");
    }
    if (x.idle_count() != 1) {
        throw DomainError("quantum_round: " + x.to_string() +
                          " must have exactly one idle party");
    }
    GameRound round{x, {y.begin(), y.end()}, {}, 1, 1, false};
    round.messages.resize(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] == 0) {
            round.messages[i] = mode == GameMode::QuantumProduct ? y[i] : 1;
        } else {
            round.messages[i] = y[i] * outcomes[i];
        }
    }
    round.answer = product(round.messages);
    round.target = mode == GameMode::QuantumProduct
                       ? product(y) * sign_function(spec, x)
                       : game.sumform()(x, y);
    round.success = round.answer == round.target;
    return round;
}

inline auto quantum_round(const QuantumGame &game, const SettingVector &x,
                          std::span<const int> y, TrialStream &rng,
                          GameMode mode) -> GameRound {
    if (x.idle_count() != 1) {
        throw DomainError("quantum_round: " + x.to_string() +
                          " must have exactly one idle party");
    }
    const auto outcomes = game.measure(x, rng);
    return quantum_round_with_outcomes(game, x, y, outcomes, mode);
}

/// Partner i sends y_i s_i(x_i); target prod y * f(x).
inline auto classical_round(const InequalitySpec &spec,
                            const MessagingStrategy &strategy,
                            const SettingVector &x, std::span<const int> y)
    -> GameRound {
    strategy.check_covers(spec);
    spec.check_range(x);
    if (y.size() != x.size()) {
        throw UsageError("classical_round: one sign per party required");
    }
    GameRound round{x, {y.begin(), y.end()}, {}, 1, 1, false};
    round.messages.resize(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        round.messages[i] = y[i] * strategy(i, x[i]);
    }
    round.answer = product(round.messages);
    round.target = product(y) * sign_function(spec, x);
    round.success = round.answer == round.target;
    return round;
}

namespace detail {

/// All 2^n sign vectors, first party most significant, +1 before -1.
inline auto all_sign_vectors(std::size_t n) -> std::vector<std::vector<int>> {
    std::vector<std::vector<int>> out;
    for (std::size_t code = 0; code < (std::size_t{1} << n); ++code) {
        std::vector<int> y(n);
        for (std::size_t i = 0; i < n; ++i) {
            y[i] = ((code >> (n - 1 - i)) & 1U) != 0 ? -1 : 1;
        }
        out.push_back(std::move(y));
    }
    return out;
}

} // namespace detail

/**
 * Exact success probability of the quantum game: sum over every input x
 * (referee weights), outcome vector (measurement_distribution) and sign
 * vector y (uniform) of the round's success flag.
 */
inline auto exact_quantum_success(const QuantumGame &game, GameMode mode)
    -> double {
    const auto dist = input_distribution(game.spec());
    const auto ys = detail::all_sign_vectors(game.spec().party_count());
    double total = 0.0;
    for (const auto &[x, px] : dist) {
        const auto outcomes = game.distribution(x);
        for (std::size_t index = 0; index < outcomes.probabilities.size();
             ++index) {
            std::vector<int> o(x.size(), 1);
            for (std::size_t k = 0; k < outcomes.active.size(); ++k) {
                o[outcomes.active[k]] = outcomes.outcome(index, k);
            }
            std::size_t wins = 0;
            for (const auto &y : ys) {
                wins += quantum_round_with_outcomes(game, x, y, o, mode).success
                            ? 1
                            : 0;
            }
            total += to_double(px) * outcomes.probabilities[index] *
                     static_cast<double>(wins) /
                     static_cast<double>(ys.size());
        }
    }
    return total;
}

/// Exact classical success rate over every (x, y), referee-weighted.
inline auto exact_classical_success(const InequalitySpec &spec,
                                    const MessagingStrategy &strategy)
    -> Rational {
    const auto ys = detail::all_sign_vectors(spec.party_count());
    Rational total{0};
    for (const auto &[x, px] : input_distribution(spec)) {
        std::int64_t wins = 0;
        for (const auto &y : ys) {
            wins += classical_round(spec, strategy, x, y).success ? 1 : 0;
        }
        total += px * Rational{wins, static_cast<std::int64_t>(ys.size())};
    }
    return total;
}

struct MonteCarloParams {
    std::uint64_t trials = 1'000'000;
    std::uint64_t seed = 42;
    std::optional<MessagingStrategy> strategy;
    std::optional<ObservableAssignment> assignment;
    unsigned threads = 1;
    bool record_rounds = false;
};

/**
 * Runs `trials` independent rounds. Trial t draws only from
 * TrialStream(seed, t); workers take contiguous trial ranges, so the
 * report is identical for any thread count.
 */
inline auto run_monte_carlo(const InequalitySpec &spec, GameMode mode,
                            const MonteCarloParams &params)
    -> SimulationReport {
    if (params.trials < 1) {
        throw UsageError("trials must be at least 1");
    }
    SimulationReport report;
    report.trials = params.trials;
    report.seed = params.seed;
    report.mode = mode;

    std::optional<QuantumGame> game;
    if (mode == GameMode::Classical) {
        if (!params.strategy) {
            throw UsageError("classical mode needs a messaging strategy");
        }
        params.strategy->check_covers(spec);
        report.analytic_rate = to_double(strategy_success(spec, *params.strategy));
    } else {
        game.emplace(spec, params.assignment.value_or(
                               ObservableAssignment::pentagon_default(
                                   spec.party_count())));
        const double q =
            expectation(game->state(), game->bell_operator().matrix);
        report.analytic_rate = success_probability_quantum(spec, q);
    }

    const InputSampler sampler(spec);
    if (params.record_rounds) {
        report.rounds.resize(params.trials);
    }
    auto run_range = [&](std::uint64_t begin, std::uint64_t end) {
        std::uint64_t wins = 0;
        for (std::uint64_t t = begin; t < end; ++t) {
            TrialStream rng(params.seed, t);
            auto in = sample_inputs(sampler, rng);
            GameRound round =
                mode == GameMode::Classical
                    ? classical_round(spec, *params.strategy, in.x, in.y)
                    : quantum_round(*game, in.x, in.y, rng, mode);
            wins += round.success ? 1 : 0;
            if (params.record_rounds) {
                report.rounds[t] = std::move(round);
            }
        }
        return wins;
    };

    const auto workers = static_cast<unsigned>(std::min<std::uint64_t>(
        std::max(1U, params.threads), params.trials));
    if (workers == 1) {
        report.successes = run_range(0, params.trials);
    } else {
        std::vector<std::future<std::uint64_t>> jobs;
        const std::uint64_t chunk = params.trials / workers;
        const std::uint64_t extra = params.trials % workers;
        std::uint64_t begin = 0;
        for (unsigned w = 0; w < workers; ++w) {
            const std::uint64_t end = begin + chunk + (w < extra ? 1 : 0);
            jobs.push_back(std::async(std::launch::async, run_range, begin, end));
            begin = end;
        }
        for (auto &job : jobs) {
            report.successes += job.get();
        }
    }

    const double n = static_cast<double>(report.trials);
    report.empirical_rate = static_cast<double>(report.successes) / n;
    report.std_error = std::sqrt(
        report.empirical_rate * (1.0 - report.empirical_rate) / n);
    return report;
}

/// Rounds a double to 12 significant digits for stable text output.
inline auto round12(double v) -> double {
    if (v == 0.0 || !std::isfinite(v)) {
        return v;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return std::strtod(buf, nullptr);
}

inline auto to_json(const SimulationReport &r) -> nlohmann::ordered_json {
    nlohmann::ordered_json j;
    j["mode"] = to_string(r.mode);
    j["trials"] = r.trials;
    j["successes"] = r.successes;
    j["empirical_rate"] = round12(r.empirical_rate);
    j["std_error"] = round12(r.std_error);
    j["analytic_rate"] = round12(r.analytic_rate);
    j["seed"] = r.seed;
    return j;
}

inline auto signs_to_string(std::span<const int> s) -> std::string {
    std::string out;
    for (int v : s) {
        out.push_back(v > 0 ? '+' : '-');
    }
    return out;
}

/// Per-round CSV: trial,x,y,messages,answer,target,success.
inline void write_rounds_csv(std::ostream &out,
                             std::span<const GameRound> rounds) {
    out << "trial,x,y,messages,answer,target,success\n";
    for (std::size_t t = 0; t < rounds.size(); ++t) {
        const auto &r = rounds[t];
        out << t << ',' << r.x.to_string() << ',' << signs_to_string(r.y)
            << ',' << signs_to_string(r.messages) << ','
            << (r.answer > 0 ? "+1" : "-1") << ','
            << (r.target > 0 ? "+1" : "-1") << ',' << (r.success ? 1 : 0)
            << '\n';
    }
}

} // namespace ccr
