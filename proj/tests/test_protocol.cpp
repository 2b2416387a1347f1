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

#include <cmath>
#include <map>
#include <sstream>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include <ccr/classical.hpp>
#include <ccr/protocol.hpp>

using namespace ccr;
using Catch::Matchers::WithinAbs;

namespace {

const auto &pentagon() {
    static const auto spec = build_pentagon_inequality();
    return spec;
}

const auto &game() {
    static const QuantumGame g(pentagon(), ObservableAssignment::pentagon_default());
    return g;
}

auto outcome_vectors(const OutcomeDistribution &d, std::size_t parties)
    -> std::vector<std::vector<int>> {
    std::vector<std::vector<int>> out;
    for (std::size_t i = 0; i < d.probabilities.size(); ++i) {
        std::vector<int> o(parties, 1);
        for (std::size_t k = 0; k < d.active.size(); ++k) {
            o[d.active[k]] = d.outcome(i, k);
        }
        out.push_back(std::move(o));
    }
    return out;
}

auto all_y() -> std::vector<std::vector<int>> {
    std::vector<std::vector<int>> ys;
    for (int code = 0; code < 32; ++code) {
        std::vector<int> y(5);
        for (int i = 0; i < 5; ++i) {
            y[static_cast<std::size_t>(i)] = ((code >> i) & 1) != 0 ? -1 : 1;
        }
        ys.push_back(y);
    }
    return ys;
}

} // namespace

TEST_CASE("Referee input sampling", "[protocol]") {
    const InputSampler sampler(pentagon());
    const auto dist = input_distribution(pentagon());

    SECTION("term frequencies match the referee distribution") {
        constexpr std::uint64_t n = 120000;
        std::map<SettingVector, std::uint64_t> counts;
        for (std::uint64_t t = 0; t < n; ++t) {
            TrialStream rng(11, t);
            const auto in = sample_inputs(sampler, rng);
            REQUIRE(coefficient(pentagon(), in.x) != Rational(0));
            ++counts[in.x];
        }
        for (const auto &[x, p] : dist) {
            const double pd = to_double(p);
            const double sigma = std::sqrt(pd * (1.0 - pd) / n);
            const double freq = static_cast<double>(counts[x]) / n;
            INFO("x = " << x.to_string());
            CHECK(std::abs(freq - pd) < 5.0 * sigma);
        }
    }

    SECTION("y is unbiased") {
        constexpr std::uint64_t n = 1'000'000;
        std::int64_t sum = 0;
        for (std::uint64_t t = 0; t < n; ++t) {
            TrialStream rng(12, t);
            sum += sample_inputs(sampler, rng).y[0];
        }
        const double mean = static_cast<double>(sum) / n;
        CHECK(std::abs(mean) < 5.0 / std::sqrt(static_cast<double>(n)));
    }

    SECTION("convenience overload") {
        TrialStream rng(1, 1);
        const auto in = sample_inputs(pentagon(), rng);
        CHECK(in.y.size() == 5);
        CHECK(in.x.idle_count() == 1);
    }
}

TEST_CASE("Measurement distribution", "[protocol]") {
    const auto assign = ObservableAssignment::pentagon_default();

    SECTION("maximally mixed state gives uniform outcomes") {
        const auto d = measurement_distribution(DensityState::maximally_mixed(5),
                                                {1, 2, 1, 2, 0}, assign);
        REQUIRE(d.probabilities.size() == 16);
        for (double p : d.probabilities) {
            CHECK_THAT(p, WithinAbs(1.0 / 16.0, 1e-15));
        }
    }

    SECTION("moment identity against the Pauli correlation") {
        const auto d =
            measurement_distribution(game().state(), {1, 1, 1, 1, 0}, assign);
        double total = 0.0;
        for (double p : d.probabilities) {
            CHECK(p >= 0.0);
            total += p;
        }
        CHECK_THAT(total, WithinAbs(1.0, 1e-10));
        const auto labels = parse_pauli_string("XXXXI");
        CHECK_THAT(d.correlation(),
                   WithinAbs(pauli_correlation(game().state(), labels), 1e-12));
    }

    SECTION("every term's correlation reproduces the Bell expectation") {
        double q = 0.0;
        for (const auto &[x, g] : pentagon().terms()) {
            q += to_double(g) * game().distribution(x).correlation();
        }
        CHECK_THAT(q, WithinAbs(quantum_value(pentagon(), assign).value, 1e-9));
    }

    SECTION("XXZZI cross-check") {
        const auto d =
            measurement_distribution(game().state(), {1, 1, 2, 2, 0}, assign);
        const auto labels = parse_pauli_string("XXZZI");
        CHECK_THAT(d.correlation(),
                   WithinAbs(pauli_correlation(game().state(), labels), 1e-12));
    }

    SECTION("single qubit |0> measured along Z") {
        const std::vector<int> zero{0};
        const auto d = measurement_distribution(
            DensityState::basis(zero), {1}, ObservableAssignment::uniform(1, {bloch_z}));
        CHECK_THAT(d.probabilities[0], WithinAbs(1.0, 1e-15));
        CHECK_THAT(d.probabilities[1], WithinAbs(0.0, 1e-15));
    }

    SECTION("party count mismatch") {
        CHECK_THROWS_AS(measurement_distribution(DensityState::maximally_mixed(4),
                                                 {1, 1, 1, 1, 0}, assign),
                        UsageError);
    }
}

TEST_CASE("Quantum rounds", "[protocol]") {
    const auto ys = all_y();

    SECTION("success iff the outcome product equals f(x), for every y") {
        for (const auto &[x, g] : pentagon().terms()) {
            const int f = sign_function(pentagon(), x);
            for (const auto &o : outcome_vectors(game().distribution(x), 5)) {
                int prod = 1;
                for (std::size_t i = 0; i < 5; ++i) {
                    prod *= x[i] == 0 ? 1 : o[i];
                }
                for (auto mode : {GameMode::QuantumProduct, GameMode::QuantumSumForm}) {
                    for (const auto &y : ys) {
                        const auto r = quantum_round_with_outcomes(game(), x, y, o, mode);
                        REQUIRE(r.success == (prod == f));
                        REQUIRE(r.success == (r.answer == r.target));
                    }
                }
            }
        }
    }

    SECTION("message rules") {
        const SettingVector x{1, 1, 1, 1, 0};
        const std::vector<int> y{1, -1, 1, -1, -1};
        const std::vector<int> o{-1, 1, 1, -1, 1};
        const auto prod =
            quantum_round_with_outcomes(game(), x, y, o, GameMode::QuantumProduct);
        CHECK(prod.messages == std::vector<int>{-1, -1, 1, 1, -1});
        const auto sum =
            quantum_round_with_outcomes(game(), x, y, o, GameMode::QuantumSumForm);
        CHECK(sum.messages == std::vector<int>{-1, -1, 1, 1, 1});
    }

    SECTION("domain errors") {
        TrialStream rng(0, 0);
        const std::vector<int> y(5, 1);
        CHECK_THROWS_AS(quantum_round(game(), {1, 1, 1, 1, 1}, y, rng,
                                      GameMode::QuantumProduct),
                        DomainError);
        CHECK_THROWS_AS(quantum_round(game(), {0, 1, 1, 1, 0}, y, rng,
                                      GameMode::QuantumProduct),
                        DomainError);
    }
}

TEST_CASE("Classical rounds", "[protocol]") {
    const auto best = best_strategy(pentagon());
    CHECK(exact_classical_success(pentagon(), best.strategy) == Rational(17, 30));
    CHECK(exact_classical_success(pentagon(), decode_strategy("+++,+++,+++,+++,-+-")) ==
          Rational(17, 30));

    SECTION("all-plus strategy succeeds iff f(x) = +1") {
        const auto plus = MessagingStrategy(SignTables::constant(pentagon().settings_per_party()));
        for (const auto &[x, g] : pentagon().terms()) {
            for (const auto &y : all_y()) {
                const auto r = classical_round(pentagon(), plus, x, y);
                REQUIRE(r.success == (sign_function(pentagon(), x) == 1));
            }
        }
    }

    SECTION("y-independence for random strategies") {
        for (std::uint32_t code : {0U, 77U, 1234U, 32767U, 20000U}) {
            std::vector<std::vector<int>> t(5, std::vector<int>(3));
            int bit = 14;
            for (auto &row : t) {
                for (auto &v : row) {
                    v = ((code >> bit--) & 1U) != 0 ? -1 : 1;
                }
            }
            const MessagingStrategy s(t);
            for (const auto &[x, g] : pentagon().terms()) {
                const auto ref = classical_round(pentagon(), s, x, all_y().front()).success;
                for (const auto &y : all_y()) {
                    REQUIRE(classical_round(pentagon(), s, x, y).success == ref);
                }
            }
        }
    }
}

TEST_CASE("Exact protocol oracle", "[protocol]") {
    const double q = expectation(game().state(), game().bell_operator().matrix);
    const double formula = success_probability_quantum(pentagon(), q);
    CHECK_THAT(exact_quantum_success(game(), GameMode::QuantumProduct),
               WithinAbs(formula, 1e-9));
    CHECK_THAT(exact_quantum_success(game(), GameMode::QuantumSumForm),
               WithinAbs(formula, 1e-9));
    CHECK_THAT(formula, WithinAbs(0.62057, 1e-5));
}

TEST_CASE("Outcome sampling follows the distribution", "[protocol]") {
    const SettingVector x{1, 2, 2, 1, 0};
    const auto d = game().distribution(x);
    constexpr std::uint64_t n = 100000;
    std::vector<std::uint64_t> counts(d.probabilities.size(), 0);
    const auto vectors = outcome_vectors(d, 5);
    for (std::uint64_t t = 0; t < n; ++t) {
        TrialStream rng(21, t);
        const auto o = game().measure(x, rng);
        const auto it = std::find(vectors.begin(), vectors.end(), o);
        REQUIRE(it != vectors.end());
        ++counts[static_cast<std::size_t>(it - vectors.begin())];
    }
    double chi2 = 0.0;
    int dof = -1;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        const double expected = d.probabilities[i] * n;
        if (d.probabilities[i] < 1e-12) {
            CHECK(counts[i] == 0);
            continue;
        }
        chi2 += (counts[i] - expected) * (counts[i] - expected) / expected;
        ++dof;
    }
    CHECK(chi2 < dof + 5.0 * std::sqrt(2.0 * dof));
}

TEST_CASE("Sum-form target", "[protocol]") {
    const auto target = SumFormTarget::from_spec(pentagon());
    CHECK_NOTHROW(target.validate(pentagon()));

    SECTION("one idle party: prod of active y times the block sign") {
        const SettingVector x{1, 2, 1, 1, 0};
        const std::vector<int> y{1, -1, -1, -1, 1};
        CHECK(target(x, y) == -1 * sign_function(pentagon(), x));
    }

    SECTION("blocks that read their own setting are rejected") {
        std::vector<SumFormTarget::Block> blocks;
        for (std::size_t i = 0; i < 5; ++i) {
            blocks.emplace_back([i](const SettingVector &x) {
                return x[i] == 2 ? -1 : 1;
            });
        }
        const SumFormTarget bad(blocks);
        CHECK_THROWS_AS(bad.validate(pentagon()), ValidationError);
        QuantumGame g(pentagon(), ObservableAssignment::pentagon_default());
        CHECK_THROWS_AS(g.set_sumform(bad), ValidationError);
    }

    SECTION("user-supplied x_i-independent blocks are accepted") {
        std::vector<SumFormTarget::Block> blocks;
        for (std::size_t i = 0; i < 5; ++i) {
            blocks.emplace_back([i](const SettingVector &x) {
                return x[(i + 1) % 5] == 2 ? -1 : 1;
            });
        }
        QuantumGame g(pentagon(), ObservableAssignment::pentagon_default());
        CHECK_NOTHROW(g.set_sumform(SumFormTarget(blocks)));
    }
}

TEST_CASE("Monte Carlo", "[protocol][slow]") {
    MonteCarloParams params;
    params.trials = 1'000'000;
    params.seed = 42;

    SECTION("quantum product mode") {
        const auto r = run_monte_carlo(pentagon(), GameMode::QuantumProduct, params);
        CHECK_THAT(r.analytic_rate, WithinAbs(0.62057, 1e-5));
        CHECK(std::abs(r.empirical_rate - r.analytic_rate) < 3.0 * r.std_error);
        CHECK(r.empirical_rate == static_cast<double>(r.successes) / r.trials);
        CHECK(r.std_error ==
              std::sqrt(r.empirical_rate * (1 - r.empirical_rate) / r.trials));
    }

    SECTION("quantum sum-form mode") {
        const auto r = run_monte_carlo(pentagon(), GameMode::QuantumSumForm, params);
        CHECK(std::abs(r.empirical_rate - r.analytic_rate) < 3.0 * r.std_error);
    }

    SECTION("classical mode with the optimal strategy") {
        params.strategy = best_strategy(pentagon()).strategy;
        const auto r = run_monte_carlo(pentagon(), GameMode::Classical, params);
        CHECK(r.analytic_rate == to_double(Rational(17, 30)));
        CHECK(std::abs(r.empirical_rate - 17.0 / 30.0) < 3.0 * r.std_error);
    }
}

TEST_CASE("Monte Carlo reproducibility", "[protocol]") {
    MonteCarloParams params;
    params.trials = 20000;
    params.seed = 9;
    params.record_rounds = true;
    const auto a = run_monte_carlo(pentagon(), GameMode::QuantumProduct, params);
    params.threads = 4;
    const auto b = run_monte_carlo(pentagon(), GameMode::QuantumProduct, params);
    CHECK(a.successes == b.successes);
    CHECK(to_json(a).dump() == to_json(b).dump());
    REQUIRE(a.rounds.size() == b.rounds.size());
    for (std::size_t t = 0; t < a.rounds.size(); ++t) {
        REQUIRE(a.rounds[t].x == b.rounds[t].x);
        REQUIRE(a.rounds[t].y == b.rounds[t].y);
        REQUIRE(a.rounds[t].messages == b.rounds[t].messages);
        REQUIRE(a.rounds[t].success == b.rounds[t].success);
    }

    SECTION("a prefix run reproduces the first rounds") {
        params.trials = 100;
        params.threads = 3;
        const auto c = run_monte_carlo(pentagon(), GameMode::QuantumProduct, params);
        for (std::size_t t = 0; t < 100; ++t) {
            REQUIRE(c.rounds[t].messages == a.rounds[t].messages);
        }
    }

    SECTION("single trial") {
        params.trials = 1;
        params.record_rounds = false;
        const auto r = run_monte_carlo(pentagon(), GameMode::QuantumProduct, params);
        CHECK(r.successes <= 1);
        CHECK(r.trials == 1);
    }
}

TEST_CASE("Monte Carlo errors and output", "[protocol]") {
    MonteCarloParams params;
    params.trials = 0;
    CHECK_THROWS_AS(run_monte_carlo(pentagon(), GameMode::QuantumProduct, params),
                    UsageError);
    params.trials = 10;
    CHECK_THROWS_AS(run_monte_carlo(pentagon(), GameMode::Classical, params),
                    UsageError);
    CHECK_THROWS_AS(parse_game_mode("quantum"), UsageError);
    CHECK(parse_game_mode("quantum-sumform") == GameMode::QuantumSumForm);

    SECTION("CSV rows") {
        params.record_rounds = true;
        params.trials = 3;
        const auto r = run_monte_carlo(pentagon(), GameMode::QuantumProduct, params);
        std::ostringstream out;
        write_rounds_csv(out, r.rounds);
        std::istringstream in(out.str());
        std::string line;
        std::getline(in, line);
        CHECK(line == "trial,x,y,messages,answer,target,success");
        int rows = 0;
        while (std::getline(in, line)) {
            ++rows;
            CHECK(std::count(line.begin(), line.end(), ',') == 6);
        }
        CHECK(rows == 3);
    }

    SECTION("JSON field set") {
        const auto r = run_monte_carlo(pentagon(), GameMode::QuantumProduct, params);
        const auto j = to_json(r);
        for (const char *key : {"mode", "trials", "successes", "empirical_rate",
                                "std_error", "analytic_rate", "seed"}) {
            CHECK(j.contains(key));
        }
    }
}
