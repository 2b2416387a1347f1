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

// ccr: command line front end.
//
//   ccr <verify|bound|quantum|strategies|simulate|export> [options]
//
// Exit codes: 0 success, 1 failed check or runtime error, 2 usage error.

#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include <ccr/ccr.hpp>

#ifndef CCR_DEFAULT_INEQ
#define CCR_DEFAULT_INEQ "data/pentagon.json"
#endif

namespace {

using namespace ccr;
using Json = nlohmann::ordered_json;

enum class Format { Json, Csv, Text };

struct RunConfig {
    std::string command;
    std::string ineq = CCR_DEFAULT_INEQ;
    bool ineq_given = false;
    std::uint64_t trials = 1'000'000;
    std::string seed = "42";
    std::string mode = "quantum-product";
    std::string strategy;
    std::string assign = "x,z";
    std::string format; // empty: json, except the verify table
    std::string out;
    std::optional<unsigned> threads;
    std::optional<std::uint64_t> cap;
};

constexpr int exit_ok = 0;
constexpr int exit_fail = 1;
constexpr int exit_usage = 2;

auto parse_seed(const std::string &text) -> std::uint64_t {
    std::uint64_t value = 0;
    const auto *end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (text.empty() || ec != std::errc{} || ptr != end) {
        throw UsageError("seed '" + text + "' is not an unsigned 64-bit "
                         "integer");
    }
    return value;
}

auto parse_format(const std::string &text, Format fallback = Format::Json)
    -> Format {
    if (text.empty()) {
        return fallback;
    }
    if (text == "json") {
        return Format::Json;
    }
    if (text == "csv") {
        return Format::Csv;
    }
    if (text == "text") {
        return Format::Text;
    }
    throw UsageError("unknown format '" + text + "'");
}

auto thread_count(const RunConfig &cfg) -> unsigned {
    if (cfg.threads) {
        return std::max(1U, *cfg.threads);
    }
    if (const char *env = std::getenv("CCR_THREADS")) {
        unsigned value = 0;
        const std::string text(env);
        const auto [ptr, ec] =
            std::from_chars(text.data(), text.data() + text.size(), value);
        if (ec != std::errc{} || ptr != text.data() + text.size() ||
            value == 0) {
            throw UsageError("CCR_THREADS must be a positive integer");
        }
        return value;
    }
    return std::max(1U, std::thread::hardware_concurrency());
}

auto search_options(const RunConfig &cfg) -> SearchOptions {
    SearchOptions opt;
    opt.threads = thread_count(cfg);
    if (cfg.cap) {
        opt.cap = *cfg.cap;
    }
    return opt;
}

auto load(const RunConfig &cfg) -> InequalitySpec {
    return load_spec(cfg.ineq);
}

auto num(double v) -> double { return round12(v); }

/// Prints key/value records in the requested format.
void emit(const Json &j, Format format, std::ostream &out) {
    switch (format) {
    case Format::Json:
        out << j.dump(2) << '\n';
        break;
    case Format::Csv:
        out << "key,value\n";
        for (const auto &[k, v] : j.items()) {
            out << k << ',' << (v.is_string() ? v.get<std::string>() : v.dump())
                << '\n';
        }
        break;
    case Format::Text:
        for (const auto &[k, v] : j.items()) {
            out << k << ": "
                << (v.is_string() ? v.get<std::string>() : v.dump()) << '\n';
        }
        break;
    }
}

auto cmd_bound(const RunConfig &cfg) -> int {
    const auto spec = load(cfg);
    const auto bound = lhv_bound(spec, search_options(cfg));
    Json j;
    j["lhv_bound"] = to_string(bound.value);
    j["witness"] = encode(bound.witness);
    if (spec.claimed_bound()) {
        j["claimed_bound"] = to_string(*spec.claimed_bound());
        j["claim_holds"] = *spec.claimed_bound() == bound.value;
    }
    j["abs_sum"] = to_string(abs_sum(spec));
    emit(j, parse_format(cfg.format), std::cout);
    return exit_ok;
}

auto cmd_quantum(const RunConfig &cfg) -> int {
    const auto spec = load(cfg);
    const auto assign = ObservableAssignment::parse(cfg.assign, spec.party_count());
    const auto op = build_bell_operator(spec, assign);
    const auto q = quantum_value(op);
    const auto state = top_eigenspace_mixture(op);
    const auto audit = odd_correlation_audit(state);
    Json j;
    j["quantum_value"] = num(q.value);
    j["multiplicity"] = q.multiplicity;
    if (spec.terms() == build_pentagon_inequality().terms()) {
        j["closed_form"] = num(closed_form_quantum_value());
        j["closed_form_principal_branch"] = num(closed_form_principal_branch());
    }
    j["abs_sum"] = to_string(abs_sum(spec));
    j["success_probability"] = num(success_probability_quantum(spec, q.value));
    j["odd_correlation_max"] = num(audit.max_abs);
    j["odd_correlation_worst"] =
        to_string(std::span<const PauliLabel>(audit.worst));
    j["purity"] = num(state.purity());
    emit(j, parse_format(cfg.format), std::cout);
    return exit_ok;
}

auto cmd_strategies(const RunConfig &cfg) -> int {
    const auto spec = load(cfg);
    const auto format = parse_format(cfg.format);
    const auto best = best_strategy(spec, search_options(cfg));
    Json j;
    j["best_success"] = to_string(best.success);
    j["best_strategy"] = encode(best.strategy);
    j["optimal_count"] = best.optimal_count;
    if (!cfg.strategy.empty()) {
        const auto s = decode_strategy(cfg.strategy);
        j["strategy"] = encode(s);
        j["strategy_success"] = to_string(strategy_success(spec, s));
    }
    const auto &l = spec.settings_per_party();
    const bool homogeneous =
        std::adjacent_find(l.begin(), l.end(), std::not_equal_to<>()) ==
        l.end();
    if (homogeneous && format == Format::Csv) {
        emit(j, format, std::cout);
        std::cout << "\nsymmetric_table,success\n";
        for (const auto &e : symmetric_strategy_report(spec)) {
            std::cout << signs_to_string(e.table) << ',' << to_string(e.success)
                      << '\n';
        }
        return exit_ok;
    }
    if (homogeneous) {
        Json sym = Json::array();
        for (const auto &e : symmetric_strategy_report(spec)) {
            sym.push_back({{"table", signs_to_string(e.table)},
                           {"success", to_string(e.success)}});
        }
        if (format == Format::Json) {
            j["symmetric"] = sym;
        } else {
            std::string line;
            for (const auto &e : sym) {
                line += e["table"].get<std::string>() + "=" +
                        e["success"].get<std::string>() + " ";
            }
            line.pop_back();
            j["symmetric"] = line;
        }
    }
    emit(j, format, std::cout);
    return exit_ok;
}

auto cmd_simulate(const RunConfig &cfg) -> int {
    const auto spec = load(cfg);
    const auto format = parse_format(cfg.format);
    const auto mode = parse_game_mode(cfg.mode);
    MonteCarloParams params;
    params.trials = cfg.trials;
    params.seed = parse_seed(cfg.seed);
    params.threads = thread_count(cfg);
    params.assignment =
        ObservableAssignment::parse(cfg.assign, spec.party_count());
    params.record_rounds = format == Format::Csv;
    if (mode != GameMode::Classical && !cfg.strategy.empty()) {
        throw UsageError("--strategy applies to classical mode only");
    }
    if (mode == GameMode::Classical) {
        params.strategy = cfg.strategy.empty()
                              ? best_strategy(spec, search_options(cfg)).strategy
                              : decode_strategy(cfg.strategy);
    }
    const auto report = run_monte_carlo(spec, mode, params);
    if (format == Format::Csv) {
        write_rounds_csv(std::cout, report.rounds);
        return exit_ok;
    }
    Json j = to_json(report);
    if (params.strategy) {
        j["strategy"] = encode(*params.strategy);
    }
    emit(j, format, std::cout);
    return exit_ok;
}

auto cmd_export(const RunConfig &cfg) -> int {
    const auto spec = cfg.ineq_given ? load(cfg) : build_pentagon_inequality();
    if (cfg.out.empty()) {
        std::cout << to_json_text(spec);
    } else {
        save_spec(spec, cfg.out);
    }
    return exit_ok;
}

auto cmd_verify(const RunConfig &cfg) -> int {
    const auto spec = load(cfg);
    VerifyOptions opt;
    opt.trials = cfg.trials;
    opt.seed = parse_seed(cfg.seed);
    opt.threads = thread_count(cfg);
    opt.search = search_options(cfg);
    const auto checks = run_verification(spec, opt);
    bool all = true;
    const auto format = parse_format(cfg.format, Format::Text);
    if (format == Format::Json) {
        Json arr = Json::array();
        for (const auto &c : checks) {
            arr.push_back({{"id", c.id},
                           {"name", c.name},
                           {"passed", c.passed},
                           {"detail", c.detail}});
            all = all && c.passed;
        }
        std::cout << Json{{"checks", arr}, {"passed", all}}.dump(2) << '\n';
    } else if (format == Format::Csv) {
        std::cout << "id,result,name\n";
        for (const auto &c : checks) {
            std::cout << c.id << ',' << (c.passed ? "PASS" : "FAIL") << ','
                      << c.name << '\n';
            all = all && c.passed;
        }
    } else {
        for (const auto &c : checks) {
            std::cout << (c.passed ? "[PASS] " : "[FAIL] ") << c.id << "  "
                      << c.name << "  --  " << c.detail << '\n';
            all = all && c.passed;
        }
        std::cout << (all ? "all checks passed" : "some checks FAILED") << '\n';
    }
    return all ? exit_ok : exit_fail;
}

void add_common_options(CLI::App *sub, RunConfig &cfg) {
    sub->add_option_function<std::string>(
           "--ineq",
           [&cfg](const std::string &p) {
               cfg.ineq = p;
               cfg.ineq_given = true;
           },
           "Inequality file (default: bundled pentagon)");
    sub->add_option("--trials", cfg.trials, "Monte Carlo trials")
        ->check(CLI::Range(std::uint64_t{1},
                           std::numeric_limits<std::uint64_t>::max()));
    sub->add_option("--seed", cfg.seed, "Unsigned 64-bit seed");
    sub->add_option("--mode", cfg.mode, "Game mode")
        ->check(CLI::IsMember(
            {"quantum-product", "quantum-sumform", "classical"}));
    sub->add_option("--strategy", cfg.strategy,
                    "Sign tables, e.g. +++,+++,+++,+++,-+-");
    sub->add_option("--assign", cfg.assign,
                    "Observables for settings 1,2,...: x,z or z,x");
    sub->add_option("--format", cfg.format, "Output format")
        ->check(CLI::IsMember({"json", "csv", "text"}));
    sub->add_option("--threads", cfg.threads, "Worker threads")
        ->check(CLI::PositiveNumber);
    sub->add_option("--cap", cfg.cap, "Enumeration cap override")
        ->check(CLI::PositiveNumber);
}

} // namespace

auto main(int argc, char **argv) -> int {
    CLI::App app{"Communication complexity reduction with a five-party "
                 "Bell inequality"};
    app.require_subcommand(1);
    RunConfig cfg;

    struct Command {
        const char *name;
        const char *help;
        int (*run)(const RunConfig &);
    };
    const Command commands[] = {
        {"verify", "Run the full verification pipeline", cmd_verify},
        {"bound", "Exhaustive local hidden variable bound", cmd_bound},
        {"quantum", "Quantum value, degeneracy and correlation audit",
         cmd_quantum},
        {"strategies", "Best classical messaging strategy", cmd_strategies},
        {"simulate", "Monte Carlo simulation of the game", cmd_simulate},
        {"export", "Write an inequality file", cmd_export},
    };
    int (*selected)(const RunConfig &) = nullptr;
    for (const auto &c : commands) {
        auto *sub = app.add_subcommand(c.name, c.help);
        add_common_options(sub, cfg);
        sub->callback([&selected, &c] { selected = c.run; });
        if (std::string(c.name) == "export") {
            sub->add_option("--out", cfg.out, "Output path (default stdout)");
        }
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_usage;
    }

    try {
        return selected(cfg);
    } catch (const ParseError &e) {
        std::cerr << "ccr: " << e.what() << '\n';
        return exit_usage;
    } catch (const UsageError &e) {
        std::cerr << "ccr: " << e.what() << '\n';
        return exit_usage;
    } catch (const SizeError &e) {
        std::cerr << "ccr: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::exception &e) {
        std::cerr << "ccr: " << e.what() << '\n';
        return exit_fail;
    }
}
