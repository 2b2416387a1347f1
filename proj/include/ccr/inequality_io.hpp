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
 * Reading and writing inequality files.
 *
 * Format (JSON):
 *
 *     {
 *       "parties": 5,
 *       "settings": [2, 2, 2, 2, 2],
 *       "bound": {"num": 1, "den": 1},
 *       "terms": [
 *         {"x": [1, 1, 1, 1, 0], "num": 1, "den": 16},
 *         ...
 *       ]
 *     }
 *
 * "settings" counts the non-idle settings of each party. "bound" is
 * optional. Rationals must be reduced with a positive denominator, terms
 * must be non-zero and unique.
 */

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "errors.hpp"
#include "inequality.hpp"
#include "rational.hpp"

namespace ccr {

namespace detail {

/// Line numbers of object keys, in document order, for error reporting.
struct KeyLines {
    std::vector<std::pair<std::string, std::size_t>> keys;

    explicit KeyLines(std::string_view text) {
        std::size_t line = 1;
        for (std::size_t i = 0; i < text.size(); ++i) {
            const char c = text[i];
            if (c == '\n') {
                ++line;
            } else if (c == '"') {
                const std::size_t start_line = line;
                std::string content;
                for (++i; i < text.size() && text[i] != '"'; ++i) {
                    if (text[i] == '\\' && i + 1 < text.size()) {
                        ++i;
                    }
                    if (text[i] == '\n') {
                        ++line;
                    }
                    content.push_back(text[i]);
                }
                std::size_t j = i + 1;
                while (j < text.size() &&
                       (text[j] == ' ' || text[j] == '\t' || text[j] == '\r')) {
                    ++j;
                }
                if (j < text.size() && text[j] == ':') {
                    keys.emplace_back(std::move(content), start_line);
                }
            }
        }
    }

    /// Line of the n-th (0-based) occurrence of `key`, 0 if absent.
    [[nodiscard]] auto line_of(std::string_view key, std::size_t n = 0) const
        -> std::size_t {
        for (const auto &[k, line] : keys) {
            if (k == key) {
                if (n == 0) {
                    return line;
                }
                --n;
            }
        }
        return 0;
    }
};

inline auto line_at_offset(std::string_view text, std::size_t offset)
    -> std::size_t {
    offset = std::min(offset, text.size());
    return 1 + static_cast<std::size_t>(
                   std::count(text.begin(), text.begin() + offset, '\n'));
}

inline auto read_int(const nlohmann::json &j, std::string_view field,
                     std::size_t line) -> std::int64_t {
    if (!j.is_number_integer()) {
        throw ParseError(std::string(field) + " must be an integer", line);
    }
    return j.get<std::int64_t>();
}

inline auto read_rational(const nlohmann::json &obj, std::string_view what,
                          std::size_t line) -> Rational {
    if (!obj.is_object() || !obj.contains("num") || !obj.contains("den")) {
        throw ParseError(std::string(what) + " needs \"num\" and \"den\"",
                         line);
    }
    const auto num = read_int(obj.at("num"), "num", line);
    const auto den = read_int(obj.at("den"), "den", line);
    if (den <= 0) {
        throw ParseError(std::string(what) + " denominator must be positive",
                         line);
    }
    if (std::gcd(num, den) != 1) {
        throw ParseError(std::string(what) + " " + std::to_string(num) + "/" +
                             std::to_string(den) + " is not reduced",
                         line);
    }
    return Rational{num, den};
}

inline auto rational_json(const Rational &r) -> nlohmann::ordered_json {
    nlohmann::ordered_json j;
    j["num"] = r.numerator();
    j["den"] = r.denominator();
    return j;
}

} // namespace detail

/// Canonical text: fixed key order, one term per line.
inline auto to_json_text(const InequalitySpec &spec) -> std::string {
    std::ostringstream out;
    out << "{\n";
    out << "  \"parties\": " << spec.party_count() << ",\n";
    out << "  \"settings\": " << nlohmann::json(spec.settings_per_party()).dump()
        << ",\n";
    if (spec.claimed_bound()) {
        out << "  \"bound\": " << detail::rational_json(*spec.claimed_bound()).dump()
            << ",\n";
    }
    out << "  \"terms\": [";
    bool first = true;
    for (const auto &[x, g] : spec.terms()) {
        nlohmann::ordered_json term;
        term["x"] = x.values();
        term["num"] = g.numerator();
        term["den"] = g.denominator();
        out << (first ? "\n    " : ",\n    ") << term.dump();
        first = false;
    }
    out << (first ? "]\n" : "\n  ]\n");
    out << "}\n";
    return out.str();
}

inline auto parse_inequality(std::string_view text) -> InequalitySpec {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error &e) {
        throw ParseError(e.what(), detail::line_at_offset(text, e.byte));
    }
    const detail::KeyLines lines(text);

    if (!doc.is_object()) {
        throw ParseError("top level must be an object", 1);
    }
    for (const auto &[key, value] : doc.items()) {
        if (key != "parties" && key != "settings" && key != "bound" &&
            key != "terms") {
            throw ParseError("unknown key \"" + key + "\"",
                             lines.line_of(key));
        }
    }
    for (const char *required : {"parties", "settings", "terms"}) {
        if (!doc.contains(required)) {
            throw ParseError(std::string("missing key \"") + required + "\"",
                             1);
        }
    }

    const auto parties =
        detail::read_int(doc.at("parties"), "parties", lines.line_of("parties"));
    if (parties < 1) {
        throw ParseError("parties must be positive", lines.line_of("parties"));
    }
    const auto &settings_json = doc.at("settings");
    const auto settings_line = lines.line_of("settings");
    if (!settings_json.is_array() ||
        settings_json.size() != static_cast<std::size_t>(parties)) {
        throw ParseError("settings must list one count per party",
                         settings_line);
    }
    std::vector<int> settings;
    for (const auto &s : settings_json) {
        const auto l = detail::read_int(s, "settings entry", settings_line);
        if (l < 1 || l > 64) {
            throw ParseError("setting count must be in 1..64", settings_line);
        }
        settings.push_back(static_cast<int>(l));
    }

    std::optional<Rational> bound;
    if (doc.contains("bound")) {
        bound = detail::read_rational(doc.at("bound"), "bound",
                                      lines.line_of("bound"));
    }

    InequalitySpec spec(settings, bound);
    const auto &terms = doc.at("terms");
    if (!terms.is_array()) {
        throw ParseError("terms must be an array", lines.line_of("terms"));
    }
    for (std::size_t k = 0; k < terms.size(); ++k) {
        const auto &term = terms[k];
        const std::size_t line = lines.line_of("x", k);
        const std::string where = "terms[" + std::to_string(k) + "]";
        if (!term.is_object() || !term.contains("x")) {
            throw ParseError(where + " needs \"x\", \"num\", \"den\"", line);
        }
        const auto &xs = term.at("x");
        if (!xs.is_array() || xs.size() != settings.size()) {
            throw ParseError(where + ".x must have one entry per party", line);
        }
        std::vector<int> x;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            const auto v = detail::read_int(xs[i], where + ".x", line);
            if (v < 0 || v > settings[i]) {
                throw ParseError(where + ".x entry " + std::to_string(i) +
                                     " out of range 0.." +
                                     std::to_string(settings[i]),
                                 line);
            }
            x.push_back(static_cast<int>(v));
        }
        const Rational g = detail::read_rational(term, where, line);
        if (g.numerator() == 0) {
            throw ParseError(where + " has zero coefficient", line);
        }
        const SettingVector sv(std::move(x));
        if (spec.terms().count(sv) != 0) {
            throw ParseError(where + " duplicates setting " + sv.to_string(),
                             line);
        }
        spec.add_term(sv, g);
    }
    return spec;
}

inline auto load_spec(const std::string &path) -> InequalitySpec {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open inequality file " + path, 0);
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_inequality(buffer.str());
}

inline void save_spec(const InequalitySpec &spec, const std::string &path) {
    std::ofstream out(path);
    if (!out) {
        throw UsageError("cannot write " + path);
    }
    out << to_json_text(spec);
}

} // namespace ccr
