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
 * Exact rational arithmetic used for inequality coefficients and
 * classical success probabilities.
 */

#pragma once

#include <cstdint>
#include <string>

#include <boost/rational.hpp>

namespace ccr {

/// Always reduced, denominator strictly positive.
///
/// Compare only Rational against Rational: with boost 1.74 under C++20 the
/// mixed `rational == int` overload recurses through its own rewritten
/// candidate.
using Rational = boost::rational<std::int64_t>;

inline auto to_string(const Rational &r) -> std::string {
    return std::to_string(r.numerator()) + "/" +
           std::to_string(r.denominator());
}

inline auto to_double(const Rational &r) -> double {
    return boost::rational_cast<double>(r);
}

inline auto abs(const Rational &r) -> Rational { return boost::abs(r); }

} // namespace ccr
