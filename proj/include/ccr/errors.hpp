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
 * Exception types shared by all ccr modules.
 */

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ccr {

/// Caller passed arguments outside an operation's contract.
class UsageError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Input object violates a structural invariant (e.g. non-Hermitian matrix).
class ValidationError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Operation is undefined for the given point of its domain.
class DomainError : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

/// A floating point check exceeded its tolerance.
class NumericalError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Exhaustive search would exceed the configured enumeration cap.
class SizeError : public std::length_error {
  public:
    using std::length_error::length_error;
};

/// Malformed inequality file. `line()` is 1-based, 0 when unknown.
class ParseError : public std::runtime_error {
  public:
    ParseError(const std::string &what, std::size_t line)
        : std::runtime_error(line == 0 ? what
                                       : "line " + std::to_string(line) +
                                             ": " + what),
          line_{line} {}

    [[nodiscard]] auto line() const noexcept -> std::size_t { return line_; }

  private:
    std::size_t line_;
};

} // namespace ccr
