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
 * Quantum side of a correlation inequality: Bell operator, quantum value,
 * the uniform mixture over the top eigenspace and its correlation audit.
 */

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "inequality.hpp"
#include "operator_algebra.hpp"
#include "rational.hpp"

namespace ccr {

/// Real unit vector n defining the dichotomic observable n . sigma.
using BlochVector = std::array<double, 3>;

inline constexpr BlochVector bloch_x{1.0, 0.0, 0.0};
inline constexpr BlochVector bloch_y{0.0, 1.0, 0.0};
inline constexpr BlochVector bloch_z{0.0, 0.0, 1.0};

inline auto observable(const BlochVector &n) -> ComplexMatrix {
    return n[0] * pauli(PauliLabel::X) + n[1] * pauli(PauliLabel::Y) +
           n[2] * pauli(PauliLabel::Z);
}

/**
 * Observable per party and non-idle setting; `vector(i, s)` for
 * s = 1..l_i. The idle setting always maps to the identity.
 */
class ObservableAssignment {
  public:
    static constexpr double unit_tolerance = 1e-12;

    explicit ObservableAssignment(std::vector<std::vector<BlochVector>> v)
        : vectors_(std::move(v)) {
        for (const auto &party : vectors_) {
            for (const auto &n : party) {
                const double norm =
                    std::sqrt(n[0] * n[0] + n[1] * n[1] + n[2] * n[2]);
                if (std::abs(norm - 1.0) > unit_tolerance) {
                    throw ValidationError("observable direction is not a "
                                          "unit vector");
                }
            }
        }
    }

    /// Every party uses the same list of directions for settings 1, 2, ...
    static auto uniform(std::size_t parties,
                        const std::vector<BlochVector> &per_setting)
        -> ObservableAssignment {
        return ObservableAssignment(
            std::vector<std::vector<BlochVector>>(parties, per_setting));
    }

    /// Setting 1 -> sigma_x, setting 2 -> sigma_z for every party.
    static auto pentagon_default(std::size_t parties = 5)
        -> ObservableAssignment {
        return uniform(parties, {bloch_x, bloch_z});
    }

    /// Parses "x,z" style lists (letters x, y, z), applied to every party.
    static auto parse(std::string_view text, std::size_t parties)
        -> ObservableAssignment {
        std::vector<BlochVector> per_setting;
        for (char c : text) {
            switch (c) {
            case 'x':
            case 'X':
                per_setting.push_back(bloch_x);
                break;
            case 'y':
            case 'Y':
                per_setting.push_back(bloch_y);
                break;
            case 'z':
            case 'Z':
                per_setting.push_back(bloch_z);
                break;
            case ',':
            case ' ':
                break;
            default:
                throw UsageError(std::string("observable assignment: "
                                             "unexpected '") +
                                 c + "'");
            }
        }
        if (per_setting.empty()) {
            throw UsageError("observable assignment is empty");
        }
        return uniform(parties, per_setting);
    }

    [[nodiscard]] auto party_count() const noexcept -> std::size_t {
        return vectors_.size();
    }
    [[nodiscard]] auto vector(std::size_t party, int setting) const
        -> const BlochVector & {
        return vectors_.at(party).at(static_cast<std::size_t>(setting - 1));
    }
    /// 2x2 observable for a party's setting; identity when idle.
    [[nodiscard]] auto local(std::size_t party, int setting) const
        -> ComplexMatrix {
        if (setting == 0) {
            return pauli(PauliLabel::I);
        }
        return observable(vector(party, setting));
    }

    void check_covers(const InequalitySpec &spec) const {
        const auto &l = spec.settings_per_party();
        if (vectors_.size() != l.size()) {
            throw UsageError("observable assignment has " +
                             std::to_string(vectors_.size()) +
                             " parties, inequality has " +
                             std::to_string(l.size()));
        }
        for (std::size_t i = 0; i < l.size(); ++i) {
            if (vectors_[i].size() < static_cast<std::size_t>(l[i])) {
                throw UsageError("observable assignment misses settings of "
                                 "party " +
                                 party_name(i));
            }
        }
    }

  private:
    std::vector<std::vector<BlochVector>> vectors_;
};

/// sum_x g(x) O_1(x_1) (x) ... (x) O_N(x_N).
struct BellOperator {
    ComplexMatrix matrix;
    InequalitySpec spec;
    ObservableAssignment assignment;
};

inline auto build_bell_operator(const InequalitySpec &spec,
                                const ObservableAssignment &assign)
    -> BellOperator {
    assign.check_covers(spec);
    const std::size_t parties = spec.party_count();
    if (parties > 10) {
        throw UsageError("Bell operator limited to 10 parties");
    }
    const Eigen::Index dim = Eigen::Index{1} << parties;
    ComplexMatrix total = ComplexMatrix::Zero(dim, dim);
    std::vector<ComplexMatrix> factors(parties);
    for (const auto &[x, g] : spec.terms()) {
        for (std::size_t i = 0; i < parties; ++i) {
            factors[i] = assign.local(i, x[i]);
        }
        total += to_double(g) * kron(factors);
    }
    if (!is_hermitian(total)) {
        throw NumericalError("Bell operator is not Hermitian");
    }
    return {std::move(total), spec, assign};
}

/// Permutation moving qubit i to position i+1 (mod n), the operator form
/// of the party cycle A->B->...->A. Qubit 0 is the most significant bit.
inline auto qubit_cycle_permutation(std::size_t qubits) -> ComplexMatrix {
    const Eigen::Index dim = Eigen::Index{1} << qubits;
    ComplexMatrix p = ComplexMatrix::Zero(dim, dim);
    for (Eigen::Index in = 0; in < dim; ++in) {
        Eigen::Index out = 0;
        for (std::size_t q = 0; q < qubits; ++q) {
            const auto bit = (in >> (qubits - 1 - q)) & 1;
            const std::size_t target = (q + 1) % qubits;
            out |= bit << (qubits - 1 - target);
        }
        p(out, in) = 1.0;
    }
    return p;
}

struct QuantumValue {
    double value = 0.0;
    std::size_t multiplicity = 0;
    /// Full spectrum, ascending.
    Eigen::VectorXd spectrum;
};

/// Relative threshold for counting eigenvalues as degenerate with the top.
inline constexpr double degeneracy_tolerance = 1e-8;

namespace detail {

inline auto top_multiplicity(const Eigen::VectorXd &ev) -> std::size_t {
    const double top = ev(ev.size() - 1);
    const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
    std::size_t m = 0;
    for (Eigen::Index k = ev.size() - 1; k >= 0; --k) {
        if (top - ev(k) > degeneracy_tolerance * scale) {
            break;
        }
        ++m;
    }
    return m;
}

} // namespace detail

inline auto quantum_value(const BellOperator &op) -> QuantumValue {
    const auto spectral = hermitian_eig(op.matrix);
    const auto &ev = spectral.eigenvalues;
    return {ev(ev.size() - 1), detail::top_multiplicity(ev), ev};
}

inline auto quantum_value(const InequalitySpec &spec,
                          const ObservableAssignment &assign)
    -> QuantumValue {
    return quantum_value(build_bell_operator(spec, assign));
}

/**
 * Closed form of the pentagon quantum value,
 * 1/4 + sqrt(11/3) cos(theta / 3) with theta = arccot(-sqrt(108/1223))
 * taken in (0, pi), i.e. theta = pi/2 + arctan(sqrt(108/1223)).
 */
inline auto closed_form_quantum_value() -> double {
    const double theta =
        std::numbers::pi / 2.0 + std::atan(std::sqrt(108.0 / 1223.0));
    return 0.25 + std::sqrt(11.0 / 3.0) * std::cos(theta / 3.0);
}

/// The same expression with the principal arccot of the positive root.
/// Evaluates to about 1.9927, which is not an eigenvalue of the operator.
inline auto closed_form_principal_branch() -> double {
    const double theta = std::atan(1.0 / std::sqrt(108.0 / 1223.0));
    return 0.25 + std::sqrt(11.0 / 3.0) * std::cos(theta / 3.0);
}

/// P / m, where P projects onto the m-fold degenerate top eigenspace.
inline auto top_eigenspace_mixture(const BellOperator &op) -> DensityState {
    const auto spectral = hermitian_eig(op.matrix);
    const auto m = detail::top_multiplicity(spectral.eigenvalues);
    const auto top = spectral.eigenvectors.rightCols(
        static_cast<Eigen::Index>(m));
    ComplexMatrix rho = top * top.adjoint() / static_cast<double>(m);
    rho = (0.5 * (rho + rho.adjoint())).eval();
    return DensityState(std::move(rho));
}

inline auto top_eigenspace_mixture(const InequalitySpec &spec,
                                   const ObservableAssignment &assign)
    -> DensityState {
    return top_eigenspace_mixture(build_bell_operator(spec, assign));
}

/// trace(state * P_1 (x) ... (x) P_n).
inline auto pauli_correlation(const DensityState &state,
                              std::span<const PauliLabel> labels) -> double {
    if (labels.size() != state.qubits()) {
        throw UsageError("pauli_correlation: expected " +
                         std::to_string(state.qubits()) + " labels, got " +
                         std::to_string(labels.size()));
    }
    return expectation(state, pauli_string(labels));
}

struct CorrelationAudit {
    double max_abs = 0.0;
    std::vector<PauliLabel> worst;
    std::size_t strings_checked = 0;
};

/// Largest |correlation| over all Pauli strings with an odd number of
/// non-identity factors. Ties keep the first string in enumeration order
/// (labels I < X < Y < Z, first qubit varying fastest).
inline auto odd_correlation_audit(const DensityState &state)
    -> CorrelationAudit {
    const std::size_t n = state.qubits();
    CorrelationAudit audit;
    std::vector<PauliLabel> labels(n, PauliLabel::I);
    std::size_t total = 1;
    for (std::size_t i = 0; i < n; ++i) {
        total *= 4;
    }
    for (std::size_t code = 0; code < total; ++code) {
        std::size_t weight = 0;
        std::size_t c = code;
        for (std::size_t i = 0; i < n; ++i) {
            labels[i] = static_cast<PauliLabel>(c % 4);
            c /= 4;
            weight += labels[i] != PauliLabel::I ? 1 : 0;
        }
        if (weight % 2 == 0) {
            continue;
        }
        const double v = std::abs(pauli_correlation(state, labels));
        ++audit.strings_checked;
        if (audit.worst.empty() || v > audit.max_abs) {
            audit.max_abs = v;
            audit.worst = labels;
        }
    }
    return audit;
}

/// Success probability 1/2 (1 + Q / sum |g|) of the quantum protocol.
inline auto success_probability_quantum(const InequalitySpec &spec, double q)
    -> double {
    if (!std::isfinite(q)) {
        throw UsageError("quantum value must be finite");
    }
    const Rational norm = abs_sum(spec);
    if (norm.numerator() == 0) {
        throw UsageError("inequality has no terms");
    }
    return 0.5 * (1.0 + q / to_double(norm));
}

} // namespace ccr
