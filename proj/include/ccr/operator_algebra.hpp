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
 * Dense complex linear algebra for few-qubit operators: Pauli matrices,
 * Kronecker products, Hermitian eigendecomposition and expectation values.
 *
 * Matrices are small (at most a few hundred rows), so everything is dense.
 */

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"

namespace ccr {

using Complex = std::complex<double>;

/// Row-major dense complex matrix.
using ComplexMatrix =
    Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Absolute tolerance used to decide whether a matrix is Hermitian.
inline constexpr double hermitian_tolerance = 1e-12;

enum class PauliLabel : std::uint8_t { I, X, Y, Z };

inline auto to_char(PauliLabel label) -> char {
    constexpr std::array<char, 4> names{'I', 'X', 'Y', 'Z'};
    return names[static_cast<std::size_t>(label)];
}

inline auto pauli_label_from_char(char c) -> PauliLabel {
    switch (c) {
    case 'I':
    case 'i':
        return PauliLabel::I;
    case 'X':
    case 'x':
        return PauliLabel::X;
    case 'Y':
    case 'y':
        return PauliLabel::Y;
    case 'Z':
    case 'z':
        return PauliLabel::Z;
    default:
        throw UsageError(std::string("unknown Pauli label '") + c + "'");
    }
}

/// Parses strings like "XXZZI" (whitespace ignored).
inline auto parse_pauli_string(std::string_view text)
    -> std::vector<PauliLabel> {
    std::vector<PauliLabel> labels;
    for (char c : text) {
        if (c == ' ' || c == '\t') {
            continue;
        }
        labels.push_back(pauli_label_from_char(c));
    }
    return labels;
}

inline auto to_string(std::span<const PauliLabel> labels) -> std::string {
    std::string out;
    out.reserve(labels.size());
    for (auto l : labels) {
        out.push_back(to_char(l));
    }
    return out;
}

inline auto pauli(PauliLabel label) -> ComplexMatrix {
    using namespace std::complex_literals;
    ComplexMatrix m(2, 2);
    switch (label) {
    case PauliLabel::I:
        m << 1.0, 0.0, 0.0, 1.0;
        break;
    case PauliLabel::X:
        m << 0.0, 1.0, 1.0, 0.0;
        break;
    case PauliLabel::Y:
        m << 0.0, -1.0i, 1.0i, 0.0;
        break;
    case PauliLabel::Z:
        m << 1.0, 0.0, 0.0, -1.0;
        break;
    }
    return m;
}

inline auto kron(const ComplexMatrix &a, const ComplexMatrix &b)
    -> ComplexMatrix {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) =
                a(i, j) * b;
        }
    }
    return out;
}

/// Left-to-right Kronecker product; the first factor acts on the most
/// significant qubit.
inline auto kron(std::span<const ComplexMatrix> factors) -> ComplexMatrix {
    if (factors.empty()) {
        throw UsageError("kron: at least one factor is required");
    }
    ComplexMatrix out = factors.front();
    for (std::size_t k = 1; k < factors.size(); ++k) {
        out = kron(out, factors[k]);
    }
    return out;
}

inline auto kron(std::initializer_list<ComplexMatrix> factors)
    -> ComplexMatrix {
    return kron(std::span<const ComplexMatrix>(factors.begin(), factors.size()));
}

inline auto pauli_string(std::span<const PauliLabel> labels) -> ComplexMatrix {
    std::vector<ComplexMatrix> factors;
    factors.reserve(labels.size());
    for (auto l : labels) {
        factors.push_back(pauli(l));
    }
    return kron(factors);
}

/// Largest entrywise deviation from Hermiticity, max |m(i,j) - conj(m(j,i))|.
inline auto hermitian_defect(const ComplexMatrix &m) -> double {
    if (m.rows() != m.cols()) {
        throw ValidationError("matrix is not square");
    }
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

inline auto is_hermitian(const ComplexMatrix &m,
                         double tol = hermitian_tolerance) -> bool {
    return m.rows() == m.cols() && hermitian_defect(m) <= tol;
}

/// Eigenvalues ascending; eigenvectors are the matching orthonormal columns.
/// Within a degenerate eigenspace the basis is arbitrary.
struct SpectralResult {
    Eigen::VectorXd eigenvalues;
    ComplexMatrix eigenvectors;
};

inline auto hermitian_eig(const ComplexMatrix &m) -> SpectralResult {
    if (m.rows() == 0 || m.rows() != m.cols()) {
        throw ValidationError("hermitian_eig: matrix must be square and "
                              "non-empty");
    }
    const double defect = hermitian_defect(m);
    if (defect > hermitian_tolerance) {
        throw ValidationError("hermitian_eig: matrix is not Hermitian "
                              "(defect " +
                              std::to_string(defect) + ")");
    }
    // Symmetrize so rounding noise in the upper triangle is not ignored.
    const Eigen::MatrixXcd sym = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(sym);
    if (solver.info() != Eigen::Success) {
        throw NumericalError("hermitian_eig: eigensolver did not converge");
    }
    return {solver.eigenvalues(), solver.eigenvectors()};
}

/// Rebuilds sum_k lambda_k v_k v_k^dagger.
inline auto reconstruct(const SpectralResult &s) -> ComplexMatrix {
    const auto &v = s.eigenvectors;
    return v * s.eigenvalues.cast<Complex>().asDiagonal() * v.adjoint();
}

/**
 * Density matrix of an n-qubit system.
 *
 * Construction validates Hermiticity, unit trace and positivity
 * (eigenvalues >= -1e-10).
 */
class DensityState {
  public:
    static constexpr double trace_tolerance = 1e-12;
    static constexpr double positivity_tolerance = 1e-10;

    explicit DensityState(ComplexMatrix rho) : rho_{std::move(rho)} {
        const auto dim = rho_.rows();
        if (dim == 0 || dim != rho_.cols() || (dim & (dim - 1)) != 0) {
            throw ValidationError("density matrix dimension must be a power "
                                  "of two");
        }
        qubits_ = 0;
        while ((Eigen::Index{1} << qubits_) < dim) {
            ++qubits_;
        }
        if (!is_hermitian(rho_)) {
            throw ValidationError("density matrix is not Hermitian");
        }
        if (std::abs(rho_.trace() - Complex{1.0}) > trace_tolerance) {
            throw ValidationError("density matrix trace differs from 1");
        }
        const auto spectrum = hermitian_eig(rho_).eigenvalues;
        if (spectrum.minCoeff() < -positivity_tolerance) {
            throw ValidationError("density matrix has a negative eigenvalue");
        }
    }

    static auto maximally_mixed(std::size_t qubits) -> DensityState {
        const Eigen::Index dim = Eigen::Index{1} << qubits;
        ComplexMatrix rho =
            ComplexMatrix::Identity(dim, dim) / static_cast<double>(dim);
        return DensityState(std::move(rho));
    }

    /// |psi><psi| for a normalized state vector.
    static auto pure(const Eigen::VectorXcd &psi) -> DensityState {
        return DensityState(psi * psi.adjoint());
    }

    /// Computational basis product state, e.g. bits {0,0} gives |00><00|.
    static auto basis(std::span<const int> bits) -> DensityState {
        Eigen::Index index = 0;
        for (int b : bits) {
            index = (index << 1) | (b != 0 ? 1 : 0);
        }
        const Eigen::Index dim = Eigen::Index{1} << bits.size();
        ComplexMatrix rho = ComplexMatrix::Zero(dim, dim);
        rho(index, index) = 1.0;
        return DensityState(std::move(rho));
    }

    [[nodiscard]] auto matrix() const noexcept -> const ComplexMatrix & {
        return rho_;
    }
    [[nodiscard]] auto qubits() const noexcept -> std::size_t {
        return qubits_;
    }
    [[nodiscard]] auto dimension() const noexcept -> Eigen::Index {
        return rho_.rows();
    }
    [[nodiscard]] auto purity() const -> double {
        return (rho_ * rho_).trace().real();
    }

  private:
    ComplexMatrix rho_;
    std::size_t qubits_{0};
};

inline constexpr double imaginary_residue_tolerance = 1e-10;

/// trace(state * op) for Hermitian op.
inline auto expectation(const DensityState &state, const ComplexMatrix &op)
    -> double {
    const auto &rho = state.matrix();
    if (op.rows() != rho.rows() || op.cols() != rho.cols()) {
        throw UsageError("expectation: dimension mismatch");
    }
    if (!is_hermitian(op)) {
        throw ValidationError("expectation: operator is not Hermitian");
    }
    // tr(rho op) = sum_ij rho_ij op_ji
    const Complex value = rho.cwiseProduct(op.transpose()).sum();
    if (std::abs(value.imag()) > imaginary_residue_tolerance) {
        throw NumericalError("expectation: imaginary residue " +
                             std::to_string(value.imag()));
    }
    return value.real();
}

} // namespace ccr
