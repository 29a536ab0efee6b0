/*
 * Copyright 2026 The ftdmet Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace ftdmet {

using Complex    = std::complex<double>;
using QubitState = Eigen::VectorXcd;

/// Tensor product of single-qubit Paulis stored as X and Z bit masks
/// (bit q is qubit q). The operator is i^{|x & z|} X^x Z^z, so a set
/// bit in both masks is a Y.
struct PauliString {
    std::uint32_t x = 0;
    std::uint32_t z = 0;

    /// Letters for qubit 0, 1, ... in order, e.g. "XZX".
    static PauliString from_letters(std::string_view letters);
    std::string letters(int qubits) const;

    int weight() const noexcept;
    bool is_identity() const noexcept { return x == 0 && z == 0; }
    bool is_diagonal() const noexcept { return x == 0; }

    /// Acts on computational basis state b: returns (phase, b').
    std::pair<Complex, std::uint32_t> apply(std::uint32_t b) const noexcept;

    auto operator<=>(const PauliString&) const = default;
};

/// p * q = phase * r.
std::pair<Complex, PauliString> multiply(const PauliString& p, const PauliString& q);

/// Complex linear combination of Pauli strings, used while building
/// operators (fermionic ladder products carry complex coefficients).
class PauliSum {
public:
    PauliSum() = default;
    PauliSum(Complex c, PauliString p) { add(c, p); }

    static PauliSum identity(Complex c = 1.0) { return PauliSum(c, PauliString{}); }

    PauliSum& add(Complex c, PauliString p);
    PauliSum& operator+=(const PauliSum& other);
    PauliSum& operator*=(Complex c);

    friend PauliSum operator+(PauliSum a, const PauliSum& b) { return a += b; }
    friend PauliSum operator*(const PauliSum& a, const PauliSum& b);
    friend PauliSum operator*(PauliSum a, Complex c) { return a *= c; }
    friend PauliSum operator*(Complex c, PauliSum a) { return a *= c; }

    const std::map<PauliString, Complex>& terms() const noexcept { return terms_; }

    /// Drops terms with |coefficient| <= tol.
    PauliSum simplified(double tol = 1e-14) const;

private:
    std::map<PauliString, Complex> terms_;
};

struct PauliTerm {
    double coefficient = 0.0;
    PauliString string;
};

/// Hermitian operator: real combination of Pauli strings on a fixed register.
class PauliHamiltonian {
public:
    PauliHamiltonian() = default;
    explicit PauliHamiltonian(int qubits) : qubits_(qubits) {}

    /// Throws if any coefficient keeps an imaginary part above tol.
    static PauliHamiltonian from_sum(int qubits, const PauliSum& sum, double tol = 1e-12);

    int qubits() const noexcept { return qubits_; }
    const std::vector<PauliTerm>& terms() const noexcept { return terms_; }
    void add(double c, PauliString p) { terms_.push_back({c, p}); }

    /// Coefficient of the identity string.
    double constant() const;

    Eigen::SparseMatrix<Complex> sparse_matrix() const;
    Eigen::MatrixXcd matrix() const;
    QubitState apply(const QubitState& psi) const;
    double expectation(const QubitState& psi) const;

    /// Two-qubit gate equivalents of exp(-i theta H) in a CNOT-ladder
    /// compilation: 2 (w - 1) per term of weight w >= 2.
    int gate_equivalents() const;

private:
    int qubits_ = 0;
    std::vector<PauliTerm> terms_;
};

} // namespace ftdmet
