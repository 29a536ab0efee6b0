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

#include "ftdmet/vqe/pauli.hpp"

#include "ftdmet/common/error.hpp"

#include <bit>
#include <fmt/format.h>

namespace ftdmet {

namespace {

constexpr Complex kPhase[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};

} // namespace

PauliString PauliString::from_letters(std::string_view letters) {
    if(letters.size() > 32) throw DimensionError("PauliString: at most 32 qubits");
    PauliString p;
    for(std::size_t q = 0; q < letters.size(); ++q) {
        const std::uint32_t bit = 1u << q;
        switch(letters[q]) {
            case 'I': break;
            case 'X': p.x |= bit; break;
            case 'Y': p.x |= bit; p.z |= bit; break;
            case 'Z': p.z |= bit; break;
            default: throw FormatError(fmt::format("PauliString: bad letter '{}'", letters[q]));
        }
    }
    return p;
}

std::string PauliString::letters(int qubits) const {
    std::string s(static_cast<std::size_t>(qubits), 'I');
    for(int q = 0; q < qubits; ++q) {
        const bool bx = (x >> q) & 1u, bz = (z >> q) & 1u;
        s[static_cast<std::size_t>(q)] = bx ? (bz ? 'Y' : 'X') : (bz ? 'Z' : 'I');
    }
    return s;
}

int PauliString::weight() const noexcept { return std::popcount(x | z); }

std::pair<Complex, std::uint32_t> PauliString::apply(std::uint32_t b) const noexcept {
    const int k = std::popcount(x & z) + 2 * std::popcount(b & z);
    return {kPhase[k & 3], b ^ x};
}

std::pair<Complex, PauliString> multiply(const PauliString& p, const PauliString& q) {
    // (X^x1 Z^z1)(X^x2 Z^z2) = (-1)^{|z1 & x2|} X^{x1^x2} Z^{z1^z2}
    const PauliString r{p.x ^ q.x, p.z ^ q.z};
    const int k = std::popcount(p.x & p.z) + std::popcount(q.x & q.z) + 2 * std::popcount(p.z & q.x) -
                  std::popcount(r.x & r.z);
    return {kPhase[((k % 4) + 4) % 4], r};
}

PauliSum& PauliSum::add(Complex c, PauliString p) {
    terms_[p] += c;
    return *this;
}

PauliSum& PauliSum::operator+=(const PauliSum& other) {
    for(const auto& [p, c] : other.terms_) terms_[p] += c;
    return *this;
}

PauliSum& PauliSum::operator*=(Complex c) {
    for(auto& [p, v] : terms_) v *= c;
    return *this;
}

PauliSum operator*(const PauliSum& a, const PauliSum& b) {
    PauliSum out;
    for(const auto& [pa, ca] : a.terms_)
        for(const auto& [pb, cb] : b.terms_) {
            const auto [phase, r] = multiply(pa, pb);
            out.terms_[r] += phase * ca * cb;
        }
    return out;
}

PauliSum PauliSum::simplified(double tol) const {
    PauliSum out;
    for(const auto& [p, c] : terms_)
        if(std::abs(c) > tol) out.terms_.emplace(p, c);
    return out;
}

PauliHamiltonian PauliHamiltonian::from_sum(int qubits, const PauliSum& sum, double tol) {
    PauliHamiltonian h(qubits);
    const std::uint32_t mask = qubits >= 32 ? ~0u : ((1u << qubits) - 1u);
    const PauliSum simple = sum.simplified(tol);
    for(const auto& [p, c] : simple.terms()) {
        if(std::abs(c.imag()) > tol)
            throw DimensionError(fmt::format("PauliHamiltonian: non-Hermitian coefficient on {}",
                                             p.letters(qubits)));
        if((p.x | p.z) & ~mask) throw DimensionError("PauliHamiltonian: string exceeds register");
        h.terms_.push_back({c.real(), p});
    }
    return h;
}

double PauliHamiltonian::constant() const {
    double c = 0.0;
    for(const auto& t : terms_)
        if(t.string.is_identity()) c += t.coefficient;
    return c;
}

Eigen::SparseMatrix<Complex> PauliHamiltonian::sparse_matrix() const {
    const std::uint32_t dim = 1u << qubits_;
    std::vector<Eigen::Triplet<Complex>> trip;
    trip.reserve(terms_.size() * dim);
    for(const auto& t : terms_)
        for(std::uint32_t b = 0; b < dim; ++b) {
            const auto [phase, out] = t.string.apply(b);
            trip.emplace_back(static_cast<int>(out), static_cast<int>(b), t.coefficient * phase);
        }
    Eigen::SparseMatrix<Complex> m(dim, dim);
    m.setFromTriplets(trip.begin(), trip.end());
    m.prune(Complex(0.0, 0.0), 1e-300);
    return m;
}

Eigen::MatrixXcd PauliHamiltonian::matrix() const { return Eigen::MatrixXcd(sparse_matrix()); }

QubitState PauliHamiltonian::apply(const QubitState& psi) const {
    const auto dim = static_cast<std::uint32_t>(psi.size());
    if(dim != (1u << qubits_)) throw DimensionError("PauliHamiltonian: state size mismatch");
    QubitState out = QubitState::Zero(psi.size());
    for(const auto& t : terms_)
        for(std::uint32_t b = 0; b < dim; ++b) {
            const auto [phase, o] = t.string.apply(b);
            out(o) += t.coefficient * phase * psi(b);
        }
    return out;
}

double PauliHamiltonian::expectation(const QubitState& psi) const {
    return psi.dot(apply(psi)).real();
}

int PauliHamiltonian::gate_equivalents() const {
    int g = 0;
    for(const auto& t : terms_)
        if(t.string.weight() >= 2) g += 2 * (t.string.weight() - 1);
    return g;
}

} // namespace ftdmet
