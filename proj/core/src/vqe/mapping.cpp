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

#include "ftdmet/vqe/mapping.hpp"

#include "ftdmet/common/error.hpp"

#include <fmt/format.h>

namespace ftdmet {

namespace {

// sigma^- on qubit k dressed with Z on all lower qubits: a_k.
PauliSum jw_annihilate(int k) {
    PauliString zs;
    for(int j = 0; j < k; ++j) zs.z |= 1u << j;
    PauliString xk = zs, yk = zs;
    xk.x |= 1u << k;
    yk.x |= 1u << k;
    yk.z |= 1u << k;
    // (X + iY) / 2; the Z string commutes past since it acts on other qubits.
    return PauliSum(0.5, xk) + PauliSum(Complex(0.0, 0.5), yk);
}

PauliSum jw_create(int k) {
    PauliString zs;
    for(int j = 0; j < k; ++j) zs.z |= 1u << j;
    PauliString xk = zs, yk = zs;
    xk.x |= 1u << k;
    yk.x |= 1u << k;
    yk.z |= 1u << k;
    return PauliSum(0.5, xk) + PauliSum(Complex(0.0, -0.5), yk);
}

PauliSum number(int k) {
    PauliString z;
    z.z = 1u << k;
    return PauliSum::identity(0.5) + PauliSum(-0.5, z);
}

} // namespace

int qubit_of_mode(int mode, int modes, QubitOrdering ordering) {
    if(ordering == QubitOrdering::interleaved) return mode;
    return (mode % 2) * (modes / 2) + mode / 2;
}

PauliSum jw_hop(int p, int q, int modes, QubitOrdering ordering) {
    const int qp = qubit_of_mode(p, modes, ordering), qq = qubit_of_mode(q, modes, ordering);
    if(qp == qq) return number(qp);
    return (jw_create(qp) * jw_annihilate(qq)).simplified();
}

PauliHamiltonian jordan_wigner(const OneBodyMatrix& h, const InteractionSpec& w,
                               QubitOrdering ordering) {
    const int modes = h.size();
    if(modes > 32) throw DimensionError("jordan_wigner: more than 32 spin-orbitals");
    w.validate(modes, Statistics::fermion());

    PauliSum sum;
    for(int p = 0; p < modes; ++p)
        for(int q = 0; q < modes; ++q)
            if(h(p, q) != 0.0) sum += jw_hop(p, q, modes, ordering) * Complex(h(p, q));

    auto nq = [&](int mode) { return number(qubit_of_mode(mode, modes, ordering)); };
    for(const auto& t : w.terms()) {
        switch(t.kind) {
            case InteractionKind::fermionic_onsite:
                sum += nq(2 * t.i) * nq(2 * t.i + 1) * Complex(t.coefficient);
                break;
            case InteractionKind::density_density:
                sum += nq(t.i) * nq(t.j) * Complex(t.coefficient);
                break;
            case InteractionKind::bosonic_onsite:
                throw DimensionError("jordan_wigner: bosonic interaction term");
        }
    }
    return PauliHamiltonian::from_sum(modes, sum);
}

PauliHamiltonian one_hot_operator(const Eigen::MatrixXd& matrix, int max_qubits) {
    const auto b = static_cast<int>(matrix.rows());
    if(b > max_qubits || b > 32)
        throw CapacityError(fmt::format("one-hot encoding needs {} qubits, cap is {}", b, max_qubits));
    PauliSum sum;
    for(int m = 0; m < b; ++m) {
        if(matrix(m, m) != 0.0) sum += number(m) * Complex(matrix(m, m));
        for(int n = m + 1; n < b; ++n) {
            const double v = 0.5 * (matrix(m, n) + matrix(n, m));
            if(v == 0.0) continue;
            const std::uint32_t bits = (1u << m) | (1u << n);
            // |m><n| + |n><m| -> (X_m X_n + Y_m Y_n) / 2
            sum.add(0.5 * v, PauliString{bits, 0});
            sum.add(0.5 * v, PauliString{bits, bits});
        }
    }
    return PauliHamiltonian::from_sum(b, sum);
}

PauliHamiltonian boson_one_hot(const ManyBodyHamiltonian& h, int max_qubits) {
    if(!h.basis().statistics().is_boson())
        throw DimensionError("boson_one_hot: bosonic basis required");
    return one_hot_operator(Eigen::MatrixXd(h.matrix()), max_qubits);
}

Eigen::MatrixXd fock_matrix(const Eigen::MatrixXd& one_body, const FockBasis& basis) {
    if(one_body.rows() != basis.modes() || one_body.cols() != basis.modes())
        throw DimensionError("fock_matrix: operator does not match the basis modes");
    const auto dim = static_cast<Eigen::Index>(basis.size());
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(dim, dim);
    std::vector<std::uint8_t> scratch;
    for(std::size_t s = 0; s < basis.size(); ++s)
        for(int p = 0; p < basis.modes(); ++p)
            for(int q = 0; q < basis.modes(); ++q) {
                if(one_body(p, q) == 0.0) continue;
                if(auto ex = apply_hop(basis, s, p, q, scratch))
                    out(static_cast<Eigen::Index>(ex->target), static_cast<Eigen::Index>(s)) +=
                      one_body(p, q) * ex->amplitude;
            }
    return out;
}

} // namespace ftdmet
