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

#include "ftdmet/manybody/fock_basis.hpp"
#include "ftdmet/manybody/operators.hpp"

#include <Eigen/Sparse>
#include <memory>
#include <optional>
#include <vector>

namespace ftdmet {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Result of applying a^dagger_p a_q to one basis state.
struct Excitation {
    std::size_t target;
    double amplitude;
};

/// a^dagger_p a_q |state index>, with Jordan-Wigner parity for fermions and
/// sqrt(n) factors for bosons. Empty when the result vanishes or leaves the basis.
std::optional<Excitation> apply_hop(const FockBasis& basis, std::size_t index, int p, int q,
                                    std::vector<std::uint8_t>& scratch);

/// Diagonal interaction energy of one occupation vector.
double interaction_energy(const InteractionSpec& w, std::span<const std::uint8_t> occupation);

class ManyBodyHamiltonian {
public:
    ManyBodyHamiltonian(std::shared_ptr<const FockBasis> basis, OneBodyMatrix h,
                        InteractionSpec w, SparseMatrix matrix)
      : basis_(std::move(basis)), h_(std::move(h)), w_(std::move(w)), matrix_(std::move(matrix)) {}

    const FockBasis& basis() const noexcept { return *basis_; }
    std::shared_ptr<const FockBasis> basis_ptr() const noexcept { return basis_; }
    const OneBodyMatrix& one_body() const noexcept { return h_; }
    const InteractionSpec& interaction() const noexcept { return w_; }
    const SparseMatrix& matrix() const noexcept { return matrix_; }
    std::size_t dimension() const noexcept { return basis_->size(); }

private:
    std::shared_ptr<const FockBasis> basis_;
    OneBodyMatrix h_;
    InteractionSpec w_;
    SparseMatrix matrix_;
};

ManyBodyHamiltonian assemble_hamiltonian(const OneBodyMatrix& h, const InteractionSpec& w,
                                         std::shared_ptr<const FockBasis> basis);

ManyBodyHamiltonian assemble_hamiltonian(const OneBodyMatrix& h, const InteractionSpec& w,
                                         const FockBasis& basis);

} // namespace ftdmet
