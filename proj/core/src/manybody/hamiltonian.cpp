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

#include "ftdmet/manybody/hamiltonian.hpp"

#include "ftdmet/common/error.hpp"

#include <cmath>
#include <fmt/format.h>

namespace ftdmet {

std::optional<Excitation> apply_hop(const FockBasis& basis, std::size_t index, int p, int q,
                                    std::vector<std::uint8_t>& scratch) {
    const auto occ = basis.state(index);
    scratch.assign(occ.begin(), occ.end());
    if(scratch[q] == 0) return std::nullopt;
    double amp = 0.0;
    if(basis.statistics().is_fermion()) {
        if(p == q) return Excitation{index, 1.0};
        if(scratch[p] != 0) return std::nullopt;
        // a_q picks up the parity of modes below q, a^dagger_p that of modes
        // below p after removal.
        int parity = 0;
        for(int k = 0; k < q; ++k) parity += scratch[k];
        scratch[q] = 0;
        for(int k = 0; k < p; ++k) parity += scratch[k];
        scratch[p] = 1;
        amp        = parity % 2 == 0 ? 1.0 : -1.0;
    } else {
        if(p == q) return Excitation{index, static_cast<double>(scratch[q])};
        if(scratch[p] >= basis.statistics().max_occupancy) return std::nullopt;
        amp = std::sqrt(static_cast<double>(scratch[q]));
        --scratch[q];
        amp *= std::sqrt(static_cast<double>(scratch[p] + 1));
        ++scratch[p];
    }
    const auto target = basis.find(scratch);
    if(!target) return std::nullopt;
    return Excitation{*target, amp};
}

double interaction_energy(const InteractionSpec& w, std::span<const std::uint8_t> occ) {
    double e = 0.0;
    for(const auto& t : w.terms()) {
        switch(t.kind) {
            case InteractionKind::bosonic_onsite: {
                const double n = occ[t.i];
                e += t.coefficient *
                     (w.boson_convention() == BosonConvention::printed ? n * n - 1.0 : n * (n - 1.0));
                break;
            }
            case InteractionKind::fermionic_onsite:
                e += t.coefficient * occ[2 * t.i] * occ[2 * t.i + 1];
                break;
            case InteractionKind::density_density:
                e += t.coefficient * occ[t.i] * occ[t.j];
                break;
        }
    }
    return e;
}

ManyBodyHamiltonian assemble_hamiltonian(const OneBodyMatrix& h, const InteractionSpec& w,
                                         std::shared_ptr<const FockBasis> basis) {
    const int m = basis->modes();
    if(h.size() != m)
        throw DimensionError(fmt::format("assemble_hamiltonian: h is {}x{} but basis has {} modes",
                                         h.size(), h.size(), m));
    w.validate(m, basis->statistics());

    const auto& hm = h.matrix();
    std::vector<std::pair<int, int>> hops;
    for(int p = 0; p < m; ++p)
        for(int q = 0; q < m; ++q)
            if(p != q && hm(p, q) != 0.0) hops.emplace_back(p, q);

    const std::size_t dim = basis->size();
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(dim * (1 + hops.size() / 2));
    std::vector<std::uint8_t> scratch;
    for(std::size_t col = 0; col < dim; ++col) {
        const auto occ = basis->state(col);
        double diag    = interaction_energy(w, occ);
        for(int p = 0; p < m; ++p) diag += hm(p, p) * occ[p];
        if(diag != 0.0)
            triplets.emplace_back(static_cast<int>(col), static_cast<int>(col), diag);
        for(const auto& [p, q] : hops) {
            if(auto ex = apply_hop(*basis, col, p, q, scratch))
                triplets.emplace_back(static_cast<int>(ex->target), static_cast<int>(col),
                                      hm(p, q) * ex->amplitude);
        }
    }
    SparseMatrix mat(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    mat.setFromTriplets(triplets.begin(), triplets.end());
    mat.makeCompressed();
    return ManyBodyHamiltonian(std::move(basis), h, w, std::move(mat));
}

ManyBodyHamiltonian assemble_hamiltonian(const OneBodyMatrix& h, const InteractionSpec& w,
                                         const FockBasis& basis) {
    return assemble_hamiltonian(h, w, std::make_shared<const FockBasis>(basis));
}

} // namespace ftdmet
