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

#include "ftdmet/exact/ground_state.hpp"

#include "ftdmet/common/error.hpp"
#include "ftdmet/common/random.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <fmt/format.h>

namespace ftdmet {

namespace {

GroundState finish(double e0, double e1, Eigen::VectorXd v, const SolverOptions& options) {
    GroundState gs;
    gs.energy = e0;
    // Fix the global sign: largest-magnitude amplitude positive.
    Eigen::Index imax = 0;
    v.cwiseAbs().maxCoeff(&imax);
    if(v(imax) < 0.0) v = -v;
    gs.vector     = v / v.norm();
    gs.gap        = e1 - e0;
    gs.degenerate = gs.gap < options.degeneracy_tol;
    return gs;
}

GroundState dense_ground_state(const SparseMatrix& h, const SolverOptions& options) {
    const Eigen::MatrixXd dense = Eigen::MatrixXd(h);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense);
    if(es.info() != Eigen::Success) throw ConvergenceError("ground_state: dense eigensolver failed");
    const auto& ev = es.eigenvalues();
    const double e1 = ev.size() > 1 ? ev(1) : std::numeric_limits<double>::infinity();
    return finish(ev(0), e1, es.eigenvectors().col(0), options);
}

// Block Krylov iteration with thick restarts and full re-orthogonalisation.
// A block of two residual directions is added per step, so a degenerate
// lowest level shows up as two converged Ritz values.
GroundState iterative_ground_state(const SparseMatrix& h, const SolverOptions& options) {
    const Eigen::Index dim = h.rows();
    const int block        = 2;
    const int cap          = std::max(options.subspace, 4 * block);
    const int keep         = std::max(block + 2, cap / 3);

    Eigen::MatrixXd v(dim, cap), av(dim, cap);
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(cap, cap);
    int k = 0;

    auto append = [&](Eigen::VectorXd x) {
        for(int pass = 0; pass < 2; ++pass) x -= v.leftCols(k) * (v.leftCols(k).transpose() * x);
        const double nrm = x.norm();
        if(nrm < 1e-10) return false;
        v.col(k)  = x / nrm;
        av.col(k) = h * v.col(k);
        const Eigen::VectorXd overlap = v.leftCols(k + 1).transpose() * av.col(k);
        t.block(0, k, k + 1, 1) = overlap;
        t.block(k, 0, 1, k + 1) = overlap.transpose();
        ++k;
        return true;
    };

    Rng rng(0x5eed5eedULL);
    std::normal_distribution<double> normal;
    for(int b = 0; b < block; ++b) {
        Eigen::VectorXd x(dim);
        for(Eigen::Index i = 0; i < dim; ++i) x(i) = normal(rng);
        append(std::move(x));
    }

    for(int it = 0; it < options.max_iterations; ++it) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t.topLeftCorner(k, k));
        const Eigen::VectorXd theta = es.eigenvalues();
        const Eigen::MatrixXd y     = es.eigenvectors();
        const int nb                = std::min(block, k);

        const Eigen::MatrixXd x = v.leftCols(k) * y.leftCols(nb);
        Eigen::MatrixXd r       = av.leftCols(k) * y.leftCols(nb);
        for(int b = 0; b < nb; ++b) r.col(b) -= theta(b) * x.col(b);

        bool converged = true;
        for(int b = 0; b < nb; ++b)
            converged = converged && r.col(b).norm() <= options.tolerance * std::max(1.0, std::abs(theta(b)));
        if(converged) return finish(theta(0), nb > 1 ? theta(1) : std::numeric_limits<double>::infinity(), x.col(0), options);

        if(k + nb > cap) {
            const int kk = std::min(k, keep);
            const Eigen::MatrixXd vk = v.leftCols(k) * y.leftCols(kk);
            const Eigen::MatrixXd ak = av.leftCols(k) * y.leftCols(kk);
            v.leftCols(kk)  = vk;
            av.leftCols(kk) = ak;
            t.setZero();
            t.topLeftCorner(kk, kk) = theta.head(kk).asDiagonal();
            k = kk;
        }

        bool grew = false;
        for(int b = 0; b < nb; ++b) grew = append(r.col(b)) || grew;
        if(!grew) {
            // Residuals lie in the subspace: the Ritz pairs are exact.
            return finish(theta(0), nb > 1 ? theta(1) : std::numeric_limits<double>::infinity(), x.col(0), options);
        }
    }
    throw ConvergenceError(fmt::format("ground_state: Krylov solver not converged after {} iterations",
                                       options.max_iterations));
}

} // namespace

GroundState ground_state(const SparseMatrix& h, const SolverOptions& options) {
    if(h.rows() < 1) throw DimensionError("ground_state: empty basis");
    const auto dim = static_cast<std::size_t>(h.rows());
    if(dim <= 8 || (dim <= options.dense_limit && !options.force_iterative))
        return dense_ground_state(h, options);
    return iterative_ground_state(h, options);
}

GroundState ground_state(const ManyBodyHamiltonian& h, const SolverOptions& options) {
    return ground_state(h.matrix(), options);
}

Eigen::MatrixXd mode_rdm(const Eigen::VectorXd& psi, const FockBasis& basis) {
    const int m = basis.modes();
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(m, m);
    std::vector<std::uint8_t> scratch;
    for(std::size_t s = 0; s < basis.size(); ++s) {
        const double c = psi(static_cast<Eigen::Index>(s));
        if(c == 0.0) continue;
        const auto occ = basis.state(s);
        for(int q = 0; q < m; ++q) {
            if(occ[q] == 0) continue;
            for(int p = 0; p < m; ++p) {
                if(auto ex = apply_hop(basis, s, p, q, scratch))
                    g(p, q) += psi(static_cast<Eigen::Index>(ex->target)) * ex->amplitude * c;
            }
        }
    }
    return 0.5 * (g + g.transpose());
}

Eigen::MatrixXd one_rdm(const Eigen::VectorXd& psi, const FockBasis& basis) {
    const Eigen::MatrixXd g = mode_rdm(psi, basis);
    if(!basis.statistics().is_fermion()) return g;
    const Eigen::Index m = g.rows() / 2;
    Eigen::MatrixXd out(m, m);
    for(Eigen::Index i = 0; i < m; ++i)
        for(Eigen::Index j = 0; j < m; ++j) out(i, j) = g(2 * i, 2 * j) + g(2 * i + 1, 2 * j + 1);
    return out;
}

Eigen::MatrixXd one_rdm(const GroundState& gs, const FockBasis& basis) {
    return one_rdm(gs.vector, basis);
}

double double_occupancy(const Eigen::VectorXd& psi, const FockBasis& basis, int orbital) {
    if(!basis.statistics().is_fermion())
        throw DimensionError("double_occupancy: defined for fermionic bases only");
    if(orbital < 0 || 2 * orbital + 1 >= basis.modes())
        throw DimensionError("double_occupancy: orbital out of range");
    double d = 0.0;
    for(std::size_t s = 0; s < basis.size(); ++s) {
        const auto occ = basis.state(s);
        if(occ[2 * orbital] && occ[2 * orbital + 1]) {
            const double c = psi(static_cast<Eigen::Index>(s));
            d += c * c;
        }
    }
    return d;
}

double double_occupancy(const GroundState& gs, const FockBasis& basis, int orbital) {
    return double_occupancy(gs.vector, basis, orbital);
}

ExactSolution energy_of(const OneBodyMatrix& h, const InteractionSpec& w, const FockBasis& basis,
                        const SolverOptions& options) {
    const auto ham = assemble_hamiltonian(h, w, basis);
    ExactSolution out;
    out.state  = ground_state(ham, options);
    out.energy = out.state.energy;
    out.gamma  = one_rdm(out.state, basis);
    return out;
}

ExactSolution energy_of(const LatticeSystem& system, const SolverOptions& options) {
    return energy_of(system.h, system.interaction, system.basis(), options);
}

} // namespace ftdmet
