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

#include "ftdmet/manybody/hamiltonian.hpp"
#include "ftdmet/manybody/models.hpp"

#include <Eigen/Dense>
#include <limits>

namespace ftdmet {

struct SolverOptions {
    double degeneracy_tol = 1e-9;
    std::size_t dense_limit = 4096;
    bool force_iterative = false;
    /// Subspace size before a thick restart.
    int subspace = 48;
    int max_iterations = 4000;
    /// Residual norm target for the two lowest Ritz pairs.
    double tolerance = 1e-10;
};

struct GroundState {
    double energy = 0.0;
    Eigen::VectorXd vector;
    /// E1 - E0; infinite for a one-dimensional sector.
    double gap = std::numeric_limits<double>::infinity();
    bool degenerate = false;
};

GroundState ground_state(const SparseMatrix& h, const SolverOptions& options = {});
GroundState ground_state(const ManyBodyHamiltonian& h, const SolverOptions& options = {});

/// Spin-summed orbital 1-RDM for fermions (gamma_ij = sum_s <a+_{is} a_{js}>),
/// the plain 1-RDM for bosons.
Eigen::MatrixXd one_rdm(const Eigen::VectorXd& psi, const FockBasis& basis);
Eigen::MatrixXd one_rdm(const GroundState& gs, const FockBasis& basis);

/// <a+_p a_q> over all modes (spin-orbitals for fermions).
Eigen::MatrixXd mode_rdm(const Eigen::VectorXd& psi, const FockBasis& basis);

/// <n_{i up} n_{i down}> for orbital i; rejects bosonic bases.
double double_occupancy(const Eigen::VectorXd& psi, const FockBasis& basis, int orbital);
double double_occupancy(const GroundState& gs, const FockBasis& basis, int orbital);

struct ExactSolution {
    double energy = 0.0;
    Eigen::MatrixXd gamma;
    GroundState state;
};

ExactSolution energy_of(const OneBodyMatrix& h, const InteractionSpec& w, const FockBasis& basis,
                        const SolverOptions& options = {});
ExactSolution energy_of(const LatticeSystem& system, const SolverOptions& options = {});

} // namespace ftdmet
