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

#include "ftdmet/exact/ground_state.hpp"
#include "ftdmet/manybody/models.hpp"

namespace ftdmet {

struct LegendreOptions {
    int max_iterations = 100;
    /// Stop when the density (or 1-RDM) residual drops below this.
    double tolerance = 1e-11;
    double fd_step = 1e-4;
    /// Pseudo-inverse cutoff relative to the largest Hessian eigenvalue.
    double rcond = 1e-9;
};

struct LegendreResult {
    double value = 0.0;         ///< functional value
    double e0 = 0.0;            ///< ground energy at the optimal multipliers
    Eigen::MatrixXd h;          ///< optimal orbital one-body matrix
    Eigen::MatrixXd gamma;      ///< its ground-state 1-RDM
    double residual = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Ground energy and 1-RDM of an orbital one-body matrix in a model space.
ExactSolution solve_orbital(const ModelSpace& space, const Eigen::MatrixXd& orbital_h,
                            const SolverOptions& options = {});

/// Density functional at fixed off-diagonal h:
/// F(n; h_off) = max_v [E0(h_off + diag v) - v . n],
/// maximised by Newton steps with a finite-difference Hessian.
LegendreResult legendre_density(const ModelSpace& space, const Eigen::VectorXd& n,
                                const Eigen::MatrixXd& h_offdiag, const LegendreOptions& options = {});

/// 1-RDM functional: F(gamma) = max_h [E0(h) - tr(h gamma)] over all
/// symmetric orbital matrices.
LegendreResult legendre_rdm(const ModelSpace& space, const Eigen::MatrixXd& gamma,
                            const LegendreOptions& options = {});

} // namespace ftdmet
