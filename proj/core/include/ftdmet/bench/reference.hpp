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

#include "ftdmet/manybody/models.hpp"

#include <Eigen/Dense>

namespace ftdmet {

/// Ground energy per site of the half-filled 1D Hubbard chain in the
/// thermodynamic limit, hopping magnitude 1, on-site repulsion u >= 0:
/// e(u) = -4 int_0^inf J0(w) J1(w) / (w (1 + exp(w u / 2))) dw.
double bethe_half_filling(double u);

/// Same for hopping magnitude |t|: |t| e(u / |t|).
double bethe_half_filling(double u, double t);

struct HartreeFockOptions {
    double damping = 0.5;        ///< weight of the previous densities
    double tolerance = 1e-10;    ///< max density change per iteration
    int max_iterations = 5000;
};

struct HartreeFockResult {
    double energy = 0.0;
    Eigen::MatrixXd gamma_up, gamma_down; ///< orbital 1-RDMs per spin
    int iterations = 0;
};

/// Self-consistent Hartree-Fock for a spin-conserving fermionic lattice
/// system: Hartree decoupling of every density-density term plus exchange
/// for same-spin pairs. A degenerate Fermi shell is occupied fractionally
/// and evenly, which keeps homogeneous rings homogeneous. Starts from
/// equal spin densities, so equal spin counts give the restricted solution.
HartreeFockResult hartree_fock(const LatticeSystem& system, const HartreeFockOptions& options = {});

} // namespace ftdmet
