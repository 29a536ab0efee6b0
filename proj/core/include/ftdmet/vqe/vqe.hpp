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
#include "ftdmet/vqe/ansatz.hpp"
#include "ftdmet/vqe/measurement.hpp"

#include <string_view>
#include <utility>
#include <vector>

namespace ftdmet {

enum class Backend { ed, vqe, vqe_noisy };

Backend parse_backend(std::string_view name);
std::string_view to_string(Backend b);

/// Everything needed to run the HVA VQE for one (h, W, sector).
struct VqeProblem {
    PauliHamiltonian hamiltonian;
    std::vector<PauliHamiltonian> parts; ///< T, V_ext, W
    QubitState reference;
    /// Observables 0.5 (g_ij + g_ji) over orbitals i <= j, spin-summed.
    std::vector<PauliHamiltonian> rdm_observables;
    std::vector<std::pair<int, int>> rdm_index;
    int orbitals = 0;
};

/// Fermions: Jordan-Wigner (interleaved). Bosons: one-hot over the sector
/// basis, capped at `max_qubits`.
VqeProblem make_vqe_problem(const OneBodyMatrix& h, const InteractionSpec& w, const FockBasis& basis,
                            int max_qubits = 12);

/// Embeds Fock amplitudes into the register of make_vqe_problem.
QubitState encode_state(const Eigen::VectorXd& fock_amplitudes, const FockBasis& basis);

struct VqeOptions {
    int layers = 4;
    /// Double the depth (once per retry) when the optimizer reports failure.
    int depth_retries = 1;
    /// Extra random starts on top of theta = 0.
    int restarts = 2;
    double start_spread = 0.3;
    int max_iterations = 500;
    double gradient_tol = 1e-8;
    int simplex_evaluations = 400;
    double simplex_step = 0.2;
    std::uint64_t seed = 0;
};

struct VqeResult {
    double best_energy = 0.0;
    Eigen::VectorXd best_parameters;
    Eigen::MatrixXd one_rdm;
    /// Energy of every objective evaluation, in order.
    std::vector<double> energy_trace;
    int layers = 0;
    bool converged = false;
};

/// Noiseless: BFGS on exact energies with adjoint gradients. Noisy:
/// Nelder-Mead on sampled energies. best_energy is the running minimum.
VqeResult run_vqe(const PauliHamiltonian& h, const HvaAnsatz& ansatz, const VqeOptions& options,
                  const NoiseConfig& noise, const VqeProblem* rdm_source = nullptr);

/// run_vqe on a prepared problem, with depth doubling on failure.
VqeResult solve_vqe(const VqeProblem& problem, const VqeOptions& options, const NoiseConfig& noise);

} // namespace ftdmet
