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
#include "ftdmet/vqe/pauli.hpp"

namespace ftdmet {

/// Qubit order for spin-orbitals: interleaved keeps qubit = spin-orbital
/// index; blocked puts all spin-up orbitals first.
enum class QubitOrdering { interleaved, blocked };

int qubit_of_mode(int mode, int modes, QubitOrdering ordering);

/// a^dagger_p a_q under Jordan-Wigner.
PauliSum jw_hop(int p, int q, int modes, QubitOrdering ordering = QubitOrdering::interleaved);

/// W + sum_pq h_pq a^dagger_p a_q over 2M spin-orbitals.
PauliHamiltonian jordan_wigner(const OneBodyMatrix& h, const InteractionSpec& w,
                               QubitOrdering ordering = QubitOrdering::interleaved);

/// Encodes a real symmetric matrix over a B-state basis on B qubits:
/// basis state k <-> only qubit k set.
PauliHamiltonian one_hot_operator(const Eigen::MatrixXd& matrix, int max_qubits = 16);

PauliHamiltonian boson_one_hot(const ManyBodyHamiltonian& h, int max_qubits = 16);

/// Fock-basis matrix of a one-body operator sum_pq o_pq a^dagger_p a_q.
Eigen::MatrixXd fock_matrix(const Eigen::MatrixXd& one_body, const FockBasis& basis);

} // namespace ftdmet
