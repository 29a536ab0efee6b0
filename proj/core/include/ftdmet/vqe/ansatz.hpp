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

#include "ftdmet/vqe/pauli.hpp"

#include <memory>
#include <vector>

namespace ftdmet {

/// Hamiltonian variational ansatz: p layers of exp(-i theta G) over the
/// generator parts in fixed order. Parameter index = layer * parts + part.
class HvaAnsatz {
public:
    HvaAnsatz(std::vector<PauliHamiltonian> parts, QubitState reference, int layers);

    int layers() const noexcept { return layers_; }
    int qubits() const noexcept { return qubits_; }
    int parameter_count() const noexcept { return layers_ * static_cast<int>(parts_.size()); }
    const std::vector<PauliHamiltonian>& parts() const noexcept { return parts_; }
    const QubitState& reference() const noexcept { return reference_; }

    HvaAnsatz with_layers(int layers) const;

    QubitState prepare(const Eigen::VectorXd& theta) const;

    /// <H> at theta; when `gradient` is non-null it receives the exact
    /// derivative computed by adjoint back-propagation.
    double energy(const Eigen::SparseMatrix<Complex>& h, const Eigen::VectorXd& theta,
                  Eigen::VectorXd* gradient = nullptr) const;

    /// Two-qubit gate equivalents of the whole circuit.
    int gate_equivalents() const;

private:
    struct Propagator {
        Eigen::MatrixXcd vectors;
        Eigen::VectorXd values;
        Eigen::SparseMatrix<Complex> generator;
    };

    void evolve(std::size_t part, double theta, QubitState& psi) const;

    std::vector<PauliHamiltonian> parts_;
    std::vector<std::shared_ptr<const Propagator>> props_;
    QubitState reference_;
    int layers_ = 0;
    int qubits_ = 0;
};

} // namespace ftdmet
