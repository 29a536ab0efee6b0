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

#include "ftdmet/vqe/ansatz.hpp"

#include "ftdmet/common/error.hpp"

#include <Eigen/Eigenvalues>

namespace ftdmet {

HvaAnsatz::HvaAnsatz(std::vector<PauliHamiltonian> parts, QubitState reference, int layers)
  : parts_(std::move(parts)), reference_(std::move(reference)), layers_(layers) {
    if(layers < 0) throw DimensionError("HvaAnsatz: negative depth");
    if(parts_.empty()) throw DimensionError("HvaAnsatz: no generator parts");
    qubits_ = parts_.front().qubits();
    if(reference_.size() != (Eigen::Index{1} << qubits_))
        throw DimensionError("HvaAnsatz: reference state size does not match the register");
    if(std::abs(reference_.norm() - 1.0) > 1e-10)
        throw DimensionError("HvaAnsatz: reference state not normalized");
    for(const auto& part : parts_) {
        if(part.qubits() != qubits_) throw DimensionError("HvaAnsatz: parts on different registers");
        auto prop       = std::make_shared<Propagator>();
        prop->generator = part.sparse_matrix();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(Eigen::MatrixXcd(prop->generator));
        prop->values  = es.eigenvalues();
        prop->vectors = es.eigenvectors();
        props_.push_back(std::move(prop));
    }
}

HvaAnsatz HvaAnsatz::with_layers(int layers) const {
    HvaAnsatz copy = *this;
    if(layers < 0) throw DimensionError("HvaAnsatz: negative depth");
    copy.layers_ = layers;
    return copy;
}

void HvaAnsatz::evolve(std::size_t part, double theta, QubitState& psi) const {
    const auto& p = *props_[part];
    QubitState c  = p.vectors.adjoint() * psi;
    for(Eigen::Index k = 0; k < c.size(); ++k) c(k) *= std::exp(Complex(0.0, -theta * p.values(k)));
    psi = p.vectors * c;
}

QubitState HvaAnsatz::prepare(const Eigen::VectorXd& theta) const {
    if(theta.size() != parameter_count()) throw DimensionError("HvaAnsatz: wrong parameter count");
    QubitState psi       = reference_;
    const std::size_t np = parts_.size();
    for(int l = 0; l < layers_; ++l)
        for(std::size_t k = 0; k < np; ++k) evolve(k, theta(l * static_cast<Eigen::Index>(np) + static_cast<Eigen::Index>(k)), psi);
    return psi;
}

double HvaAnsatz::energy(const Eigen::SparseMatrix<Complex>& h, const Eigen::VectorXd& theta,
                         Eigen::VectorXd* gradient) const {
    QubitState psi   = prepare(theta);
    QubitState lam   = h * psi;
    const double e   = psi.dot(lam).real();
    if(!gradient) return e;

    const std::size_t np = parts_.size();
    gradient->resize(theta.size());
    for(Eigen::Index idx = theta.size() - 1; idx >= 0; --idx) {
        const std::size_t part = static_cast<std::size_t>(idx) % np;
        const QubitState gpsi  = props_[part]->generator * psi;
        (*gradient)(idx)       = 2.0 * lam.dot(gpsi).imag();
        // Step both states back through this gate.
        evolve(part, -theta(idx), psi);
        evolve(part, -theta(idx), lam);
    }
    return e;
}

int HvaAnsatz::gate_equivalents() const {
    int g = 0;
    for(const auto& p : parts_) g += p.gate_equivalents();
    return g * layers_;
}

} // namespace ftdmet
