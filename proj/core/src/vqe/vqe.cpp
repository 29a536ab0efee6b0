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

#include "ftdmet/vqe/vqe.hpp"

#include "ftdmet/common/error.hpp"
#include "ftdmet/common/optim.hpp"
#include "ftdmet/exact/ground_state.hpp"
#include "ftdmet/vqe/mapping.hpp"

#include <fmt/format.h>

namespace ftdmet {

Backend parse_backend(std::string_view name) {
    if(name == "ed") return Backend::ed;
    if(name == "vqe") return Backend::vqe;
    if(name == "vqe-noisy") return Backend::vqe_noisy;
    throw ConfigError(fmt::format("unknown backend '{}' (expected ed, vqe or vqe-noisy)", name));
}

std::string_view to_string(Backend b) {
    switch(b) {
        case Backend::ed: return "ed";
        case Backend::vqe: return "vqe";
        case Backend::vqe_noisy: return "vqe-noisy";
    }
    return "?";
}

QubitState encode_state(const Eigen::VectorXd& amps, const FockBasis& basis) {
    if(static_cast<std::size_t>(amps.size()) != basis.size())
        throw DimensionError("encode_state: amplitude count does not match basis");
    const bool fermion = basis.statistics().is_fermion();
    const int qubits   = fermion ? basis.modes() : static_cast<int>(basis.size());
    QubitState psi     = QubitState::Zero(Eigen::Index{1} << qubits);
    for(std::size_t s = 0; s < basis.size(); ++s) {
        std::uint32_t b = 0;
        if(fermion) {
            const auto occ = basis.state(s);
            for(int p = 0; p < basis.modes(); ++p)
                if(occ[p]) b |= 1u << p;
        } else {
            b = 1u << s;
        }
        psi(b) = amps(static_cast<Eigen::Index>(s));
    }
    return psi;
}

VqeProblem make_vqe_problem(const OneBodyMatrix& h, const InteractionSpec& w, const FockBasis& basis,
                            int max_qubits) {
    const int modes = basis.modes();
    if(h.size() != modes) throw DimensionError("make_vqe_problem: h does not match basis");
    VqeProblem prob;

    const Eigen::MatrixXd diag    = h.matrix().diagonal().asDiagonal();
    const Eigen::MatrixXd offdiag = h.matrix() - diag;
    const auto free_gs = ground_state(assemble_hamiltonian(h, InteractionSpec{}, basis));

    if(basis.statistics().is_fermion()) {
        if(modes > max_qubits)
            throw CapacityError(fmt::format("make_vqe_problem: {} qubits exceed cap {}", modes, max_qubits));
        const OneBodyMatrix zero(Eigen::MatrixXd::Zero(modes, modes));
        prob.hamiltonian = jordan_wigner(h, w);
        prob.parts       = {jordan_wigner(OneBodyMatrix(offdiag), {}), jordan_wigner(OneBodyMatrix(diag), {}),
                            jordan_wigner(zero, w)};
        prob.orbitals    = modes / 2;
        for(int i = 0; i < prob.orbitals; ++i)
            for(int j = i; j < prob.orbitals; ++j) {
                PauliSum op;
                for(int s = 0; s < 2; ++s) {
                    op += jw_hop(2 * i + s, 2 * j + s, modes) * Complex(0.5);
                    op += jw_hop(2 * j + s, 2 * i + s, modes) * Complex(0.5);
                }
                prob.rdm_observables.push_back(PauliHamiltonian::from_sum(modes, op));
                prob.rdm_index.emplace_back(i, j);
            }
    } else {
        const auto b = static_cast<int>(basis.size());
        if(b > max_qubits)
            throw CapacityError(fmt::format("make_vqe_problem: one-hot needs {} qubits, cap is {}", b, max_qubits));
        Eigen::MatrixXd wdiag = Eigen::MatrixXd::Zero(b, b);
        for(int s = 0; s < b; ++s) wdiag(s, s) = interaction_energy(w, basis.state(static_cast<std::size_t>(s)));
        const Eigen::MatrixXd t = fock_matrix(offdiag, basis), v = fock_matrix(diag, basis);
        prob.hamiltonian = one_hot_operator(t + v + wdiag, max_qubits);
        prob.parts = {one_hot_operator(t, max_qubits), one_hot_operator(v, max_qubits),
                      one_hot_operator(wdiag, max_qubits)};
        prob.orbitals = modes;
        for(int i = 0; i < modes; ++i)
            for(int j = i; j < modes; ++j) {
                Eigen::MatrixXd e = Eigen::MatrixXd::Zero(modes, modes);
                e(i, j) += 0.5;
                e(j, i) += 0.5;
                prob.rdm_observables.push_back(one_hot_operator(fock_matrix(e, basis), max_qubits));
                prob.rdm_index.emplace_back(i, j);
            }
    }
    prob.reference = encode_state(free_gs.vector, basis);
    return prob;
}

namespace {

Eigen::MatrixXd assemble_rdm(const VqeProblem& p, const std::vector<double>& values) {
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(p.orbitals, p.orbitals);
    for(std::size_t k = 0; k < values.size(); ++k) {
        const auto [i, j] = p.rdm_index[k];
        g(i, j) = g(j, i) = values[k];
    }
    return g;
}

} // namespace

VqeResult run_vqe(const PauliHamiltonian& h, const HvaAnsatz& ansatz, const VqeOptions& options,
                  const NoiseConfig& noise, const VqeProblem* rdm_source) {
    noise.validate();
    if(h.qubits() != ansatz.qubits()) throw DimensionError("run_vqe: Hamiltonian and ansatz registers differ");

    VqeResult res;
    res.layers      = ansatz.layers();
    res.best_energy = std::numeric_limits<double>::infinity();
    const Eigen::Index np = ansatz.parameter_count();
    res.best_parameters   = Eigen::VectorXd::Zero(np);

    auto record = [&](double e, const Eigen::VectorXd& theta) {
        res.energy_trace.push_back(e);
        if(e < res.best_energy) {
            res.best_energy     = e;
            res.best_parameters = theta;
        }
    };

    Rng rng(derive_seed(noise.rng_seed ^ 0x9a1f00dULL, options.seed));
    std::normal_distribution<double> normal(0.0, options.start_spread);
    auto start = [&](int r) {
        Eigen::VectorXd x = Eigen::VectorXd::Zero(np);
        if(r > 0)
            for(Eigen::Index i = 0; i < np; ++i) x(i) = normal(rng);
        return x;
    };

    if(noise.exact()) {
        const auto hm = h.sparse_matrix();
        optim::GradientObjective f = [&](const Eigen::VectorXd& theta, Eigen::VectorXd& g) {
            const double e = ansatz.energy(hm, theta, &g);
            record(e, theta);
            return e;
        };
        optim::BfgsOptions bo;
        bo.max_iterations = options.max_iterations;
        bo.gradient_tol   = options.gradient_tol;
        for(int r = 0; r <= options.restarts; ++r) {
            const auto out = optim::minimize_bfgs(f, start(r), bo);
            res.converged  = res.converged || out.converged;
        }
    } else {
        const MeasurementPlan plan({h});
        const double mixing = noise.mixing(ansatz.gate_equivalents());
        optim::Objective f  = [&](const Eigen::VectorXd& theta) {
            const double e = plan.sample(ansatz.prepare(theta), noise, mixing, rng).front();
            record(e, theta);
            return e;
        };
        optim::NelderMeadOptions no;
        no.max_evaluations = options.simplex_evaluations;
        no.initial_step    = options.simplex_step;
        no.value_tol       = 0.0;
        for(int r = 0; r <= options.restarts; ++r) {
            const auto out = optim::minimize_nelder_mead(f, r == 0 ? start(0) : res.best_parameters, no);
            res.converged  = res.converged || out.converged;
        }
        res.converged = true; // no stationarity test under shot noise
    }

    if(rdm_source) {
        const MeasurementPlan plan(rdm_source->rdm_observables);
        const QubitState psi = ansatz.prepare(res.best_parameters);
        const auto values    = plan.sample(psi, noise, noise.mixing(ansatz.gate_equivalents()), rng);
        res.one_rdm          = assemble_rdm(*rdm_source, values);
    }
    return res;
}

VqeResult solve_vqe(const VqeProblem& problem, const VqeOptions& options, const NoiseConfig& noise) {
    HvaAnsatz ansatz(problem.parts, problem.reference, options.layers);
    VqeResult best = run_vqe(problem.hamiltonian, ansatz, options, noise, &problem);
    int layers     = options.layers;
    for(int retry = 0; retry < options.depth_retries && !best.converged && noise.exact(); ++retry) {
        layers = std::max(1, 2 * layers);
        auto r = run_vqe(problem.hamiltonian, ansatz.with_layers(layers), options, noise, &problem);
        if(r.best_energy < best.best_energy || r.converged) best = std::move(r);
    }
    return best;
}

} // namespace ftdmet
