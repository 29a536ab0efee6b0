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

#include "ftdmet/common/error.hpp"
#include "ftdmet/common/random.hpp"
#include "ftdmet/exact/ground_state.hpp"
#include "ftdmet/manybody/models.hpp"
#include "ftdmet/vqe/ansatz.hpp"
#include "ftdmet/vqe/mapping.hpp"
#include "ftdmet/vqe/measurement.hpp"
#include "ftdmet/vqe/vqe.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>

using namespace ftdmet;
using Catch::Approx;

namespace {

LatticeSystem dimer(double u, double t) {
    FermiHubbardParams p;
    p.sites = 2, p.u = {u}, p.t = t;
    return fermi_hubbard(p);
}

} // namespace

TEST_CASE("Pauli products carry the right phase", "[pauli]") {
    const auto [phase, r] = multiply(PauliString::from_letters("X"), PauliString::from_letters("Y"));
    CHECK(r == PauliString::from_letters("Z"));
    CHECK(std::abs(phase - Complex(0, 1)) < 1e-15);
    CHECK(PauliString::from_letters("XYZI").letters(4) == "XYZI");
    CHECK(PauliString::from_letters("XYZI").weight() == 3);
}

TEST_CASE("number operator maps to (I - Z)/2", "[mapping]") {
    const auto n0 = PauliHamiltonian::from_sum(2, jw_hop(0, 0, 2));
    REQUIRE(n0.terms().size() == 2);
    for(const auto& t : n0.terms()) {
        if(t.string.is_identity()) CHECK(t.coefficient == Approx(0.5));
        else {
            CHECK(t.string == PauliString::from_letters("ZI"));
            CHECK(t.coefficient == Approx(-0.5));
        }
    }
}

TEST_CASE("hopping operators anticommute correctly across the string", "[mapping]") {
    // {a+_0 a_2, a+_2 a_0} product structure: (a+_0 a_2)^dagger = a+_2 a_0.
    const Eigen::MatrixXcd a = PauliHamiltonian::from_sum(3, jw_hop(0, 2, 3) + jw_hop(2, 0, 3)).matrix();
    CHECK((a - a.adjoint()).cwiseAbs().maxCoeff() < 1e-14);
    // |100> (qubit 0 set, index 1) hops to qubit 2 (index 4) with the string over qubit 1 empty.
    CHECK(std::abs(a(4, 1) - Complex(1, 0)) < 1e-14);
    // With qubit 1 occupied the sign flips.
    CHECK(std::abs(a(6, 3) - Complex(-1, 0)) < 1e-14);
}

TEST_CASE("Jordan-Wigner Hamiltonian has the ED ground state as an eigenvector", "[mapping]") {
    const auto s  = dimer(2.0, -0.7);
    const auto gs = energy_of(s);
    const auto hq = jordan_wigner(s.h, s.interaction);
    const QubitState psi = encode_state(gs.state.vector, s.basis());
    CHECK(psi.norm() == Approx(1.0).margin(1e-12));
    CHECK(hq.expectation(psi) == Approx(gs.energy).margin(1e-10));
    CHECK((hq.apply(psi) - gs.energy * psi).norm() < 1e-10);
}

TEST_CASE("boson one-hot encoding reproduces the sector spectrum", "[mapping]") {
    BoseHubbardParams p;
    p.sites = 2, p.particles = 2, p.w = {1.0, 0.5}, p.t = -0.6;
    const auto s   = bose_hubbard(p);
    const auto ham = assemble_hamiltonian(s.h, s.interaction, s.basis());
    const auto hq  = boson_one_hot(ham);
    CHECK(hq.qubits() == 3);
    const Eigen::MatrixXd dense(ham.matrix());
    const Eigen::MatrixXcd q = hq.matrix();
    for(int i = 0; i < 3; ++i)
        for(int j = 0; j < 3; ++j) CHECK(std::abs(q(1 << i, 1 << j) - dense(i, j)) < 1e-12);
}

TEST_CASE("fock_matrix agrees with the assembled one-body part", "[mapping]") {
    const auto s = dimer(0.0, -0.3);
    Eigen::MatrixXd h = s.orbital_h();
    h(0, 0) = 0.25;
    const ModelSpace sp{Statistics::fermion(), 2, Sector::spins(1, 1), {}};
    const Eigen::MatrixXd a = fock_matrix(sp.expand(h).matrix(), s.basis());
    const Eigen::MatrixXd b(assemble_hamiltonian(sp.expand(h), {}, s.basis()).matrix());
    CHECK((a - b).cwiseAbs().maxCoeff() < 1e-14);
    CHECK_THROWS_AS(fock_matrix(h, s.basis()), DimensionError);
}

TEST_CASE("qubit-wise grouping", "[measurement]") {
    const auto xx = PauliString::from_letters("XX");
    const auto xi = PauliString::from_letters("XI");
    const auto zz = PauliString::from_letters("ZZ");
    const auto groups = group_qubitwise({xx, xi, zz});
    CHECK(groups.size() == 2);
    for(const auto& g : groups)
        for(const auto& s : g.strings)
            for(int q = 0; q < 2; ++q) {
                const bool used = ((s.x | s.z) >> q) & 1u;
                if(used) CHECK((((s.x ^ g.basis.x) | (s.z ^ g.basis.z)) >> q & 1u) == 0u);
            }
}

TEST_CASE("zero-shot sampling is exact and noise mixes towards identity", "[measurement]") {
    const auto s   = dimer(1.0, -0.5);
    const auto gs  = energy_of(s);
    const auto hq  = jordan_wigner(s.h, s.interaction);
    const auto psi = encode_state(gs.state.vector, s.basis());
    CHECK(sampled_expectation(psi, hq, NoiseConfig::noiseless()) == Approx(gs.energy).margin(1e-12));

    NoiseConfig noise;
    noise.depolarizing_rate = 0.01;
    CHECK(noise.mixing(0) == Approx(0.0));
    CHECK(noise.mixing(10) > noise.mixing(1));
    CHECK(noise.mixing(10) < 1.0);

    const MeasurementPlan plan({hq});
    Rng rng(7);
    CHECK(plan.sample(psi, NoiseConfig::noiseless(), 0.0, rng)[0] == Approx(gs.energy).margin(1e-12));
    // Fully mixed limit: the normalized trace.
    const double trace = hq.matrix().trace().real() / 16.0;
    CHECK(plan.noisy_limit(psi, noise, 1.0)[0] == Approx(trace).margin(1e-12));
}

TEST_CASE("shot estimates scatter around the exact value", "[measurement]") {
    const auto s   = dimer(1.0, -0.5);
    const auto gs  = energy_of(s);
    const auto hq  = jordan_wigner(s.h, s.interaction);
    const auto psi = encode_state(gs.state.vector, s.basis());
    NoiseConfig noise;
    noise.shots = 20000;
    double mean = 0.0;
    for(std::uint64_t k = 0; k < 20; ++k) {
        noise.rng_seed = k;
        mean += sampled_expectation(psi, hq, noise) / 20.0;
    }
    CHECK(mean == Approx(gs.energy).margin(0.02));
}

TEST_CASE("adjoint gradient matches finite differences", "[ansatz]") {
    const auto s    = dimer(4.0, -1.0);
    const auto prob = make_vqe_problem(s.h, s.interaction, s.basis());
    const HvaAnsatz ansatz(prob.parts, prob.reference, 2);
    const auto h = prob.hamiltonian.sparse_matrix();
    Rng rng(11);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    Eigen::VectorXd theta(ansatz.parameter_count());
    for(Eigen::Index i = 0; i < theta.size(); ++i) theta(i) = u(rng);
    Eigen::VectorXd grad;
    ansatz.energy(h, theta, &grad);
    REQUIRE(grad.size() == theta.size());
    for(Eigen::Index i = 0; i < theta.size(); ++i) {
        Eigen::VectorXd tp = theta, tm = theta;
        tp(i) += 1e-6, tm(i) -= 1e-6;
        CHECK((ansatz.energy(h, tp) - ansatz.energy(h, tm)) / 2e-6 == Approx(grad(i)).margin(1e-6));
    }
    CHECK(ansatz.prepare(theta).norm() == Approx(1.0).margin(1e-12));
}

TEST_CASE("noiseless VQE reaches the dimer ground energy", "[vqe]") {
    const auto s    = dimer(1.0, -0.3);
    const auto prob = make_vqe_problem(s.h, s.interaction, s.basis());
    VqeOptions opts;
    opts.seed = 5;
    const auto r = solve_vqe(prob, opts, NoiseConfig::noiseless());
    const auto gs = energy_of(s);
    CHECK(r.best_energy == Approx(gs.energy).margin(1e-6));
    CHECK((r.one_rdm - gs.gamma).cwiseAbs().maxCoeff() < 1e-4);
    for(double e : r.energy_trace) CHECK(e >= gs.energy - 1e-10);
}

TEST_CASE("backend names round-trip", "[vqe]") {
    for(auto b : {Backend::ed, Backend::vqe, Backend::vqe_noisy}) CHECK(parse_backend(to_string(b)) == b);
}
