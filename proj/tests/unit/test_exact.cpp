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
#include "ftdmet/exact/legendre.hpp"
#include "ftdmet/manybody/models.hpp"

#include <catch_amalgamated.hpp>

#include <Eigen/Eigenvalues>
#include <cmath>

using namespace ftdmet;
using Catch::Approx;

namespace {

LatticeSystem dimer(double u0, double u1, double t) {
    FermiHubbardParams p;
    p.sites = 2, p.u = {u0, u1}, p.t = t;
    return fermi_hubbard(p);
}

double dense_e0(const LatticeSystem& s) {
    const Eigen::MatrixXd m(assemble_hamiltonian(s.h, s.interaction, s.basis()).matrix());
    return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m).eigenvalues()(0);
}

} // namespace

TEST_CASE("Hubbard dimer U=[1,0], t=-0.25 matches dense diagonalization", "[ground_state]") {
    const auto s = dimer(1.0, 0.0, -0.25);
    const auto r = energy_of(s);
    CHECK(r.energy == Approx(dense_e0(s)).margin(1e-12));
    CHECK(r.state.vector.norm() == Approx(1.0).margin(1e-10));
}

TEST_CASE("Bose dimer with free site 1 avoids double occupancy of site 0", "[ground_state]") {
    BoseHubbardParams p;
    p.sites = 2, p.particles = 2, p.w = {1.0, 0.0}, p.t = 0.0;
    const auto s = bose_hubbard(p);
    const auto r = energy_of(s);
    CHECK(r.energy == Approx(0.0).margin(1e-12));
    CHECK(r.state.degenerate); // |11> and |02>
    CHECK(std::abs(r.state.vector(0)) < 1e-10);
}

TEST_CASE("free chain energy is twice the lowest orbital sum", "[ground_state]") {
    FermiHubbardParams p;
    p.sites = 6, p.n_up = 3, p.n_down = 3, p.u = {0.0}, p.t = -1.0, p.periodic = false;
    const auto s = fermi_hubbard(p);
    const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(s.orbital_h()).eigenvalues();
    CHECK(energy_of(s).energy == Approx(2.0 * ev.head(3).sum()).margin(1e-10));
}

TEST_CASE("iterative solver agrees with the dense path", "[ground_state]") {
    FermiHubbardParams p;
    p.sites = 8, p.n_up = 4, p.n_down = 4, p.u = {2.0}, p.t = -1.0, p.periodic = false;
    const auto s = fermi_hubbard(p);
    SolverOptions iterative;
    iterative.force_iterative = true;
    const auto a = energy_of(s);
    const auto b = energy_of(s, iterative);
    CHECK(a.energy == Approx(b.energy).margin(1e-9));
    CHECK((a.gamma - b.gamma).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("energy is below every basis-state Rayleigh quotient", "[ground_state]") {
    const auto s   = dimer(2.0, 2.0, -0.8);
    const auto ham = assemble_hamiltonian(s.h, s.interaction, s.basis());
    const double e = ground_state(ham).energy;
    for(Eigen::Index i = 0; i < ham.matrix().rows(); ++i) CHECK(e <= ham.matrix().coeff(i, i) + 1e-12);
}

TEST_CASE("one-RDM examples", "[rdm]") {
    SECTION("both electrons on a deep site 0") {
        Eigen::MatrixXd h = Eigen::MatrixXd::Zero(2, 2);
        h(0, 0) = -10.0;
        const ModelSpace sp{Statistics::fermion(), 2, Sector::spins(1, 1), {}};
        CHECK(solve_orbital(sp, h).gamma.isApprox(Eigen::Vector2d(2, 0).asDiagonal().toDenseMatrix(), 1e-10));
    }
    SECTION("free dimer bonding orbital") {
        const auto g = energy_of(dimer(0.0, 0.0, -1.0)).gamma;
        CHECK(g.isApprox(Eigen::MatrixXd::Ones(2, 2), 1e-10));
    }
    SECTION("trace and spectrum bounds") {
        const auto g = energy_of(dimer(1.0, 0.0, -0.4)).gamma;
        CHECK((g - g.transpose()).cwiseAbs().maxCoeff() < 1e-12);
        CHECK(g.trace() == Approx(2.0).margin(1e-10));
        const auto ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(g).eigenvalues();
        CHECK(ev.minCoeff() >= -1e-12);
        CHECK(ev.maxCoeff() <= 2.0 + 1e-12);
    }
}

TEST_CASE("off-diagonal 1-RDM is the energy slope in h_01", "[rdm]") {
    const auto s = dimer(1.0, 0.0, -0.5);
    const double g01 = energy_of(s).gamma(0, 1);
    const double d   = 1e-5;
    const double ep  = energy_of(dimer(1.0, 0.0, -0.5 + d)).energy;
    const double em  = energy_of(dimer(1.0, 0.0, -0.5 - d)).energy;
    CHECK((ep - em) / (2 * d) == Approx(2.0 * g01).margin(1e-7));
}

TEST_CASE("double occupancy limits", "[rdm]") {
    const auto free = dimer(0.0, 0.0, -1.0);
    const auto gs   = energy_of(free);
    CHECK(double_occupancy(gs.state, free.basis(), 0) == Approx(0.25).margin(1e-10));
    const auto strong = dimer(1e4, 1e4, -1.0);
    CHECK(double_occupancy(energy_of(strong).state, strong.basis(), 0) < 1e-3);
    const auto mixed = dimer(1.0, 0.0, -0.25);
    const double d   = double_occupancy(energy_of(mixed).state, mixed.basis(), 0);
    CHECK(d > 0.0);
    CHECK(d < 0.25);
}

TEST_CASE("Legendre density functional reproduces a sampled ground state", "[legendre]") {
    const ModelSpace sp{Statistics::fermion(), 2, Sector::spins(1, 1), dimer(1.0, 0.0, 0.0).interaction};
    Eigen::MatrixXd h(2, 2);
    h << 0.4, -0.7, -0.7, -0.3;
    const auto gs = solve_orbital(sp, h);
    const Eigen::VectorXd n = gs.gamma.diagonal();
    Eigen::MatrixXd off = h;
    off.diagonal().setZero();
    const auto r = legendre_density(sp, n, off);
    CHECK(r.converged);
    CHECK(r.value == Approx(gs.energy - h.diagonal().dot(n)).margin(1e-9));
}

TEST_CASE("Legendre RDM functional equals the interaction energy", "[legendre]") {
    const ModelSpace sp{Statistics::fermion(), 2, Sector::spins(1, 1), dimer(1.0, 0.0, 0.0).interaction};
    Eigen::MatrixXd h(2, 2);
    h << 0.2, -0.5, -0.5, 0.0;
    const auto gs = solve_orbital(sp, h);
    const auto r  = legendre_rdm(sp, gs.gamma);
    CHECK(r.value == Approx(gs.energy - (h.array() * gs.gamma.array()).sum()).margin(1e-8));
}
