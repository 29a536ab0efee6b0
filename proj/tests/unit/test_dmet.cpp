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

#include "ftdmet/bench/reference.hpp"
#include "ftdmet/common/error.hpp"
#include "ftdmet/dmet/dmet.hpp"
#include "ftdmet/exact/ground_state.hpp"
#include "ftdmet/manybody/models.hpp"

#include <catch_amalgamated.hpp>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>

using namespace ftdmet;
using Catch::Approx;

namespace {

LatticeSystem ring(int sites, double u, double t) {
    FermiHubbardParams p;
    p.sites = sites, p.n_up = sites / 2, p.n_down = sites / 2, p.u = {u}, p.t = t;
    return fermi_hubbard(p);
}

// Trapezoid rule on a fine grid; the integrand tends to 1/2 at w = 0.
double bethe_oracle(double u) {
    const double w_max = 60.0;
    const int steps    = 600000;
    const double dw    = w_max / steps;
    auto f = [u](double w) {
        if(w == 0.0) return 0.5 / 2.0;
        return std::cyl_bessel_j(0.0, w) * std::cyl_bessel_j(1.0, w) / (w * (1.0 + std::exp(w * u / 2.0)));
    };
    double s = 0.5 * (f(0.0) + f(w_max));
    for(int k = 1; k < steps; ++k) s += f(k * dw);
    return -4.0 * s * dw;
}

} // namespace

TEST_CASE("Bethe energy at U=0 is -4/pi", "[reference]") {
    CHECK(bethe_half_filling(0.0) == Approx(-4.0 / std::numbers::pi).margin(1e-8));
}

TEST_CASE("Bethe energy at U=4 matches quadrature", "[reference]") {
    CHECK(bethe_half_filling(4.0) == Approx(bethe_oracle(4.0)).margin(1e-6));
    CHECK(bethe_half_filling(1.0, -0.5) == Approx(0.5 * bethe_half_filling(2.0)).margin(1e-12));
}

TEST_CASE("restricted HF on a half-filled ring adds U/4 per site", "[reference]") {
    const auto free = ring(6, 0.0, -1.0);
    const double e0 = energy_of(free).energy;
    const auto hf   = hartree_fock(ring(6, 2.0, -1.0));
    CHECK(hf.energy == Approx(e0 + 6 * 2.0 / 4.0).margin(1e-8));
    CHECK((hf.gamma_up - hf.gamma_down).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(hf.gamma_up.trace() == Approx(3.0).margin(1e-10));
}

TEST_CASE("HF is an upper bound on the exact energy", "[reference]") {
    const auto s = ring(6, 1.0, -0.5);
    CHECK(hartree_fock(s).energy >= energy_of(s).energy - 1e-10);
}

TEST_CASE("boson mean field occupies the lowest orbital", "[mean_field]") {
    Eigen::MatrixXd h(2, 2);
    h << 0.0, -1.0, -1.0, 0.0;
    const auto g = mean_field_boson(h, 2);
    CHECK(g.isApprox(Eigen::MatrixXd::Ones(2, 2), 1e-12));
}

TEST_CASE("degenerate fermion filling triggers the offset", "[mean_field]") {
    const auto s = ring(4, 0.0, -1.0);
    const auto closed = mean_field_fermion(ring(6, 0.0, -1.0).orbital_h(), 3, 3, 0.01);
    CHECK_FALSE(closed.offset_applied);
    const auto open = mean_field_fermion(s.orbital_h(), 2, 2, 0.01);
    CHECK(open.offset_applied);
    CHECK_FALSE(open.degenerate);
    CHECK(open.gamma.trace() == Approx(4.0).margin(1e-12));
}

TEST_CASE("projector rows are orthonormal and start with the fragment", "[projector]") {
    const auto s    = ring(8, 0.0, -1.0);
    const auto mf   = mean_field_fermion(s.orbital_h(), 4, 4, 0.01);
    const auto frag = site_fragment(0, 2, 1, 8);
    const auto p    = build_projector(mf.gamma, frag, s.statistics, s.orbital_h());
    CHECK(p.fragment_size == 2);
    CHECK(p.bath_count == 2);
    const Eigen::MatrixXd gram = p.matrix * p.matrix.transpose();
    CHECK((gram - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(p.matrix(0, 0) == Approx(1.0));
    CHECK(p.matrix(1, 1) == Approx(1.0));
    CHECK(p.matrix.bottomRows(2).leftCols(2).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("polar gauge makes the fragment-bath block symmetric", "[projector]") {
    TwoBandParams tb;
    tb.sites = 3, tb.n_up = 3, tb.n_down = 3, tb.t_intersite = 0.5;
    const auto s    = two_band_hubbard(tb);
    const auto mf   = mean_field_fermion(s.orbital_h(), 3, 3, 0.01);
    const auto frag = site_fragment(0, 1, 2, 3);
    const auto p    = build_projector(mf.gamma, frag, s.statistics, s.orbital_h());
    REQUIRE(p.bath_count == 2);
    const Eigen::MatrixXd he = p.matrix * s.orbital_h() * p.matrix.transpose();
    const Eigen::MatrixXd b  = he.topRightCorner(2, 2);
    CHECK((b - b.transpose()).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(b).eigenvalues().minCoeff() >= -1e-10);
}

TEST_CASE("embedded problem keeps the mean-field particle count", "[embed]") {
    const auto s    = ring(6, 2.0, -1.0);
    const auto mf   = mean_field_fermion(s.orbital_h(), 3, 3, 0.01);
    const auto frag = site_fragment(0, 1, 1, 6);
    const auto p    = build_projector(mf.gamma, frag, s.statistics, s.orbital_h());
    const auto e    = embed(s.orbital_h(), s.interaction, s.statistics, p, frag, mf.gamma);
    CHECK(e.orbitals() == 2);
    CHECK(e.particle_target == Approx(2.0).margin(1e-10));
    CHECK(e.fragment_target == Approx(1.0).margin(1e-10));
    CHECK(e.sector() == Sector::spins(1, 1));
}

TEST_CASE("DMET is exact for a non-interacting ring", "[dmet]") {
    const auto s = ring(6, 0.0, -1.0);
    DmetConfig c;
    c.solver = EmbeddedSolver::exact;
    const auto r = run_dmet(nullptr, s, site_fragment(0, 1, 1, 6), c);
    CHECK(r.e_total == Approx(energy_of(s).energy).margin(1e-8));
}

TEST_CASE("DMET with an exact functional matches the exact embedded solve", "[dmet]") {
    const auto s = ring(6, 1.0, -0.5);
    const auto frag = site_fragment(0, 1, 1, 6);
    FermiHubbardParams p;
    p.sites = 1, p.u = {1.0}, p.periodic = false;
    const FunctionalPtr f =
        std::make_shared<ExactFunctional>(ModelSpace{Statistics::fermion(), 2, Sector::spins(1, 1), fermi_hubbard(p).interaction});
    DmetConfig exact;
    exact.solver = EmbeddedSolver::exact;
    DmetConfig func;
    func.minimizer.restarts = 2;
    const auto a = run_dmet(nullptr, s, frag, exact);
    const auto b = run_dmet(f, s, frag, func);
    CHECK(b.e_total == Approx(a.e_total).margin(1e-5));
    CHECK(b.n_bar.sum() == Approx(2.0).margin(1e-8));
}

TEST_CASE("invalid fragments are reported", "[dmet]") {
    FragmentSpec f{{0, 9}, 1};
    CHECK_THROWS(f.validate(4));
}
