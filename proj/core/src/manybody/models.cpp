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

#include "ftdmet/manybody/models.hpp"

#include "ftdmet/common/error.hpp"

#include <fmt/format.h>

namespace ftdmet {

namespace {

std::vector<double> per_site(const std::vector<double>& v, int sites, const char* what) {
    if(v.empty()) return std::vector<double>(sites, 0.0);
    if(v.size() == 1) return std::vector<double>(sites, v.front());
    if(static_cast<int>(v.size()) != sites)
        throw DimensionError(fmt::format("{}: expected 1 or {} values, got {}", what, sites, v.size()));
    return v;
}

} // namespace

OneBodyMatrix ModelSpace::expand(const Eigen::MatrixXd& orbital_h) const {
    if(orbital_h.rows() != orbitals || orbital_h.cols() != orbitals)
        throw DimensionError(fmt::format("ModelSpace: expected {0}x{0} orbital matrix", orbitals));
    return statistics.is_fermion() ? OneBodyMatrix::spin_diagonal(orbital_h) : OneBodyMatrix(orbital_h);
}

int offdiag_count(int orbitals) { return orbitals * (orbitals - 1) / 2; }

Eigen::VectorXd pack_offdiag(const Eigen::MatrixXd& m) {
    const auto n = static_cast<int>(m.rows());
    Eigen::VectorXd v(offdiag_count(n));
    int k = 0;
    for(int i = 0; i < n; ++i)
        for(int j = i + 1; j < n; ++j) v(k++) = m(i, j);
    return v;
}

Eigen::MatrixXd unpack_offdiag(const Eigen::VectorXd& offdiag, const Eigen::VectorXd& diag) {
    const auto n = static_cast<int>(diag.size());
    if(offdiag.size() != offdiag_count(n)) throw DimensionError("unpack_offdiag: size mismatch");
    Eigen::MatrixXd m = diag.asDiagonal();
    int k = 0;
    for(int i = 0; i < n; ++i)
        for(int j = i + 1; j < n; ++j) m(i, j) = m(j, i) = offdiag(k++);
    return m;
}

Eigen::MatrixXd chain_hopping(int sites, double t, bool periodic) {
    if(sites < 1) throw DimensionError("chain_hopping: need at least one site");
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(sites, sites);
    for(int i = 0; i + 1 < sites; ++i) h(i, i + 1) = h(i + 1, i) = t;
    if(periodic && sites > 2) h(0, sites - 1) = h(sites - 1, 0) = t;
    return h;
}

LatticeSystem bose_hubbard(const BoseHubbardParams& p) {
    const auto w = per_site(p.w, p.sites, "bose_hubbard w");
    const auto v = per_site(p.v_ext, p.sites, "bose_hubbard v_ext");
    Eigen::MatrixXd h = chain_hopping(p.sites, p.t, p.periodic);
    for(int i = 0; i < p.sites; ++i) h(i, i) = v[i];

    InteractionSpec spec;
    spec.set_boson_convention(p.convention);
    for(int i = 0; i < p.sites; ++i)
        if(w[i] != 0.0) spec.add_bosonic_onsite(i, w[i]);

    const int cap = p.max_occupancy > 0 ? p.max_occupancy : std::max(1, p.particles);
    return {OneBodyMatrix(std::move(h)), std::move(spec), Statistics::boson(cap),
            Sector::total(p.particles), p.sites, 1};
}

LatticeSystem fermi_hubbard(const FermiHubbardParams& p) {
    const auto u = per_site(p.u, p.sites, "fermi_hubbard u");
    const auto v = per_site(p.v_ext, p.sites, "fermi_hubbard v_ext");
    Eigen::MatrixXd h = chain_hopping(p.sites, p.t, p.periodic);
    for(int i = 0; i < p.sites; ++i) h(i, i) = v[i];

    InteractionSpec spec;
    for(int i = 0; i < p.sites; ++i)
        if(u[i] != 0.0) spec.add_fermionic_onsite(i, u[i]);

    return {OneBodyMatrix::spin_diagonal(h), std::move(spec), Statistics::fermion(),
            Sector::spins(p.n_up, p.n_down), p.sites, 1};
}

LatticeSystem two_band_hubbard(const TwoBandParams& p) {
    const int orbitals = 2 * p.sites;
    const Eigen::MatrixXd chain = chain_hopping(p.sites, p.t_intersite, p.periodic);

    InteractionSpec spec;
    for(int i = 0; i < p.sites; ++i) {
        for(int band = 0; band < 2; ++band) {
            if(p.w0 != 0.0) spec.add_fermionic_onsite(2 * i + band, p.w0);
            if(p.w1 == 0.0) continue;
            const int o = 2 * i + band, other = 2 * i + 1 - band;
            for(int s = 0; s < 2; ++s) spec.add_density_density(2 * o + s, 2 * other + 1 - s, p.w1);
        }
    }

    if(p.hopping == HoppingConvention::spin_conserving) {
        Eigen::MatrixXd h = Eigen::MatrixXd::Zero(orbitals, orbitals);
        for(int i = 0; i < p.sites; ++i) {
            h(2 * i, 2 * i + 1) = h(2 * i + 1, 2 * i) = p.t_interband;
            for(int k = 0; k < p.sites; ++k)
                for(int band = 0; band < 2; ++band)
                    if(chain(i, k) != 0.0) h(2 * i + band, 2 * k + band) = chain(i, k);
        }
        return {OneBodyMatrix::spin_diagonal(h), std::move(spec), Statistics::fermion(),
                Sector::spins(p.n_up, p.n_down), orbitals, 2};
    }

    // Printed form: every hop flips the spin, so only total N is conserved.
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(2 * orbitals, 2 * orbitals);
    auto hop = [&](int a, int b, double t) {
        for(int s = 0; s < 2; ++s) h(2 * a + s, 2 * b + 1 - s) = h(2 * b + 1 - s, 2 * a + s) = t;
    };
    for(int i = 0; i < p.sites; ++i) {
        hop(2 * i, 2 * i + 1, p.t_interband);
        for(int k = i + 1; k < p.sites; ++k)
            for(int band = 0; band < 2; ++band)
                if(chain(i, k) != 0.0) hop(2 * i + band, 2 * k + band, chain(i, k));
    }
    return {OneBodyMatrix(std::move(h)), std::move(spec), Statistics::fermion(),
            Sector::total(p.n_up + p.n_down), orbitals, 2};
}

} // namespace ftdmet
