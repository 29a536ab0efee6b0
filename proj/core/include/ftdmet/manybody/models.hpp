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

#include "ftdmet/manybody/fock_basis.hpp"
#include "ftdmet/manybody/operators.hpp"

#include <vector>

namespace ftdmet {

/// The space a functional is defined on: interaction, statistics and
/// particle sector over `orbitals` spatial orbitals. The one-body part is
/// supplied separately, as an orbital matrix.
struct ModelSpace {
    Statistics statistics;
    int orbitals = 0;
    Sector sector;
    InteractionSpec interaction;

    int modes() const noexcept { return statistics.is_fermion() ? 2 * orbitals : orbitals; }
    FockBasis basis() const { return FockBasis(modes(), sector, statistics); }

    /// Orbital matrix -> mode matrix (spin-diagonal copy for fermions).
    OneBodyMatrix expand(const Eigen::MatrixXd& orbital_h) const;
};

/// Upper-triangle entries (0,1), (0,2), ..., (1,2), ... of a square matrix.
Eigen::VectorXd pack_offdiag(const Eigen::MatrixXd& m);
/// Symmetric matrix with the given off-diagonal entries and diagonal `diag`.
Eigen::MatrixXd unpack_offdiag(const Eigen::VectorXd& offdiag, const Eigen::VectorXd& diag);
int offdiag_count(int orbitals);

/// A lattice model ready for exact solution or embedding.
/// `orbitals` counts spatial orbitals; fermionic h is over 2 * orbitals
/// spin-orbitals, bosonic h over the orbitals themselves.
struct LatticeSystem {
    OneBodyMatrix h;
    InteractionSpec interaction;
    Statistics statistics;
    Sector sector;
    int orbitals = 0;
    int orbitals_per_site = 1;

    int modes() const noexcept { return statistics.is_fermion() ? 2 * orbitals : orbitals; }
    FockBasis basis() const { return FockBasis(modes(), sector, statistics); }

    ModelSpace space() const { return {statistics, orbitals, sector, interaction}; }

    /// Orbital-space one-body matrix (the spatial block for fermions).
    Eigen::MatrixXd orbital_h() const {
        return statistics.is_fermion() ? h.orbital_part() : h.matrix();
    }
};

/// Nearest-neighbour hopping t on a chain; `periodic` adds the wrap bond
/// once (for two sites the wrap bond is the 0-1 bond itself).
Eigen::MatrixXd chain_hopping(int sites, double t, bool periodic);

struct BoseHubbardParams {
    int sites = 2;
    int particles = 2;
    std::vector<double> w{1.0};  ///< one value for all sites, or one per site
    double t = -0.5;
    std::vector<double> v_ext{}; ///< empty means zero
    bool periodic = true;
    BosonConvention convention = BosonConvention::n_n_minus_one;
    int max_occupancy = 0;       ///< 0 means the particle number
};

LatticeSystem bose_hubbard(const BoseHubbardParams& p);

struct FermiHubbardParams {
    int sites = 2;
    int n_up = 1;
    int n_down = 1;
    std::vector<double> u{1.0};
    double t = -1.0;
    std::vector<double> v_ext{};
    bool periodic = true;
};

LatticeSystem fermi_hubbard(const FermiHubbardParams& p);

enum class HoppingConvention { spin_conserving, spin_flip };

struct TwoBandParams {
    int sites = 2;
    int n_up = 2;
    int n_down = 2;
    double w0 = 3.0;
    double w1 = 1.0;
    double t_interband = 1.0;
    double t_intersite = 0.1;
    bool periodic = true;
    HoppingConvention hopping = HoppingConvention::spin_conserving;
};

/// Orbital 2 * site + band. The inter-orbital interaction is
/// w1 * sum_band sum_sigma n_{band sigma} n_{other band, opposite sigma}.
LatticeSystem two_band_hubbard(const TwoBandParams& p);

} // namespace ftdmet
