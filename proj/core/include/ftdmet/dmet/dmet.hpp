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

#include "ftdmet/common/optim.hpp"
#include "ftdmet/dnn/functional.hpp"
#include "ftdmet/manybody/models.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ftdmet {

/// Orbital indices of one fragment; `copies` identical fragments tile the
/// lattice.
struct FragmentSpec {
    std::vector<int> indices;
    int copies = 1;

    void validate(int orbitals) const;
};

/// Fragment holding sites [site * per_site, (site + 1) * per_site) for
/// `sites` consecutive sites, tiling a lattice of `total_sites`.
FragmentSpec site_fragment(int first_site, int sites, int orbitals_per_site, int total_sites);

/// N v0 v0^T with v0 the lowest orbital of h; on a degenerate lowest level
/// v0 is the uniform vector projected onto that level.
Eigen::MatrixXd mean_field_boson(const Eigen::MatrixXd& h, int particles);

struct FermionMeanField {
    Eigen::MatrixXd gamma; ///< spin-summed
    double gap = 0.0;      ///< smallest Fermi-level gap over both spins
    bool degenerate = false;
    bool offset_applied = false;
};

/// Fills the lowest orbitals per spin. When the Fermi-level gap is below
/// 1e-8 and offset > 0, an alternating subset of the nonzero hoppings is
/// shifted by -offset and the filling repeated: every other one in
/// row-major upper-triangle order, or if that stays degenerate, those with
/// an even lower index.
FermionMeanField mean_field_fermion(const Eigen::MatrixXd& h, int n_up, int n_down, double offset = 0.0);

enum class BathPolicy {
    strict,   ///< fermion bath count must equal fragment size
    complete, ///< fill a short bath from h-coupled environment orbitals
};

struct ProjectorOptions {
    double eigen_tol = 1e-8;
    BathPolicy policy = BathPolicy::complete;
    /// With as many bath as fragment orbitals and a nonsingular coupling
    /// block B = h_frag,bath, rotate the bath so that B is symmetric positive
    /// semidefinite. Makes h_emb independent of the bath basis.
    bool polar_gauge = true;
};

struct Projector {
    Eigen::MatrixXd matrix; ///< (fragment + bath) x orbitals
    int fragment_size = 0;
    int bath_count = 0;
    /// In-between (fermion) or nonzero (boson) environment eigenvalues.
    std::vector<double> bath_occupations;
    int completed = 0; ///< bath vectors added by completion
};

Projector build_projector(const Eigen::MatrixXd& gamma_mf, const FragmentSpec& fragment, const Statistics& statistics,
                          const Eigen::MatrixXd& h, const ProjectorOptions& options = {});

struct EmbeddedProblem {
    Eigen::MatrixXd h;            ///< P h P^T
    InteractionSpec interaction;  ///< fragment-restricted, re-indexed
    Statistics statistics;
    double particle_target = 0.0; ///< tr(P gamma_MF P^T)
    double fragment_target = 0.0; ///< mean-field fragment occupation
    std::vector<double> caps;
    int fragment_size = 0;

    int orbitals() const noexcept { return static_cast<int>(h.rows()); }
    /// Integer sector of the embedded problem; fermions split evenly.
    Sector sector() const;
    ModelSpace space() const;
};

EmbeddedProblem embed(const Eigen::MatrixXd& h, const InteractionSpec& w, const Statistics& statistics,
                      const Projector& p, const FragmentSpec& fragment, const Eigen::MatrixXd& gamma_mf);

struct MinimizerConfig {
    int restarts = 8;
    std::uint64_t seed = 0;
    /// Pin the fragment and bath density sums separately.
    bool pin_fragment = true;
    double cap_penalty = 1e3;
    double start_spread = 1.5;
    optim::BfgsOptions bfgs{200, 1e-8, 1e-14};
};

struct EmbeddedSolution {
    Eigen::VectorXd n;
    double e_emb = 0.0;
    double functional_value = 0.0;
    bool converged = false;
};

/// Minimises F(n; h_off) + sum_i h_ii n_i over densities summing to the
/// targets with 0 <= n_i <= cap_i.
EmbeddedSolution solve_embedded(const DensityFunctional& f, const EmbeddedProblem& problem,
                                const MinimizerConfig& config = {});

Eigen::MatrixXd recover_gamma(const DensityFunctional& f, const Eigen::VectorXd& n_bar, const EmbeddedProblem& problem,
                              double delta = 1e-3);

/// e_emb minus the bath-bath one-body energy and half of each
/// fragment-bath cross term.
double fragment_energy(double e_emb, const Eigen::MatrixXd& gamma_bar, const EmbeddedProblem& problem);

enum class EmbeddedSolver { functional, exact };

struct DmetConfig {
    double offset = 0.01;
    ProjectorOptions projector;
    MinimizerConfig minimizer;
    double fd_delta = 1e-3;
    EmbeddedSolver solver = EmbeddedSolver::functional;
    /// Overrides the mean-field fragment occupation.
    std::optional<double> fragment_target;
};

struct DmetResult {
    Eigen::VectorXd n_bar;
    Eigen::MatrixXd gamma_bar;
    double e_emb = 0.0;
    double e_frag = 0.0;
    double e_total = 0.0;
    double functional_value = 0.0;
    std::map<std::string, double> observables;
    std::optional<double> ensemble_std;
    EmbeddedProblem problem;
    Projector projector;
};

/// Mean field, projector, embedding, functional minimisation, 1-RDM
/// recovery and fragment energy; e_total = copies * e_frag. Failures are
/// StageErrors labelled mean-field, projector, embed, solve, recover or
/// energy. `f` may be null with EmbeddedSolver::exact; it is rescaled when
/// the fragment interaction is a positive multiple of its own.
DmetResult run_dmet(FunctionalPtr f, const LatticeSystem& system, const FragmentSpec& fragment,
                    const DmetConfig& config = {});

/// run_dmet with every ensemble member; e_total and observables are member
/// means, ensemble_std the population spread of e_total.
DmetResult run_dmet_ensemble(const std::vector<FunctionalPtr>& members, const LatticeSystem& system,
                             const FragmentSpec& fragment, const DmetConfig& config = {});

/// Exact embedded solve: max over a fragment potential mu of
/// E0(h + mu P_frag) - mu * fragment_target (or plain E0 without pinning).
EmbeddedSolution solve_embedded_exact(const EmbeddedProblem& problem, bool pin_fragment, Eigen::MatrixXd* gamma = nullptr);

struct HeterogeneousResult {
    std::vector<double> targets;
    std::vector<DmetResult> fragments;
    double e_total = 0.0;
};

/// Distinct fragments (copies = 1 each) covering the lattice; a grid search
/// over fragment occupations summing to the particle number with spacing
/// `step`. step <= 0 keeps the mean-field occupations.
HeterogeneousResult run_dmet_heterogeneous(FunctionalPtr f, const LatticeSystem& system,
                                           const std::vector<FragmentSpec>& fragments, const DmetConfig& config = {},
                                           double step = 0.0);

} // namespace ftdmet
