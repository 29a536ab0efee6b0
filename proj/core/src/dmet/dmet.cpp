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

#include "ftdmet/dmet/dmet.hpp"

#include "ftdmet/common/error.hpp"
#include "ftdmet/common/random.hpp"
#include "ftdmet/exact/legendre.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

namespace ftdmet {

void FragmentSpec::validate(int orbitals) const {
    if(indices.empty()) throw ConfigError("fragment has no orbitals");
    if(copies < 1) throw ConfigError("fragment copies must be positive");
    std::vector<int> sorted = indices;
    std::sort(sorted.begin(), sorted.end());
    if(std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) throw ConfigError("fragment repeats an orbital");
    if(sorted.front() < 0 || sorted.back() >= orbitals)
        throw ConfigError(fmt::format("fragment orbital outside 0..{}", orbitals - 1));
    if(static_cast<long>(copies) * static_cast<long>(indices.size()) > orbitals)
        throw ConfigError("fragment copies exceed the lattice");
}

FragmentSpec site_fragment(int first_site, int sites, int orbitals_per_site, int total_sites) {
    if(sites < 1 || total_sites % sites != 0)
        throw ConfigError(fmt::format("{} sites do not tile a lattice of {}", sites, total_sites));
    FragmentSpec f;
    for(int s = first_site; s < first_site + sites; ++s)
        for(int b = 0; b < orbitals_per_site; ++b) f.indices.push_back(s * orbitals_per_site + b);
    f.copies = total_sites / sites;
    return f;
}

Eigen::MatrixXd mean_field_boson(const Eigen::MatrixXd& h, int particles) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    const auto& ev = es.eigenvalues();
    const auto n   = h.rows();
    Eigen::Index deg = 1;
    while(deg < n && ev(deg) - ev(0) < 1e-9 * std::max(1.0, std::abs(ev(0)))) ++deg;
    Eigen::VectorXd v0 = es.eigenvectors().col(0);
    if(deg > 1) {
        const auto block      = es.eigenvectors().leftCols(deg);
        const Eigen::VectorXd u = Eigen::VectorXd::Ones(n) / std::sqrt(static_cast<double>(n));
        const Eigen::VectorXd p = block * (block.transpose() * u);
        if(p.norm() > 1e-8) v0 = p.normalized();
    }
    return static_cast<double>(particles) * v0 * v0.transpose();
}

namespace {

FermionMeanField fill(const Eigen::MatrixXd& h, int n_up, int n_down) {
    const auto m = static_cast<int>(h.rows());
    if(n_up < 0 || n_down < 0 || n_up > m || n_down > m)
        throw CapacityError(fmt::format("{} + {} fermions do not fit {} orbitals", n_up, n_down, m));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    const auto& v = es.eigenvectors();
    FermionMeanField mf;
    mf.gamma = v.leftCols(n_up) * v.leftCols(n_up).transpose() + v.leftCols(n_down) * v.leftCols(n_down).transpose();
    mf.gap   = std::numeric_limits<double>::infinity();
    for(int n : {n_up, n_down})
        if(n > 0 && n < m) mf.gap = std::min(mf.gap, es.eigenvalues()(n) - es.eigenvalues()(n - 1));
    mf.degenerate = mf.gap < 1e-8;
    return mf;
}

} // namespace

FermionMeanField mean_field_fermion(const Eigen::MatrixXd& h, int n_up, int n_down, double offset) {
    if(offset < 0.0) throw ConfigError("mean-field offset must be non-negative");
    FermionMeanField mf = fill(h, n_up, n_down);
    if(!mf.degenerate || offset == 0.0) return mf;
    // Two alternation patterns over the nonzero upper-triangle hoppings,
    // tried in order: every other one in row-major order, then those whose
    // lower index is even.
    for(int pattern = 0; pattern < 2 && mf.degenerate; ++pattern) {
        Eigen::MatrixXd shifted = h;
        int k = 0;
        for(Eigen::Index i = 0; i < h.rows(); ++i)
            for(Eigen::Index j = i + 1; j < h.cols(); ++j) {
                if(std::abs(h(i, j)) < 1e-14) continue;
                const bool shift = pattern == 0 ? k++ % 2 == 0 : i % 2 == 0;
                if(shift) shifted(i, j) = shifted(j, i) = h(i, j) - offset;
            }
        mf                = fill(shifted, n_up, n_down);
        mf.offset_applied = true;
    }
    return mf;
}

Projector build_projector(const Eigen::MatrixXd& gamma_mf, const FragmentSpec& fragment, const Statistics& statistics,
                          const Eigen::MatrixXd& h, const ProjectorOptions& options) {
    const auto m = static_cast<int>(gamma_mf.rows());
    fragment.validate(m);
    if(h.rows() != m) throw DimensionError("build_projector: h and gamma differ in size");
    const int nf = static_cast<int>(fragment.indices.size());
    std::vector<int> env;
    for(int i = 0; i < m; ++i)
        if(std::find(fragment.indices.begin(), fragment.indices.end(), i) == fragment.indices.end()) env.push_back(i);
    const auto ne = static_cast<Eigen::Index>(env.size());

    Projector p;
    p.fragment_size = nf;
    std::vector<Eigen::VectorXd> bath; // environment coordinates
    if(ne > 0) {
        Eigen::MatrixXd g_env(ne, ne), c(ne, nf);
        for(Eigen::Index a = 0; a < ne; ++a) {
            for(Eigen::Index b = 0; b < ne; ++b) g_env(a, b) = gamma_mf(env[a], env[b]);
            for(int f = 0; f < nf; ++f) c(a, f) = h(env[a], fragment.indices[f]);
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g_env);
        const auto& lam = es.eigenvalues();
        const double tol = options.eigen_tol;
        const double full = statistics.is_fermion() ? 2.0 : std::numeric_limits<double>::infinity();
        // Descending eigenvalue order.
        for(Eigen::Index k = ne; k-- > 0;) {
            const bool keep = statistics.is_fermion() ? (lam(k) > tol && lam(k) < full - tol) : lam(k) > 1e-10;
            if(!keep) continue;
            bath.push_back(es.eigenvectors().col(k));
            p.bath_occupations.push_back(lam(k));
        }
        if(statistics.is_fermion() && static_cast<int>(bath.size()) != nf) {
            const auto found = bath.size();
            if(options.policy == BathPolicy::strict || static_cast<int>(found) > nf)
                throw Error(fmt::format("environment has {} in-between eigenvalues for a fragment of {} orbitals", found, nf));
            const double cnorm = std::max(1.0, c.norm());
            for(const bool occupied : {true, false}) {
                std::vector<Eigen::Index> cols;
                for(Eigen::Index k = 0; k < ne; ++k)
                    if(occupied ? lam(k) >= full - tol : lam(k) <= tol) cols.push_back(k);
                if(cols.empty()) continue;
                Eigen::MatrixXd u(ne, static_cast<Eigen::Index>(cols.size()));
                for(std::size_t k = 0; k < cols.size(); ++k) u.col(static_cast<Eigen::Index>(k)) = es.eigenvectors().col(cols[k]);
                Eigen::JacobiSVD<Eigen::MatrixXd> svd(u.transpose() * c, Eigen::ComputeThinU);
                for(Eigen::Index s = 0; s < svd.singularValues().size() && static_cast<int>(bath.size()) < nf; ++s) {
                    if(svd.singularValues()(s) < 1e-10 * cnorm) break;
                    bath.push_back(u * svd.matrixU().col(s));
                    p.bath_occupations.push_back(occupied ? full : 0.0);
                    ++p.completed;
                }
            }
            if(static_cast<int>(bath.size()) != nf)
                throw Error(fmt::format("bath has {} orbitals after completion, fragment has {}", bath.size(), nf));
        }
    }

    p.bath_count = static_cast<int>(bath.size());
    p.matrix     = Eigen::MatrixXd::Zero(nf + p.bath_count, m);
    for(int f = 0; f < nf; ++f) p.matrix(f, fragment.indices[f]) = 1.0;
    for(int b = 0; b < p.bath_count; ++b) {
        Eigen::VectorXd full = Eigen::VectorXd::Zero(m);
        for(Eigen::Index a = 0; a < ne; ++a) full(env[a]) = bath[b](a);
        // Sign: first fragment coupling positive, else largest entry positive.
        double sign = 0.0;
        for(int f = 0; f < nf && sign == 0.0; ++f) {
            const double cpl = h.row(fragment.indices[f]).dot(full);
            if(std::abs(cpl) > 1e-10) sign = cpl > 0.0 ? 1.0 : -1.0;
        }
        if(sign == 0.0) {
            Eigen::Index imax = 0;
            full.cwiseAbs().maxCoeff(&imax);
            sign = full(imax) >= 0.0 ? 1.0 : -1.0;
        }
        p.matrix.row(nf + b) = sign * full.transpose();
    }
    if(options.polar_gauge && p.bath_count == nf && nf > 1) {
        // Rotate the bath so that h_frag,bath = U S V^T becomes U S U^T.
        Eigen::MatrixXd b(nf, nf);
        for(int f = 0; f < nf; ++f) b.row(f) = p.matrix.bottomRows(nf) * h.col(fragment.indices[f]);
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(b, Eigen::ComputeFullU | Eigen::ComputeFullV);
        const auto& sv = svd.singularValues();
        if(sv(nf - 1) > 1e-6 * std::max(1.0, sv(0))) {
            const Eigen::MatrixXd rot = svd.matrixU() * svd.matrixV().transpose();
            p.matrix.bottomRows(nf) = (rot * p.matrix.bottomRows(nf)).eval();
        }
    }
    return p;
}

Sector EmbeddedProblem::sector() const {
    const double rounded = std::round(particle_target);
    if(std::abs(rounded - particle_target) > 1e-6)
        throw Error(fmt::format("embedded particle number {:.10f} is not an integer", particle_target));
    const int n = static_cast<int>(rounded);
    return statistics.is_fermion() ? Sector::spins((n + 1) / 2, n / 2) : Sector::total(n);
}

ModelSpace EmbeddedProblem::space() const {
    const Sector s = sector();
    const Statistics st = statistics.is_fermion() ? Statistics::fermion() : Statistics::boson(std::max(1, s.particles));
    return {st, orbitals(), s, interaction};
}

EmbeddedProblem embed(const Eigen::MatrixXd& h, const InteractionSpec& w, const Statistics& statistics,
                      const Projector& p, const FragmentSpec& fragment, const Eigen::MatrixXd& gamma_mf) {
    EmbeddedProblem e;
    e.h               = p.matrix * h * p.matrix.transpose();
    e.h               = 0.5 * (e.h + e.h.transpose());
    e.interaction     = w.restricted(fragment.indices, statistics);
    e.statistics      = statistics;
    e.particle_target = (p.matrix * gamma_mf * p.matrix.transpose()).trace();
    e.fragment_size   = p.fragment_size;
    for(int f : fragment.indices) e.fragment_target += gamma_mf(f, f);
    const double cap = statistics.is_fermion() ? 2.0 : std::max(1.0, std::round(e.particle_target));
    e.caps.assign(static_cast<std::size_t>(e.orbitals()), cap);
    return e;
}

namespace {

struct Block {
    int begin, size;
    double total;
};

std::vector<Block> density_blocks(const EmbeddedProblem& problem, bool pin) {
    const int m  = problem.orbitals();
    const int nf = problem.fragment_size;
    if(!pin || nf >= m) return {{0, m, problem.particle_target}};
    const double bath = problem.particle_target - problem.fragment_target;
    if(problem.fragment_target < -1e-9 || bath < -1e-9)
        throw Error(fmt::format("fragment target {} outside [0, {}]", problem.fragment_target, problem.particle_target));
    return {{0, nf, std::max(0.0, problem.fragment_target)}, {nf, m - nf, std::max(0.0, bath)}};
}

} // namespace

EmbeddedSolution solve_embedded(const DensityFunctional& f, const EmbeddedProblem& problem, const MinimizerConfig& config) {
    const int m = problem.orbitals();
    if(f.orbitals() != m)
        throw DimensionError(fmt::format("functional over {} orbitals cannot solve a {}-orbital embedding", f.orbitals(), m));
    const Eigen::VectorXd offdiag = pack_offdiag(problem.h);
    const Eigen::VectorXd hdiag   = problem.h.diagonal();
    const auto blocks             = density_blocks(problem, config.pin_fragment);

    Eigen::Index nvar = 0;
    for(const auto& b : blocks) nvar += b.size - 1;

    // Softmax per block, last logit fixed at zero.
    auto densities = [&](const Eigen::VectorXd& x) {
        Eigen::VectorXd n(m);
        Eigen::Index k = 0;
        for(const auto& b : blocks) {
            Eigen::VectorXd logits = Eigen::VectorXd::Zero(b.size);
            logits.head(b.size - 1) = x.segment(k, b.size - 1);
            k += b.size - 1;
            const double mx = logits.maxCoeff();
            const Eigen::VectorXd e = (logits.array() - mx).exp();
            n.segment(b.begin, b.size) = b.total * e / e.sum();
        }
        return n;
    };
    auto energy = [&](const Eigen::VectorXd& n) { return f.value(n, offdiag) + hdiag.dot(n); };
    auto objective = [&](const Eigen::VectorXd& x) {
        const Eigen::VectorXd n = densities(x);
        double pen = 0.0;
        for(int i = 0; i < m; ++i) pen += std::pow(std::max(0.0, n(i) - problem.caps[static_cast<std::size_t>(i)]), 2);
        return energy(n) + config.cap_penalty * pen;
    };

    EmbeddedSolution best;
    best.e_emb = std::numeric_limits<double>::infinity();
    auto consider = [&](const Eigen::VectorXd& x, bool converged) {
        const Eigen::VectorXd n = densities(x);
        const double e          = objective(x);
        if(e < best.e_emb || (best.n.size() == 0)) {
            best.n                = n;
            best.e_emb            = e;
            best.functional_value = f.value(n, offdiag);
        }
        best.converged = best.converged || converged;
    };

    if(nvar == 0) {
        consider(Eigen::VectorXd(), true);
    } else {
        Rng rng = make_rng(config.seed, 0x0e3bULL);
        std::normal_distribution<double> normal(0.0, config.start_spread);
        const auto grad = optim::with_numeric_gradient(objective, 1e-5);
        for(int r = 0; r < std::max(1, config.restarts); ++r) {
            Eigen::VectorXd x0 = Eigen::VectorXd::Zero(nvar);
            if(r > 0)
                for(Eigen::Index i = 0; i < nvar; ++i) x0(i) = normal(rng);
            const auto out = optim::minimize_bfgs(grad, x0, config.bfgs);
            if(!out.x.allFinite()) continue;
            consider(out.x, out.converged);
        }
    }
    if(!std::isfinite(best.e_emb)) throw ConvergenceError("embedded minimisation produced no finite value");
    // Report the unpenalised energy.
    best.e_emb = energy(best.n);
    return best;
}

Eigen::MatrixXd recover_gamma(const DensityFunctional& f, const Eigen::VectorXd& n_bar, const EmbeddedProblem& problem,
                              double delta) {
    return offdiag_gamma(f, n_bar, pack_offdiag(problem.h), delta);
}

double fragment_energy(double e_emb, const Eigen::MatrixXd& gamma_bar, const EmbeddedProblem& problem) {
    const int m  = problem.orbitals();
    const int nf = problem.fragment_size;
    double e     = e_emb;
    for(int i = nf; i < m; ++i)
        for(int j = nf; j < m; ++j) e -= problem.h(i, j) * gamma_bar(i, j);
    for(int i = 0; i < nf; ++i)
        for(int j = nf; j < m; ++j) e -= 0.5 * (problem.h(i, j) * gamma_bar(i, j) + problem.h(j, i) * gamma_bar(j, i));
    return e;
}

EmbeddedSolution solve_embedded_exact(const EmbeddedProblem& problem, bool pin_fragment, Eigen::MatrixXd* gamma) {
    const ModelSpace space = problem.space();
    const int m            = problem.orbitals();
    const int nf           = problem.fragment_size;
    auto finish = [&](const ExactSolution& sol, double value) {
        EmbeddedSolution out;
        out.n                = sol.gamma.diagonal();
        out.e_emb            = value;
        out.functional_value = value - problem.h.diagonal().dot(out.n);
        out.converged        = true;
        if(gamma) *gamma = sol.gamma;
        return out;
    };
    if(!pin_fragment || nf >= m) {
        const auto sol = solve_orbital(space, problem.h);
        return finish(sol, sol.energy);
    }

    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(m, m);
    for(int i = 0; i < nf; ++i) d(i, i) = 1.0;
    const double target = problem.fragment_target;
    auto at = [&](double mu) { return solve_orbital(space, problem.h + mu * d); };
    auto occupation = [&](const ExactSolution& s) { return s.gamma.diagonal().head(nf).sum(); };

    // <n_frag>(mu) is non-increasing; bracket the target.
    ExactSolution s0 = at(0.0);
    if(std::abs(occupation(s0) - target) < 1e-12) return finish(s0, s0.energy);
    double lo = 0.0, hi = 0.0;
    if(occupation(s0) > target) {
        for(hi = 1.0; occupation(at(hi)) > target; hi *= 2.0) {
            lo = hi;
            if(hi > 1e6) throw ConvergenceError("fragment potential bracket failed");
        }
    } else {
        for(lo = -1.0; occupation(at(lo)) < target; lo *= 2.0) {
            hi = lo;
            if(lo < -1e6) throw ConvergenceError("fragment potential bracket failed");
        }
    }
    for(int it = 0; it < 200 && hi - lo > 1e-13 * std::max(1.0, std::abs(lo)); ++it) {
        const double mid = 0.5 * (lo + hi);
        const auto s     = at(mid);
        const double occ = occupation(s);
        if(std::abs(occ - target) < 1e-12) {
            lo = hi = mid;
            break;
        }
        (occ > target ? lo : hi) = mid;
    }
    const double mu = 0.5 * (lo + hi);
    const auto sol  = at(mu);
    // Concave dual at its maximum.
    const double value = sol.energy - mu * target;
    return finish(sol, value);
}

namespace {

template <class Fn>
auto stage(const char* name, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch(const StageError&) {
        throw;
    } catch(const std::exception& e) {
        throw StageError(name, e.what());
    }
}

std::optional<double> uniform_hubbard(const InteractionSpec& w) {
    std::optional<double> u;
    for(const auto& t : w.terms()) {
        if(t.kind != InteractionKind::fermionic_onsite) return std::nullopt;
        if(u && std::abs(*u - t.coefficient) > 1e-12) return std::nullopt;
        u = t.coefficient;
    }
    return u;
}

} // namespace

DmetResult run_dmet(FunctionalPtr f, const LatticeSystem& system, const FragmentSpec& fragment, const DmetConfig& config) {
    const Statistics& stats = system.statistics;
    const Eigen::MatrixXd h = stage("mean-field", [&] {
        if(stats.is_fermion() && !system.h.is_spin_diagonal())
            throw ConfigError("embedding needs a spin-conserving one-body term");
        return system.orbital_h();
    });
    const Eigen::MatrixXd gamma_mf = stage("mean-field", [&]() -> Eigen::MatrixXd {
        if(stats.is_boson()) return mean_field_boson(h, system.sector.particles);
        if(!system.sector.resolves_spin()) throw ConfigError("fermion embedding needs an (up, down) sector");
        const auto mf = mean_field_fermion(h, *system.sector.spin_up, system.sector.spin_down(), config.offset);
        if(mf.degenerate)
            throw ConvergenceError(fmt::format("Fermi level degenerate (gap {:.3g}) after offset {}", mf.gap, config.offset));
        return mf.gamma;
    });

    DmetResult r;
    r.projector = stage("projector", [&] { return build_projector(gamma_mf, fragment, stats, h, config.projector); });
    r.problem   = stage("embed", [&] {
        auto e = embed(h, system.interaction, stats, r.projector, fragment, gamma_mf);
        if(config.fragment_target) e.fragment_target = *config.fragment_target;
        return e;
    });
    const EmbeddedProblem& problem = r.problem;

    FunctionalPtr used;
    EmbeddedSolution sol = stage("solve", [&] {
        if(config.solver == EmbeddedSolver::exact)
            return solve_embedded_exact(problem, config.minimizer.pin_fragment, &r.gamma_bar);
        if(!f) throw ConfigError("no functional supplied");
        used = adapt_functional(f, problem.interaction);
        return solve_embedded(*used, problem, config.minimizer);
    });
    if(config.solver == EmbeddedSolver::functional)
        r.gamma_bar = stage("recover", [&] { return recover_gamma(*used, sol.n, problem, config.fd_delta); });

    stage("energy", [&] {
        r.n_bar            = sol.n;
        r.e_emb            = sol.e_emb;
        r.functional_value = sol.functional_value;
        r.e_frag           = fragment_energy(sol.e_emb, r.gamma_bar, problem);
        r.e_total          = fragment.copies * r.e_frag;

        const int nf = problem.fragment_size, m = problem.orbitals();
        double kinetic = 0.0, offdiag = 0.0;
        for(int i = 0; i < m; ++i)
            for(int j = 0; j < m; ++j) {
                if(i == j) continue;
                const double v = problem.h(i, j) * r.gamma_bar(i, j);
                offdiag += v;
                if(i < nf && j < nf) kinetic += v;
                else if(i < nf || j < nf) kinetic += 0.5 * v;
            }
        r.observables["fragment_occupation"] = r.n_bar.head(nf).sum();
        r.observables["fragment_hopping"]    = kinetic;
        if(stats.is_fermion())
            if(const auto u = uniform_hubbard(problem.interaction); u && *u != 0.0)
                r.observables["double_occupancy"] = (sol.functional_value - offdiag) / *u / nf;
        return 0;
    });
    return r;
}

DmetResult run_dmet_ensemble(const std::vector<FunctionalPtr>& members, const LatticeSystem& system,
                             const FragmentSpec& fragment, const DmetConfig& config) {
    if(members.empty()) throw ConfigError("ensemble has no members");
    std::vector<DmetResult> runs;
    for(const auto& f : members) runs.push_back(run_dmet(f, system, fragment, config));
    DmetResult out = runs.front();
    const auto k   = static_cast<double>(runs.size());
    double mean = 0.0;
    for(const auto& r : runs) mean += r.e_total;
    mean /= k;
    double var = 0.0;
    for(const auto& r : runs) var += std::pow(r.e_total - mean, 2);
    out.e_total      = mean;
    out.e_frag       = mean / fragment.copies;
    out.ensemble_std = std::sqrt(var / k);
    for(auto& [name, value] : out.observables) {
        double s = 0.0;
        for(const auto& r : runs) s += r.observables.at(name);
        value = s / k;
    }
    double e_emb = 0.0;
    for(const auto& r : runs) e_emb += r.e_emb;
    out.e_emb = e_emb / k;
    return out;
}

HeterogeneousResult run_dmet_heterogeneous(FunctionalPtr f, const LatticeSystem& system,
                                           const std::vector<FragmentSpec>& fragments, const DmetConfig& config,
                                           double step) {
    if(fragments.empty()) throw ConfigError("no fragments");
    for(const auto& fr : fragments)
        if(fr.copies != 1) throw ConfigError("heterogeneous fragments must have copies = 1");

    auto evaluate = [&](const std::vector<std::optional<double>>& targets) {
        HeterogeneousResult out;
        for(std::size_t k = 0; k < fragments.size(); ++k) {
            DmetConfig c      = config;
            c.fragment_target = targets[k];
            auto r            = run_dmet(f, system, fragments[k], c);
            out.targets.push_back(r.problem.fragment_target);
            out.e_total += r.e_total;
            out.fragments.push_back(std::move(r));
        }
        return out;
    };
    if(step <= 0.0) return evaluate(std::vector<std::optional<double>>(fragments.size()));

    const double total = system.sector.particles;
    const int units    = static_cast<int>(std::llround(total / step));
    if(std::abs(units * step - total) > 1e-9) throw ConfigError("grid step must divide the particle number");
    const auto k = static_cast<int>(fragments.size());
    std::vector<int> split(static_cast<std::size_t>(k), 0);
    std::optional<HeterogeneousResult> best;
    long visited = 0;
    // Compositions of `units` into k parts.
    std::function<void(int, int)> rec = [&](int index, int left) {
        if(index == k - 1) {
            split[static_cast<std::size_t>(index)] = left;
            if(++visited > 100000) throw ConfigError("heterogeneous grid too large");
            std::vector<std::optional<double>> t;
            for(int u : split) t.emplace_back(u * step);
            try {
                auto r = evaluate(t);
                if(!best || r.e_total < best->e_total) best = std::move(r);
            } catch(const StageError&) {
                // Occupation outside what the embedding can hold.
            }
            return;
        }
        for(int u = 0; u <= left; ++u) {
            split[static_cast<std::size_t>(index)] = u;
            rec(index + 1, left - u);
        }
    };
    rec(0, units);
    if(!best) throw Error("no feasible fragment occupation on the grid");
    return *best;
}

} // namespace ftdmet
