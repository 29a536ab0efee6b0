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

#include <Eigen/Eigenvalues>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <fmt/format.h>

#include <cmath>
#include <numbers>

namespace ftdmet {

double bethe_half_filling(double u) {
    if(!(u >= 0.0) || !std::isfinite(u)) throw ConfigError("bethe_half_filling: u must be finite and non-negative");
    auto integrand = [u](double w) {
        if(w < 1e-8) return 0.25 / (1.0 + std::exp(w * u / 2.0)); // J0 J1 / w -> 1/2 * w/2 / w
        const double damp = w * u / 2.0;
        const double weight = damp > 700.0 ? 0.0 : 1.0 / (1.0 + std::exp(damp));
        return std::cyl_bessel_j(0.0, w) * std::cyl_bessel_j(1.0, w) / w * weight;
    };
    // Chunks of length pi; the undamped tail decays like cos(2w) / w^2 and
    // vanishes at multiples of pi to leading order.
    constexpr double kMaxW = 2.0e4;
    const double chunk     = std::numbers::pi;
    double sum             = 0.0;
    for(double a = 0.0; a < kMaxW; a += chunk) {
        sum += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, a, a + chunk, 0);
        if(u > 0.0 && a * u / 2.0 > 40.0) break;
    }
    return -4.0 * sum;
}

double bethe_half_filling(double u, double t) {
    const double s = std::abs(t);
    if(s == 0.0) return 0.0;
    return s * bethe_half_filling(u / s);
}

namespace {

// Lowest-n filling with an evenly shared degenerate Fermi shell.
Eigen::MatrixXd aufbau(const Eigen::MatrixXd& f, int n) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(f);
    const auto& e = es.eigenvalues();
    const auto& v = es.eigenvectors();
    const auto m  = static_cast<int>(f.rows());
    Eigen::VectorXd occ = Eigen::VectorXd::Zero(m);
    if(n > 0) {
        const double fermi = e(n - 1);
        const double tol   = 1e-9 * std::max(1.0, std::abs(fermi));
        int below = 0, shell = 0;
        for(int k = 0; k < m; ++k) {
            if(e(k) < fermi - tol) ++below;
            else if(e(k) <= fermi + tol) ++shell;
        }
        for(int k = 0; k < m; ++k) {
            if(e(k) < fermi - tol) occ(k) = 1.0;
            else if(e(k) <= fermi + tol) occ(k) = static_cast<double>(n - below) / shell;
        }
    }
    return v * occ.asDiagonal() * v.transpose();
}

} // namespace

HartreeFockResult hartree_fock(const LatticeSystem& system, const HartreeFockOptions& options) {
    if(!system.statistics.is_fermion()) throw ConfigError("hartree_fock: fermionic systems only");
    if(!system.h.is_spin_diagonal()) throw ConfigError("hartree_fock: spin-conserving one-body term required");
    if(!system.sector.resolves_spin()) throw ConfigError("hartree_fock: needs an (up, down) sector");
    const Eigen::MatrixXd h = system.orbital_h();
    const int n_up = *system.sector.spin_up, n_dn = system.sector.spin_down();
    const auto& terms = system.interaction.terms();

    // Fock matrices and interaction energy from per-spin 1-RDMs (index 0 up).
    auto fock = [&](const Eigen::MatrixXd g[2], Eigen::MatrixXd f[2], double& e_int) {
        f[0] = h;
        f[1] = h;
        e_int = 0.0;
        for(const auto& t : terms) {
            int a = t.i, b = t.i, sa = 0, sb = 1;
            if(t.kind == InteractionKind::density_density) {
                a = t.i / 2, sa = t.i % 2;
                b = t.j / 2, sb = t.j % 2;
            } else if(t.kind != InteractionKind::fermionic_onsite) {
                throw ConfigError("hartree_fock: unsupported interaction term");
            }
            const double w = t.coefficient;
            f[sa](a, a) += w * g[sb](b, b);
            f[sb](b, b) += w * g[sa](a, a);
            e_int += w * g[sa](a, a) * g[sb](b, b);
            if(sa == sb && a != b) {
                f[sa](a, b) -= w * g[sa](b, a);
                f[sa](b, a) -= w * g[sa](a, b);
                e_int -= w * g[sa](a, b) * g[sa](b, a);
            }
        }
    };

    HartreeFockResult r;
    Eigen::MatrixXd g[2] = {aufbau(h, n_up), aufbau(h, n_dn)};
    Eigen::MatrixXd f[2];
    double e_int = 0.0;
    for(r.iterations = 1; r.iterations <= options.max_iterations; ++r.iterations) {
        fock(g, f, e_int);
        const Eigen::MatrixXd next[2] = {aufbau(f[0], n_up), aufbau(f[1], n_dn)};
        const double change = std::max((next[0] - g[0]).cwiseAbs().maxCoeff(), (next[1] - g[1]).cwiseAbs().maxCoeff());
        for(int s = 0; s < 2; ++s) g[s] = options.damping * g[s] + (1.0 - options.damping) * next[s];
        if(change < options.tolerance) break;
    }
    if(r.iterations > options.max_iterations)
        throw ConvergenceError(fmt::format("hartree_fock: no convergence in {} iterations", options.max_iterations));
    fock(g, f, e_int);
    r.energy     = (h.array() * (g[0] + g[1]).array()).sum() + e_int;
    r.gamma_up   = g[0];
    r.gamma_down = g[1];
    return r;
}

} // namespace ftdmet
