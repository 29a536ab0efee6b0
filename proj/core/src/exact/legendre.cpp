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

#include "ftdmet/exact/legendre.hpp"

#include "ftdmet/common/error.hpp"

#include <Eigen/Eigenvalues>
#include <functional>

namespace ftdmet {

ExactSolution solve_orbital(const ModelSpace& space, const Eigen::MatrixXd& orbital_h,
                            const SolverOptions& options) {
    return energy_of(space.expand(orbital_h), space.interaction, space.basis(), options);
}

namespace {

// Maximises G(x) = E0(base + sum_k x_k B_k) - x . target, a concave
// function whose gradient is <B_k> - target_k.
struct ConcaveProblem {
    const ModelSpace& space;
    Eigen::MatrixXd base;
    std::vector<Eigen::MatrixXd> directions;
    Eigen::VectorXd target;

    Eigen::MatrixXd h_at(const Eigen::VectorXd& x) const {
        Eigen::MatrixXd h = base;
        for(std::size_t k = 0; k < directions.size(); ++k) h += x(static_cast<Eigen::Index>(k)) * directions[k];
        return h;
    }

    Eigen::VectorXd moments(const Eigen::MatrixXd& gamma) const {
        Eigen::VectorXd m(static_cast<Eigen::Index>(directions.size()));
        for(std::size_t k = 0; k < directions.size(); ++k)
            m(static_cast<Eigen::Index>(k)) = (directions[k].array() * gamma.array()).sum();
        return m;
    }
};

LegendreResult maximise(const ConcaveProblem& p, const LegendreOptions& o) {
    const auto nk = static_cast<Eigen::Index>(p.directions.size());
    Eigen::VectorXd x = Eigen::VectorXd::Zero(nk);

    struct Point {
        ExactSolution sol;
        Eigen::VectorXd grad;
        double value;
    };
    auto evaluate = [&](const Eigen::VectorXd& xv) {
        Point pt{solve_orbital(p.space, p.h_at(xv)), {}, 0.0};
        pt.grad  = p.moments(pt.sol.gamma) - p.target;
        pt.value = pt.sol.energy - xv.dot(p.target);
        return pt;
    };

    Point cur = evaluate(x);
    LegendreResult res;
    for(int it = 0; it < o.max_iterations; ++it) {
        res.iterations = it;
        if(cur.grad.lpNorm<Eigen::Infinity>() < o.tolerance) {
            res.converged = true;
            break;
        }
        Eigen::MatrixXd hess(nk, nk);
        for(Eigen::Index l = 0; l < nk; ++l) {
            Eigen::VectorXd xp = x, xm = x;
            xp(l) += o.fd_step;
            xm(l) -= o.fd_step;
            hess.col(l) = (p.moments(solve_orbital(p.space, p.h_at(xp)).gamma) -
                           p.moments(solve_orbital(p.space, p.h_at(xm)).gamma)) /
                          (2.0 * o.fd_step);
        }
        hess = 0.5 * (hess + hess.transpose());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hess);
        const double scale = es.eigenvalues().cwiseAbs().maxCoeff();
        Eigen::VectorXd inv = Eigen::VectorXd::Zero(nk);
        for(Eigen::Index k = 0; k < nk; ++k) {
            const double lam = es.eigenvalues()(k);
            // Only curvature of the right sign; flat gauge directions are dropped.
            if(lam < -o.rcond * scale) inv(k) = 1.0 / lam;
        }
        Eigen::VectorXd step = -(es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose() * cur.grad);
        if(step.lpNorm<Eigen::Infinity>() == 0.0) step = cur.grad;

        double alpha = 1.0;
        bool moved   = false;
        for(int ls = 0; ls < 40; ++ls) {
            Point trial = evaluate(x + alpha * step);
            if(trial.value >= cur.value - 1e-14 * std::max(1.0, std::abs(cur.value)) ||
               trial.grad.norm() < cur.grad.norm()) {
                x     = x + alpha * step;
                cur   = std::move(trial);
                moved = true;
                break;
            }
            alpha *= 0.5;
        }
        if(!moved) break;
    }
    res.residual  = cur.grad.lpNorm<Eigen::Infinity>();
    res.converged = res.converged || res.residual < o.tolerance;
    res.value     = cur.value;
    res.e0        = cur.sol.energy;
    res.h         = p.h_at(x);
    res.gamma     = cur.sol.gamma;
    return res;
}

} // namespace

LegendreResult legendre_density(const ModelSpace& space, const Eigen::VectorXd& n,
                                const Eigen::MatrixXd& h_offdiag, const LegendreOptions& options) {
    const int m = space.orbitals;
    if(n.size() != m || h_offdiag.rows() != m)
        throw DimensionError("legendre_density: dimension mismatch with model space");
    Eigen::MatrixXd base = h_offdiag;
    base.diagonal().setZero();
    ConcaveProblem p{space, base, {}, n};
    for(int i = 0; i < m; ++i) {
        Eigen::MatrixXd b = Eigen::MatrixXd::Zero(m, m);
        b(i, i)           = 1.0;
        p.directions.push_back(std::move(b));
    }
    return maximise(p, options);
}

LegendreResult legendre_rdm(const ModelSpace& space, const Eigen::MatrixXd& gamma,
                            const LegendreOptions& options) {
    const int m = space.orbitals;
    if(gamma.rows() != m || gamma.cols() != m) throw DimensionError("legendre_rdm: dimension mismatch");
    ConcaveProblem p{space, Eigen::MatrixXd::Zero(m, m), {}, {}};
    std::vector<double> target;
    for(int i = 0; i < m; ++i)
        for(int j = i; j < m; ++j) {
            Eigen::MatrixXd b = Eigen::MatrixXd::Zero(m, m);
            b(i, j) = b(j, i) = 1.0;
            target.push_back(i == j ? gamma(i, i) : 2.0 * gamma(i, j));
            p.directions.push_back(std::move(b));
        }
    p.target = Eigen::Map<Eigen::VectorXd>(target.data(), static_cast<Eigen::Index>(target.size()));
    return maximise(p, options);
}

} // namespace ftdmet
