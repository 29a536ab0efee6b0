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

#include "ftdmet/common/optim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace ftdmet::optim {

Result minimize_bfgs(const GradientObjective& f, Eigen::VectorXd x0,
                     const BfgsOptions& options) {
    const Eigen::Index n = x0.size();
    Result out;
    out.x = std::move(x0);
    Eigen::VectorXd g(n);
    out.value = f(out.x, g);
    out.evaluations = 1;
    if(n == 0) {
        out.converged = true;
        return out;
    }

    Eigen::MatrixXd inv_h = Eigen::MatrixXd::Identity(n, n);
    Eigen::VectorXd g_new(n);
    int stalled = 0;

    for(int it = 0; it < options.max_iterations; ++it) {
        out.iterations = it + 1;
        if(!std::isfinite(out.value)) break;
        if(g.lpNorm<Eigen::Infinity>() < options.gradient_tol) {
            out.converged = true;
            break;
        }
        Eigen::VectorXd dir = -inv_h * g;
        double slope        = g.dot(dir);
        if(slope >= 0.0) {
            inv_h.setIdentity();
            dir   = -g;
            slope = -g.squaredNorm();
        }

        // Backtracking with the Armijo condition.
        double step = 1.0;
        Eigen::VectorXd x_new;
        double f_new = 0.0;
        bool accepted = false;
        for(int ls = 0; ls < 60; ++ls) {
            x_new = out.x + step * dir;
            f_new = f(x_new, g_new);
            ++out.evaluations;
            if(std::isfinite(f_new) && f_new <= out.value + 1e-4 * step * slope) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if(!accepted) {
            // No descent along the quasi-Newton direction: restart once from
            // steepest descent, otherwise the point is stationary to precision.
            if(inv_h.isIdentity()) {
                out.converged = g.lpNorm<Eigen::Infinity>() < 1e3 * options.gradient_tol;
                break;
            }
            inv_h.setIdentity();
            continue;
        }

        const Eigen::VectorXd s = x_new - out.x;
        const Eigen::VectorXd y = g_new - g;
        const double sy         = s.dot(y);
        const double drop       = out.value - f_new;
        out.x     = x_new;
        out.value = f_new;
        g         = g_new;

        if(sy > 1e-14 * s.norm() * y.norm()) {
            const double rho = 1.0 / sy;
            if(it == 0) inv_h *= sy / y.squaredNorm();
            const Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n) - rho * s * y.transpose();
            inv_h = a * inv_h * a.transpose() + rho * s * s.transpose();
        }

        stalled = drop <= options.value_tol * std::max(1.0, std::abs(out.value)) ? stalled + 1 : 0;
        if(stalled >= 3) {
            out.converged = true;
            break;
        }
    }
    return out;
}

Result minimize_nelder_mead(const Objective& f, Eigen::VectorXd x0,
                            const NelderMeadOptions& options) {
    const Eigen::Index n = x0.size();
    Result out;
    if(n == 0) {
        out.x         = x0;
        out.value     = f(x0);
        out.converged = true;
        out.evaluations = 1;
        return out;
    }

    std::vector<Eigen::VectorXd> pts(n + 1, x0);
    std::vector<double> vals(n + 1);
    for(Eigen::Index i = 0; i < n; ++i) pts[i + 1](i) += options.initial_step;
    int evals = 0;
    auto eval = [&](const Eigen::VectorXd& x) {
        ++evals;
        const double v = f(x);
        return std::isfinite(v) ? v : std::numeric_limits<double>::max();
    };
    for(Eigen::Index i = 0; i <= n; ++i) vals[i] = eval(pts[i]);

    std::vector<std::size_t> order(n + 1);
    int iterations = 0;
    while(evals < options.max_evaluations) {
        ++iterations;
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
        const std::size_t best = order.front(), worst = order.back();
        const std::size_t second = order[n - 1];
        if(std::abs(vals[worst] - vals[best]) <= options.value_tol) {
            out.converged = true;
            break;
        }

        Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
        for(std::size_t k = 0; k < order.size() - 1; ++k) centroid += pts[order[k]];
        centroid /= static_cast<double>(n);

        const Eigen::VectorXd xr = centroid + (centroid - pts[worst]);
        const double fr          = eval(xr);
        if(fr < vals[best]) {
            const Eigen::VectorXd xe = centroid + 2.0 * (centroid - pts[worst]);
            const double fe          = eval(xe);
            if(fe < fr) {
                pts[worst] = xe;
                vals[worst] = fe;
            } else {
                pts[worst] = xr;
                vals[worst] = fr;
            }
        } else if(fr < vals[second]) {
            pts[worst] = xr;
            vals[worst] = fr;
        } else {
            const bool outside       = fr < vals[worst];
            const Eigen::VectorXd xc = outside ? Eigen::VectorXd(centroid + 0.5 * (xr - centroid))
                                               : Eigen::VectorXd(centroid + 0.5 * (pts[worst] - centroid));
            const double fc = eval(xc);
            if(fc < std::min(fr, vals[worst])) {
                pts[worst] = xc;
                vals[worst] = fc;
            } else {
                for(std::size_t k = 1; k < order.size(); ++k) {
                    const std::size_t j = order[k];
                    pts[j]  = pts[best] + 0.5 * (pts[j] - pts[best]);
                    vals[j] = eval(pts[j]);
                }
            }
        }
    }

    const auto best = static_cast<std::size_t>(
      std::min_element(vals.begin(), vals.end()) - vals.begin());
    out.x           = pts[best];
    out.value       = vals[best];
    out.iterations  = iterations;
    out.evaluations = evals;
    return out;
}

Eigen::VectorXd central_gradient(const Objective& f, const Eigen::VectorXd& x,
                                 double h) {
    Eigen::VectorXd g(x.size());
    Eigen::VectorXd xp = x;
    for(Eigen::Index i = 0; i < x.size(); ++i) {
        xp(i)         = x(i) + h;
        const double fp = f(xp);
        xp(i)         = x(i) - h;
        const double fm = f(xp);
        xp(i)         = x(i);
        g(i)          = (fp - fm) / (2.0 * h);
    }
    return g;
}

GradientObjective with_numeric_gradient(Objective f, double h) {
    return [f = std::move(f), h](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
        g = central_gradient(f, x, h);
        return f(x);
    };
}

} // namespace ftdmet::optim
