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

#include <Eigen/Dense>
#include <functional>

namespace ftdmet::optim {

using Objective = std::function<double(const Eigen::VectorXd&)>;

/// Returns f(x) and writes the gradient into the second argument.
using GradientObjective =
  std::function<double(const Eigen::VectorXd&, Eigen::VectorXd&)>;

struct Result {
    Eigen::VectorXd x;
    double value = 0.0;
    int iterations = 0;
    int evaluations = 0;
    bool converged = false;
};

struct BfgsOptions {
    int max_iterations = 500;
    double gradient_tol = 1e-9;
    /// Relative decrease below which two consecutive steps count as stalled.
    double value_tol = 1e-15;
};

struct NelderMeadOptions {
    int max_evaluations = 2000;
    double initial_step = 0.2;
    /// Spread of simplex values at which the search stops.
    double value_tol = 1e-10;
};

Result minimize_bfgs(const GradientObjective& f, Eigen::VectorXd x0,
                     const BfgsOptions& options = {});

Result minimize_nelder_mead(const Objective& f, Eigen::VectorXd x0,
                            const NelderMeadOptions& options = {});

/// Central-difference gradient with step `h` per coordinate.
Eigen::VectorXd central_gradient(const Objective& f, const Eigen::VectorXd& x,
                                 double h);

/// Wraps a value-only objective with a central-difference gradient.
GradientObjective with_numeric_gradient(Objective f, double h);

} // namespace ftdmet::optim
