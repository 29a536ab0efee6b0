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

#include "ftdmet/dnn/mlp.hpp"
#include "ftdmet/exact/legendre.hpp"

#include <memory>
#include <optional>

namespace ftdmet {

/// F(n; h_off): interaction energy as a function of densities with the
/// off-diagonal one-body entries as parameters (packed upper triangle).
class DensityFunctional {
public:
    virtual ~DensityFunctional() = default;
    virtual int orbitals() const = 0;
    virtual double value(const Eigen::VectorXd& n, const Eigen::VectorXd& offdiag) const = 0;
    /// Interaction the functional was built for, if recorded.
    virtual std::optional<InteractionSpec> interaction() const { return std::nullopt; }
};

using FunctionalPtr = std::shared_ptr<const DensityFunctional>;

class MlpFunctional final : public DensityFunctional {
public:
    explicit MlpFunctional(MlpModel model);
    int orbitals() const override { return orbitals_; }
    double value(const Eigen::VectorXd& n, const Eigen::VectorXd& offdiag) const override;
    std::optional<InteractionSpec> interaction() const override;
    const MlpModel& model() const noexcept { return model_; }

private:
    MlpModel model_;
    int orbitals_ = 0;
};

/// Mean over members.
class EnsembleFunctional final : public DensityFunctional {
public:
    explicit EnsembleFunctional(std::vector<FunctionalPtr> members);
    int orbitals() const override { return members_.front()->orbitals(); }
    double value(const Eigen::VectorXd& n, const Eigen::VectorXd& offdiag) const override;
    std::optional<InteractionSpec> interaction() const override { return members_.front()->interaction(); }
    const std::vector<FunctionalPtr>& members() const noexcept { return members_; }
    /// Population standard deviation across members.
    double spread(const Eigen::VectorXd& n, const Eigen::VectorXd& offdiag) const;

private:
    std::vector<FunctionalPtr> members_;
};

/// lambda * F(n; h_off / lambda): the functional of lambda * W from that of W.
class ScaledFunctional final : public DensityFunctional {
public:
    ScaledFunctional(FunctionalPtr inner, double lambda);
    int orbitals() const override { return inner_->orbitals(); }
    double value(const Eigen::VectorXd& n, const Eigen::VectorXd& offdiag) const override;
    std::optional<InteractionSpec> interaction() const override;

private:
    FunctionalPtr inner_;
    double lambda_;
};

/// Evaluated on demand by the constrained-search Legendre transform.
class ExactFunctional final : public DensityFunctional {
public:
    explicit ExactFunctional(ModelSpace space, LegendreOptions options = {});
    int orbitals() const override { return space_.orbitals; }
    double value(const Eigen::VectorXd& n, const Eigen::VectorXd& offdiag) const override;
    std::optional<InteractionSpec> interaction() const override { return space_.interaction; }
    const ModelSpace& space() const noexcept { return space_; }

private:
    ModelSpace space_;
    LegendreOptions options_;
};

FunctionalPtr make_functional(const std::vector<MlpModel>& models);

/// Functional for interaction `w`: `f` itself or a positive rescaling of
/// it; throws when `f` records an interaction that is not a positive
/// multiple of `w`.
FunctionalPtr adapt_functional(FunctionalPtr f, const InteractionSpec& w);

/// Hellmann-Feynman off-diagonal 1-RDM: central-difference slope in each
/// packed off-diagonal feature, halved (one feature per unordered pair).
/// Diagonal is n.
Eigen::MatrixXd offdiag_gamma(const DensityFunctional& f, const Eigen::VectorXd& n, const Eigen::VectorXd& offdiag,
                              double delta = 1e-3);

} // namespace ftdmet
