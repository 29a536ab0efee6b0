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

#include "ftdmet/dnn/functional.hpp"

#include "ftdmet/common/error.hpp"

#include <fmt/format.h>

#include <cmath>

namespace ftdmet {

namespace {

int orbitals_for_inputs(int inputs) {
    // inputs = m + m (m - 1) / 2
    for(int m = 1; m <= inputs; ++m)
        if(m + offdiag_count(m) == inputs) return m;
    throw DimensionError(fmt::format("no orbital count matches {} network inputs", inputs));
}

} // namespace

MlpFunctional::MlpFunctional(MlpModel model) : model_(std::move(model)), orbitals_(orbitals_for_inputs(model_.input_dim())) {}

double MlpFunctional::value(const Eigen::VectorXd& n, const Eigen::VectorXd& offdiag) const {
    if(n.size() != orbitals_ || offdiag.size() != offdiag_count(orbitals_))
        throw DimensionError(fmt::format("functional over {} orbitals got {} densities and {} off-diagonals", orbitals_,
                                         n.size(), offdiag.size()));
    return model_.predict(features(n, offdiag));
}

std::optional<InteractionSpec> MlpFunctional::interaction() const {
    const auto it = model_.metadata.find("interaction");
    if(it == model_.metadata.end()) return std::nullopt;
    return InteractionSpec::parse(it->second);
}

EnsembleFunctional::EnsembleFunctional(std::vector<FunctionalPtr> members) : members_(std::move(members)) {
    if(members_.empty()) throw ConfigError("ensemble needs at least one member");
    for(const auto& m : members_)
        if(m->orbitals() != members_.front()->orbitals()) throw DimensionError("ensemble members differ in size");
}

double EnsembleFunctional::value(const Eigen::VectorXd& n, const Eigen::VectorXd& offdiag) const {
    double s = 0.0;
    for(const auto& m : members_) s += m->value(n, offdiag);
    return s / static_cast<double>(members_.size());
}

double EnsembleFunctional::spread(const Eigen::VectorXd& n, const Eigen::VectorXd& offdiag) const {
    const double mean = value(n, offdiag);
    double s          = 0.0;
    for(const auto& m : members_) s += std::pow(m->value(n, offdiag) - mean, 2);
    return std::sqrt(s / static_cast<double>(members_.size()));
}

ScaledFunctional::ScaledFunctional(FunctionalPtr inner, double lambda) : inner_(std::move(inner)), lambda_(lambda) {
    if(!(lambda_ > 0.0) || !std::isfinite(lambda_)) throw ConfigError("ScaledFunctional: factor must be positive");
}

double ScaledFunctional::value(const Eigen::VectorXd& n, const Eigen::VectorXd& offdiag) const {
    return lambda_ * inner_->value(n, offdiag / lambda_);
}

std::optional<InteractionSpec> ScaledFunctional::interaction() const {
    auto w = inner_->interaction();
    if(w) return w->scaled(lambda_);
    return w;
}

ExactFunctional::ExactFunctional(ModelSpace space, LegendreOptions options)
    : space_(std::move(space)), options_(options) {}

double ExactFunctional::value(const Eigen::VectorXd& n, const Eigen::VectorXd& offdiag) const {
    const auto r = legendre_density(space_, n, unpack_offdiag(offdiag, Eigen::VectorXd::Zero(space_.orbitals)), options_);
    return r.value;
}

FunctionalPtr make_functional(const std::vector<MlpModel>& models) {
    if(models.empty()) throw ConfigError("no models");
    if(models.size() == 1) return std::make_shared<MlpFunctional>(models.front());
    std::vector<FunctionalPtr> members;
    for(const auto& m : models) members.push_back(std::make_shared<MlpFunctional>(m));
    return std::make_shared<EnsembleFunctional>(std::move(members));
}

FunctionalPtr adapt_functional(FunctionalPtr f, const InteractionSpec& w) {
    const auto trained = f->interaction();
    if(!trained) return f;
    const auto ratio = w.ratio_to(*trained, 1e-9);
    if(!ratio)
        throw ConfigError(fmt::format("functional built for interaction '{}' cannot serve '{}'", trained->to_string(),
                                      w.to_string()));
    if(std::abs(*ratio - 1.0) < 1e-12) return f;
    return std::make_shared<ScaledFunctional>(std::move(f), *ratio);
}

Eigen::MatrixXd offdiag_gamma(const DensityFunctional& f, const Eigen::VectorXd& n, const Eigen::VectorXd& offdiag,
                              double delta) {
    if(!(delta > 0.0)) throw ConfigError("offdiag_gamma: delta must be positive");
    const auto m      = static_cast<int>(n.size());
    Eigen::MatrixXd g = n.asDiagonal();
    Eigen::Index k    = 0;
    for(int i = 0; i < m; ++i)
        for(int j = i + 1; j < m; ++j, ++k) {
            Eigen::VectorXd up = offdiag, dn = offdiag;
            up(k) += delta;
            dn(k) -= delta;
            g(i, j) = g(j, i) = (f.value(n, up) - f.value(n, dn)) / (4.0 * delta);
        }
    return g;
}

} // namespace ftdmet
