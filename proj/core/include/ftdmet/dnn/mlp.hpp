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

#include "ftdmet/common/random.hpp"
#include "ftdmet/data/dataset.hpp"

#include <Eigen/Dense>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ftdmet {

enum class Activation { relu, softplus };
enum class Optimizer { sgd, adam };

std::string_view to_string(Activation a);
Activation parse_activation(std::string_view s);
std::string_view to_string(Optimizer o);
Optimizer parse_optimizer(std::string_view s);

struct DenseLayer {
    Eigen::MatrixXd weight; ///< out x in
    Eigen::VectorXd bias;
};

/// Fully connected network, hidden activation on every layer but the last.
/// Inputs are standardised with frozen (shift, scale); the scalar output is
/// mapped back with the output pair.
class MlpModel {
public:
    static constexpr int kFormatVersion = 1;

    MlpModel() = default;
    /// He-initialised weights, zero biases, identity normalisation.
    MlpModel(std::vector<int> layer_sizes, Activation activation, Rng& rng);

    const std::vector<int>& layer_sizes() const noexcept { return sizes_; }
    int input_dim() const noexcept { return sizes_.empty() ? 0 : sizes_.front(); }
    Activation activation() const noexcept { return activation_; }
    std::vector<DenseLayer>& layers() noexcept { return layers_; }
    const std::vector<DenseLayer>& layers() const noexcept { return layers_; }

    Eigen::VectorXd input_shift, input_scale;
    double output_shift = 0.0, output_scale = 1.0;
    /// Free-form provenance, e.g. interaction, statistics, sectors.
    std::map<std::string, std::string> metadata;

    double predict(const Eigen::VectorXd& x) const;
    /// One sample per row.
    Eigen::VectorXd predict(const Eigen::MatrixXd& x) const;

    /// Network output on standardised inputs, one sample per column.
    Eigen::RowVectorXd forward(const Eigen::MatrixXd& z) const;

    /// Mean squared error on standardised data and its gradient, one
    /// entry per layer.
    double loss_gradient(const Eigen::MatrixXd& z, const Eigen::RowVectorXd& y,
                         std::vector<DenseLayer>* gradient) const;

    std::size_t parameter_count() const;
    Eigen::VectorXd parameters() const;
    void set_parameters(const Eigen::VectorXd& p);

    void save(std::ostream& out) const;
    static MlpModel load(std::istream& in);
    void save(const std::filesystem::path& path) const;
    static MlpModel load(const std::filesystem::path& path);

private:
    std::vector<int> sizes_;
    Activation activation_ = Activation::relu;
    std::vector<DenseLayer> layers_;
};

struct TrainConfig {
    std::vector<int> hidden{64, 64, 64};
    Activation activation = Activation::relu;
    Optimizer optimizer = Optimizer::adam;
    double learning_rate = 1e-3;
    int epochs = 2000;
    int batch_size = 64;
    double holdout_fraction = 0.1;
    std::uint64_t seed = 0;
    /// Train/holdout split seed; `seed` when unset.
    std::optional<std::uint64_t> split_seed;

    void validate() const;
};

struct HoldoutMetrics {
    double mae = 0.0;
    double rmse = 0.0;
    /// Mean of prediction - target.
    double bias = 0.0;
    /// (target, prediction) per holdout sample.
    std::vector<std::pair<double, double>> parity;
    std::vector<std::size_t> indices;
};

struct TrainResult {
    MlpModel model;
    std::vector<double> loss_history; ///< per epoch, standardised units
    HoldoutMetrics holdout;
};

/// Densities then packed off-diagonal h, one row per sample.
Eigen::MatrixXd features(const Dataset& data);
Eigen::VectorXd features(const Eigen::VectorXd& n, const Eigen::VectorXd& offdiag);

/// Fits f_dnn. Deterministic in (data, config).
TrainResult train(const Dataset& data, const TrainConfig& config);

HoldoutMetrics evaluate_holdout(const MlpModel& model, const Dataset& data, const std::vector<std::size_t>& indices);

/// Members trained concurrently (up to `workers`) with seeds derived from
/// config.seed.
std::vector<TrainResult> train_ensemble(const Dataset& data, const TrainConfig& config, int members = 5,
                                        int workers = 1);

void save_models(const std::vector<MlpModel>& models, const std::filesystem::path& path);
std::vector<MlpModel> load_models(const std::filesystem::path& path);

} // namespace ftdmet
