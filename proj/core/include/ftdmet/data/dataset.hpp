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
#include "ftdmet/manybody/models.hpp"
#include "ftdmet/vqe/vqe.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace ftdmet {

/// Off-diagonal entries (i, j), i < j, that share one sampled scalar s:
/// h_ij = weight * s with s uniform in [lo, hi].
struct TiedGroup {
    std::vector<std::pair<int, int>> entries;
    std::vector<double> weights;
    double lo = 0.0;
    double hi = 1.0;
};

struct FixedEntry {
    int i = 0;
    int j = 0;
    double value = 0.0;
};

/// Reduced sampling for structured fragments: some off-diagonal entries
/// pinned, others tied to shared scalars; the rest stay independent.
struct StructuredSampling {
    std::vector<FixedEntry> fixed;
    std::vector<TiedGroup> tied;

    std::string to_string() const;
    static StructuredSampling parse(const std::string& text);
};

struct SamplingConfig {
    double diag_lo = -2.0, diag_hi = 2.0;
    double offdiag_lo = -2.0, offdiag_hi = 2.0;
    std::size_t sample_count = 5000;
    std::uint64_t seed = 0;
    Backend backend = Backend::ed;
    std::optional<StructuredSampling> structured;
    int workers = 1;
    double max_flagged_fraction = 0.05;
    VqeOptions vqe;
    NoiseConfig noise = NoiseConfig::hardware_like();

    void validate() const;
};

/// Random orbital one-body matrix; draws every entry in a fixed order, then
/// applies the structured overrides.
Eigen::MatrixXd sample_h(const SamplingConfig& config, int orbitals, Rng& rng);

struct TrainingSample {
    Eigen::VectorXd densities;
    Eigen::VectorXd offdiag;
    double f_dnn = 0.0;
    double f_rdm = 0.0;
    double e0 = 0.0;
    std::optional<Eigen::MatrixXd> gamma;
    Eigen::MatrixXd h;
    bool degenerate = false;
};

struct BackendResult {
    double energy = 0.0;
    Eigen::MatrixXd gamma;
    bool degenerate = false;
};

/// Ground energy and spin-summed 1-RDM of W + h via the chosen backend.
BackendResult solve_with_backend(const ModelSpace& space, const Eigen::MatrixXd& orbital_h, Backend backend,
                                 const VqeOptions& vqe = {}, const NoiseConfig& noise = {});

/// f_dnn = e0 - sum_i h_ii n_i, f_rdm = e0 - sum_ij h_ij gamma_ij.
TrainingSample make_sample(const Eigen::MatrixXd& orbital_h, const ModelSpace& space, Backend backend,
                           const VqeOptions& vqe = {}, const NoiseConfig& noise = {});

struct DatasetMetadata {
    int format_version = 1;
    ModelSpace space;
    SamplingConfig sampling;
    /// Every particle sector present; more than one after concatenate().
    std::vector<Sector> sectors;
    std::size_t dropped = 0;
};

struct Dataset {
    DatasetMetadata metadata;
    std::vector<TrainingSample> samples;

    int orbitals() const noexcept { return metadata.space.orbitals; }
};

/// Samples are pure functions of (space, config, index); output order is
/// the sample index regardless of `config.workers`.
Dataset generate(const SamplingConfig& config, const ModelSpace& space);

/// Datasets of one interaction in several particle sectors.
Dataset concatenate(const std::vector<Dataset>& parts);

inline constexpr int kDatasetFormatVersion = 1;

void write_dataset(const Dataset& data, const std::filesystem::path& path);
Dataset read_dataset(const std::filesystem::path& path);

std::string format_statistics(const Statistics& s);
Statistics parse_statistics(const std::string& text);
std::string format_sector(const Sector& s);
Sector parse_sector(const std::string& text);

} // namespace ftdmet
