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

#include "ftdmet/data/dataset.hpp"
#include "ftdmet/dmet/dmet.hpp"
#include "ftdmet/dnn/mlp.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace ftdmet {

/// Column table written as CSV: '#' key=value preamble, header row, one
/// comma-delimited row per entry, numbers at 17 significant digits.
struct ResultTable {
    std::vector<std::pair<std::string, std::string>> metadata;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    void add_row(std::vector<double> row);
    /// Column by name; throws ConfigError when absent.
    std::vector<double> column(const std::string& name) const;
    std::string meta(const std::string& key) const;
};

void write_csv(const ResultTable& table, std::ostream& out);
void write_csv(const ResultTable& table, const std::filesystem::path& path);
ResultTable read_csv(const std::filesystem::path& path);

/// Which dimer functional an experiment needs.
enum class FunctionalKind { fermi_dimer, bose_dimer, two_band };

std::string_view to_string(FunctionalKind k);
FunctionalKind parse_functional_kind(std::string_view s);

struct FunctionalRecipe {
    FunctionalKind kind = FunctionalKind::fermi_dimer;
    ModelSpace space;
    SamplingConfig sampling;
    TrainConfig training;
    int members = 5;
};

struct ModelParams {
    double u = 1.0;           ///< Fermi U or Bose w
    double w0 = 3.0, w1 = 1.0;
    double t_interband = 1.0;
    bool periodic = true;
};

/// Embedding-sized training setup: the fragment interaction on orbital 0
/// (or orbitals 0, 1 for the two-band model) next to non-interacting bath
/// orbitals. The two-band recipe samples h with h_01 = t_interband,
/// h_02 = h_13 tied, h_03 = h_12 = 0, matching the bath gauge.
FunctionalRecipe make_recipe(FunctionalKind kind, const ModelParams& model);

struct TrainedFunctional {
    std::vector<FunctionalPtr> members;
    std::vector<MlpModel> models;
    /// Empty when loaded from disk.
    std::vector<TrainResult> runs;
    Dataset data;
};

/// Generates data and trains `recipe.members` networks.
TrainedFunctional build_functional(const FunctionalRecipe& recipe, int workers = 1);
TrainedFunctional load_functional(const std::filesystem::path& path);

struct ExperimentConfig {
    /// parity, noisy-parity, bose-scan, fermi-scan, occupancy, quarter,
    /// three-quarter or two-band.
    std::string id = "fermi-scan";
    std::uint64_t seed = 42;
    Backend backend = Backend::ed;
    int workers = 1;
    std::filesystem::path output;
    ModelParams model;
    std::vector<int> lengths;
    std::vector<double> hoppings;
    /// Reference ED only up to this many sites.
    int ed_max_length = 12;
    /// Trained ensemble file; trained inline when empty.
    std::filesystem::path functional;
    /// Where an inline-trained ensemble is saved, if set.
    std::filesystem::path save_functional;
    SamplingConfig sampling;
    TrainConfig training;
    int members = 5;
    /// Exact validation samples for backends other than ED (parity only).
    std::size_t validation_samples = 500;
    DmetConfig dmet;

    FunctionalKind functional_kind() const;
    /// Grids nonempty, referenced files present, known id.
    void validate() const;
};

/// Defaults for an experiment id.
ExperimentConfig default_config(const std::string& id);

/// Sectioned key = value file ([experiment], [model], [scan], [sampling],
/// [training], [functional]); keys not given keep the defaults of the id.
ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig parse_config(std::istream& in);

/// fig2 -> parity, fig3 -> bose-scan, fig4 -> noisy-parity, fig5 ->
/// fermi-scan, fig6 -> occupancy, fig7 -> quarter, fig8 -> three-quarter,
/// fig9 -> two-band.
std::string experiment_for_figure(const std::string& figure);

/// Recipe for the functional an experiment needs, sampling and training
/// settings taken from the config.
FunctionalRecipe recipe_for(const ExperimentConfig& config);

/// Loads config.functional or trains one per recipe_for.
TrainedFunctional obtain_functional(const ExperimentConfig& config);

ResultTable run_experiment(const ExperimentConfig& config);
/// Same with a functional supplied by the caller.
ResultTable run_experiment(const ExperimentConfig& config, const TrainedFunctional& functional);

/// Per-site ED ground energy and the site-0 double occupancy (fermions).
struct ExactReference {
    double energy_per_site = 0.0;
    double double_occupancy = 0.0;
};
ExactReference exact_reference(const LatticeSystem& system, int sites);

/// Ensemble statistics of one FT-DMET scan point.
struct DmetPoint {
    double mean = 0.0;
    double std = 0.0;
    double double_occupancy = 0.0;
    double double_occupancy_std = 0.0;
};

/// Homogeneous ring: one fragment of orbitals_per_site orbitals at site 0
/// times L copies. heterogeneous = true sums every distinct site fragment
/// instead. Energies per site.
DmetPoint dmet_point(const std::vector<FunctionalPtr>& members, const LatticeSystem& system, int sites,
                     bool heterogeneous, const DmetConfig& config = {});

} // namespace ftdmet
