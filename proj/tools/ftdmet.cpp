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

// ftdmet: data generation, training, parity checks, single DMET runs and
// figure reproduction. Exit codes: 0 success, 1 runtime failure, 2 usage.

#include "ftdmet/bench/experiment.hpp"
#include "ftdmet/bench/reference.hpp"
#include "ftdmet/common/error.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <iostream>
#include <optional>

using namespace ftdmet;

namespace {

struct Common {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string backend;
    std::string out;
    std::optional<std::size_t> samples;
    std::optional<int> workers;
    std::optional<int> epochs;
    std::optional<int> members;
    std::string functional;
};

void add_common(CLI::App* app, Common& c, bool config_required = false) {
    auto* cfg = app->add_option("--config", c.config, "Experiment config file (INI: [experiment] [model] [scan] "
                                                      "[sampling] [training] [functional] [dmet])");
    if(config_required) cfg->required();
    cfg->check(CLI::ExistingFile);
    app->add_option("--seed", c.seed, "Master seed; data, training and minimizer seeds derive from it");
    app->add_option("--backend", c.backend, "Training-data backend")->check(CLI::IsMember({"ed", "vqe", "vqe-noisy"}));
    app->add_option("--out", c.out, "Output path (stdout for CSV when omitted)");
    app->add_option("--samples", c.samples, "Number of sampled Hamiltonians");
    app->add_option("--workers", c.workers, "Worker threads")->check(CLI::PositiveNumber);
    app->add_option("--epochs", c.epochs, "Training epochs")->check(CLI::PositiveNumber);
    app->add_option("--members", c.members, "Ensemble size")->check(CLI::PositiveNumber);
    app->add_option("--functional", c.functional, "Trained ensemble file; trained inline when omitted");
}

ExperimentConfig apply(ExperimentConfig cfg, const Common& c) {
    if(c.seed) cfg.seed = *c.seed;
    if(!c.backend.empty()) cfg.backend = parse_backend(c.backend);
    if(!c.out.empty()) cfg.output = c.out;
    if(c.samples) cfg.sampling.sample_count = *c.samples;
    if(c.workers) cfg.workers = *c.workers;
    if(c.epochs) cfg.training.epochs = *c.epochs;
    if(c.members) cfg.members = *c.members;
    if(!c.functional.empty()) cfg.functional = c.functional;
    return cfg;
}

ExperimentConfig base_config(const Common& c, const std::string& id) {
    ExperimentConfig cfg = c.config.empty() ? default_config(id) : load_config(c.config);
    return apply(cfg, c);
}

void emit(const ResultTable& t, const ExperimentConfig& cfg) {
    if(cfg.output.empty()) write_csv(t, std::cout);
    else spdlog::info("wrote {}", cfg.output.string());
}

} // namespace

int main(int argc, char** argv) {
    spdlog::set_default_logger(spdlog::stderr_color_mt("ftdmet"));

    CLI::App app{"Functional-theory density matrix embedding: data, training and benchmarks"};
    app.require_subcommand(1);
    app.fallthrough();
    std::string log_level = "info";
    app.add_option("--log-level", log_level, "trace, debug, info, warn, error or off")
        ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "off"}));

    // gen-data
    Common gen;
    std::string kind;
    auto* gen_cmd = app.add_subcommand("gen-data", "Sample dimer Hamiltonians and write a training dataset");
    add_common(gen_cmd, gen);
    gen_cmd->add_option("--kind", kind, "Functional: fermi-dimer, bose-dimer or two-band (default from the config id)")
        ->check(CLI::IsMember({"fermi-dimer", "bose-dimer", "two-band"}));

    // train
    Common tr;
    std::string data_path;
    auto* train_cmd = app.add_subcommand("train", "Train an ensemble on a dataset file");
    add_common(train_cmd, tr);
    train_cmd->add_option("--data", data_path, "Dataset file from gen-data")->required()->check(CLI::ExistingFile);

    // parity
    Common par;
    std::string parity_data;
    auto* parity_cmd = app.add_subcommand("parity", "Exact vs predicted functional values; trains inline without --functional");
    add_common(parity_cmd, par);
    parity_cmd->add_option("--data", parity_data, "Evaluate on this dataset instead of the holdout")
        ->check(CLI::ExistingFile);

    // dmet
    Common dm;
    std::string model = "fermi";
    int length        = 8;
    double t          = -0.5;
    std::optional<double> u;
    std::string filling = "half";
    bool exact          = false;
    auto* dmet_cmd = app.add_subcommand("dmet", "One FT-DMET point with references");
    add_common(dmet_cmd, dm);
    dmet_cmd->add_option("--model", model, "fermi, bose or two-band")->check(CLI::IsMember({"fermi", "bose", "two-band"}));
    dmet_cmd->add_option("--length", length, "Chain length")->check(CLI::PositiveNumber);
    dmet_cmd->add_option("--t", t, "Hopping (intersite hopping for two-band)");
    dmet_cmd->add_option("--u", u, "Interaction (Fermi U, Bose w)");
    dmet_cmd->add_option("--filling", filling, "Fermi filling")->check(CLI::IsMember({"half", "quarter", "three-quarter"}));
    dmet_cmd->add_flag("--exact", exact, "Solve the embedded problem by exact diagonalization");

    // bench
    Common be;
    auto* bench_cmd = app.add_subcommand("bench", "Run the experiment described by a config file");
    add_common(bench_cmd, be, true);

    // reproduce
    Common rep;
    std::string figure;
    auto* rep_cmd = app.add_subcommand("reproduce", "Reproduce a figure: fig2 parity, fig3 bose-scan, fig4 noisy-parity, "
                                                    "fig5 fermi-scan, fig6 occupancy, fig7 quarter, fig8 three-quarter, "
                                                    "fig9 two-band");
    add_common(rep_cmd, rep);
    rep_cmd->add_option("figure", figure, "Figure id")
        ->required()
        ->check(CLI::IsMember({"fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "fig9"}));

    try {
        app.parse(argc, argv);
    } catch(const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch(const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch(const CLI::ParseError& e) {
        app.exit(e);
        std::cerr << fmt::format("ftdmet: error stage=usage message=\"{}\"\n", e.what());
        return 2;
    }
    spdlog::set_level(spdlog::level::from_str(log_level));

    std::string stage = "config";
    try {
        if(*gen_cmd) {
            ExperimentConfig cfg = base_config(gen, "fermi-scan");
            if(cfg.output.empty()) throw ConfigError("gen-data needs --out");
            FunctionalRecipe r = recipe_for(cfg);
            if(!kind.empty() && parse_functional_kind(kind) != r.kind) {
                ExperimentConfig other = cfg;
                other.id = kind == "bose-dimer" ? "bose-scan" : kind == "two-band" ? "two-band" : "fermi-scan";
                if(!gen.samples) other.sampling.sample_count = default_config(other.id).sampling.sample_count;
                other.sampling.structured = default_config(other.id).sampling.structured;
                r = recipe_for(other);
            }
            stage = "generate";
            const Dataset d = generate(r.sampling, r.space);
            stage = "write";
            write_dataset(d, cfg.output);
            spdlog::info("wrote {} samples to {}", d.samples.size(), cfg.output.string());
        } else if(*train_cmd) {
            ExperimentConfig cfg = base_config(tr, "fermi-scan");
            if(cfg.output.empty()) throw ConfigError("train needs --out");
            stage = "load";
            const Dataset d = read_dataset(data_path);
            stage = "train";
            TrainConfig tc = cfg.training;
            tc.seed        = derive_seed(cfg.seed, 2);
            const auto runs = train_ensemble(d, tc, cfg.members, cfg.workers);
            std::vector<MlpModel> models;
            for(std::size_t k = 0; k < runs.size(); ++k) {
                spdlog::info("member {}: holdout mae {:.6g} rmse {:.6g} bias {:.6g}", k, runs[k].holdout.mae,
                             runs[k].holdout.rmse, runs[k].holdout.bias);
                models.push_back(runs[k].model);
            }
            stage = "write";
            save_models(models, cfg.output);
        } else if(*parity_cmd) {
            ExperimentConfig cfg = base_config(par, "parity");
            if(cfg.id != "parity" && cfg.id != "noisy-parity") cfg.id = "parity";
            if(parity_data.empty()) {
                stage = "parity";
                emit(run_experiment(cfg), cfg);
            } else {
                stage = "load";
                const Dataset d = read_dataset(parity_data);
                const TrainedFunctional f = obtain_functional(cfg);
                stage = "parity";
                ResultTable tab;
                tab.metadata = {{"experiment", "parity"}, {"data", parity_data}};
                tab.columns  = {"member", "target", "prediction"};
                for(std::size_t k = 0; k < f.members.size(); ++k)
                    for(const auto& s : d.samples)
                        tab.add_row({static_cast<double>(k), s.f_dnn, f.members[k]->value(s.densities, s.offdiag)});
                if(cfg.output.empty()) write_csv(tab, std::cout);
                else write_csv(tab, cfg.output);
            }
        } else if(*dmet_cmd) {
            const std::string id = model == "bose" ? "bose-scan" : model == "two-band" ? "two-band"
                                 : filling == "half"  ? "fermi-scan"
                                                      : filling;
            ExperimentConfig cfg = base_config(dm, id);
            cfg.id               = id;
            if(u) cfg.model.u = *u;
            cfg.lengths  = {length};
            cfg.hoppings = {t};
            if(exact) cfg.dmet.solver = EmbeddedSolver::exact;
            stage = "dmet";
            ResultTable tab = run_experiment(cfg);
            if(tab.meta("failed_rows") != "0") throw StageError("dmet", "point failed, see log");
            emit(tab, cfg);
        } else {
            ExperimentConfig cfg;
            if(*bench_cmd) {
                cfg = apply(load_config(be.config), be);
            } else {
                const std::string id = experiment_for_figure(figure);
                cfg = rep.config.empty() ? apply(default_config(id), rep) : apply(load_config(rep.config), rep);
                cfg.id = id;
            }
            stage = "experiment";
            const ResultTable tab = run_experiment(cfg);
            emit(tab, cfg);
            if(tab.meta("failed_rows") != "0") spdlog::warn("{} row(s) failed", tab.meta("failed_rows"));
        }
    } catch(const StageError& e) {
        std::cerr << fmt::format("ftdmet: error stage={} message=\"{}\"\n", e.stage(), e.what());
        return 1;
    } catch(const std::exception& e) {
        std::cerr << fmt::format("ftdmet: error stage={} message=\"{}\"\n", stage, e.what());
        return 1;
    }
    return 0;
}
