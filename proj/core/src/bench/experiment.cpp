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

#include "ftdmet/bench/experiment.hpp"

#include "ftdmet/bench/reference.hpp"
#include "ftdmet/common/error.hpp"
#include "ftdmet/exact/ground_state.hpp"

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <mutex>
#include <set>
#include <thread>

namespace ftdmet {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string format_number(double v) {
    if(std::isnan(v)) return "nan";
    return fmt::format("{:.17g}", v);
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    boost::split(out, text, boost::is_any_of(", "), boost::token_compress_on);
    out.erase(std::remove_if(out.begin(), out.end(), [](const std::string& s) { return s.empty(); }), out.end());
    return out;
}

double to_double(const std::string& s, const std::string& key) {
    try {
        std::size_t used = 0;
        const double v   = std::stod(s, &used);
        if(used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch(const std::exception&) {
        throw ConfigError(fmt::format("{}: not a number: '{}'", key, s));
    }
}

long long to_integer(const std::string& s, const std::string& key) {
    try {
        std::size_t used = 0;
        const long long v = std::stoll(s, &used);
        if(used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch(const std::exception&) {
        throw ConfigError(fmt::format("{}: not an integer: '{}'", key, s));
    }
}

bool to_bool(const std::string& s, const std::string& key) {
    const auto v = boost::algorithm::to_lower_copy(s);
    if(v == "true" || v == "1" || v == "yes") return true;
    if(v == "false" || v == "0" || v == "no") return false;
    throw ConfigError(fmt::format("{}: not a boolean: '{}'", key, s));
}

const std::set<std::string> kExperiments{"parity",    "noisy-parity", "bose-scan",     "fermi-scan",
                                         "occupancy", "quarter",      "three-quarter", "two-band"};

bool is_parity(const std::string& id) { return id == "parity" || id == "noisy-parity"; }

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v;
    for(int k = 0; k < n; ++k) v.push_back(a + (b - a) * k / (n - 1));
    return v;
}

struct Stats {
    double mean = 0.0, std = 0.0;
};

Stats stats(const std::vector<double>& v) {
    Stats s;
    for(double x : v) s.mean += x;
    s.mean /= static_cast<double>(v.size());
    for(double x : v) s.std += (x - s.mean) * (x - s.mean);
    s.std = std::sqrt(s.std / static_cast<double>(v.size()));
    return s;
}

// Runs f(i) for i < count on up to `workers` threads.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& f) {
    std::atomic<std::size_t> next{0};
    auto loop = [&] {
        for(std::size_t i; (i = next++) < count;) f(i);
    };
    const int n = std::max(1, std::min<int>(workers, static_cast<int>(count)));
    if(n == 1) {
        loop();
        return;
    }
    std::vector<std::jthread> pool;
    for(int k = 0; k < n; ++k) pool.emplace_back(loop);
}

} // namespace

void ResultTable::add_row(std::vector<double> row) {
    if(row.size() != columns.size())
        throw DimensionError(fmt::format("row has {} values for {} columns", row.size(), columns.size()));
    rows.push_back(std::move(row));
}

std::vector<double> ResultTable::column(const std::string& name) const {
    const auto it = std::find(columns.begin(), columns.end(), name);
    if(it == columns.end()) throw ConfigError(fmt::format("no column '{}'", name));
    const auto c = static_cast<std::size_t>(it - columns.begin());
    std::vector<double> out;
    for(const auto& r : rows) out.push_back(r[c]);
    return out;
}

std::string ResultTable::meta(const std::string& key) const {
    for(const auto& [k, v] : metadata)
        if(k == key) return v;
    throw ConfigError(fmt::format("no metadata '{}'", key));
}

void write_csv(const ResultTable& table, std::ostream& out) {
    for(const auto& [k, v] : table.metadata) out << "# " << k << '=' << v << '\n';
    out << boost::algorithm::join(table.columns, ",") << '\n';
    for(const auto& r : table.rows) {
        for(std::size_t c = 0; c < r.size(); ++c) out << (c ? "," : "") << format_number(r[c]);
        out << '\n';
    }
}

void write_csv(const ResultTable& table, const std::filesystem::path& path) {
    if(path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if(!out) throw Error(fmt::format("cannot write {}", path.string()));
    write_csv(table, out);
    if(!out) throw Error(fmt::format("write failed: {}", path.string()));
}

ResultTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if(!in) throw FormatError(fmt::format("cannot open {}", path.string()));
    ResultTable t;
    std::string line;
    bool header = false;
    while(std::getline(in, line)) {
        if(line.empty()) continue;
        if(line.front() == '#') {
            const auto eq = line.find('=');
            if(eq == std::string::npos) throw FormatError("metadata line without '=': " + line);
            t.metadata.emplace_back(boost::trim_copy(line.substr(1, eq - 1)), line.substr(eq + 1));
            continue;
        }
        std::vector<std::string> cells;
        boost::split(cells, line, boost::is_any_of(","));
        if(!header) {
            t.columns = cells;
            header    = true;
            continue;
        }
        std::vector<double> row;
        for(const auto& c : cells) row.push_back(c == "nan" ? kNaN : to_double(c, "csv cell"));
        t.add_row(std::move(row));
    }
    if(!header) throw FormatError(fmt::format("{}: no header row", path.string()));
    return t;
}

std::string_view to_string(FunctionalKind k) {
    switch(k) {
    case FunctionalKind::fermi_dimer: return "fermi-dimer";
    case FunctionalKind::bose_dimer: return "bose-dimer";
    case FunctionalKind::two_band: return "two-band";
    }
    return "?";
}

FunctionalKind parse_functional_kind(std::string_view s) {
    if(s == "fermi-dimer") return FunctionalKind::fermi_dimer;
    if(s == "bose-dimer") return FunctionalKind::bose_dimer;
    if(s == "two-band") return FunctionalKind::two_band;
    throw ConfigError(fmt::format("unknown functional kind '{}'", s));
}

FunctionalRecipe make_recipe(FunctionalKind kind, const ModelParams& model) {
    FunctionalRecipe r;
    r.kind = kind;
    switch(kind) {
    case FunctionalKind::fermi_dimer: {
        FermiHubbardParams p;
        p.sites = 1, p.n_up = 1, p.n_down = 1, p.u = {model.u}, p.periodic = false;
        r.space = {Statistics::fermion(), 2, Sector::spins(1, 1), fermi_hubbard(p).interaction};
        break;
    }
    case FunctionalKind::bose_dimer: {
        BoseHubbardParams p;
        p.sites = 1, p.particles = 2, p.w = {model.u}, p.periodic = false;
        r.space = {Statistics::boson(2), 2, Sector::total(2), bose_hubbard(p).interaction};
        break;
    }
    case FunctionalKind::two_band: {
        TwoBandParams p;
        p.sites = 1, p.n_up = 1, p.n_down = 1, p.w0 = model.w0, p.w1 = model.w1;
        p.t_interband = model.t_interband, p.periodic = false;
        r.space = {Statistics::fermion(), 4, Sector::spins(2, 2), two_band_hubbard(p).interaction};
        StructuredSampling s;
        s.fixed = {{0, 1, model.t_interband}, {0, 3, 0.0}, {1, 2, 0.0}};
        s.tied  = {{{{0, 2}, {1, 3}}, {1.0, 1.0}, 0.0, 2.0}};
        r.sampling.structured   = s;
        r.sampling.sample_count = 10000;
        break;
    }
    }
    return r;
}

TrainedFunctional build_functional(const FunctionalRecipe& recipe, int workers) {
    TrainedFunctional tf;
    SamplingConfig sampling = recipe.sampling;
    sampling.workers        = std::max(sampling.workers, workers);
    spdlog::info("generating {} {} samples ({})", sampling.sample_count, to_string(recipe.kind),
                 to_string(sampling.backend));
    tf.data = generate(sampling, recipe.space);
    spdlog::info("training {} member(s) on {} samples", recipe.members, tf.data.samples.size());
    tf.runs = train_ensemble(tf.data, recipe.training, recipe.members, workers);
    for(const auto& r : tf.runs) {
        tf.models.push_back(r.model);
        tf.members.push_back(make_functional({r.model}));
    }
    return tf;
}

TrainedFunctional load_functional(const std::filesystem::path& path) {
    if(!std::filesystem::exists(path)) throw StageError("load", fmt::format("functional file {} not found", path.string()));
    TrainedFunctional tf;
    try {
        tf.models = load_models(path);
    } catch(const Error& e) {
        throw StageError("load", e.what());
    }
    for(const auto& m : tf.models) tf.members.push_back(make_functional({m}));
    return tf;
}

FunctionalKind ExperimentConfig::functional_kind() const {
    if(id == "bose-scan") return FunctionalKind::bose_dimer;
    if(id == "two-band") return FunctionalKind::two_band;
    return FunctionalKind::fermi_dimer;
}

void ExperimentConfig::validate() const {
    if(!kExperiments.contains(id)) throw ConfigError(fmt::format("unknown experiment '{}'", id));
    if(!is_parity(id) && (lengths.empty() || hoppings.empty())) throw ConfigError("scan grids must be nonempty");
    for(int l : lengths)
        if(l < 1) throw ConfigError(fmt::format("invalid length {}", l));
    if(workers < 1) throw ConfigError("workers must be >= 1");
    if(members < 1) throw ConfigError("members must be >= 1");
    if(!functional.empty() && !std::filesystem::exists(functional))
        throw StageError("load", fmt::format("functional file {} not found", functional.string()));
    sampling.validate();
    training.validate();
}

ExperimentConfig default_config(const std::string& id) {
    if(!kExperiments.contains(id)) throw ConfigError(fmt::format("unknown experiment '{}'", id));
    ExperimentConfig c;
    c.id       = id;
    c.sampling = make_recipe(c.functional_kind(), c.model).sampling;
    if(id == "noisy-parity") {
        c.backend               = Backend::vqe_noisy;
        c.sampling.sample_count = 1000;
    } else if(id == "bose-scan") {
        c.lengths  = {2, 6};
        c.hoppings = linspace(-1.0, 0.0, 11);
    } else if(id == "fermi-scan") {
        c.lengths  = {8, 16, 32, 64};
        c.hoppings = {-1.0, -0.75, -0.5, -0.25};
    } else if(id == "occupancy") {
        c.lengths  = {2, 4, 6, 8, 10};
        c.hoppings = {-0.25};
    } else if(id == "quarter" || id == "three-quarter") {
        c.lengths  = {4, 8, 12};
        c.hoppings = {-1.0, -0.5, -0.25};
    } else if(id == "two-band") {
        c.lengths  = {2, 3};
        c.hoppings        = {0.1, 0.5, 1.0};
        c.training.epochs = 1000;
    }
    return c;
}

namespace {

// Drops a trailing "; ..." or "# ..." comment preceded by whitespace.
std::string strip_comment(const std::string& raw) {
    std::string v = raw;
    for(std::size_t i = 1; i < v.size(); ++i)
        if((v[i] == ';' || v[i] == '#') && std::isspace(static_cast<unsigned char>(v[i - 1]))) {
            v.resize(i);
            break;
        }
    return boost::trim_copy(v);
}

} // namespace

ExperimentConfig parse_config(std::istream& in) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    try {
        pt::read_ini(in, tree);
    } catch(const pt::ini_parser_error& e) {
        throw ConfigError(fmt::format("config: {}", e.what()));
    }
    const auto id = strip_comment(tree.get<std::string>("experiment.id", "fermi-scan"));
    ExperimentConfig c = default_config(id);
    std::optional<StructuredSampling> structured = c.sampling.structured;

    for(const auto& [section, body] : tree) {
        if(!body.data().empty()) throw ConfigError(fmt::format("config: key '{}' outside a section", section));
        for(const auto& [key, node] : body) {
            const std::string v    = strip_comment(node.data());
            const std::string name = section + "." + key;
            auto dbl  = [&] { return to_double(v, name); };
            auto num  = [&] { return to_integer(v, name); };
            bool known = true;
            if(section == "experiment") {
                if(key == "id") {
                } else if(key == "seed") c.seed = static_cast<std::uint64_t>(num());
                else if(key == "backend") c.backend = parse_backend(v);
                else if(key == "workers") c.workers = static_cast<int>(num());
                else if(key == "output") c.output = v;
                else if(key == "ed_max_length") c.ed_max_length = static_cast<int>(num());
                else known = false;
            } else if(section == "model") {
                if(key == "u" || key == "w") c.model.u = dbl();
                else if(key == "w0") c.model.w0 = dbl();
                else if(key == "w1") c.model.w1 = dbl();
                else if(key == "t_interband") c.model.t_interband = dbl();
                else if(key == "periodic") c.model.periodic = to_bool(v, name);
                else known = false;
            } else if(section == "scan") {
                if(key == "lengths") {
                    c.lengths.clear();
                    for(const auto& s : split_list(v)) c.lengths.push_back(static_cast<int>(to_integer(s, name)));
                } else if(key == "hoppings") {
                    c.hoppings.clear();
                    for(const auto& s : split_list(v)) c.hoppings.push_back(to_double(s, name));
                } else known = false;
            } else if(section == "sampling") {
                auto& s = c.sampling;
                if(key == "samples") s.sample_count = static_cast<std::size_t>(num());
                else if(key == "diag_lo") s.diag_lo = dbl();
                else if(key == "diag_hi") s.diag_hi = dbl();
                else if(key == "offdiag_lo") s.offdiag_lo = dbl();
                else if(key == "offdiag_hi") s.offdiag_hi = dbl();
                else if(key == "structured") structured = v.empty() || v == "none" ? std::nullopt
                                                                                   : std::optional(StructuredSampling::parse(v));
                else if(key == "max_flagged_fraction") s.max_flagged_fraction = dbl();
                else if(key == "vqe_layers") s.vqe.layers = static_cast<int>(num());
                else if(key == "vqe_restarts") s.vqe.restarts = static_cast<int>(num());
                else if(key == "shots") s.noise.shots = static_cast<int>(num());
                else if(key == "depolarizing_rate") s.noise.depolarizing_rate = dbl();
                else if(key == "readout_flip") s.noise.readout_flip = dbl();
                else if(key == "validation_samples") c.validation_samples = static_cast<std::size_t>(num());
                else known = false;
            } else if(section == "training") {
                auto& t = c.training;
                if(key == "hidden") {
                    t.hidden.clear();
                    for(const auto& s : split_list(v)) t.hidden.push_back(static_cast<int>(to_integer(s, name)));
                } else if(key == "activation") t.activation = parse_activation(v);
                else if(key == "optimizer") t.optimizer = parse_optimizer(v);
                else if(key == "learning_rate") t.learning_rate = dbl();
                else if(key == "epochs") t.epochs = static_cast<int>(num());
                else if(key == "batch_size") t.batch_size = static_cast<int>(num());
                else if(key == "holdout_fraction") t.holdout_fraction = dbl();
                else if(key == "members") c.members = static_cast<int>(num());
                else known = false;
            } else if(section == "functional") {
                if(key == "path") c.functional = v;
                else if(key == "save") c.save_functional = v;
                else known = false;
            } else if(section == "dmet") {
                if(key == "offset") c.dmet.offset = dbl();
                else if(key == "restarts") c.dmet.minimizer.restarts = static_cast<int>(num());
                else if(key == "pin_fragment") c.dmet.minimizer.pin_fragment = to_bool(v, name);
                else if(key == "solver") {
                    if(v == "functional") c.dmet.solver = EmbeddedSolver::functional;
                    else if(v == "exact") c.dmet.solver = EmbeddedSolver::exact;
                    else throw ConfigError(fmt::format("{}: expected functional or exact", name));
                } else known = false;
            } else {
                throw ConfigError(fmt::format("config: unknown section [{}]", section));
            }
            if(!known) throw ConfigError(fmt::format("config: unknown key {}", name));
        }
    }
    c.sampling.structured = structured;
    c.validate();
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if(!in) throw ConfigError(fmt::format("cannot open config {}", path.string()));
    return parse_config(in);
}

std::string experiment_for_figure(const std::string& figure) {
    static const std::map<std::string, std::string> map{
        {"fig2", "parity"},    {"fig3", "bose-scan"}, {"fig4", "noisy-parity"},  {"fig5", "fermi-scan"},
        {"fig6", "occupancy"}, {"fig7", "quarter"},   {"fig8", "three-quarter"}, {"fig9", "two-band"}};
    const auto it = map.find(figure);
    if(it == map.end()) throw ConfigError(fmt::format("unknown figure id '{}' (fig2..fig9)", figure));
    return it->second;
}

FunctionalRecipe recipe_for(const ExperimentConfig& config) {
    FunctionalRecipe r = make_recipe(config.functional_kind(), config.model);
    r.sampling         = config.sampling;
    r.sampling.backend = config.backend;
    r.sampling.seed    = derive_seed(config.seed, 1);
    r.sampling.workers = config.workers;
    r.training         = config.training;
    r.training.seed    = derive_seed(config.seed, 2);
    r.members          = config.members;
    return r;
}

TrainedFunctional obtain_functional(const ExperimentConfig& config) {
    if(!config.functional.empty()) return load_functional(config.functional);
    TrainedFunctional tf = build_functional(recipe_for(config), config.workers);
    if(!config.save_functional.empty()) save_models(tf.models, config.save_functional);
    return tf;
}

ExactReference exact_reference(const LatticeSystem& system, int sites) {
    const ExactSolution s = energy_of(system);
    ExactReference r;
    r.energy_per_site = s.energy / sites;
    if(system.statistics.is_fermion()) r.double_occupancy = double_occupancy(s.state, system.basis(), 0);
    return r;
}

DmetPoint dmet_point(const std::vector<FunctionalPtr>& members, const LatticeSystem& system, int sites,
                     bool heterogeneous, const DmetConfig& config) {
    const int per_site = system.orbitals_per_site;
    std::vector<FunctionalPtr> runs = members;
    if(config.solver == EmbeddedSolver::exact) runs = {nullptr};
    if(runs.empty()) throw ConfigError("dmet_point: no functional");
    std::vector<double> e, d;
    for(const auto& f : runs) {
        if(heterogeneous) {
            std::vector<FragmentSpec> frags;
            for(int s = 0; s < sites; ++s) {
                auto fr   = site_fragment(s, 1, per_site, sites);
                fr.copies = 1;
                frags.push_back(fr);
            }
            const auto r = run_dmet_heterogeneous(f, system, frags, config);
            e.push_back(r.e_total);
            double docc = 0.0;
            for(const auto& fr : r.fragments) {
                const auto it = fr.observables.find("double_occupancy");
                docc += it == fr.observables.end() ? kNaN : it->second;
            }
            d.push_back(docc / sites);
        } else {
            const auto r = run_dmet(f, system, site_fragment(0, 1, per_site, sites), config);
            e.push_back(r.e_total);
            const auto it = r.observables.find("double_occupancy");
            d.push_back(it == r.observables.end() ? kNaN : it->second);
        }
    }
    const Stats se = stats(e), sd = stats(d);
    return {se.mean, se.std, sd.mean, sd.std};
}

namespace {

struct ScanPoint {
    int length;
    double t;
};

LatticeSystem scan_system(const ExperimentConfig& c, int length, double t) {
    const auto& m = c.model;
    if(c.id == "bose-scan") {
        BoseHubbardParams p;
        p.sites = length, p.particles = 2, p.w = {m.u}, p.t = t, p.periodic = m.periodic;
        return bose_hubbard(p);
    }
    if(c.id == "two-band") {
        TwoBandParams p;
        p.sites = length, p.n_up = length, p.n_down = length, p.w0 = m.w0, p.w1 = m.w1;
        p.t_interband = m.t_interband, p.t_intersite = t, p.periodic = m.periodic;
        return two_band_hubbard(p);
    }
    // Electrons per spin: L/2 at half, L/4 at quarter, 3L/4 at three-quarter filling.
    const int quarters = c.id == "quarter" ? 1 : c.id == "three-quarter" ? 3 : 2;
    if(quarters * length % 4 != 0)
        throw ConfigError(fmt::format("{}: length {} gives no integer filling", c.id, length));
    const int per_spin = quarters * length / 4;
    FermiHubbardParams p;
    p.sites = length, p.n_up = per_spin, p.n_down = per_spin, p.u = {m.u}, p.t = t, p.periodic = m.periodic;
    return fermi_hubbard(p);
}

ResultTable base_table(const ExperimentConfig& c) {
    ResultTable t;
    t.metadata = {{"experiment", c.id},
                  {"seed", std::to_string(c.seed)},
                  {"backend", std::string(to_string(c.backend))},
                  {"functional", c.functional.empty() ? "inline" : c.functional.string()},
                  {"members", std::to_string(c.members)},
                  {"samples", std::to_string(c.sampling.sample_count)},
                  {"epochs", std::to_string(c.training.epochs)},
                  {"solver", c.dmet.solver == EmbeddedSolver::exact ? "exact" : "functional"}};
    if(c.id == "two-band" || c.id == "bose-scan") {
        t.metadata.emplace_back("w", c.id == "two-band" ? fmt::format("w0={} w1={} t_interband={}", format_number(c.model.w0),
                                                                      format_number(c.model.w1),
                                                                      format_number(c.model.t_interband))
                                                        : format_number(c.model.u));
    } else {
        t.metadata.emplace_back("u", format_number(c.model.u));
    }
    return t;
}

ResultTable run_parity(const ExperimentConfig& c, const TrainedFunctional& tf) {
    ResultTable t = base_table(c);
    t.columns     = {"member", "target", "prediction"};
    const bool holdout = c.backend == Backend::ed && !tf.runs.empty();
    Dataset reference;
    if(!holdout) {
        FunctionalRecipe r           = recipe_for(c);
        SamplingConfig v             = r.sampling;
        v.backend                    = Backend::ed;
        v.sample_count               = c.validation_samples;
        v.seed                       = derive_seed(c.seed, 3);
        reference                    = generate(v, r.space);
    }
    std::vector<double> mae, bias;
    for(std::size_t k = 0; k < tf.members.size(); ++k) {
        std::vector<std::pair<double, double>> pairs;
        if(holdout) pairs = tf.runs[k].holdout.parity;
        else
            for(const auto& s : reference.samples) pairs.emplace_back(s.f_dnn, tf.members[k]->value(s.densities, s.offdiag));
        double a = 0.0, b = 0.0;
        for(const auto& [x, y] : pairs) {
            t.add_row({static_cast<double>(k), x, y});
            a += std::abs(y - x);
            b += y - x;
        }
        mae.push_back(a / static_cast<double>(pairs.size()));
        bias.push_back(b / static_cast<double>(pairs.size()));
    }
    t.metadata.emplace_back("evaluation", holdout ? "holdout" : "exact-validation");
    t.metadata.emplace_back("mae", format_number(stats(mae).mean));
    t.metadata.emplace_back("bias", format_number(stats(bias).mean));
    return t;
}

} // namespace

ResultTable run_experiment(const ExperimentConfig& config) {
    config.validate();
    TrainedFunctional tf;
    if(config.dmet.solver == EmbeddedSolver::functional || is_parity(config.id)) tf = obtain_functional(config);
    return run_experiment(config, tf);
}

ResultTable run_experiment(const ExperimentConfig& c, const TrainedFunctional& tf) {
    c.validate();
    if(is_parity(c.id)) {
        ResultTable t = run_parity(c, tf);
        if(!c.output.empty()) write_csv(t, c.output);
        return t;
    }

    ResultTable t = base_table(c);
    const bool fermi = c.id == "fermi-scan" || c.id == "quarter" || c.id == "three-quarter";
    if(c.id == "fermi-scan") t.columns = {"length", "t", "e_ftdmet_mean", "e_ftdmet_std", "e_rhf", "e_ref"};
    else if(fermi) t.columns = {"length", "t", "e_ftdmet_mean", "e_ftdmet_std", "e_rhf", "e_ref", "e_dmet_ed"};
    else if(c.id == "occupancy") t.columns = {"length", "t", "d_ftdmet_mean", "d_ftdmet_std", "d_rhf", "d_exact", "d_dmet_ed"};
    else if(c.id == "bose-scan") t.columns = {"length", "t", "e_ftdmet_mean", "e_ftdmet_std", "e_exact", "e_dmet_ed"};
    else t.columns = {"length", "t_intersite", "e_ftdmet_mean", "e_ftdmet_std", "e_rhf", "e_exact", "e_dmet_ed"};
    if(c.id == "fermi-scan")
        t.metadata.emplace_back("e_ref", fmt::format("exact diagonalization for length <= {}, else Bethe ansatz", c.ed_max_length));
    t.metadata.emplace_back("energies", c.id == "bose-scan" ? "total" : "per site");

    std::vector<ScanPoint> points;
    for(int l : c.lengths)
        for(double h : c.hoppings) points.push_back({l, h});
    std::vector<std::vector<double>> rows(points.size());
    std::atomic<int> failed{0};
    std::mutex log_mutex;
    const bool hetero = c.id == "two-band";
    DmetConfig exact_cfg = c.dmet;
    exact_cfg.solver     = EmbeddedSolver::exact;
    DmetConfig dmet_cfg  = c.dmet;
    dmet_cfg.minimizer.seed = derive_seed(c.seed, 4);

    parallel_for(points.size(), c.workers, [&](std::size_t i) {
        const auto [l, h] = points[i];
        std::vector<double>& row = rows[i];
        row.assign(t.columns.size(), kNaN);
        row[0] = l;
        row[1] = h;
        try {
            const LatticeSystem sys = scan_system(c, l, h);
            const bool ed           = l <= c.ed_max_length;
            const double scale      = c.id == "bose-scan" ? l : 1.0; // totals for bosons
            const DmetPoint p       = dmet_point(tf.members, sys, l, hetero, dmet_cfg);
            std::optional<DmetPoint> pe;
            if(c.id != "fermi-scan") pe = dmet_point({}, sys, l, hetero, exact_cfg);
            std::optional<ExactReference> ref;
            if(ed) ref = exact_reference(sys, l);
            if(c.id == "occupancy") {
                const auto hf = hartree_fock(sys);
                row[2] = p.double_occupancy, row[3] = p.double_occupancy_std;
                row[4] = hf.gamma_up(0, 0) * hf.gamma_down(0, 0);
                row[5] = ref ? ref->double_occupancy : kNaN;
                row[6] = pe->double_occupancy;
            } else if(c.id == "bose-scan") {
                row[2] = p.mean, row[3] = p.std;
                row[4] = ref ? ref->energy_per_site * scale : kNaN;
                row[5] = pe->mean;
            } else {
                row[2] = p.mean / l, row[3] = p.std / l;
                row[4] = hartree_fock(sys).energy / l;
                if(c.id == "fermi-scan") row[5] = ref ? ref->energy_per_site : bethe_half_filling(c.model.u, h);
                else row[5] = ref ? ref->energy_per_site : kNaN, row[6] = pe->mean / l;
            }
        } catch(const std::exception& e) {
            ++failed;
            std::lock_guard lock(log_mutex);
            spdlog::error("{} length={} t={}: {}", c.id, l, h, e.what());
        }
    });
    for(auto& r : rows) t.add_row(std::move(r));
    t.metadata.emplace_back("failed_rows", std::to_string(failed.load()));
    if(!c.output.empty()) write_csv(t, c.output);
    return t;
}

} // namespace ftdmet
