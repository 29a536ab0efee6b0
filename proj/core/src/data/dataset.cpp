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

#include "ftdmet/data/dataset.hpp"

#include "ftdmet/common/error.hpp"
#include "ftdmet/exact/legendre.hpp"

#include <boost/algorithm/string.hpp>
#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <thread>

namespace ftdmet {

namespace {

std::vector<std::string> split(const std::string& text, const char* delims) {
    std::vector<std::string> out;
    if(text.empty()) return out;
    boost::split(out, text, boost::is_any_of(delims));
    for(auto& s : out) boost::trim(s);
    return out;
}

double to_double(const std::string& s) {
    std::size_t used = 0;
    double v         = 0.0;
    try {
        v = std::stod(s, &used);
    } catch(const std::exception&) {
        throw FormatError(fmt::format("not a number: '{}'", s));
    }
    if(used != s.size()) throw FormatError(fmt::format("not a number: '{}'", s));
    return v;
}

int to_int(const std::string& s) {
    const double v = to_double(s);
    if(v != std::floor(v)) throw FormatError(fmt::format("not an integer: '{}'", s));
    return static_cast<int>(v);
}

std::string num(double v) { return fmt::format("{:.17g}", v); }

} // namespace

std::string StructuredSampling::to_string() const {
    std::vector<std::string> parts;
    for(const auto& f : fixed) parts.push_back(fmt::format("fix:{}:{}:{}", f.i, f.j, num(f.value)));
    for(const auto& g : tied) {
        std::vector<std::string> e;
        for(std::size_t k = 0; k < g.entries.size(); ++k)
            e.push_back(fmt::format("{}-{}*{}", g.entries[k].first, g.entries[k].second, num(g.weights[k])));
        parts.push_back(fmt::format("tie:{}:{}:{}", num(g.lo), num(g.hi), fmt::join(e, ",")));
    }
    return fmt::format("{}", fmt::join(parts, ";"));
}

StructuredSampling StructuredSampling::parse(const std::string& text) {
    StructuredSampling s;
    for(const auto& item : split(text, ";")) {
        if(item.empty()) continue;
        const auto f = split(item, ":");
        if(f.size() == 4 && f[0] == "fix") {
            s.fixed.push_back({to_int(f[1]), to_int(f[2]), to_double(f[3])});
        } else if(f.size() == 4 && f[0] == "tie") {
            TiedGroup g;
            g.lo = to_double(f[1]);
            g.hi = to_double(f[2]);
            for(const auto& e : split(f[3], ",")) {
                const auto star = split(e, "*");
                const auto ij   = split(star.front(), "-");
                if(ij.size() != 2 || star.size() > 2) throw FormatError(fmt::format("bad tied entry '{}'", e));
                g.entries.emplace_back(to_int(ij[0]), to_int(ij[1]));
                g.weights.push_back(star.size() == 2 ? to_double(star[1]) : 1.0);
            }
            s.tied.push_back(std::move(g));
        } else {
            throw FormatError(fmt::format("bad structured sampling item '{}'", item));
        }
    }
    return s;
}

void SamplingConfig::validate() const {
    for(double v : {diag_lo, diag_hi, offdiag_lo, offdiag_hi})
        if(!std::isfinite(v)) throw ConfigError("sampling ranges must be finite");
    if(diag_lo > diag_hi || offdiag_lo > offdiag_hi) throw ConfigError("sampling range with lo > hi");
    if(sample_count < 1) throw ConfigError("sample_count must be at least 1");
    if(workers < 1) throw ConfigError("workers must be at least 1");
    if(!(max_flagged_fraction >= 0.0 && max_flagged_fraction <= 1.0))
        throw ConfigError("max_flagged_fraction must lie in [0, 1]");
    if(structured)
        for(const auto& g : structured->tied) {
            if(g.entries.size() != g.weights.size() || g.entries.empty())
                throw ConfigError("tied group needs one weight per entry");
            if(!std::isfinite(g.lo) || !std::isfinite(g.hi) || g.lo > g.hi)
                throw ConfigError("tied group range invalid");
        }
}

Eigen::MatrixXd sample_h(const SamplingConfig& config, int orbitals, Rng& rng) {
    Eigen::MatrixXd h(orbitals, orbitals);
    // Interval [lo, hi] with lo == hi yields lo exactly.
    auto draw = [&](double lo, double hi) {
        return lo + (hi - lo) * std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    };
    for(int i = 0; i < orbitals; ++i)
        for(int j = i; j < orbitals; ++j)
            h(i, j) = h(j, i) = i == j ? draw(config.diag_lo, config.diag_hi)
                                       : draw(config.offdiag_lo, config.offdiag_hi);
    if(!config.structured) return h;
    auto check = [&](int i, int j) {
        if(i < 0 || j < 0 || i >= orbitals || j >= orbitals || i == j)
            throw ConfigError(fmt::format("structured entry ({}, {}) outside the off-diagonal", i, j));
    };
    for(const auto& f : config.structured->fixed) {
        check(f.i, f.j);
        h(f.i, f.j) = h(f.j, f.i) = f.value;
    }
    for(const auto& g : config.structured->tied) {
        const double s = draw(g.lo, g.hi);
        for(std::size_t k = 0; k < g.entries.size(); ++k) {
            const auto [i, j] = g.entries[k];
            check(i, j);
            h(i, j) = h(j, i) = g.weights[k] * s;
        }
    }
    return h;
}

BackendResult solve_with_backend(const ModelSpace& space, const Eigen::MatrixXd& orbital_h, Backend backend,
                                 const VqeOptions& vqe, const NoiseConfig& noise) {
    if(backend == Backend::ed) {
        auto sol = solve_orbital(space, orbital_h);
        return {sol.energy, std::move(sol.gamma), sol.state.degenerate};
    }
    const auto problem = make_vqe_problem(space.expand(orbital_h), space.interaction, space.basis());
    const auto r       = solve_vqe(problem, vqe, backend == Backend::vqe ? NoiseConfig::noiseless() : noise);
    return {r.best_energy, r.one_rdm, false};
}

TrainingSample make_sample(const Eigen::MatrixXd& orbital_h, const ModelSpace& space, Backend backend,
                           const VqeOptions& vqe, const NoiseConfig& noise) {
    if(orbital_h.rows() != space.orbitals || orbital_h.cols() != space.orbitals)
        throw DimensionError("make_sample: h does not match the model space");
    auto r = solve_with_backend(space, orbital_h, backend, vqe, noise);
    TrainingSample s;
    s.h          = orbital_h;
    s.e0         = r.energy;
    s.densities  = r.gamma.diagonal();
    s.offdiag    = pack_offdiag(orbital_h);
    s.f_dnn      = r.energy - orbital_h.diagonal().dot(s.densities);
    s.f_rdm      = r.energy - (orbital_h.array() * r.gamma.array()).sum();
    s.degenerate = r.degenerate;
    s.gamma      = std::move(r.gamma);
    return s;
}

Dataset generate(const SamplingConfig& config, const ModelSpace& space) {
    config.validate();
    space.interaction.validate(space.modes(), space.statistics);
    const std::size_t count = config.sample_count;

    std::vector<std::optional<TrainingSample>> slots(count);
    std::vector<std::string> failures(count);
    std::atomic<std::size_t> next{0};

    auto work = [&] {
        for(std::size_t i = next++; i < count; i = next++) {
            try {
                Rng rng         = make_rng(config.seed, i);
                const auto h    = sample_h(config, space.orbitals, rng);
                VqeOptions vqe  = config.vqe;
                NoiseConfig nz  = config.noise;
                vqe.seed        = derive_seed(config.seed, i);
                nz.rng_seed     = derive_seed(config.seed ^ 0x5eedULL, i);
                slots[i]        = make_sample(h, space, config.backend, vqe, nz);
            } catch(const std::exception& e) {
                failures[i] = e.what();
            }
        }
    };
    const int workers = std::min<int>(config.workers, static_cast<int>(count));
    if(workers <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for(int w = 0; w < workers; ++w) pool.emplace_back(work);
    }

    Dataset data;
    data.metadata.space    = space;
    data.metadata.sampling = config;
    data.metadata.sectors  = {space.sector};
    std::size_t failed = 0, flagged = 0;
    std::string first_failure;
    for(std::size_t i = 0; i < count; ++i) {
        if(!slots[i]) {
            if(first_failure.empty()) first_failure = failures[i];
            ++failed;
        } else if(slots[i]->degenerate) {
            ++flagged;
        } else {
            data.samples.push_back(std::move(*slots[i]));
        }
    }
    data.metadata.dropped = failed + flagged;
    const double fraction = static_cast<double>(failed + flagged) / static_cast<double>(count);
    if(fraction > config.max_flagged_fraction)
        throw Error(fmt::format("generate: {} of {} samples failed and {} flagged degenerate (limit {:.0f}%){}",
                                failed, count, flagged, 100.0 * config.max_flagged_fraction,
                                first_failure.empty() ? "" : "; first failure: " + first_failure));
    if(failed + flagged > 0) spdlog::info("generate: dropped {} failed and {} degenerate samples", failed, flagged);
    return data;
}

Dataset concatenate(const std::vector<Dataset>& parts) {
    if(parts.empty()) throw Error("concatenate: no datasets");
    Dataset out;
    out.metadata         = parts.front().metadata;
    out.metadata.sectors = {};
    out.metadata.dropped = 0;
    for(const auto& p : parts) {
        if(p.orbitals() != out.orbitals() || !(p.metadata.space.statistics == out.metadata.space.statistics) ||
           p.metadata.space.interaction.to_string() != out.metadata.space.interaction.to_string())
            throw Error("concatenate: datasets must share orbitals, statistics and interaction");
        for(const auto& s : p.metadata.sectors)
            if(std::find(out.metadata.sectors.begin(), out.metadata.sectors.end(), s) == out.metadata.sectors.end())
                out.metadata.sectors.push_back(s);
        out.metadata.dropped += p.metadata.dropped;
        out.samples.insert(out.samples.end(), p.samples.begin(), p.samples.end());
    }
    out.metadata.sampling.sample_count = out.samples.size();
    return out;
}

std::string format_statistics(const Statistics& s) {
    return s.is_fermion() ? std::string("fermion") : fmt::format("boson:{}", s.max_occupancy);
}

Statistics parse_statistics(const std::string& text) {
    if(text == "fermion") return Statistics::fermion();
    const auto f = split(text, ":");
    if(f.size() == 2 && f[0] == "boson") return Statistics::boson(to_int(f[1]));
    throw FormatError(fmt::format("unknown statistics '{}'", text));
}

std::string format_sector(const Sector& s) {
    return s.spin_up ? fmt::format("{},{}", *s.spin_up, s.spin_down()) : fmt::format("{}", s.particles);
}

Sector parse_sector(const std::string& text) {
    const auto f = split(text, ",");
    if(f.size() == 1) return Sector::total(to_int(f[0]));
    if(f.size() == 2) return Sector::spins(to_int(f[0]), to_int(f[1]));
    throw FormatError(fmt::format("bad sector '{}'", text));
}

void write_dataset(const Dataset& data, const std::filesystem::path& path) {
    std::ofstream out(path);
    if(!out) throw Error(fmt::format("cannot write dataset '{}'", path.string()));
    const auto& md = data.metadata;
    const auto& sc = md.sampling;
    const int m    = data.orbitals();
    const bool with_gamma =
        !data.samples.empty() && std::all_of(data.samples.begin(), data.samples.end(),
                                             [](const TrainingSample& s) { return s.gamma.has_value(); });
    std::vector<std::string> sectors;
    for(const auto& s : md.sectors) sectors.push_back(format_sector(s));

    out << "# format_version=" << kDatasetFormatVersion << '\n'
        << "# statistics=" << format_statistics(md.space.statistics) << '\n'
        << "# orbitals=" << m << '\n'
        << "# sectors=" << fmt::format("{}", fmt::join(sectors, " ")) << '\n'
        << "# interaction=" << md.space.interaction.to_string() << '\n'
        << "# backend=" << to_string(sc.backend) << '\n'
        << "# seed=" << sc.seed << '\n'
        << "# sample_count=" << sc.sample_count << '\n'
        << "# diag_range=" << num(sc.diag_lo) << ',' << num(sc.diag_hi) << '\n'
        << "# offdiag_range=" << num(sc.offdiag_lo) << ',' << num(sc.offdiag_hi) << '\n'
        << "# structured=" << (sc.structured ? sc.structured->to_string() : std::string()) << '\n'
        << "# dropped=" << md.dropped << '\n'
        << "# gamma=" << (with_gamma ? 1 : 0) << '\n';

    std::vector<std::string> header;
    for(int i = 0; i < m; ++i) header.push_back(fmt::format("n_{}", i));
    for(int i = 0; i < m; ++i)
        for(int j = i + 1; j < m; ++j) header.push_back(fmt::format("h_{}_{}", i, j));
    for(const char* c : {"f_dnn", "f_rdm", "e0"}) header.emplace_back(c);
    for(int i = 0; i < m; ++i) header.push_back(fmt::format("hdiag_{}", i));
    header.emplace_back("degenerate");
    if(with_gamma)
        for(int i = 0; i < m; ++i)
            for(int j = i; j < m; ++j) header.push_back(fmt::format("gamma_{}_{}", i, j));
    out << fmt::format("{}", fmt::join(header, ",")) << '\n';

    std::string row;
    for(const auto& s : data.samples) {
        row.clear();
        auto put = [&](double v) {
            if(!row.empty()) row += ',';
            row += num(v);
        };
        for(int i = 0; i < m; ++i) put(s.densities(i));
        for(Eigen::Index k = 0; k < s.offdiag.size(); ++k) put(s.offdiag(k));
        put(s.f_dnn);
        put(s.f_rdm);
        put(s.e0);
        for(int i = 0; i < m; ++i) put(s.h(i, i));
        put(s.degenerate ? 1.0 : 0.0);
        if(with_gamma)
            for(int i = 0; i < m; ++i)
                for(int j = i; j < m; ++j) put((*s.gamma)(i, j));
        out << row << '\n';
    }
    if(!out) throw Error(fmt::format("failed writing dataset '{}'", path.string()));
}

Dataset read_dataset(const std::filesystem::path& path) {
    std::ifstream in(path);
    if(!in) throw Error(fmt::format("cannot read dataset '{}'", path.string()));
    std::map<std::string, std::string> kv;
    std::string line;
    std::vector<std::string> header;
    while(std::getline(in, line)) {
        if(line.empty()) continue;
        if(line.front() == '#') {
            const auto body = boost::trim_copy(line.substr(1));
            const auto eq   = body.find('=');
            if(eq == std::string::npos) throw FormatError(fmt::format("bad preamble line '{}'", line));
            kv[body.substr(0, eq)] = body.substr(eq + 1);
            continue;
        }
        header = split(line, ",");
        break;
    }
    auto get = [&](const std::string& k) -> const std::string& {
        const auto it = kv.find(k);
        if(it == kv.end()) throw FormatError(fmt::format("dataset preamble lacks '{}'", k));
        return it->second;
    };
    if(to_int(get("format_version")) != kDatasetFormatVersion)
        throw FormatError(fmt::format("dataset format version {} unsupported (expected {})", get("format_version"),
                                      kDatasetFormatVersion));

    Dataset data;
    auto& md               = data.metadata;
    md.space.statistics    = parse_statistics(get("statistics"));
    md.space.orbitals      = to_int(get("orbitals"));
    md.space.interaction   = InteractionSpec::parse(get("interaction"));
    for(const auto& s : split(get("sectors"), " "))
        if(!s.empty()) md.sectors.push_back(parse_sector(s));
    if(md.sectors.empty()) throw FormatError("dataset preamble lists no sector");
    md.space.sector        = md.sectors.front();
    auto& sc               = md.sampling;
    sc.backend             = parse_backend(get("backend"));
    sc.seed                = std::stoull(get("seed"));
    sc.sample_count        = std::stoull(get("sample_count"));
    const auto dr          = split(get("diag_range"), ",");
    const auto orr         = split(get("offdiag_range"), ",");
    if(dr.size() != 2 || orr.size() != 2) throw FormatError("bad sampling range in preamble");
    sc.diag_lo = to_double(dr[0]), sc.diag_hi = to_double(dr[1]);
    sc.offdiag_lo = to_double(orr[0]), sc.offdiag_hi = to_double(orr[1]);
    if(!get("structured").empty()) sc.structured = StructuredSampling::parse(get("structured"));
    md.dropped             = std::stoull(get("dropped"));
    const bool with_gamma  = to_int(get("gamma")) != 0;

    const int m          = md.space.orbitals;
    const int noff       = offdiag_count(m);
    const std::size_t nc = static_cast<std::size_t>(m + noff + 3 + m + 1 + (with_gamma ? m * (m + 1) / 2 : 0));
    if(header.size() != nc)
        throw FormatError(fmt::format("dataset header has {} columns, expected {}", header.size(), nc));

    std::size_t lineno = kv.size() + 1;
    while(std::getline(in, line)) {
        ++lineno;
        if(line.empty()) continue;
        const auto f = split(line, ",");
        if(f.size() != nc) throw FormatError(fmt::format("dataset row {} has {} fields, expected {}", lineno, f.size(), nc));
        std::size_t c = 0;
        TrainingSample s;
        s.densities.resize(m);
        s.offdiag.resize(noff);
        for(int i = 0; i < m; ++i) s.densities(i) = to_double(f[c++]);
        for(int k = 0; k < noff; ++k) s.offdiag(k) = to_double(f[c++]);
        s.f_dnn = to_double(f[c++]);
        s.f_rdm = to_double(f[c++]);
        s.e0    = to_double(f[c++]);
        Eigen::VectorXd diag(m);
        for(int i = 0; i < m; ++i) diag(i) = to_double(f[c++]);
        s.h          = unpack_offdiag(s.offdiag, diag);
        s.degenerate = to_double(f[c++]) != 0.0;
        if(with_gamma) {
            Eigen::MatrixXd g(m, m);
            for(int i = 0; i < m; ++i)
                for(int j = i; j < m; ++j) g(i, j) = g(j, i) = to_double(f[c++]);
            s.gamma = std::move(g);
        }
        data.samples.push_back(std::move(s));
    }
    return data;
}

} // namespace ftdmet
