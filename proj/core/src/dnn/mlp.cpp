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

#include "ftdmet/dnn/mlp.hpp"

#include "ftdmet/common/error.hpp"

#include <boost/algorithm/string.hpp>
#include <fmt/format.h>
#include <fmt/ranges.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <thread>

namespace ftdmet {

std::string_view to_string(Activation a) { return a == Activation::relu ? "relu" : "softplus"; }

Activation parse_activation(std::string_view s) {
    if(s == "relu") return Activation::relu;
    if(s == "softplus") return Activation::softplus;
    throw ConfigError(fmt::format("unknown activation '{}'", s));
}

std::string_view to_string(Optimizer o) { return o == Optimizer::adam ? "adam" : "sgd"; }

Optimizer parse_optimizer(std::string_view s) {
    if(s == "adam") return Optimizer::adam;
    if(s == "sgd") return Optimizer::sgd;
    throw ConfigError(fmt::format("unknown optimizer '{}'", s));
}

namespace {

void activate(Activation a, Eigen::MatrixXd& m) {
    if(a == Activation::relu) {
        m = m.cwiseMax(0.0);
    } else {
        m = m.unaryExpr([](double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); });
    }
}

// Derivative of the activation at the pre-activation values.
Eigen::MatrixXd slope(Activation a, const Eigen::MatrixXd& pre) {
    if(a == Activation::relu) return (pre.array() > 0.0).cast<double>().matrix();
    return pre.unaryExpr([](double x) { return 1.0 / (1.0 + std::exp(-x)); });
}

std::string num(double v) { return fmt::format("{:.17g}", v); }

std::string join(const Eigen::VectorXd& v) {
    std::string s;
    for(Eigen::Index i = 0; i < v.size(); ++i) {
        if(i) s += ',';
        s += num(v(i));
    }
    return s;
}

Eigen::VectorXd parse_vector(const std::string& text) {
    std::vector<std::string> f;
    if(!text.empty()) boost::split(f, text, boost::is_any_of(","));
    Eigen::VectorXd v(static_cast<Eigen::Index>(f.size()));
    for(std::size_t i = 0; i < f.size(); ++i) {
        try {
            std::size_t used = 0;
            v(static_cast<Eigen::Index>(i)) = std::stod(f[i], &used);
            if(used != boost::trim_copy(f[i]).size()) throw std::invalid_argument(f[i]);
        } catch(const std::exception&) {
            throw FormatError(fmt::format("model file: bad number '{}'", f[i]));
        }
    }
    return v;
}

} // namespace

MlpModel::MlpModel(std::vector<int> layer_sizes, Activation activation, Rng& rng)
    : sizes_(std::move(layer_sizes)), activation_(activation) {
    if(sizes_.size() < 2) throw ConfigError("MlpModel needs at least an input and an output layer");
    for(int s : sizes_)
        if(s < 1) throw ConfigError("MlpModel layer sizes must be positive");
    for(std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
        const int in = sizes_[l], out = sizes_[l + 1];
        std::normal_distribution<double> normal(0.0, std::sqrt(2.0 / in));
        DenseLayer layer{Eigen::MatrixXd(out, in), Eigen::VectorXd::Zero(out)};
        for(Eigen::Index j = 0; j < in; ++j)
            for(Eigen::Index i = 0; i < out; ++i) layer.weight(i, j) = normal(rng);
        layers_.push_back(std::move(layer));
    }
    input_shift = Eigen::VectorXd::Zero(sizes_.front());
    input_scale = Eigen::VectorXd::Ones(sizes_.front());
}

Eigen::RowVectorXd MlpModel::forward(const Eigen::MatrixXd& z) const {
    if(z.rows() != input_dim()) throw DimensionError(fmt::format("MlpModel: expected {} inputs, got {}", input_dim(), z.rows()));
    Eigen::MatrixXd a = z;
    for(std::size_t l = 0; l < layers_.size(); ++l) {
        Eigen::MatrixXd next = layers_[l].weight * a;
        next.colwise() += layers_[l].bias;
        if(l + 1 < layers_.size()) activate(activation_, next);
        a = std::move(next);
    }
    return a.row(0);
}

double MlpModel::predict(const Eigen::VectorXd& x) const {
    if(x.size() != input_dim()) throw DimensionError(fmt::format("MlpModel: expected {} inputs, got {}", input_dim(), x.size()));
    const Eigen::VectorXd z = (x - input_shift).cwiseQuotient(input_scale);
    return output_shift + output_scale * forward(z)(0);
}

Eigen::VectorXd MlpModel::predict(const Eigen::MatrixXd& x) const {
    if(x.cols() != input_dim()) throw DimensionError(fmt::format("MlpModel: expected {} inputs, got {}", input_dim(), x.cols()));
    Eigen::MatrixXd z = x.transpose();
    z.colwise() -= input_shift;
    z = input_scale.cwiseInverse().asDiagonal() * z;
    return (output_shift + output_scale * forward(z).array()).transpose();
}

double MlpModel::loss_gradient(const Eigen::MatrixXd& z, const Eigen::RowVectorXd& y,
                               std::vector<DenseLayer>* gradient) const {
    const auto batch = static_cast<double>(z.cols());
    std::vector<Eigen::MatrixXd> acts{z}, pres;
    for(std::size_t l = 0; l < layers_.size(); ++l) {
        Eigen::MatrixXd pre = layers_[l].weight * acts.back();
        pre.colwise() += layers_[l].bias;
        Eigen::MatrixXd a = pre;
        if(l + 1 < layers_.size()) activate(activation_, a);
        pres.push_back(std::move(pre));
        acts.push_back(std::move(a));
    }
    const Eigen::RowVectorXd diff = acts.back().row(0) - y;
    const double loss             = diff.squaredNorm() / batch;
    if(!gradient) return loss;

    gradient->resize(layers_.size());
    Eigen::MatrixXd delta = (2.0 / batch) * diff;
    for(std::size_t l = layers_.size(); l-- > 0;) {
        (*gradient)[l].weight = delta * acts[l].transpose();
        (*gradient)[l].bias   = delta.rowwise().sum();
        if(l == 0) break;
        delta = (layers_[l].weight.transpose() * delta).cwiseProduct(slope(activation_, pres[l - 1]));
    }
    return loss;
}

std::size_t MlpModel::parameter_count() const {
    std::size_t n = 0;
    for(const auto& l : layers_) n += static_cast<std::size_t>(l.weight.size() + l.bias.size());
    return n;
}

Eigen::VectorXd MlpModel::parameters() const {
    Eigen::VectorXd p(static_cast<Eigen::Index>(parameter_count()));
    Eigen::Index k = 0;
    for(const auto& l : layers_) {
        p.segment(k, l.weight.size()) = l.weight.reshaped();
        k += l.weight.size();
        p.segment(k, l.bias.size()) = l.bias;
        k += l.bias.size();
    }
    return p;
}

void MlpModel::set_parameters(const Eigen::VectorXd& p) {
    if(static_cast<std::size_t>(p.size()) != parameter_count()) throw DimensionError("MlpModel: parameter count mismatch");
    Eigen::Index k = 0;
    for(auto& l : layers_) {
        l.weight.reshaped() = p.segment(k, l.weight.size());
        k += l.weight.size();
        l.bias = p.segment(k, l.bias.size());
        k += l.bias.size();
    }
}

void MlpModel::save(std::ostream& out) const {
    out << "ftdmet-mlp " << kFormatVersion << '\n'
        << "layers " << fmt::format("{}", fmt::join(sizes_, ",")) << '\n'
        << "activation " << to_string(activation_) << '\n'
        << "input_shift " << join(input_shift) << '\n'
        << "input_scale " << join(input_scale) << '\n'
        << "output_shift " << num(output_shift) << '\n'
        << "output_scale " << num(output_scale) << '\n';
    for(const auto& [k, v] : metadata) out << "meta " << k << ' ' << v << '\n';
    for(std::size_t l = 0; l < layers_.size(); ++l) {
        const auto& w = layers_[l].weight;
        out << "weight " << l << ' ' << w.rows() << ' ' << w.cols() << '\n';
        for(Eigen::Index i = 0; i < w.rows(); ++i) out << join(w.row(i).transpose()) << '\n';
        out << "bias " << l << ' ' << layers_[l].bias.size() << '\n' << join(layers_[l].bias) << '\n';
    }
    out << "end\n";
}

MlpModel MlpModel::load(std::istream& in) {
    std::string line;
    auto next = [&]() -> std::string& {
        do {
            if(!std::getline(in, line)) throw FormatError("model file truncated");
        } while(line.empty());
        return line;
    };
    auto split_key = [](const std::string& l) {
        const auto sp = l.find(' ');
        return std::pair<std::string, std::string>{l.substr(0, sp), sp == std::string::npos ? "" : l.substr(sp + 1)};
    };

    auto [magic, version] = split_key(next());
    if(magic != "ftdmet-mlp") throw FormatError("not a model file");
    if(version != std::to_string(kFormatVersion))
        throw FormatError(fmt::format("model format version {} unsupported (expected {})", version, kFormatVersion));

    MlpModel m;
    for(;;) {
        auto [key, value] = split_key(next());
        if(key == "layers") {
            for(double s : parse_vector(value)) m.sizes_.push_back(static_cast<int>(s));
        } else if(key == "activation") {
            m.activation_ = parse_activation(value);
        } else if(key == "input_shift") {
            m.input_shift = parse_vector(value);
        } else if(key == "input_scale") {
            m.input_scale = parse_vector(value);
        } else if(key == "output_shift") {
            m.output_shift = parse_vector(value)(0);
        } else if(key == "output_scale") {
            m.output_scale = parse_vector(value)(0);
        } else if(key == "meta") {
            auto [k, v]   = split_key(value);
            m.metadata[k] = v;
        } else if(key == "weight") {
            std::istringstream hdr(value);
            std::size_t l = 0;
            Eigen::Index rows = 0, cols = 0;
            hdr >> l >> rows >> cols;
            if(l != m.layers_.size() || l + 1 >= m.sizes_.size() || rows != m.sizes_[l + 1] || cols != m.sizes_[l])
                throw FormatError(fmt::format("model file: unexpected weight block {}", value));
            DenseLayer layer{Eigen::MatrixXd(rows, cols), {}};
            for(Eigen::Index i = 0; i < rows; ++i) {
                const auto r = parse_vector(next());
                if(r.size() != cols) throw FormatError("model file: weight row length mismatch");
                layer.weight.row(i) = r.transpose();
            }
            auto [bkey, bval] = split_key(next());
            if(bkey != "bias") throw FormatError("model file: bias block missing");
            layer.bias = parse_vector(next());
            if(layer.bias.size() != rows) throw FormatError("model file: bias length mismatch");
            m.layers_.push_back(std::move(layer));
        } else if(key == "end") {
            break;
        } else {
            throw FormatError(fmt::format("model file: unknown key '{}'", key));
        }
    }
    if(m.sizes_.size() < 2 || m.layers_.size() + 1 != m.sizes_.size()) throw FormatError("model file: missing layers");
    if(m.input_shift.size() != m.input_dim() || m.input_scale.size() != m.input_dim())
        throw FormatError("model file: normalisation length mismatch");
    return m;
}

void MlpModel::save(const std::filesystem::path& path) const { save_models({*this}, path); }

MlpModel MlpModel::load(const std::filesystem::path& path) {
    auto models = load_models(path);
    if(models.size() != 1) throw FormatError(fmt::format("'{}' holds {} models, expected 1", path.string(), models.size()));
    return std::move(models.front());
}

void save_models(const std::vector<MlpModel>& models, const std::filesystem::path& path) {
    std::ofstream out(path);
    if(!out) throw Error(fmt::format("cannot write model file '{}'", path.string()));
    out << "# members=" << models.size() << '\n';
    for(const auto& m : models) m.save(out);
    if(!out) throw Error(fmt::format("failed writing model file '{}'", path.string()));
}

std::vector<MlpModel> load_models(const std::filesystem::path& path) {
    std::ifstream in(path);
    if(!in) throw Error(fmt::format("cannot read model file '{}'", path.string()));
    std::string line;
    std::getline(in, line);
    if(!boost::starts_with(line, "# members=")) throw FormatError(fmt::format("'{}' is not a model file", path.string()));
    const int members = std::stoi(line.substr(10));
    std::vector<MlpModel> out;
    for(int k = 0; k < members; ++k) out.push_back(MlpModel::load(in));
    return out;
}

void TrainConfig::validate() const {
    if(!(holdout_fraction > 0.0 && holdout_fraction <= 0.5)) throw ConfigError("holdout_fraction must lie in (0, 0.5]");
    if(!(learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
    if(epochs < 1 || batch_size < 1) throw ConfigError("epochs and batch_size must be positive");
    for(int h : hidden)
        if(h < 1) throw ConfigError("hidden layer widths must be positive");
}

Eigen::VectorXd features(const Eigen::VectorXd& n, const Eigen::VectorXd& offdiag) {
    Eigen::VectorXd x(n.size() + offdiag.size());
    x << n, offdiag;
    return x;
}

Eigen::MatrixXd features(const Dataset& data) {
    const int m    = data.orbitals();
    const int cols = m + offdiag_count(m);
    Eigen::MatrixXd x(static_cast<Eigen::Index>(data.samples.size()), cols);
    for(std::size_t i = 0; i < data.samples.size(); ++i)
        x.row(static_cast<Eigen::Index>(i)) = features(data.samples[i].densities, data.samples[i].offdiag).transpose();
    return x;
}

HoldoutMetrics evaluate_holdout(const MlpModel& model, const Dataset& data, const std::vector<std::size_t>& indices) {
    HoldoutMetrics h;
    h.indices = indices;
    if(indices.empty()) return h;
    double se = 0.0;
    for(std::size_t i : indices) {
        const auto& s    = data.samples.at(i);
        const double p   = model.predict(features(s.densities, s.offdiag));
        const double err = p - s.f_dnn;
        h.parity.emplace_back(s.f_dnn, p);
        h.mae += std::abs(err);
        h.bias += err;
        se += err * err;
    }
    const auto n = static_cast<double>(indices.size());
    h.mae /= n;
    h.bias /= n;
    h.rmse = std::sqrt(se / n);
    return h;
}

TrainResult train(const Dataset& data, const TrainConfig& config) {
    config.validate();
    if(data.samples.empty()) throw Error("train: empty dataset");
    const Eigen::MatrixXd x = features(data);
    const auto total        = static_cast<std::size_t>(x.rows());
    if(!x.allFinite()) throw Error("train: non-finite features");

    std::vector<std::size_t> order(total);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng split_rng = make_rng(config.split_seed.value_or(config.seed), 0);
    std::shuffle(order.begin(), order.end(), split_rng);
    std::size_t n_hold = total < 2 ? 0 : std::max<std::size_t>(1, static_cast<std::size_t>(
                                                                       std::floor(config.holdout_fraction * total)));
    std::vector<std::size_t> hold(order.end() - static_cast<std::ptrdiff_t>(n_hold), order.end());
    std::sort(hold.begin(), hold.end());
    order.resize(total - n_hold);
    const auto n_train = static_cast<Eigen::Index>(order.size());

    Eigen::MatrixXd xt(x.cols(), n_train);
    Eigen::RowVectorXd yt(n_train);
    for(Eigen::Index k = 0; k < n_train; ++k) {
        xt.col(k) = x.row(static_cast<Eigen::Index>(order[k])).transpose();
        yt(k)     = data.samples[order[k]].f_dnn;
    }

    Rng rng = make_rng(config.seed, 1);
    std::vector<int> sizes{static_cast<int>(x.cols())};
    sizes.insert(sizes.end(), config.hidden.begin(), config.hidden.end());
    sizes.push_back(1);
    TrainResult res{MlpModel(sizes, config.activation, rng), {}, {}};
    MlpModel& model = res.model;

    model.input_shift = xt.rowwise().mean();
    Eigen::MatrixXd zt = xt.colwise() - model.input_shift;
    model.input_scale  = (zt.array().square().rowwise().sum() / static_cast<double>(n_train)).sqrt();
    for(Eigen::Index i = 0; i < model.input_scale.size(); ++i)
        if(!(model.input_scale(i) > 1e-12)) model.input_scale(i) = 1.0;
    zt = model.input_scale.cwiseInverse().asDiagonal() * zt;
    model.output_shift = yt.mean();
    const double ystd  = std::sqrt((yt.array() - model.output_shift).square().mean());
    model.output_scale = ystd > 1e-12 ? ystd : 1.0;
    const Eigen::RowVectorXd ytn = (yt.array() - model.output_shift) / model.output_scale;

    const auto& md = data.metadata;
    model.metadata["interaction"] = md.space.interaction.to_string();
    model.metadata["statistics"]  = format_statistics(md.space.statistics);
    model.metadata["orbitals"]    = std::to_string(md.space.orbitals);
    std::vector<std::string> sectors;
    for(const auto& s : md.sectors) sectors.push_back(format_sector(s));
    model.metadata["sectors"] = fmt::format("{}", fmt::join(sectors, " "));

    // Adam state, one slot per layer.
    std::vector<DenseLayer> grad, m1, m2;
    for(const auto& l : model.layers()) {
        m1.push_back({Eigen::MatrixXd::Zero(l.weight.rows(), l.weight.cols()), Eigen::VectorXd::Zero(l.bias.size())});
        m2.push_back(m1.back());
    }
    constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
    std::int64_t step = 0;

    std::vector<Eigen::Index> perm(static_cast<std::size_t>(n_train));
    std::iota(perm.begin(), perm.end(), Eigen::Index{0});
    const Eigen::Index bs = std::min<Eigen::Index>(config.batch_size, std::max<Eigen::Index>(1, n_train));
    Eigen::MatrixXd zb(zt.rows(), bs);
    Eigen::RowVectorXd yb(bs);

    for(int epoch = 0; epoch < config.epochs && n_train > 0; ++epoch) {
        std::shuffle(perm.begin(), perm.end(), rng);
        double epoch_loss = 0.0;
        for(Eigen::Index start = 0; start < n_train; start += bs) {
            const Eigen::Index count = std::min(bs, n_train - start);
            zb.resize(zt.rows(), count);
            yb.resize(count);
            for(Eigen::Index k = 0; k < count; ++k) {
                zb.col(k) = zt.col(perm[static_cast<std::size_t>(start + k)]);
                yb(k)     = ytn(perm[static_cast<std::size_t>(start + k)]);
            }
            epoch_loss += model.loss_gradient(zb, yb, &grad) * static_cast<double>(count);
            ++step;
            const double lr = config.learning_rate;
            for(std::size_t l = 0; l < grad.size(); ++l) {
                auto& layer = model.layers()[l];
                if(config.optimizer == Optimizer::sgd) {
                    layer.weight -= lr * grad[l].weight;
                    layer.bias -= lr * grad[l].bias;
                    continue;
                }
                const double c1 = 1.0 - std::pow(b1, static_cast<double>(step));
                const double c2 = 1.0 - std::pow(b2, static_cast<double>(step));
                m1[l].weight    = b1 * m1[l].weight + (1.0 - b1) * grad[l].weight;
                m2[l].weight    = b2 * m2[l].weight + (1.0 - b2) * grad[l].weight.cwiseAbs2();
                m1[l].bias      = b1 * m1[l].bias + (1.0 - b1) * grad[l].bias;
                m2[l].bias      = b2 * m2[l].bias + (1.0 - b2) * grad[l].bias.cwiseAbs2();
                layer.weight.array() -=
                    lr * (m1[l].weight.array() / c1) / ((m2[l].weight.array() / c2).sqrt() + eps);
                layer.bias.array() -= lr * (m1[l].bias.array() / c1) / ((m2[l].bias.array() / c2).sqrt() + eps);
            }
        }
        epoch_loss /= static_cast<double>(n_train);
        if(!std::isfinite(epoch_loss))
            throw ConvergenceError(fmt::format("training diverged at epoch {} (loss {}, learning rate {}, {} samples)",
                                               epoch, epoch_loss, config.learning_rate, n_train));
        res.loss_history.push_back(epoch_loss);
    }
    res.holdout = evaluate_holdout(model, data, hold);
    return res;
}

std::vector<TrainResult> train_ensemble(const Dataset& data, const TrainConfig& config, int members, int workers) {
    if(members < 1) throw ConfigError("ensemble needs at least one member");
    std::vector<std::optional<TrainResult>> slots(static_cast<std::size_t>(members));
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(members));
    std::atomic<int> next{0};
    auto work = [&] {
        for(int k = next++; k < members; k = next++) {
            try {
                TrainConfig c = config;
                c.seed        = derive_seed(config.seed, static_cast<std::uint64_t>(k));
                c.split_seed  = config.split_seed.value_or(config.seed);
                slots[static_cast<std::size_t>(k)] = train(data, c);
            } catch(...) {
                errors[static_cast<std::size_t>(k)] = std::current_exception();
            }
        }
    };
    const int w = std::clamp(workers, 1, members);
    if(w == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for(int i = 0; i < w; ++i) pool.emplace_back(work);
    }
    std::vector<TrainResult> out;
    for(std::size_t k = 0; k < slots.size(); ++k) {
        if(errors[k]) std::rethrow_exception(errors[k]);
        out.push_back(std::move(*slots[k]));
    }
    return out;
}

} // namespace ftdmet
