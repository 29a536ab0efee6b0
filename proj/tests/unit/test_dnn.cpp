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

#include "ftdmet/common/error.hpp"
#include "ftdmet/data/dataset.hpp"
#include "ftdmet/dnn/functional.hpp"
#include "ftdmet/dnn/mlp.hpp"
#include "ftdmet/exact/legendre.hpp"
#include "ftdmet/manybody/models.hpp"

#include <catch_amalgamated.hpp>

#include <filesystem>
#include <sstream>

using namespace ftdmet;
using Catch::Approx;

namespace {

ModelSpace dimer_space(double u) {
    FermiHubbardParams p;
    p.sites = 1, p.u = {u}, p.periodic = false;
    return {Statistics::fermion(), 2, Sector::spins(1, 1), fermi_hubbard(p).interaction};
}

Dataset small_dataset(std::size_t count, std::uint64_t seed) {
    SamplingConfig c;
    c.sample_count = count;
    c.seed         = seed;
    return generate(c, dimer_space(1.0));
}

} // namespace

TEST_CASE("loss gradient matches finite differences", "[mlp]") {
    for(auto act : {Activation::relu, Activation::softplus}) {
        Rng rng(1);
        MlpModel m({3, 5, 4, 1}, act, rng);
        std::normal_distribution<double> g;
        Eigen::MatrixXd z(3, 7);
        Eigen::RowVectorXd y(7);
        for(Eigen::Index i = 0; i < z.size(); ++i) z.data()[i] = g(rng);
        for(Eigen::Index i = 0; i < y.size(); ++i) y(i) = g(rng);
        // Offset biases so no ReLU unit sits exactly at its kink.
        for(auto& l : m.layers()) l.bias.setConstant(0.05);

        std::vector<DenseLayer> grad;
        m.loss_gradient(z, y, &grad);
        Eigen::VectorXd flat(m.parameter_count());
        Eigen::Index k = 0;
        for(const auto& l : grad) {
            flat.segment(k, l.weight.size()) = Eigen::Map<const Eigen::VectorXd>(l.weight.data(), l.weight.size());
            k += l.weight.size();
            flat.segment(k, l.bias.size()) = l.bias;
            k += l.bias.size();
        }
        const Eigen::VectorXd p0 = m.parameters();
        for(Eigen::Index i = 0; i < p0.size(); ++i) {
            Eigen::VectorXd p = p0;
            p(i) += 1e-6;
            m.set_parameters(p);
            const double up = m.loss_gradient(z, y, nullptr);
            p(i) -= 2e-6;
            m.set_parameters(p);
            const double dn = m.loss_gradient(z, y, nullptr);
            CHECK((up - dn) / 2e-6 == Approx(flat(i)).margin(1e-6));
        }
        m.set_parameters(p0);
    }
}

TEST_CASE("model text round-trip preserves predictions", "[mlp]") {
    Rng rng(2);
    MlpModel m({3, 8, 1}, Activation::softplus, rng);
    m.input_shift = Eigen::Vector3d(0.1, -0.2, 0.3);
    m.input_scale = Eigen::Vector3d(1.5, 0.5, 2.0);
    m.output_shift = 0.7, m.output_scale = 1.3;
    m.metadata["interaction"] = "fermi_onsite 0 1";
    std::stringstream ss;
    m.save(ss);
    const MlpModel r = MlpModel::load(ss);
    const Eigen::VectorXd x = Eigen::Vector3d(0.4, 1.2, -0.6);
    CHECK(r.predict(x) == m.predict(x));
    CHECK(r.metadata == m.metadata);
}

TEST_CASE("corrupt model files are format errors", "[mlp]") {
    std::stringstream ss("not a model\n");
    CHECK_THROWS_AS(MlpModel::load(ss), FormatError);
}

TEST_CASE("training is deterministic and reduces the loss", "[train]") {
    const auto data = small_dataset(200, 5);
    TrainConfig c;
    c.hidden = {16, 16};
    c.epochs = 40;
    c.seed   = 8;
    const auto a = train(data, c);
    const auto b = train(data, c);
    CHECK(a.model.parameters() == b.model.parameters());
    REQUIRE(a.loss_history.size() == 40);
    CHECK(a.loss_history.back() < a.loss_history.front());
    CHECK(a.holdout.indices.size() == 20);
    CHECK(a.holdout.mae > 0.0);
}

TEST_CASE("ensemble members differ and do not depend on workers", "[train]") {
    const auto data = small_dataset(100, 6);
    TrainConfig c;
    c.hidden = {8};
    c.epochs = 5;
    const auto one = train_ensemble(data, c, 3, 1);
    const auto par = train_ensemble(data, c, 3, 3);
    for(int k = 0; k < 3; ++k) CHECK(one[k].model.parameters() == par[k].model.parameters());
    CHECK(one[0].model.parameters() != one[1].model.parameters());
}

TEST_CASE("ensemble file round-trip", "[train]") {
    Rng rng(3);
    std::vector<MlpModel> ms{MlpModel({3, 4, 1}, Activation::relu, rng), MlpModel({3, 4, 1}, Activation::relu, rng)};
    const auto path = std::filesystem::temp_directory_path() / "ftdmet_test_models.txt";
    save_models(ms, path);
    const auto back = load_models(path);
    std::filesystem::remove(path);
    REQUIRE(back.size() == 2);
    CHECK(back[1].parameters() == ms[1].parameters());
}

TEST_CASE("interaction scaling of the exact functional", "[functional]") {
    const FunctionalPtr f1 = std::make_shared<ExactFunctional>(dimer_space(1.0));
    const ExactFunctional f2(dimer_space(2.0));
    const Eigen::Vector2d n(1.2, 0.8);
    Eigen::VectorXd off(1);
    off << -0.6;
    const auto scaled = adapt_functional(f1, dimer_space(2.0).interaction);
    CHECK(scaled->value(n, off) == Approx(f2.value(n, off)).margin(1e-8));
    FermiHubbardParams p;
    p.sites = 2, p.u = {1.0, 1.0}, p.periodic = false;
    CHECK_THROWS_AS(adapt_functional(f1, fermi_hubbard(p).interaction), ConfigError);
}

TEST_CASE("off-diagonal RDM from the exact functional", "[functional]") {
    const auto sp = dimer_space(1.0);
    Eigen::MatrixXd h(2, 2);
    h << 0.2, -0.5, -0.5, -0.1;
    const auto gs = solve_orbital(sp, h);
    const ExactFunctional f(sp);
    Eigen::VectorXd off(1);
    off << -0.5;
    const auto g = offdiag_gamma(f, gs.gamma.diagonal(), off);
    CHECK(g(0, 1) == Approx(gs.gamma(0, 1)).margin(1e-6));
    CHECK(g(1, 0) == g(0, 1));
    CHECK(g(0, 0) == gs.gamma(0, 0));
}

TEST_CASE("ensemble value is the member mean", "[functional]") {
    Rng rng(4);
    std::vector<MlpModel> ms{MlpModel({3, 4, 1}, Activation::softplus, rng),
                             MlpModel({3, 4, 1}, Activation::softplus, rng)};
    const auto f = make_functional(ms);
    const Eigen::Vector2d n(1.0, 1.0);
    Eigen::VectorXd off(1);
    off << -0.3;
    const double a = ms[0].predict(features(n, off));
    const double b = ms[1].predict(features(n, off));
    CHECK(f->value(n, off) == Approx(0.5 * (a + b)).margin(1e-14));
    const auto* e = dynamic_cast<const EnsembleFunctional*>(f.get());
    REQUIRE(e != nullptr);
    CHECK(e->spread(n, off) == Approx(0.5 * std::abs(a - b)).margin(1e-14));
}
