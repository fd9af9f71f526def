#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <vector>

#include <doctest.h>
#include <zlib.h>

#include "rcs/errors.hpp"
#include "rcs/mlp.hpp"
#include "rcs/model_io.hpp"
#include "rcs/rng.hpp"

using namespace rcs;

namespace {

Eigen::MatrixXd random_matrix(RngStream& rng, Eigen::Index rows, Eigen::Index cols) {
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) {
            m(r, c) = rng.normal();
        }
    }
    return m;
}

double loss_value(const NetworkParams& params, const Eigen::MatrixXd& x,
                  const Eigen::MatrixXd& t, LossKind kind) {
    const Eigen::MatrixXd pred = forward_batch(params, x);
    if (kind == LossKind::mse) {
        return mse_loss(pred, t) / static_cast<double>(x.rows());
    }
    return cross_entropy_loss(pred, t);
}

/// Central finite differences against backpropagation, every parameter.
double max_gradient_error(NetworkParams params, const Eigen::MatrixXd& x,
                          const Eigen::MatrixXd& t, LossKind kind) {
    ForwardCache cache;
    const Eigen::MatrixXd pred = forward_batch(params, x, &cache);
    const Gradients grads = backward(params, cache, loss_gradient(kind, pred, t));

    double worst = 0.0;
    const auto probe = [&](double& theta, double analytic) {
        const double saved = theta;
        const double step = 1e-6 * std::max(1.0, std::abs(saved));
        theta = saved + step;
        const double up = loss_value(params, x, t, kind);
        theta = saved - step;
        const double down = loss_value(params, x, t, kind);
        theta = saved;
        const double fd = (up - down) / (2.0 * step);
        const double scale = std::max({std::abs(analytic), std::abs(fd), 1e-8});
        worst = std::max(worst, std::abs(analytic - fd) / scale);
    };

    for (std::size_t k = 0; k < params.layers.size(); ++k) {
        Layer& layer = params.layers[k];
        for (Eigen::Index r = 0; r < layer.w.rows(); ++r) {
            for (Eigen::Index c = 0; c < layer.w.cols(); ++c) {
                probe(layer.w(r, c), grads.dw[k](r, c));
            }
        }
        for (Eigen::Index r = 0; r < layer.b.size(); ++r) {
            probe(layer.b(r), grads.db[k](r));
        }
    }
    return worst;
}

} // namespace

TEST_CASE("forward trivia: identity, relu clip, symmetric softmax") {
    NetworkParams identity;
    identity.layers.push_back({Eigen::MatrixXd::Identity(3, 3), Eigen::VectorXd::Zero(3),
                               Activation::linear});
    const Eigen::VectorXd x = (Eigen::VectorXd(3) << -1.0, 0.25, 2.0).finished();
    CHECK((forward(identity, x) - x).norm() == 0.0);

    NetworkParams relu;
    relu.layers.push_back({Eigen::MatrixXd::Identity(2, 2), Eigen::VectorXd::Zero(2),
                           Activation::relu});
    const Eigen::VectorXd clipped =
        forward(relu, (Eigen::VectorXd(2) << -1.0, 2.0).finished());
    CHECK(clipped(0) == 0.0);
    CHECK(clipped(1) == 2.0);

    NetworkParams softmax;
    softmax.layers.push_back({Eigen::MatrixXd::Zero(2, 2), Eigen::VectorXd::Zero(2),
                              Activation::softmax});
    const Eigen::VectorXd p = forward(softmax, (Eigen::VectorXd(2) << 3.0, -1.0).finished());
    CHECK(p(0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(p(1) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("softmax rows form a probability vector") {
    const NetworkParams net =
        make_network(hidden_stack(3, 4, Activation::softmax, 2, 16), 7);
    RngStream rng(50);
    const Eigen::MatrixXd x = random_matrix(rng, 64, 3);
    const Eigen::MatrixXd p = forward_batch(net, x);
    for (Eigen::Index r = 0; r < p.rows(); ++r) {
        CHECK(p.row(r).sum() == doctest::Approx(1.0).epsilon(1e-12));
        for (Eigen::Index c = 0; c < p.cols(); ++c) {
            CHECK(p(r, c) > 0.0);
            CHECK(p(r, c) < 1.0);
        }
    }
}

TEST_CASE("dimension mismatches are rejected") {
    const NetworkParams net = make_network({{4, 2, Activation::linear}}, 1);
    RngStream rng(51);
    CHECK_THROWS_AS(forward_batch(net, random_matrix(rng, 3, 5)), ParameterError);
    CHECK_THROWS_AS(mse_loss(random_matrix(rng, 2, 2), random_matrix(rng, 2, 3)),
                    ParameterError);
    CHECK_THROWS_AS(cross_entropy_loss(random_matrix(rng, 2, 2), random_matrix(rng, 3, 2)),
                    ParameterError);
    CHECK_THROWS_AS(make_network({{1, 2, Activation::softmax}, {2, 1, Activation::linear}}, 1),
                    ParameterError);
}

TEST_CASE("squared-error loss values") {
    Eigen::MatrixXd pred(1, 1);
    Eigen::MatrixXd tgt(1, 1);
    pred << 3.0;
    tgt << 1.0;
    CHECK(mse_loss(pred, pred) == 0.0);
    CHECK(mse_loss(pred, tgt) == doctest::Approx(2.0).epsilon(1e-15)); // 0.5 * 2^2

    RngStream rng(52);
    const Eigen::MatrixXd p = random_matrix(rng, 5, 3);
    const Eigen::MatrixXd t = random_matrix(rng, 5, 3);
    double brute = 0.0;
    for (Eigen::Index r = 0; r < 5; ++r) {
        for (Eigen::Index c = 0; c < 3; ++c) {
            brute += 0.5 * (p(r, c) - t(r, c)) * (p(r, c) - t(r, c));
        }
    }
    CHECK(mse_loss(p, t) == doctest::Approx(brute).epsilon(1e-13));
}

TEST_CASE("cross-entropy loss values") {
    Eigen::MatrixXd perfect(2, 2);
    perfect << 1.0, 0.0, 0.0, 1.0;
    CHECK(cross_entropy_loss(perfect, perfect) == doctest::Approx(0.0).epsilon(1e-12));

    Eigen::MatrixXd uniform(1, 4);
    uniform << 0.25, 0.25, 0.25, 0.25;
    Eigen::MatrixXd label = Eigen::MatrixXd::Zero(1, 4);
    label(0, 2) = 1.0;
    CHECK(cross_entropy_loss(uniform, label) == doctest::Approx(std::log(4.0)).epsilon(1e-12));

    RngStream rng(53);
    Eigen::MatrixXd probs(6, 3);
    Eigen::MatrixXd one_hot = Eigen::MatrixXd::Zero(6, 3);
    for (Eigen::Index r = 0; r < 6; ++r) {
        double norm = 0.0;
        for (Eigen::Index c = 0; c < 3; ++c) {
            probs(r, c) = rng.uniform(0.01, 1.0);
            norm += probs(r, c);
        }
        probs.row(r) /= norm;
        one_hot(r, static_cast<Eigen::Index>(rng.uniform_int(3))) = 1.0;
    }
    double brute = 0.0;
    for (Eigen::Index r = 0; r < 6; ++r) {
        for (Eigen::Index c = 0; c < 3; ++c) {
            brute += one_hot(r, c) * std::log(std::max(probs(r, c), 1e-12));
        }
    }
    brute = -brute / 6.0;
    CHECK(cross_entropy_loss(probs, one_hot) == doctest::Approx(brute).epsilon(1e-13));
}

TEST_CASE("backpropagation matches central finite differences") {
    RngStream rng(54);

    SUBCASE("relu stack with squared error") {
        const NetworkParams net = make_network({{4, 6, Activation::relu},
                                                {6, 5, Activation::relu},
                                                {5, 3, Activation::linear}},
                                               11);
        const Eigen::MatrixXd x = random_matrix(rng, 7, 4);
        const Eigen::MatrixXd t = random_matrix(rng, 7, 3);
        CHECK(max_gradient_error(net, x, t, LossKind::mse) < 1e-5);
    }

    SUBCASE("softmax head with cross entropy") {
        const NetworkParams net = make_network({{3, 8, Activation::relu},
                                                {8, 6, Activation::relu},
                                                {6, 4, Activation::softmax}},
                                               12);
        const Eigen::MatrixXd x = random_matrix(rng, 6, 3);
        Eigen::MatrixXd t = Eigen::MatrixXd::Zero(6, 4);
        for (Eigen::Index r = 0; r < 6; ++r) {
            t(r, static_cast<Eigen::Index>(rng.uniform_int(4))) = 1.0;
        }
        CHECK(max_gradient_error(net, x, t, LossKind::cross_entropy) < 1e-5);
    }

    SUBCASE("softmax head with squared error exercises the full Jacobian") {
        const NetworkParams net =
            make_network({{3, 5, Activation::relu}, {5, 4, Activation::softmax}}, 13);
        const Eigen::MatrixXd x = random_matrix(rng, 5, 3);
        Eigen::MatrixXd t = random_matrix(rng, 5, 4);
        CHECK(max_gradient_error(net, x, t, LossKind::mse) < 1e-5);
    }
}

TEST_CASE("combined softmax and cross-entropy gradient is probabilities minus labels") {
    RngStream rng(55);
    const NetworkParams net = make_network({{3, 4, Activation::softmax}}, 14);
    const Eigen::MatrixXd x = random_matrix(rng, 6, 3);
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(6, 4);
    for (Eigen::Index r = 0; r < 6; ++r) {
        t(r, static_cast<Eigen::Index>(rng.uniform_int(4))) = 1.0;
    }
    ForwardCache cache;
    const Eigen::MatrixXd p = forward_batch(net, x, &cache);
    const Gradients grads = backward(net, cache, loss_gradient(LossKind::cross_entropy, p, t));
    const Eigen::MatrixXd delta = (p - t) / 6.0;
    const Eigen::MatrixXd expected_dw = delta.transpose() * x;
    CHECK((grads.dw[0] - expected_dw).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((grads.db[0] - delta.colwise().sum().transpose()).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("zero loss gradient produces zero parameter gradients") {
    RngStream rng(56);
    const NetworkParams net = make_network(hidden_stack(4, 2, Activation::linear, 2, 8), 15);
    const Eigen::MatrixXd x = random_matrix(rng, 5, 4);
    ForwardCache cache;
    forward_batch(net, x, &cache);
    const Gradients grads = backward(net, cache, Eigen::MatrixXd::Zero(5, 2));
    for (std::size_t k = 0; k < grads.dw.size(); ++k) {
        CHECK(grads.dw[k].cwiseAbs().maxCoeff() == 0.0);
        CHECK(grads.db[k].cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("stale caches are rejected") {
    const NetworkParams net = make_network({{2, 2, Activation::linear}}, 16);
    ForwardCache cache; // never filled
    CHECK_THROWS_AS(backward(net, cache, Eigen::MatrixXd::Zero(1, 2)), ParameterError);
}

TEST_CASE("training solves the xor layout") {
    Dataset data;
    data.features.resize(4, 2);
    data.features << 0, 0, 0, 1, 1, 0, 1, 1;
    data.targets.resize(4, 2);
    data.targets << 1, 0, 0, 1, 0, 1, 1, 0;

    TrainConfig config;
    config.batch_size = 4;
    config.learning_rate = 0.003;
    config.steps = 2000;
    config.validation_split = 0.1; // too small to strip a row from 4 samples
    config.seed = 3;

    const NetworkParams net = make_network(hidden_stack(2, 2, Activation::softmax, 2, 16), 3);
    const TrainResult result = train(net, data, config, LossKind::cross_entropy);
    CHECK(result.train_loss.back() < 0.01);

    // Smoothed descent: 100-step moving averages, compared a window apart.
    const auto window_mean = [&](std::size_t start) {
        double sum = 0.0;
        for (std::size_t i = start; i < start + 100; ++i) {
            sum += result.train_loss[i];
        }
        return sum / 100.0;
    };
    for (std::size_t start = 0; start + 200 <= result.train_loss.size(); start += 100) {
        CHECK(window_mean(start + 100) <= window_mean(start) + 1e-9);
    }
}

TEST_CASE("training recovers a linear map") {
    RngStream rng(57);
    Dataset data;
    data.features.resize(64, 1);
    data.targets.resize(64, 1);
    for (int i = 0; i < 64; ++i) {
        const double x = rng.uniform(-1.0, 1.0);
        data.features(i, 0) = x;
        data.targets(i, 0) = 2.0 * x;
    }
    TrainConfig config;
    config.batch_size = 32;
    config.learning_rate = 0.003;
    config.steps = 4000;
    config.validation_split = 0.1;
    config.seed = 5;

    const NetworkParams net = make_network({{1, 1, Activation::linear}}, 5);
    const TrainResult result = train(net, data, config, LossKind::mse);
    CHECK(result.params.layers[0].w(0, 0) == doctest::Approx(2.0).epsilon(1e-3));
    CHECK(std::abs(result.params.layers[0].b(0)) < 1e-3);
}

TEST_CASE("training is deterministic per seed") {
    RngStream rng(58);
    Dataset data;
    data.features = random_matrix(rng, 128, 3);
    data.targets = random_matrix(rng, 128, 2);
    TrainConfig config;
    config.batch_size = 16;
    config.learning_rate = 0.003;
    config.steps = 50;
    config.validation_split = 0.25;
    config.validation_frequency = 10;
    config.seed = 9;

    const NetworkParams net = make_network(hidden_stack(3, 2, Activation::linear, 2, 8), 9);
    const TrainResult a = train(net, data, config, LossKind::mse);
    const TrainResult b = train(net, data, config, LossKind::mse);
    REQUIRE(a.train_loss.size() == b.train_loss.size());
    for (std::size_t i = 0; i < a.train_loss.size(); ++i) {
        CHECK(a.train_loss[i] == b.train_loss[i]);
    }
    REQUIRE(a.validation_loss.size() == 5);
    CHECK(a.validation_loss == b.validation_loss);
    for (std::size_t k = 0; k < a.params.layers.size(); ++k) {
        CHECK((a.params.layers[k].w - b.params.layers[k].w).cwiseAbs().maxCoeff() == 0.0);
        CHECK((a.params.layers[k].b - b.params.layers[k].b).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("paper-scale hyperparameters pass validation") {
    TrainConfig config;
    config.batch_size = 256;
    config.learning_rate = 0.003;
    config.steps = 600;
    config.validation_split = 0.1;
    CHECK_NOTHROW(config.validate(400'000));
    CHECK_NOTHROW(config.validate(50'000));

    TrainConfig bad = config;
    bad.batch_size = 500'000;
    CHECK_THROWS_AS(bad.validate(400'000), ParameterError);
    bad = config;
    bad.validation_split = 0.0;
    CHECK_THROWS_AS(bad.validate(400'000), ParameterError);
}

TEST_CASE("divergence raises an error naming the step") {
    RngStream rng(59);
    Dataset data;
    data.features = random_matrix(rng, 32, 2) * 100.0;
    data.targets = random_matrix(rng, 32, 1) * 100.0;
    TrainConfig config;
    config.batch_size = 8;
    config.learning_rate = 1e200;
    config.steps = 200;
    config.validation_split = 0.1;
    config.seed = 2;
    const NetworkParams net = make_network(hidden_stack(2, 1, Activation::linear, 2, 8), 2);
    try {
        train(net, data, config, LossKind::mse);
        FAIL("expected divergence");
    } catch (const DivergenceError& e) {
        CHECK(std::string(e.what()).find("step") != std::string::npos);
    }
}

TEST_CASE("model files round trip bit exactly") {
    const NetworkParams net = make_network(hidden_stack(4, 2, Activation::linear, 3, 32), 77);
    const std::filesystem::path path =
        std::filesystem::temp_directory_path() / "rcs_model_roundtrip.rcnn";
    save_params(net, path);
    const NetworkParams loaded = load_params(path);

    RngStream rng(60);
    for (int i = 0; i < 100; ++i) {
        Eigen::VectorXd x(4);
        for (int d = 0; d < 4; ++d) {
            x(d) = rng.normal();
        }
        const Eigen::VectorXd original = forward(net, x);
        const Eigen::VectorXd reloaded = forward(loaded, x);
        CHECK((original - reloaded).cwiseAbs().maxCoeff() == 0.0);
    }
    std::filesystem::remove(path);
}

TEST_CASE("truncated model files fail the checksum") {
    const NetworkParams net = make_network({{2, 2, Activation::relu}}, 78);
    const std::filesystem::path path =
        std::filesystem::temp_directory_path() / "rcs_model_truncated.rcnn";
    save_params(net, path);

    std::ifstream in(path, std::ios::binary);
    std::vector<char> bytes((std::istreambuf_iterator<char>(in)), {});
    in.close();
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size() - 7));
    out.close();

    CHECK_THROWS_AS(load_params(path), ModelIoError);
    std::filesystem::remove(path);
}

TEST_CASE("unsupported version raises a version error") {
    const NetworkParams net = make_network({{2, 2, Activation::relu}}, 79);
    const std::filesystem::path path =
        std::filesystem::temp_directory_path() / "rcs_model_version.rcnn";
    save_params(net, path);

    std::ifstream in(path, std::ios::binary);
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), {});
    in.close();
    // Bump the version halfword and refresh the trailing checksum so the
    // version check itself is what fires.
    bytes[4] = 99;
    const std::size_t body = bytes.size() - 4;
    const auto crc = static_cast<std::uint32_t>(
        crc32(0L, reinterpret_cast<const Bytef*>(bytes.data()), static_cast<uInt>(body)));
    std::memcpy(bytes.data() + body, &crc, 4);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    out.close();

    try {
        load_params(path);
        FAIL("expected a version error");
    } catch (const ModelIoError& e) {
        CHECK(std::string(e.what()).find("version") != std::string::npos);
    }
    std::filesystem::remove(path);
}
