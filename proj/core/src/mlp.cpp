#include "rcs/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "rcs/errors.hpp"
#include "rcs/rng.hpp"

namespace rcs {

namespace {

constexpr double kLogClamp = 1e-12;
constexpr double kAdamBeta1 = 0.9;
constexpr double kAdamBeta2 = 0.999;
constexpr double kAdamEps = 1e-8;

Eigen::MatrixXd apply_activation(Activation act, const Eigen::MatrixXd& z) {
    switch (act) {
    case Activation::linear:
        return z;
    case Activation::relu:
        return z.cwiseMax(0.0);
    case Activation::softmax: {
        Eigen::MatrixXd out(z.rows(), z.cols());
        for (Eigen::Index i = 0; i < z.rows(); ++i) {
            const double peak = z.row(i).maxCoeff();
            Eigen::RowVectorXd e = (z.row(i).array() - peak).exp();
            out.row(i) = e / e.sum();
        }
        return out;
    }
    }
    throw ParameterError("unknown activation");
}

} // namespace

int NetworkParams::input_dim() const {
    return layers.empty() ? 0 : static_cast<int>(layers.front().w.cols());
}

int NetworkParams::output_dim() const {
    return layers.empty() ? 0 : static_cast<int>(layers.back().w.rows());
}

void NetworkParams::validate() const {
    if (layers.empty()) {
        throw ParameterError("network has no layers");
    }
    for (std::size_t k = 0; k < layers.size(); ++k) {
        const Layer& layer = layers[k];
        if (layer.w.rows() != layer.b.size()) {
            throw ParameterError("bias length does not match layer width");
        }
        if (k + 1 < layers.size() && layers[k + 1].w.cols() != layer.w.rows()) {
            throw ParameterError("consecutive layer dimensions do not chain");
        }
        if (layer.activation == Activation::softmax && k + 1 != layers.size()) {
            throw ParameterError("softmax is only allowed on the final layer");
        }
        if (!layer.w.allFinite() || !layer.b.allFinite()) {
            throw ParameterError("network parameters contain non-finite entries");
        }
    }
}

NetworkParams make_network(const std::vector<LayerSpec>& specs, std::uint64_t seed) {
    if (specs.empty()) {
        throw ParameterError("network needs at least one layer");
    }
    RngStream rng(seed, 0x6d6c7000);
    NetworkParams params;
    params.layers.reserve(specs.size());
    for (const LayerSpec& spec : specs) {
        if (spec.in < 1 || spec.out < 1) {
            throw ParameterError("layer dimensions must be at least 1");
        }
        // He-uniform for ReLU, Glorot-uniform otherwise.
        const double limit = spec.activation == Activation::relu
                                 ? std::sqrt(6.0 / spec.in)
                                 : std::sqrt(6.0 / (spec.in + spec.out));
        Layer layer;
        layer.activation = spec.activation;
        layer.w.resize(spec.out, spec.in);
        for (Eigen::Index r = 0; r < layer.w.rows(); ++r) {
            for (Eigen::Index c = 0; c < layer.w.cols(); ++c) {
                layer.w(r, c) = rng.uniform(-limit, limit);
            }
        }
        layer.b = Eigen::VectorXd::Zero(spec.out);
        params.layers.push_back(std::move(layer));
    }
    params.validate();
    return params;
}

std::vector<LayerSpec> hidden_stack(int input_dim, int output_dim, Activation output_activation,
                                    int hidden_layers, int hidden_width) {
    std::vector<LayerSpec> specs;
    int in = input_dim;
    for (int k = 0; k < hidden_layers; ++k) {
        specs.push_back({in, hidden_width, Activation::relu});
        in = hidden_width;
    }
    specs.push_back({in, output_dim, output_activation});
    return specs;
}

void Dataset::validate() const {
    if (features.rows() == 0) {
        throw ParameterError("dataset is empty");
    }
    if (features.rows() != targets.rows()) {
        throw ParameterError("feature and target row counts differ");
    }
}

Eigen::MatrixXd forward_batch(const NetworkParams& params, const Eigen::MatrixXd& x,
                              ForwardCache* cache) {
    if (x.cols() != params.input_dim()) {
        std::ostringstream msg;
        msg << "input width " << x.cols() << " does not match network input "
            << params.input_dim();
        throw ParameterError(msg.str());
    }
    if (cache != nullptr) {
        cache->input = x;
        cache->pre.clear();
        cache->post.clear();
        cache->pre.reserve(params.layers.size());
        cache->post.reserve(params.layers.size());
    }
    Eigen::MatrixXd a = x;
    for (const Layer& layer : params.layers) {
        Eigen::MatrixXd z = (a * layer.w.transpose()).rowwise() + layer.b.transpose();
        a = apply_activation(layer.activation, z);
        if (cache != nullptr) {
            cache->pre.push_back(std::move(z));
            cache->post.push_back(a);
        }
    }
    return a;
}

Eigen::VectorXd forward(const NetworkParams& params, const Eigen::VectorXd& x) {
    return forward_batch(params, x.transpose()).row(0);
}

double mse_loss(const Eigen::MatrixXd& predictions, const Eigen::MatrixXd& targets) {
    if (predictions.rows() != targets.rows() || predictions.cols() != targets.cols()) {
        throw ParameterError("prediction and target shapes differ");
    }
    return 0.5 * (predictions - targets).squaredNorm();
}

double cross_entropy_loss(const Eigen::MatrixXd& probabilities, const Eigen::MatrixXd& one_hot) {
    if (probabilities.rows() != one_hot.rows() || probabilities.cols() != one_hot.cols()) {
        throw ParameterError("probability and label shapes differ");
    }
    const double f = static_cast<double>(probabilities.rows());
    const Eigen::ArrayXXd clamped = probabilities.array().max(kLogClamp);
    return -(one_hot.array() * clamped.log()).sum() / f;
}

Eigen::MatrixXd loss_gradient(LossKind kind, const Eigen::MatrixXd& predictions,
                              const Eigen::MatrixXd& targets) {
    const double f = static_cast<double>(predictions.rows());
    switch (kind) {
    case LossKind::mse:
        return (predictions - targets) / f;
    case LossKind::cross_entropy: {
        const Eigen::ArrayXXd clamped = predictions.array().max(kLogClamp);
        return (-(targets.array() / clamped) / f).matrix();
    }
    }
    throw ParameterError("unknown loss kind");
}

Gradients backward(const NetworkParams& params, const ForwardCache& cache,
                   const Eigen::MatrixXd& dloss_doutput) {
    const std::size_t depth = params.layers.size();
    if (cache.pre.size() != depth || cache.post.size() != depth) {
        throw ParameterError("forward cache does not match the network");
    }

    Gradients grads;
    grads.dw.resize(depth);
    grads.db.resize(depth);

    Eigen::MatrixXd delta; // dL/dz of the current layer
    for (std::size_t idx = depth; idx-- > 0;) {
        const Layer& layer = params.layers[idx];
        const Eigen::MatrixXd& z = cache.pre[idx];
        const Eigen::MatrixXd& a = cache.post[idx];
        const Eigen::MatrixXd da =
            (idx + 1 == depth) ? dloss_doutput
                               : Eigen::MatrixXd(delta * params.layers[idx + 1].w);

        switch (layer.activation) {
        case Activation::linear:
            delta = da;
            break;
        case Activation::relu:
            delta = (z.array() > 0.0).cast<double>() * da.array();
            break;
        case Activation::softmax: {
            // dz_i = p_i * (da_i - sum_j p_j da_j), row by row.
            delta.resize(da.rows(), da.cols());
            for (Eigen::Index r = 0; r < da.rows(); ++r) {
                const double inner = a.row(r).dot(da.row(r));
                delta.row(r) = a.row(r).array() * (da.row(r).array() - inner);
            }
            break;
        }
        }

        const Eigen::MatrixXd& below = idx == 0 ? cache.input : cache.post[idx - 1];
        grads.dw[idx] = delta.transpose() * below;
        grads.db[idx] = delta.colwise().sum();
    }
    return grads;
}

void TrainConfig::validate(std::size_t dataset_size) const {
    if (batch_size < 1) {
        throw ParameterError("batch size must be positive");
    }
    if (!(validation_split > 0.0) || !(validation_split < 1.0)) {
        throw ParameterError("validation split must lie in (0, 1)");
    }
    if (steps < 1) {
        throw ParameterError("step count must be positive");
    }
    if (validation_frequency < 1) {
        throw ParameterError("validation frequency must be positive");
    }
    if (!(learning_rate > 0.0)) {
        throw ParameterError("learning rate must be positive");
    }
    const auto train_rows =
        dataset_size - static_cast<std::size_t>(std::floor(validation_split * dataset_size));
    if (static_cast<std::size_t>(batch_size) > train_rows) {
        throw ParameterError("batch size exceeds the training partition");
    }
}

TrainResult train(NetworkParams initial, const Dataset& dataset, const TrainConfig& config,
                  LossKind loss_kind) {
    dataset.validate();
    initial.validate();
    config.validate(dataset.size());

    const std::size_t total = dataset.size();
    auto val_rows = static_cast<std::size_t>(std::floor(config.validation_split * total));
    const std::size_t train_rows = total - val_rows;

    RngStream rng(config.seed, 0x747261696eULL);
    std::vector<std::size_t> order(total);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng.engine());

    const auto gather = [&](std::size_t offset, std::size_t rows) {
        Dataset part;
        part.features.resize(static_cast<Eigen::Index>(rows), dataset.features.cols());
        part.targets.resize(static_cast<Eigen::Index>(rows), dataset.targets.cols());
        for (std::size_t i = 0; i < rows; ++i) {
            const auto src = static_cast<Eigen::Index>(order[offset + i]);
            part.features.row(static_cast<Eigen::Index>(i)) = dataset.features.row(src);
            part.targets.row(static_cast<Eigen::Index>(i)) = dataset.targets.row(src);
        }
        return part;
    };
    const Dataset train_part = gather(0, train_rows);
    const Dataset val_part = val_rows > 0 ? gather(train_rows, val_rows) : Dataset{};

    TrainResult result;
    result.params = std::move(initial);
    result.train_loss.reserve(static_cast<std::size_t>(config.steps));

    // Adam state per layer.
    const std::size_t depth = result.params.layers.size();
    std::vector<Eigen::MatrixXd> mw(depth), vw(depth);
    std::vector<Eigen::VectorXd> mb(depth), vb(depth);
    for (std::size_t k = 0; k < depth; ++k) {
        mw[k] = Eigen::MatrixXd::Zero(result.params.layers[k].w.rows(),
                                      result.params.layers[k].w.cols());
        vw[k] = mw[k];
        mb[k] = Eigen::VectorXd::Zero(result.params.layers[k].b.size());
        vb[k] = mb[k];
    }

    std::vector<std::size_t> epoch_order(train_rows);
    std::iota(epoch_order.begin(), epoch_order.end(), std::size_t{0});
    std::size_t cursor = train_rows; // force a shuffle on first use

    const auto batch_rows = static_cast<std::size_t>(config.batch_size);
    Eigen::MatrixXd bx(config.batch_size, train_part.features.cols());
    Eigen::MatrixXd bt(config.batch_size, train_part.targets.cols());

    const auto evaluate = [&](const Dataset& part) {
        const Eigen::MatrixXd pred = forward_batch(result.params, part.features);
        const double loss = loss_kind == LossKind::mse ? mse_loss(pred, part.targets)
                                                       : cross_entropy_loss(pred, part.targets);
        // Report per sample so the value is comparable across split sizes.
        return loss_kind == LossKind::mse ? loss / static_cast<double>(part.size()) : loss;
    };

    ForwardCache cache;
    for (int step = 1; step <= config.steps; ++step) {
        if (cursor + batch_rows > train_rows) {
            std::shuffle(epoch_order.begin(), epoch_order.end(), rng.engine());
            cursor = 0;
        }
        for (std::size_t i = 0; i < batch_rows; ++i) {
            const auto src = static_cast<Eigen::Index>(epoch_order[cursor + i]);
            bx.row(static_cast<Eigen::Index>(i)) = train_part.features.row(src);
            bt.row(static_cast<Eigen::Index>(i)) = train_part.targets.row(src);
        }
        cursor += batch_rows;

        const Eigen::MatrixXd pred = forward_batch(result.params, bx, &cache);
        const double loss =
            loss_kind == LossKind::mse ? mse_loss(pred, bt) : cross_entropy_loss(pred, bt);
        if (!std::isfinite(loss)) {
            std::ostringstream msg;
            msg << "training diverged at step " << step;
            throw DivergenceError(msg.str());
        }
        result.train_loss.push_back(loss);

        const Gradients grads = backward(result.params, cache, loss_gradient(loss_kind, pred, bt));

        const double corr1 = 1.0 - std::pow(kAdamBeta1, step);
        const double corr2 = 1.0 - std::pow(kAdamBeta2, step);
        for (std::size_t k = 0; k < depth; ++k) {
            Layer& layer = result.params.layers[k];
            mw[k] = kAdamBeta1 * mw[k] + (1.0 - kAdamBeta1) * grads.dw[k];
            vw[k] = kAdamBeta2 * vw[k].array().matrix() +
                    (1.0 - kAdamBeta2) * grads.dw[k].array().square().matrix();
            mb[k] = kAdamBeta1 * mb[k] + (1.0 - kAdamBeta1) * grads.db[k];
            vb[k] = kAdamBeta2 * vb[k].array().matrix() +
                    (1.0 - kAdamBeta2) * grads.db[k].array().square().matrix();

            layer.w.array() -= config.learning_rate * (mw[k].array() / corr1) /
                               ((vw[k].array() / corr2).sqrt() + kAdamEps);
            layer.b.array() -= config.learning_rate * (mb[k].array() / corr1) /
                               ((vb[k].array() / corr2).sqrt() + kAdamEps);
        }

        if (val_rows > 0 && step % config.validation_frequency == 0) {
            result.validation_loss.emplace_back(step, evaluate(val_part));
        }
    }
    return result;
}

} // namespace rcs
