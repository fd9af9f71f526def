#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace rcs {

enum class Activation { linear, relu, softmax };

struct LayerSpec {
    int in = 1;
    int out = 1;
    Activation activation = Activation::linear;
};

/// Dense layer. Weights are (out x in); row k holds the incoming weights of
/// output unit k.
struct Layer {
    Eigen::MatrixXd w;
    Eigen::VectorXd b;
    Activation activation = Activation::linear;
};

struct NetworkParams {
    std::vector<Layer> layers;

    int input_dim() const;
    int output_dim() const;
    void validate() const;
};

/// Fresh network with seed-deterministic initialisation: He-uniform in
/// front of ReLU layers, Glorot-uniform elsewhere. Softmax is only allowed
/// on the final layer.
NetworkParams make_network(const std::vector<LayerSpec>& specs, std::uint64_t seed);

/// The standard depth-4, width-256 ReLU stack used by both estimators.
std::vector<LayerSpec> hidden_stack(int input_dim, int output_dim, Activation output_activation,
                                    int hidden_layers = 4, int hidden_width = 256);

/// Sample-major dataset: one row per sample. For classification the targets
/// are one-hot rows.
struct Dataset {
    Eigen::MatrixXd features;
    Eigen::MatrixXd targets;

    std::size_t size() const { return static_cast<std::size_t>(features.rows()); }
    void validate() const;
};

enum class LossKind { mse, cross_entropy };

/// Per-layer forward state kept for backpropagation: pre-activations and
/// activations, plus the input batch.
struct ForwardCache {
    Eigen::MatrixXd input;
    std::vector<Eigen::MatrixXd> pre;
    std::vector<Eigen::MatrixXd> post;
};

Eigen::MatrixXd forward_batch(const NetworkParams& params, const Eigen::MatrixXd& x,
                              ForwardCache* cache = nullptr);
Eigen::VectorXd forward(const NetworkParams& params, const Eigen::VectorXd& x);

/// Half the summed squared residual over the batch.
double mse_loss(const Eigen::MatrixXd& predictions, const Eigen::MatrixXd& targets);

/// Mean negative log likelihood of one-hot targets; probabilities are
/// clamped at 1e-12 before the log.
double cross_entropy_loss(const Eigen::MatrixXd& probabilities, const Eigen::MatrixXd& one_hot);

/// Gradient of the loss w.r.t. the network output (the activation of the
/// final layer), matching mse_loss / cross_entropy_loss with the training
/// scaling: MSE residuals are divided by the batch size, cross entropy by
/// the sample count it already averages over.
Eigen::MatrixXd loss_gradient(LossKind kind, const Eigen::MatrixXd& predictions,
                              const Eigen::MatrixXd& targets);

struct Gradients {
    std::vector<Eigen::MatrixXd> dw;
    std::vector<Eigen::VectorXd> db;
};

/// Backpropagate dL/d(output) through the cached forward pass. Handles the
/// softmax Jacobian on the final layer, so any loss gradient expressed on
/// the activations is valid input.
Gradients backward(const NetworkParams& params, const ForwardCache& cache,
                   const Eigen::MatrixXd& dloss_doutput);

struct TrainConfig {
    int batch_size = 256;
    double learning_rate = 0.003;
    int steps = 600;
    double validation_split = 0.1;
    int validation_frequency = 10;
    std::uint64_t seed = 0;

    void validate(std::size_t dataset_size) const;
};

struct TrainResult {
    NetworkParams params;
    std::vector<double> train_loss;                      // one entry per step
    std::vector<std::pair<int, double>> validation_loss; // (step, per-sample loss)
};

/// Mini-batch Adam training (beta1 0.9, beta2 0.999, eps 1e-8). The data is
/// shuffled once per epoch with the config seed; the trailing
/// validation_split fraction of the initial shuffle is held out. Throws
/// DivergenceError when the loss stops being finite.
TrainResult train(NetworkParams initial, const Dataset& dataset, const TrainConfig& config,
                  LossKind loss_kind);

} // namespace rcs
