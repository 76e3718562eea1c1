#pragma once

#include <cstdint>
#include <cstddef>
#include <string>
#include <vector>

#include "tfed/dataset.hpp"

namespace tfed::model {

struct ModelConfig {
    std::size_t input_dim = 52;
    std::size_t hidden1 = 128;
    std::size_t hidden2 = 64;
    std::size_t num_classes = 21;
    std::size_t ts = 5;

    std::uint64_t digest() const;
    std::size_t parameter_count() const;
};

struct Tensor {
    std::string name;
    std::size_t rows = 0;
    std::size_t cols = 0;  // 1 for biases
    std::vector<double> data;

    std::size_t size() const { return rows * cols; }
};

/// All trainable weights in a fixed, documented order:
///   for layer in {lstm1, lstm2}:
///     for gate in {i, f, g, o}:  <layer>.W<gate>, <layer>.U<gate>, <layer>.b<gate>
///   dense.W, dense.b
/// W matrices are (hidden x input), U are (hidden x hidden), biases are
/// column vectors. This order defines both serialization and aggregation.
struct ModelParameters {
    ModelConfig config;
    std::vector<Tensor> tensors;

    static ModelParameters zeros(const ModelConfig& cfg);
    /// Uniform +-1/sqrt(fan_in) weights, zero biases, forget-gate bias 1.0.
    static ModelParameters init(const ModelConfig& cfg, std::uint64_t seed);
};

struct TrainConfig {
    std::size_t batch_size = 1024;
    std::size_t epochs = 10;
    double learning_rate = 0.001;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_epsilon = 1e-8;
    double clip_norm = 5.0;  // global-norm gradient clip; <= 0 disables
    std::uint64_t seed = 0;
};

/// Forward pass over a (b, ts, n) batch. Each LSTM layer's emitted hidden
/// sequence passes through ReLU before feeding the next layer; the dense
/// softmax head consumes the second layer's final (ReLU'd) hidden state.
/// Returns (b, num_classes) row-normalized probabilities.
std::vector<double> forward(const ModelParameters& params,
                            const std::vector<double>& batch, std::size_t b);

/// Mean categorical cross-entropy, true-class probability floored at 1e-12.
double loss(const std::vector<double>& probs, const std::vector<int>& labels,
            std::size_t num_classes);

/// Exact gradients of loss() w.r.t. every parameter via backpropagation
/// through time. Returned in the same tensor order as ModelParameters.
ModelParameters backward(const ModelParameters& params,
                         const std::vector<double>& batch, std::size_t b,
                         const std::vector<int>& labels);

struct AdamState {
    std::vector<std::vector<double>> m;
    std::vector<std::vector<double>> v;

    static AdamState zeros(const ModelParameters& params);
};

/// One bias-corrected Adam update, step index t >= 1.
void adam_step(ModelParameters& params, const ModelParameters& grads,
               AdamState& state, std::size_t t, const TrainConfig& cfg);

struct TrainLog {
    std::vector<double> epoch_loss;
};

/// Seeded mini-batch training: `epochs` shuffled passes, final partial batch
/// kept, global-norm clipping, Adam. Deterministic given the seed.
TrainLog train_local(ModelParameters& params, const WindowedDataset& dataset,
                     const TrainConfig& cfg);

/// Wire format: "TFW1" magic, u32 version, u64 config digest, then every
/// tensor's data as little-endian float32 in ModelParameters order. Payload
/// length is a pure function of ModelConfig.
std::vector<std::uint8_t> serialize(const ModelParameters& params);
ModelParameters deserialize(const std::vector<std::uint8_t>& bytes,
                            const ModelConfig& cfg);
std::size_t payload_size(const ModelConfig& cfg);

/// Human-readable manifest: one line per tensor (name, shape, checksum).
std::string manifest(const ModelParameters& params);

/// Argmax class predictions for a whole windowed dataset.
std::vector<int> predict(const ModelParameters& params, const WindowedDataset& data,
                         std::size_t batch_size = 256);

}  // namespace tfed::model
