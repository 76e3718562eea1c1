#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "tfed/errors.hpp"
#include "tfed/model.hpp"

using namespace tfed;
using namespace tfed::model;

namespace {

std::vector<double> random_batch(const ModelConfig& cfg, std::size_t b, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist;
    std::vector<double> batch(b * cfg.ts * cfg.input_dim);
    for (double& v : batch) v = dist(rng);
    return batch;
}

std::vector<int> random_labels(std::size_t b, std::size_t c, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> dist(0, static_cast<int>(c) - 1);
    std::vector<int> labels(b);
    for (int& l : labels) l = dist(rng);
    return labels;
}

// Independent scalar re-implementation of the forward pass: one sample at a
// time, plain loops, no batching, no shared code with the library path.
std::vector<double> scalar_forward(const ModelParameters& p, const std::vector<double>& sample) {
    const auto& cfg = p.config;
    auto tensor = [&](const std::string& name) -> const Tensor& {
        for (const auto& t : p.tensors)
            if (t.name == name) return t;
        throw std::runtime_error("missing tensor " + name);
    };
    auto sigmoid = [](double x) { return 1.0 / (1.0 + std::exp(-x)); };
    auto relu = [](double x) { return x > 0.0 ? x : 0.0; };

    std::vector<std::vector<double>> layer_in(cfg.ts);
    for (std::size_t t = 0; t < cfg.ts; ++t)
        layer_in[t].assign(sample.begin() + t * cfg.input_dim,
                           sample.begin() + (t + 1) * cfg.input_dim);

    for (int layer = 1; layer <= 2; ++layer) {
        const std::string prefix = "lstm" + std::to_string(layer) + ".";
        const std::size_t h = layer == 1 ? cfg.hidden1 : cfg.hidden2;
        const std::size_t in = layer_in[0].size();
        std::vector<double> hs(h, 0.0), cs(h, 0.0);
        std::vector<std::vector<double>> emitted(cfg.ts);
        for (std::size_t t = 0; t < cfg.ts; ++t) {
            std::vector<double> hn(h), cn(h);
            for (std::size_t k = 0; k < h; ++k) {
                double a[4];
                const char* gates = "ifgo";
                for (int g = 0; g < 4; ++g) {
                    const Tensor& W = tensor(prefix + "W" + gates[g]);
                    const Tensor& U = tensor(prefix + "U" + gates[g]);
                    const Tensor& B = tensor(prefix + "b" + gates[g]);
                    double acc = B.data[k];
                    for (std::size_t c = 0; c < in; ++c) acc += W.data[k * in + c] * layer_in[t][c];
                    for (std::size_t c = 0; c < h; ++c) acc += U.data[k * h + c] * hs[c];
                    a[g] = acc;
                }
                const double i = sigmoid(a[0]), f = sigmoid(a[1]);
                const double g = std::tanh(a[2]), o = sigmoid(a[3]);
                cn[k] = f * cs[k] + i * g;
                hn[k] = o * std::tanh(cn[k]);
            }
            hs = hn;
            cs = cn;
            emitted[t].resize(h);
            for (std::size_t k = 0; k < h; ++k) emitted[t][k] = relu(hn[k]);
        }
        layer_in = emitted;
    }

    const Tensor& dw = tensor("dense.W");
    const Tensor& db = tensor("dense.b");
    std::vector<double> logits(cfg.num_classes);
    for (std::size_t k = 0; k < cfg.num_classes; ++k) {
        double acc = db.data[k];
        for (std::size_t c = 0; c < cfg.hidden2; ++c)
            acc += dw.data[k * cfg.hidden2 + c] * layer_in[cfg.ts - 1][c];
        logits[k] = acc;
    }
    double mx = logits[0];
    for (double v : logits) mx = std::max(mx, v);
    double sum = 0.0;
    for (double& v : logits) {
        v = std::exp(v - mx);
        sum += v;
    }
    for (double& v : logits) v /= sum;
    return logits;
}

}  // namespace

TEST_CASE("softmax rows sum to 1") {
    const ModelConfig cfg{.input_dim = 3, .hidden1 = 4, .hidden2 = 4, .num_classes = 3, .ts = 2};
    const auto p = ModelParameters::init(cfg, 1);
    const auto batch = random_batch(cfg, 8, 2);
    const auto probs = forward(p, batch, 8);
    for (std::size_t s = 0; s < 8; ++s) {
        double sum = 0.0;
        for (std::size_t k = 0; k < 3; ++k) {
            const double v = probs[s * 3 + k];
            CHECK(v > 0.0);
            CHECK(v < 1.0);
            sum += v;
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("zero parameters give the uniform distribution") {
    const ModelConfig cfg{.input_dim = 2, .hidden1 = 3, .hidden2 = 3, .num_classes = 5, .ts = 2};
    const auto p = ModelParameters::zeros(cfg);
    const auto probs = forward(p, random_batch(cfg, 4, 3), 4);
    for (double v : probs) CHECK(v == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("batched forward matches the scalar reference implementation") {
    const ModelConfig cfg{.input_dim = 3, .hidden1 = 4, .hidden2 = 4, .num_classes = 3, .ts = 2};
    const auto p = ModelParameters::init(cfg, 99);
    const std::size_t b = 5;
    const auto batch = random_batch(cfg, b, 4);
    const auto probs = forward(p, batch, b);
    for (std::size_t s = 0; s < b; ++s) {
        const std::vector<double> sample(batch.begin() + s * cfg.ts * cfg.input_dim,
                                         batch.begin() + (s + 1) * cfg.ts * cfg.input_dim);
        const auto want = scalar_forward(p, sample);
        for (std::size_t k = 0; k < cfg.num_classes; ++k)
            CHECK(std::abs(probs[s * cfg.num_classes + k] - want[k]) < 1e-10);
    }
}

TEST_CASE("forward determinism and shape validation") {
    const ModelConfig cfg{.input_dim = 2, .hidden1 = 3, .hidden2 = 2, .num_classes = 2, .ts = 3};
    const auto p = ModelParameters::init(cfg, 7);
    const auto batch = random_batch(cfg, 3, 8);
    CHECK(forward(p, batch, 3) == forward(p, batch, 3));
    CHECK_THROWS_AS(forward(p, batch, 4), std::invalid_argument);
}

TEST_CASE("loss values") {
    // Perfect one-hot.
    CHECK(model::loss({1.0, 0.0, 0.0}, {0}, 3) == doctest::Approx(0.0).epsilon(1e-9));
    // Uniform over c classes -> ln(c).
    CHECK(model::loss({0.25, 0.25, 0.25, 0.25}, {2}, 4) ==
          doctest::Approx(std::log(4.0)).epsilon(1e-9));
    // Hand value.
    CHECK(model::loss({0.7, 0.2, 0.1}, {0}, 3) == doctest::Approx(0.3566749439).epsilon(1e-6));
}

TEST_CASE("gradient check against central finite differences") {
    std::mt19937_64 meta(123);
    for (int rep = 0; rep < 5; ++rep) {
        const ModelConfig cfg{.input_dim = 2 + static_cast<std::size_t>(rep % 2),
                              .hidden1 = 3, .hidden2 = 2,
                              .num_classes = 3, .ts = 2};
        auto p = ModelParameters::init(cfg, meta());
        // Zero biases can put a hidden unit exactly on the ReLU kink, where
        // the subgradient and the central difference legitimately disagree;
        // random biases move every unit off the kink.
        {
            std::mt19937_64 brng(meta());
            std::uniform_real_distribution<double> dist(-0.2, 0.2);
            for (auto& t : p.tensors)
                if (t.cols == 1)
                    for (double& v : t.data) v = dist(brng);
        }
        const std::size_t b = 2;
        const auto batch = random_batch(cfg, b, meta());
        const auto labels = random_labels(b, cfg.num_classes, meta());
        const auto grads = backward(p, batch, b, labels);

        const double step = 1e-5;
        double max_rel = 0.0;
        for (std::size_t ti = 0; ti < p.tensors.size(); ++ti) {
            for (std::size_t k = 0; k < p.tensors[ti].size(); ++k) {
                const double orig = p.tensors[ti].data[k];
                p.tensors[ti].data[k] = orig + step;
                const double up = model::loss(forward(p, batch, b), labels, cfg.num_classes);
                p.tensors[ti].data[k] = orig - step;
                const double down = model::loss(forward(p, batch, b), labels, cfg.num_classes);
                p.tensors[ti].data[k] = orig;
                const double fd = (up - down) / (2.0 * step);
                const double an = grads.tensors[ti].data[k];
                const double denom = std::max({std::abs(fd), std::abs(an), 1e-4});
                max_rel = std::max(max_rel, std::abs(fd - an) / denom);
            }
        }
        CHECK(max_rel < 1e-4);
    }
}

TEST_CASE("gradient of repeated samples equals the single-sample gradient") {
    const ModelConfig cfg{.input_dim = 2, .hidden1 = 3, .hidden2 = 2, .num_classes = 3, .ts = 2};
    const auto p = ModelParameters::init(cfg, 5);
    const auto one = random_batch(cfg, 1, 6);
    const std::vector<int> label = {1};
    const auto g1 = backward(p, one, 1, label);

    std::vector<double> batch;
    std::vector<int> labels;
    for (int i = 0; i < 4; ++i) {
        batch.insert(batch.end(), one.begin(), one.end());
        labels.push_back(1);
    }
    const auto g4 = backward(p, batch, 4, labels);
    for (std::size_t ti = 0; ti < g1.tensors.size(); ++ti)
        for (std::size_t k = 0; k < g1.tensors[ti].size(); ++k)
            CHECK(std::abs(g1.tensors[ti].data[k] - g4.tensors[ti].data[k]) < 1e-10);
}

TEST_CASE("adam first step is approximately -lr * sign(g)") {
    const ModelConfig cfg{.input_dim = 2, .hidden1 = 2, .hidden2 = 2, .num_classes = 2, .ts = 1};
    auto p = ModelParameters::zeros(cfg);
    auto g = ModelParameters::zeros(cfg);
    std::mt19937_64 rng(17);
    std::normal_distribution<double> dist(0.0, 1.0);
    for (auto& t : g.tensors)
        for (double& v : t.data) v = dist(rng);
    auto state = AdamState::zeros(p);
    TrainConfig tc;
    adam_step(p, g, state, 1, tc);
    for (std::size_t ti = 0; ti < p.tensors.size(); ++ti)
        for (std::size_t k = 0; k < p.tensors[ti].size(); ++k) {
            const double gv = g.tensors[ti].data[k];
            if (std::abs(gv) < 1e-4) continue;  // sign is ill-conditioned near 0
            const double want = -tc.learning_rate * (gv > 0 ? 1.0 : -1.0);
            CHECK(std::abs(p.tensors[ti].data[k] - want) < 1e-6);
        }
}

TEST_CASE("adam with zero gradient leaves parameters unchanged") {
    const ModelConfig cfg{.input_dim = 2, .hidden1 = 2, .hidden2 = 2, .num_classes = 2, .ts = 1};
    auto p = ModelParameters::init(cfg, 3);
    const auto before = p;
    auto state = AdamState::zeros(p);
    adam_step(p, ModelParameters::zeros(cfg), state, 1, TrainConfig{});
    for (std::size_t ti = 0; ti < p.tensors.size(); ++ti)
        CHECK(p.tensors[ti].data == before.tensors[ti].data);
}

TEST_CASE("adam determinism") {
    const ModelConfig cfg{.input_dim = 2, .hidden1 = 2, .hidden2 = 2, .num_classes = 2, .ts = 1};
    auto p1 = ModelParameters::init(cfg, 3);
    auto p2 = p1;
    auto g = ModelParameters::init(cfg, 4);
    auto s1 = AdamState::zeros(p1);
    auto s2 = AdamState::zeros(p2);
    adam_step(p1, g, s1, 1, TrainConfig{});
    adam_step(p2, g, s2, 1, TrainConfig{});
    for (std::size_t ti = 0; ti < p1.tensors.size(); ++ti)
        CHECK(p1.tensors[ti].data == p2.tensors[ti].data);
}

namespace {

WindowedDataset separable_dataset(std::size_t n_samples, std::uint64_t seed) {
    // 3 classes with distinct mean patterns over 2 features, ts=2.
    WindowedDataset d;
    d.windows = n_samples;
    d.ts = 2;
    d.cols = 2;
    d.values.resize(n_samples * 2 * 2);
    d.labels.resize(n_samples);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, 0.3);
    for (std::size_t i = 0; i < n_samples; ++i) {
        const int cls = static_cast<int>(i % 3);
        d.labels[i] = cls;
        const double mx = cls == 0 ? -2.0 : (cls == 1 ? 0.0 : 2.0);
        const double my = cls == 0 ? 1.0 : (cls == 1 ? -2.0 : 2.0);
        for (std::size_t t = 0; t < 2; ++t) {
            d.values[(i * 2 + t) * 2 + 0] = mx + noise(rng);
            d.values[(i * 2 + t) * 2 + 1] = my + noise(rng);
        }
    }
    return d;
}

}  // namespace

TEST_CASE("training makes progress on a separable problem") {
    const ModelConfig cfg{.input_dim = 2, .hidden1 = 6, .hidden2 = 4, .num_classes = 3, .ts = 2};
    auto p = ModelParameters::init(cfg, 11);
    const auto data = separable_dataset(200, 12);
    TrainConfig tc;
    tc.batch_size = 32;
    tc.epochs = 10;
    tc.learning_rate = 0.01;
    tc.seed = 13;
    const auto log = train_local(p, data, tc);
    REQUIRE(log.epoch_loss.size() == 10);
    CHECK(log.epoch_loss.back() < log.epoch_loss.front());
}

TEST_CASE("train_local with zero epochs changes nothing") {
    const ModelConfig cfg{.input_dim = 2, .hidden1 = 3, .hidden2 = 2, .num_classes = 3, .ts = 2};
    auto p = ModelParameters::init(cfg, 21);
    const auto before = p;
    TrainConfig tc;
    tc.epochs = 0;
    train_local(p, separable_dataset(30, 1), tc);
    for (std::size_t ti = 0; ti < p.tensors.size(); ++ti)
        CHECK(p.tensors[ti].data == before.tensors[ti].data);
}

TEST_CASE("train_local is bit-deterministic per seed") {
    const ModelConfig cfg{.input_dim = 2, .hidden1 = 3, .hidden2 = 2, .num_classes = 3, .ts = 2};
    const auto data = separable_dataset(60, 2);
    TrainConfig tc;
    tc.batch_size = 16;
    tc.epochs = 3;
    tc.seed = 5;
    auto p1 = ModelParameters::init(cfg, 1);
    auto p2 = ModelParameters::init(cfg, 1);
    train_local(p1, data, tc);
    train_local(p2, data, tc);
    for (std::size_t ti = 0; ti < p1.tensors.size(); ++ti)
        CHECK(p1.tensors[ti].data == p2.tensors[ti].data);
}

TEST_CASE("serialization round-trips bit-for-bit on float32 values") {
    const ModelConfig cfg{.input_dim = 4, .hidden1 = 5, .hidden2 = 3, .num_classes = 4, .ts = 2};
    auto p = ModelParameters::init(cfg, 31);
    // Round through float32 first: the wire format is single precision.
    for (auto& t : p.tensors)
        for (double& v : t.data) v = static_cast<double>(static_cast<float>(v));
    const auto bytes = serialize(p);
    CHECK(bytes.size() == payload_size(cfg));
    const auto q = deserialize(bytes, cfg);
    for (std::size_t ti = 0; ti < p.tensors.size(); ++ti)
        CHECK(p.tensors[ti].data == q.tensors[ti].data);
}

TEST_CASE("payload size grows by the first-layer input-weight delta") {
    const ModelConfig small{.input_dim = 52, .hidden1 = 128, .hidden2 = 64, .num_classes = 21, .ts = 5};
    const ModelConfig large{.input_dim = 260, .hidden1 = 128, .hidden2 = 64, .num_classes = 21, .ts = 5};
    CHECK(payload_size(large) - payload_size(small) == 4u * (260 - 52) * (4 * 128));
    CHECK(payload_size(large) - payload_size(small) == 425984u);
}

TEST_CASE("corrupt payloads are rejected") {
    const ModelConfig cfg{.input_dim = 2, .hidden1 = 2, .hidden2 = 2, .num_classes = 2, .ts = 1};
    const auto p = ModelParameters::init(cfg, 1);
    auto bytes = serialize(p);

    auto truncated = bytes;
    truncated.pop_back();
    CHECK_THROWS_AS(deserialize(truncated, cfg), CorruptPayloadError);

    auto bad_magic = bytes;
    bad_magic[0] = 'X';
    CHECK_THROWS_AS(deserialize(bad_magic, cfg), CorruptPayloadError);

    ModelConfig other = cfg;
    other.hidden1 = 3;
    CHECK_THROWS_AS(deserialize(bytes, other), CorruptPayloadError);
}

TEST_CASE("parameter count matches enumerated tensor shapes") {
    const ModelConfig cfg{.input_dim = 7, .hidden1 = 5, .hidden2 = 3, .num_classes = 4, .ts = 2};
    const auto p = ModelParameters::zeros(cfg);
    std::size_t total = 0;
    for (const auto& t : p.tensors) total += t.size();
    CHECK(total == cfg.parameter_count());
}

TEST_CASE("manifest lists every tensor") {
    const ModelConfig cfg{.input_dim = 2, .hidden1 = 2, .hidden2 = 2, .num_classes = 2, .ts = 1};
    const auto text = manifest(ModelParameters::init(cfg, 1));
    CHECK(text.find("lstm1.Wi") != std::string::npos);
    CHECK(text.find("dense.b") != std::string::npos);
}
