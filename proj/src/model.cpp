#include "tfed/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include "tfed/errors.hpp"

namespace tfed::model {

namespace {

constexpr char kMagic[4] = {'T', 'F', 'W', '1'};
constexpr std::uint32_t kVersion = 1;

std::uint64_t fnv1a_bytes(const void* bytes, std::size_t len,
                          std::uint64_t h = 1469598103934665603ULL) {
    const auto* p = static_cast<const std::uint8_t*>(bytes);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 1099511628211ULL;
    }
    return h;
}

// Tensor order: per layer, per gate {i, f, g, o}: W, U, b; then dense W, b.
constexpr std::size_t kTensorsPerLayer = 12;
constexpr const char* kGateNames[4] = {"i", "f", "g", "o"};

std::size_t tensor_index(std::size_t layer, std::size_t gate, std::size_t part) {
    return layer * kTensorsPerLayer + gate * 3 + part;  // part: 0=W, 1=U, 2=b
}
constexpr std::size_t kDenseW = 24;
constexpr std::size_t kDenseB = 25;

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void check_finite(const std::vector<double>& v, const char* layer) {
    for (double x : v)
        if (!std::isfinite(x))
            throw NumericOverflowError(std::string("non-finite value in ") + layer);
}

// y += A x for one sample; A is (rows x cols), x has cols entries.
void matvec_acc(const std::vector<double>& a, std::size_t rows, std::size_t cols,
                const double* x, double* y) {
    for (std::size_t r = 0; r < rows; ++r) {
        double acc = 0.0;
        const double* arow = a.data() + r * cols;
        for (std::size_t c = 0; c < cols; ++c) acc += arow[c] * x[c];
        y[r] += acc;
    }
}

// y += A^T x; A is (rows x cols), x has rows entries, y has cols entries.
void matvec_t_acc(const std::vector<double>& a, std::size_t rows, std::size_t cols,
                  const double* x, double* y) {
    for (std::size_t r = 0; r < rows; ++r) {
        const double xr = x[r];
        if (xr == 0.0) continue;
        const double* arow = a.data() + r * cols;
        for (std::size_t c = 0; c < cols; ++c) y[c] += xr * arow[c];
    }
}

struct LayerDims {
    std::size_t in;
    std::size_t hidden;
};

struct LstmCache {
    // Per time step, per sample: gate activations and states (b * hidden),
    // plus the layer inputs (b * in).
    std::vector<std::vector<double>> x, gi, gf, gg, go, c, tanhc, h;
};

// Runs one LSTM layer over the whole batch; emits ReLU(h_t) per step.
std::vector<std::vector<double>> lstm_forward(const ModelParameters& params,
                                              std::size_t layer, const LayerDims& dims,
                                              const std::vector<std::vector<double>>& inputs,
                                              std::size_t b, LstmCache* cache) {
    const std::size_t ts = inputs.size();
    const std::size_t h = dims.hidden;
    std::vector<double> hs(b * h, 0.0), cs(b * h, 0.0);
    std::vector<std::vector<double>> emitted(ts);
    if (cache) {
        cache->x = inputs;
        cache->gi.resize(ts); cache->gf.resize(ts); cache->gg.resize(ts);
        cache->go.resize(ts); cache->c.resize(ts); cache->tanhc.resize(ts);
        cache->h.resize(ts);
    }
    std::vector<double> pre(4 * h);
    for (std::size_t t = 0; t < ts; ++t) {
        std::vector<double> gi(b * h), gf(b * h), gg(b * h), go(b * h);
        std::vector<double> cn(b * h), tc(b * h), hn(b * h);
        for (std::size_t s = 0; s < b; ++s) {
            const double* x = inputs[t].data() + s * dims.in;
            const double* hprev = hs.data() + s * h;
            for (std::size_t g = 0; g < 4; ++g) {
                double* out = pre.data() + g * h;
                const Tensor& bias = params.tensors[tensor_index(layer, g, 2)];
                std::copy(bias.data.begin(), bias.data.end(), out);
                matvec_acc(params.tensors[tensor_index(layer, g, 0)].data, h, dims.in, x, out);
                matvec_acc(params.tensors[tensor_index(layer, g, 1)].data, h, h, hprev, out);
            }
            for (std::size_t k = 0; k < h; ++k) {
                const double iv = sigmoid(pre[0 * h + k]);
                const double fv = sigmoid(pre[1 * h + k]);
                const double gv = std::tanh(pre[2 * h + k]);
                const double ov = sigmoid(pre[3 * h + k]);
                const double cv = fv * cs[s * h + k] + iv * gv;
                const double tcv = std::tanh(cv);
                gi[s * h + k] = iv; gf[s * h + k] = fv; gg[s * h + k] = gv; go[s * h + k] = ov;
                cn[s * h + k] = cv; tc[s * h + k] = tcv;
                hn[s * h + k] = ov * tcv;
            }
        }
        hs = hn;
        cs = cn;
        emitted[t].resize(b * h);
        for (std::size_t k = 0; k < b * h; ++k) emitted[t][k] = std::max(hn[k], 0.0);
        if (cache) {
            cache->gi[t] = std::move(gi); cache->gf[t] = std::move(gf);
            cache->gg[t] = std::move(gg); cache->go[t] = std::move(go);
            cache->c[t] = std::move(cn); cache->tanhc[t] = std::move(tc);
            cache->h[t] = hs;
        }
    }
    check_finite(emitted[ts - 1], layer == 0 ? "lstm1" : "lstm2");
    return emitted;
}

// Backward through one layer. d_emit[t] is the gradient w.r.t. ReLU(h_t).
// Returns gradients w.r.t. the layer inputs; accumulates parameter grads.
std::vector<std::vector<double>> lstm_backward(const ModelParameters& params,
                                               std::size_t layer, const LayerDims& dims,
                                               const LstmCache& cache,
                                               const std::vector<std::vector<double>>& d_emit,
                                               std::size_t b, ModelParameters& grads) {
    const std::size_t ts = cache.x.size();
    const std::size_t h = dims.hidden;
    std::vector<std::vector<double>> d_input(ts);
    for (std::size_t t = 0; t < ts; ++t) d_input[t].assign(b * dims.in, 0.0);

    std::vector<double> dh_rec(b * h, 0.0), dc_next(b * h, 0.0);
    for (std::size_t t = ts; t-- > 0;) {
        std::vector<double> da_i(b * h), da_f(b * h), da_g(b * h), da_o(b * h);
        for (std::size_t s = 0; s < b; ++s) {
            for (std::size_t k = 0; k < h; ++k) {
                const std::size_t idx = s * h + k;
                const double hraw = cache.h[t][idx];
                double dh = dh_rec[idx];
                if (d_emit[t][idx] != 0.0 && hraw > 0.0) dh += d_emit[t][idx];
                const double o = cache.go[t][idx];
                const double tc = cache.tanhc[t][idx];
                const double do_ = dh * tc;
                double dc = dc_next[idx] + dh * o * (1.0 - tc * tc);
                const double i = cache.gi[t][idx];
                const double f = cache.gf[t][idx];
                const double g = cache.gg[t][idx];
                const double cprev = (t > 0) ? cache.c[t - 1][idx] : 0.0;
                da_i[idx] = dc * g * i * (1.0 - i);
                da_f[idx] = dc * cprev * f * (1.0 - f);
                da_g[idx] = dc * i * (1.0 - g * g);
                da_o[idx] = do_ * o * (1.0 - o);
                dc_next[idx] = dc * f;
            }
        }
        // Parameter and input/recurrent gradients.
        std::fill(dh_rec.begin(), dh_rec.end(), 0.0);
        const std::vector<double>* das[4] = {&da_i, &da_f, &da_g, &da_o};
        for (std::size_t g = 0; g < 4; ++g) {
            Tensor& gw = grads.tensors[tensor_index(layer, g, 0)];
            Tensor& gu = grads.tensors[tensor_index(layer, g, 1)];
            Tensor& gb = grads.tensors[tensor_index(layer, g, 2)];
            const Tensor& w = params.tensors[tensor_index(layer, g, 0)];
            const Tensor& u = params.tensors[tensor_index(layer, g, 1)];
            for (std::size_t s = 0; s < b; ++s) {
                const double* da = das[g]->data() + s * h;
                const double* x = cache.x[t].data() + s * dims.in;
                for (std::size_t r = 0; r < h; ++r) {
                    const double d = da[r];
                    if (d == 0.0) continue;
                    double* gwrow = gw.data.data() + r * dims.in;
                    for (std::size_t c = 0; c < dims.in; ++c) gwrow[c] += d * x[c];
                    gb.data[r] += d;
                    if (t > 0) {
                        const double* hprev = cache.h[t - 1].data() + s * h;
                        double* gurow = gu.data.data() + r * h;
                        for (std::size_t c = 0; c < h; ++c) gurow[c] += d * hprev[c];
                    }
                }
                matvec_t_acc(w.data, h, dims.in, da, d_input[t].data() + s * dims.in);
                if (t > 0) matvec_t_acc(u.data, h, h, da, dh_rec.data() + s * h);
            }
        }
    }
    return d_input;
}

struct ForwardCache {
    LstmCache l1, l2;
    std::vector<double> dense_in;  // ReLU of layer-2 final hidden, b * h2
    std::vector<double> probs;     // b * num_classes
};

std::vector<double> forward_impl(const ModelParameters& params,
                                 const std::vector<double>& batch, std::size_t b,
                                 ForwardCache* cache) {
    const ModelConfig& cfg = params.config;
    if (batch.size() != b * cfg.ts * cfg.input_dim)
        throw std::invalid_argument("batch size does not match (b, ts, input_dim)");
    for (double v : batch)
        if (!std::isfinite(v)) throw std::invalid_argument("batch contains non-finite values");

    // Re-pack the batch as per-step input slabs (b * n each).
    std::vector<std::vector<double>> inputs(cfg.ts, std::vector<double>(b * cfg.input_dim));
    for (std::size_t s = 0; s < b; ++s)
        for (std::size_t t = 0; t < cfg.ts; ++t)
            for (std::size_t c = 0; c < cfg.input_dim; ++c)
                inputs[t][s * cfg.input_dim + c] =
                    batch[(s * cfg.ts + t) * cfg.input_dim + c];

    const LayerDims d1{cfg.input_dim, cfg.hidden1};
    const LayerDims d2{cfg.hidden1, cfg.hidden2};
    auto emit1 = lstm_forward(params, 0, d1, inputs, b, cache ? &cache->l1 : nullptr);
    auto emit2 = lstm_forward(params, 1, d2, emit1, b, cache ? &cache->l2 : nullptr);

    const std::vector<double>& z = emit2.back();
    const Tensor& dw = params.tensors[kDenseW];
    const Tensor& db = params.tensors[kDenseB];
    const std::size_t c = cfg.num_classes;
    std::vector<double> probs(b * c);
    for (std::size_t s = 0; s < b; ++s) {
        std::vector<double> logits(db.data);
        matvec_acc(dw.data, c, cfg.hidden2, z.data() + s * cfg.hidden2, logits.data());
        check_finite(logits, "dense");
        const double mx = *std::max_element(logits.begin(), logits.end());
        double sum = 0.0;
        for (std::size_t k = 0; k < c; ++k) {
            logits[k] = std::exp(logits[k] - mx);
            sum += logits[k];
        }
        for (std::size_t k = 0; k < c; ++k) probs[s * c + k] = logits[k] / sum;
    }
    if (cache) {
        cache->dense_in = z;
        cache->probs = probs;
    }
    return probs;
}

ModelParameters backward_impl(const ModelParameters& params,
                              const std::vector<double>& batch, std::size_t b,
                              const std::vector<int>& labels, double* out_loss) {
    const ModelConfig& cfg = params.config;
    if (labels.size() != b) throw std::invalid_argument("labels length must equal batch size");

    ForwardCache cache;
    forward_impl(params, batch, b, &cache);
    if (out_loss) *out_loss = loss(cache.probs, labels, cfg.num_classes);

    ModelParameters grads = ModelParameters::zeros(cfg);
    const std::size_t c = cfg.num_classes;
    const std::size_t h2 = cfg.hidden2;

    // Softmax cross-entropy: dlogits = (p - onehot) / b.
    std::vector<double> dlogits(b * c);
    for (std::size_t s = 0; s < b; ++s) {
        for (std::size_t k = 0; k < c; ++k)
            dlogits[s * c + k] = cache.probs[s * c + k] / static_cast<double>(b);
        dlogits[s * c + static_cast<std::size_t>(labels[s])] -= 1.0 / static_cast<double>(b);
    }

    Tensor& gdw = grads.tensors[kDenseW];
    Tensor& gdb = grads.tensors[kDenseB];
    const Tensor& dw = params.tensors[kDenseW];
    std::vector<std::vector<double>> d_emit2(cfg.ts);
    for (std::size_t t = 0; t < cfg.ts; ++t) d_emit2[t].assign(b * h2, 0.0);
    for (std::size_t s = 0; s < b; ++s) {
        const double* z = cache.dense_in.data() + s * h2;
        const double* dl = dlogits.data() + s * c;
        for (std::size_t k = 0; k < c; ++k) {
            gdb.data[k] += dl[k];
            double* row = gdw.data.data() + k * h2;
            for (std::size_t j = 0; j < h2; ++j) row[j] += dl[k] * z[j];
        }
        matvec_t_acc(dw.data, c, h2, dl, d_emit2[cfg.ts - 1].data() + s * h2);
    }

    const LayerDims d1{cfg.input_dim, cfg.hidden1};
    const LayerDims d2{cfg.hidden1, cfg.hidden2};
    auto d_emit1 = lstm_backward(params, 1, d2, cache.l2, d_emit2, b, grads);
    lstm_backward(params, 0, d1, cache.l1, d_emit1, b, grads);
    return grads;
}

}  // namespace

std::uint64_t ModelConfig::digest() const {
    std::uint32_t fields[5] = {
        static_cast<std::uint32_t>(input_dim), static_cast<std::uint32_t>(hidden1),
        static_cast<std::uint32_t>(hidden2), static_cast<std::uint32_t>(num_classes),
        static_cast<std::uint32_t>(ts)};
    return fnv1a_bytes(fields, sizeof(fields));
}

std::size_t ModelConfig::parameter_count() const {
    const std::size_t l1 = 4 * (hidden1 * input_dim + hidden1 * hidden1 + hidden1);
    const std::size_t l2 = 4 * (hidden2 * hidden1 + hidden2 * hidden2 + hidden2);
    return l1 + l2 + num_classes * hidden2 + num_classes;
}

ModelParameters ModelParameters::zeros(const ModelConfig& cfg) {
    ModelParameters p;
    p.config = cfg;
    const LayerDims dims[2] = {{cfg.input_dim, cfg.hidden1}, {cfg.hidden1, cfg.hidden2}};
    for (std::size_t layer = 0; layer < 2; ++layer) {
        const std::string prefix = layer == 0 ? "lstm1." : "lstm2.";
        for (std::size_t g = 0; g < 4; ++g) {
            const std::string gate = kGateNames[g];
            p.tensors.push_back({prefix + "W" + gate, dims[layer].hidden, dims[layer].in,
                                 std::vector<double>(dims[layer].hidden * dims[layer].in, 0.0)});
            p.tensors.push_back({prefix + "U" + gate, dims[layer].hidden, dims[layer].hidden,
                                 std::vector<double>(dims[layer].hidden * dims[layer].hidden, 0.0)});
            p.tensors.push_back({prefix + "b" + gate, dims[layer].hidden, 1,
                                 std::vector<double>(dims[layer].hidden, 0.0)});
        }
    }
    p.tensors.push_back({"dense.W", cfg.num_classes, cfg.hidden2,
                         std::vector<double>(cfg.num_classes * cfg.hidden2, 0.0)});
    p.tensors.push_back({"dense.b", cfg.num_classes, 1,
                         std::vector<double>(cfg.num_classes, 0.0)});
    return p;
}

ModelParameters ModelParameters::init(const ModelConfig& cfg, std::uint64_t seed) {
    ModelParameters p = zeros(cfg);
    std::mt19937_64 rng(seed);
    for (Tensor& t : p.tensors) {
        if (t.cols == 1) continue;  // biases stay zero
        const double bound = 1.0 / std::sqrt(static_cast<double>(t.cols));
        std::uniform_real_distribution<double> dist(-bound, bound);
        for (double& v : t.data) v = dist(rng);
    }
    // Forget-gate biases start at 1.
    for (std::size_t layer = 0; layer < 2; ++layer) {
        Tensor& bf = p.tensors[tensor_index(layer, 1, 2)];
        std::fill(bf.data.begin(), bf.data.end(), 1.0);
    }
    return p;
}

std::vector<double> forward(const ModelParameters& params, const std::vector<double>& batch,
                            std::size_t b) {
    return forward_impl(params, batch, b, nullptr);
}

double loss(const std::vector<double>& probs, const std::vector<int>& labels,
            std::size_t num_classes) {
    if (labels.empty()) throw std::invalid_argument("empty batch");
    if (probs.size() != labels.size() * num_classes)
        throw std::invalid_argument("probs shape does not match labels");
    double total = 0.0;
    for (std::size_t s = 0; s < labels.size(); ++s) {
        const int y = labels[s];
        if (y < 0 || static_cast<std::size_t>(y) >= num_classes)
            throw std::invalid_argument("label out of range");
        total += -std::log(std::max(probs[s * num_classes + y], 1e-12));
    }
    return total / static_cast<double>(labels.size());
}

ModelParameters backward(const ModelParameters& params, const std::vector<double>& batch,
                         std::size_t b, const std::vector<int>& labels) {
    return backward_impl(params, batch, b, labels, nullptr);
}

AdamState AdamState::zeros(const ModelParameters& params) {
    AdamState s;
    for (const Tensor& t : params.tensors) {
        s.m.emplace_back(t.size(), 0.0);
        s.v.emplace_back(t.size(), 0.0);
    }
    return s;
}

void adam_step(ModelParameters& params, const ModelParameters& grads, AdamState& state,
               std::size_t t, const TrainConfig& cfg) {
    if (t < 1) throw std::invalid_argument("Adam step index must be >= 1");
    if (grads.tensors.size() != params.tensors.size())
        throw std::invalid_argument("gradient/parameter tensor count mismatch");
    const double bc1 = 1.0 - std::pow(cfg.adam_beta1, static_cast<double>(t));
    const double bc2 = 1.0 - std::pow(cfg.adam_beta2, static_cast<double>(t));
    for (std::size_t i = 0; i < params.tensors.size(); ++i) {
        Tensor& p = params.tensors[i];
        const Tensor& g = grads.tensors[i];
        if (g.size() != p.size()) throw std::invalid_argument("gradient shape mismatch");
        for (std::size_t k = 0; k < p.size(); ++k) {
            double& m = state.m[i][k];
            double& v = state.v[i][k];
            m = cfg.adam_beta1 * m + (1.0 - cfg.adam_beta1) * g.data[k];
            v = cfg.adam_beta2 * v + (1.0 - cfg.adam_beta2) * g.data[k] * g.data[k];
            const double mhat = m / bc1;
            const double vhat = v / bc2;
            p.data[k] -= cfg.learning_rate * mhat / (std::sqrt(vhat) + cfg.adam_epsilon);
        }
    }
}

TrainLog train_local(ModelParameters& params, const WindowedDataset& dataset,
                     const TrainConfig& cfg) {
    if (dataset.windows == 0) throw std::invalid_argument("cannot train on an empty dataset");
    const ModelConfig& mc = params.config;
    if (dataset.cols != mc.input_dim || dataset.ts != mc.ts)
        throw std::invalid_argument("dataset shape does not match model config");

    TrainLog log;
    AdamState state = AdamState::zeros(params);
    std::mt19937_64 rng(cfg.seed);
    std::vector<std::size_t> order(dataset.windows);
    std::iota(order.begin(), order.end(), 0);
    std::size_t step = 0;

    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double epoch_total = 0.0;
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            const std::size_t b = std::min(cfg.batch_size, order.size() - start);
            std::vector<double> batch(b * mc.ts * mc.input_dim);
            std::vector<int> labels(b);
            for (std::size_t s = 0; s < b; ++s) {
                const std::size_t w = order[start + s];
                std::copy_n(dataset.values.begin() + w * mc.ts * mc.input_dim,
                            mc.ts * mc.input_dim, batch.begin() + s * mc.ts * mc.input_dim);
                labels[s] = dataset.labels[w];
            }
            double batch_loss = 0.0;
            ModelParameters grads = backward_impl(params, batch, b, labels, &batch_loss);
            epoch_total += batch_loss * static_cast<double>(b);

            if (cfg.clip_norm > 0.0) {
                double sq = 0.0;
                for (const Tensor& g : grads.tensors)
                    for (double v : g.data) sq += v * v;
                const double norm = std::sqrt(sq);
                if (norm > cfg.clip_norm) {
                    const double scale = cfg.clip_norm / norm;
                    for (Tensor& g : grads.tensors)
                        for (double& v : g.data) v *= scale;
                }
            }
            adam_step(params, grads, state, ++step, cfg);
        }
        log.epoch_loss.push_back(epoch_total / static_cast<double>(dataset.windows));
    }
    return log;
}

std::size_t payload_size(const ModelConfig& cfg) {
    return sizeof(kMagic) + sizeof(std::uint32_t) + sizeof(std::uint64_t) +
           cfg.parameter_count() * sizeof(float);
}

std::vector<std::uint8_t> serialize(const ModelParameters& params) {
    std::vector<std::uint8_t> out;
    out.reserve(payload_size(params.config));
    out.insert(out.end(), kMagic, kMagic + sizeof(kMagic));
    const std::uint32_t version = kVersion;
    const std::uint64_t digest = params.config.digest();
    out.resize(out.size() + sizeof(version) + sizeof(digest));
    std::memcpy(out.data() + sizeof(kMagic), &version, sizeof(version));
    std::memcpy(out.data() + sizeof(kMagic) + sizeof(version), &digest, sizeof(digest));
    for (const Tensor& t : params.tensors) {
        for (double v : t.data) {
            const float f = static_cast<float>(v);
            const std::size_t pos = out.size();
            out.resize(pos + sizeof(float));
            std::memcpy(out.data() + pos, &f, sizeof(float));
        }
    }
    return out;
}

ModelParameters deserialize(const std::vector<std::uint8_t>& bytes, const ModelConfig& cfg) {
    if (bytes.size() != payload_size(cfg))
        throw CorruptPayloadError("payload length " + std::to_string(bytes.size()) +
                                  " != expected " + std::to_string(payload_size(cfg)));
    if (std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0)
        throw CorruptPayloadError("bad magic");
    std::uint32_t version;
    std::uint64_t digest;
    std::memcpy(&version, bytes.data() + sizeof(kMagic), sizeof(version));
    std::memcpy(&digest, bytes.data() + sizeof(kMagic) + sizeof(version), sizeof(digest));
    if (version != kVersion) throw CorruptPayloadError("unsupported payload version");
    if (digest != cfg.digest()) throw CorruptPayloadError("config digest mismatch");

    ModelParameters p = ModelParameters::zeros(cfg);
    std::size_t pos = sizeof(kMagic) + sizeof(version) + sizeof(digest);
    for (Tensor& t : p.tensors) {
        for (double& v : t.data) {
            float f;
            std::memcpy(&f, bytes.data() + pos, sizeof(float));
            pos += sizeof(float);
            v = static_cast<double>(f);
        }
    }
    return p;
}

std::string manifest(const ModelParameters& params) {
    std::ostringstream out;
    for (const Tensor& t : params.tensors) {
        std::vector<float> f(t.data.begin(), t.data.end());
        out << t.name << " shape=" << t.rows << "x" << t.cols << " checksum=" << std::hex
            << fnv1a_bytes(f.data(), f.size() * sizeof(float)) << std::dec << "\n";
    }
    return out.str();
}

std::vector<int> predict(const ModelParameters& params, const WindowedDataset& data,
                         std::size_t batch_size) {
    const ModelConfig& cfg = params.config;
    std::vector<int> preds(data.windows);
    for (std::size_t start = 0; start < data.windows; start += batch_size) {
        const std::size_t b = std::min(batch_size, data.windows - start);
        std::vector<double> batch(
            data.values.begin() + start * cfg.ts * cfg.input_dim,
            data.values.begin() + (start + b) * cfg.ts * cfg.input_dim);
        const std::vector<double> probs = forward(params, batch, b);
        for (std::size_t s = 0; s < b; ++s) {
            const double* row = probs.data() + s * cfg.num_classes;
            preds[start + s] = static_cast<int>(
                std::max_element(row, row + cfg.num_classes) - row);
        }
    }
    return preds;
}

}  // namespace tfed::model
