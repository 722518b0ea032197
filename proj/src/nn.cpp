#include "lvae/nn.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>

#include "lvae/checkpoint.hpp"

namespace lvae {

template <typename T>
T apply_activation(Activation act, T x) {
    switch (act) {
        case Activation::Identity: return x;
        case Activation::Elu: return elu(x);
        case Activation::Sigmoid: return sigmoid(x);
    }
    throw Error("unknown activation");
}

template <typename T>
T activation_derivative(Activation act, T x) {
    switch (act) {
        case Activation::Identity: return T(1);
        case Activation::Elu: return elu_derivative(x);
        case Activation::Sigmoid: return sigmoid_derivative(x);
    }
    throw Error("unknown activation");
}

namespace {

template <typename T>
void apply_activation_inplace(Activation act, MatrixX<T>& m) {
    if (act == Activation::Identity) return;
    T* p = m.data();
    const Eigen::Index n = m.size();
    if (act == Activation::Elu) {
        for (Eigen::Index i = 0; i < n; ++i) p[i] = elu(p[i]);
    } else {
        for (Eigen::Index i = 0; i < n; ++i) p[i] = sigmoid(p[i]);
    }
}

template <typename T>
void multiply_activation_derivative(Activation act, const MatrixX<T>& preact, MatrixX<T>& grad) {
    if (act == Activation::Identity) return;
    const T* z = preact.data();
    T* g = grad.data();
    const Eigen::Index n = grad.size();
    if (act == Activation::Elu) {
        for (Eigen::Index i = 0; i < n; ++i) g[i] *= elu_derivative(z[i]);
    } else {
        for (Eigen::Index i = 0; i < n; ++i) g[i] *= sigmoid_derivative(z[i]);
    }
}

}  // namespace

template <typename T>
MatrixX<T> dense_forward(const DenseLayer<T>& layer, const MatrixX<T>& input,
                         MatrixX<T>* pre_activation) {
    if (input.rows() != layer.weights.cols()) {
        throw DimensionError("dense_forward: input has " + std::to_string(input.rows()) +
                             " rows, layer expects " + std::to_string(layer.weights.cols()));
    }
    MatrixX<T> z = layer.weights * input;
    z.colwise() += layer.bias;
    if (pre_activation) *pre_activation = z;
    apply_activation_inplace(layer.activation, z);
    return z;
}

template <typename T>
MatrixX<T> dense_backward(const DenseLayer<T>& layer, const MatrixX<T>& input,
                          const MatrixX<T>& pre_activation, const MatrixX<T>& output_grad,
                          DenseGrads<T>& grads) {
    MatrixX<T> dz = output_grad;
    multiply_activation_derivative(layer.activation, pre_activation, dz);
    grads.weights.noalias() = dz * input.transpose();
    grads.bias = dz.rowwise().sum();
    return layer.weights.transpose() * dz;
}

template <typename T>
Vae<T> Vae<T>::init(int input_dim, int latent_dim, int hidden_width, int depth, uint64_t seed) {
    if (input_dim < 1 || latent_dim < 1 || hidden_width < 1 || depth < 1) {
        throw ConfigError("Vae::init: all dimensions must be >= 1");
    }
    Vae<T> model;
    model.input_dim = input_dim;
    model.latent_dim = latent_dim;
    model.hidden_width = hidden_width;
    model.depth = depth;

    std::mt19937_64 rng(seed);
    auto make_layer = [&rng](int out, int in, Activation act) {
        DenseLayer<T> layer;
        layer.weights.resize(out, in);
        layer.bias = VectorX<T>::Zero(out);
        layer.activation = act;
        // Glorot-uniform in +-sqrt(6 / (fan_in + fan_out)), row-major fill
        // order so initialization is independent of storage layout.
        const double bound = std::sqrt(6.0 / (in + out));
        std::uniform_real_distribution<double> dist(-bound, bound);
        for (int r = 0; r < out; ++r) {
            for (int c = 0; c < in; ++c) layer.weights(r, c) = static_cast<T>(dist(rng));
        }
        return layer;
    };

    for (int i = 0; i < depth; ++i) {
        model.layers.push_back(
            make_layer(hidden_width, i == 0 ? input_dim : hidden_width, Activation::Elu));
    }
    model.layers.push_back(make_layer(latent_dim, hidden_width, Activation::Identity));  // mu
    model.layers.push_back(make_layer(latent_dim, hidden_width, Activation::Identity));  // logvar
    for (int i = 0; i < depth; ++i) {
        model.layers.push_back(
            make_layer(hidden_width, i == 0 ? latent_dim : hidden_width, Activation::Elu));
    }
    model.layers.push_back(make_layer(input_dim, hidden_width, Activation::Sigmoid));
    return model;
}

template <typename T>
long Vae<T>::parameter_count() const {
    long n = 0;
    for (const DenseLayer<T>& l : layers) n += l.weights.size() + l.bias.size();
    return n;
}

template <typename T>
bool Vae<T>::all_finite() const {
    for (const DenseLayer<T>& l : layers) {
        if (!l.weights.allFinite() || !l.bias.allFinite()) return false;
    }
    return true;
}

template <typename SrcT, typename DstT>
static Vae<DstT> cast_model(const Vae<SrcT>& model) {
    Vae<DstT> out;
    out.input_dim = model.input_dim;
    out.latent_dim = model.latent_dim;
    out.hidden_width = model.hidden_width;
    out.depth = model.depth;
    out.layers.reserve(model.layers.size());
    for (const DenseLayer<SrcT>& l : model.layers) {
        DenseLayer<DstT> c;
        c.weights = l.weights.template cast<DstT>();
        c.bias = l.bias.template cast<DstT>();
        c.activation = l.activation;
        out.layers.push_back(std::move(c));
    }
    return out;
}

template <typename T>
Vae<double> to_double(const Vae<T>& model) {
    return cast_model<T, double>(model);
}
template <typename T>
Vae<float> to_float(const Vae<T>& model) {
    return cast_model<T, float>(model);
}

template <typename T>
void encode(const Vae<T>& model, const MatrixX<T>& x, MatrixX<T>& mu, MatrixX<T>& logvar) {
    if (x.rows() != model.input_dim) {
        throw DimensionError("encode: input has " + std::to_string(x.rows()) +
                             " rows, model expects " + std::to_string(model.input_dim));
    }
    MatrixX<T> a = x;
    for (int i = 0; i < model.depth; ++i) a = dense_forward(model.layers[model.enc_idx(i)], a);
    mu = dense_forward(model.layers[model.mu_idx()], a);
    logvar = dense_forward(model.layers[model.logvar_idx()], a);
}

template <typename T>
MatrixX<T> reparameterize(const MatrixX<T>& mu, const MatrixX<T>& logvar,
                          const MatrixX<T>& noise) {
    if (mu.rows() != logvar.rows() || mu.cols() != logvar.cols() || mu.rows() != noise.rows() ||
        mu.cols() != noise.cols()) {
        throw DimensionError("reparameterize: mu/logvar/noise shapes differ");
    }
    return mu.array() + (logvar.array() / T(2)).exp() * noise.array();
}

template <typename T>
MatrixX<T> decode(const Vae<T>& model, const MatrixX<T>& z) {
    DecodeCache<T> cache;
    return decode_with_cache(model, z, cache);
}

template <typename T>
MatrixX<T> decode_with_cache(const Vae<T>& model, const MatrixX<T>& z, DecodeCache<T>& cache) {
    if (z.rows() != model.latent_dim) {
        throw DimensionError("decode: latent has " + std::to_string(z.rows()) +
                             " rows, model expects " + std::to_string(model.latent_dim));
    }
    cache.inputs.clear();
    cache.preacts.clear();
    cache.inputs.push_back(z);
    MatrixX<T> a = z;
    for (int i = 0; i < model.depth; ++i) {
        MatrixX<T> pre;
        a = dense_forward(model.layers[model.dec_idx(i)], a, &pre);
        cache.preacts.push_back(std::move(pre));
        cache.inputs.push_back(a);
    }
    cache.x_hat = dense_forward(model.layers[model.out_idx()], a, &cache.out_preact);
    return cache.x_hat;
}

template <typename T>
MatrixX<T> decode_backward(const Vae<T>& model, const DecodeCache<T>& cache,
                           const MatrixX<T>& d_x_hat) {
    DenseGrads<T> scratch;
    MatrixX<T> grad = dense_backward(model.layers[model.out_idx()], cache.inputs[model.depth],
                                     cache.out_preact, d_x_hat, scratch);
    for (int i = model.depth - 1; i >= 0; --i) {
        grad = dense_backward(model.layers[model.dec_idx(i)], cache.inputs[i], cache.preacts[i],
                              grad, scratch);
    }
    return grad;
}

template <typename T>
MatrixX<T> reconstruct(const Vae<T>& model, const MatrixX<T>& x) {
    MatrixX<T> mu, logvar;
    encode(model, x, mu, logvar);
    return decode(model, mu);
}

template <typename T>
LossReport vae_loss(const MatrixX<T>& x_hat, const MatrixX<T>& x, const MatrixX<T>& mu,
                    const MatrixX<T>& logvar, MatrixX<T>* d_x_hat, MatrixX<T>* d_mu,
                    MatrixX<T>* d_logvar) {
    if (x_hat.rows() != x.rows() || x_hat.cols() != x.cols()) {
        throw DimensionError("vae_loss: x_hat/x shapes differ");
    }
    if (mu.rows() != logvar.rows() || mu.cols() != logvar.cols() || mu.cols() != x.cols()) {
        throw DimensionError("vae_loss: mu/logvar shapes inconsistent with batch");
    }
    const double batch = static_cast<double>(x.cols());
    const T lo = T(kBceClip);
    const T hi = T(1) - T(kBceClip);

    double bce = 0.0;
    if (d_x_hat) d_x_hat->setZero(x_hat.rows(), x_hat.cols());
    for (Eigen::Index j = 0; j < x_hat.cols(); ++j) {
        for (Eigen::Index i = 0; i < x_hat.rows(); ++i) {
            const T raw = x_hat(i, j);
            const T v = raw < lo ? lo : (raw > hi ? hi : raw);
            const T t = x(i, j);
            bce -= static_cast<double>(t * std::log(v) + (T(1) - t) * std::log(T(1) - v));
            if (d_x_hat && raw >= lo && raw <= hi) {
                (*d_x_hat)(i, j) = static_cast<T>((v - t) / (v * (T(1) - v)) / batch);
            }
        }
    }
    bce /= batch;

    double kl = 0.0;
    for (Eigen::Index j = 0; j < mu.cols(); ++j) {
        for (Eigen::Index i = 0; i < mu.rows(); ++i) {
            const double m = mu(i, j);
            const double lv = logvar(i, j);
            kl -= 0.5 * (1.0 + lv - m * m - std::exp(lv));
        }
    }
    kl /= batch;
    if (d_mu) *d_mu = mu / static_cast<T>(batch);
    if (d_logvar) {
        *d_logvar = ((logvar.array().exp() - T(1)) * T(0.5) / static_cast<T>(batch)).matrix();
    }

    LossReport report;
    report.reconstruction = bce;
    report.kl = kl;
    report.total = bce + kl;
    return report;
}

template <typename T>
VaeGrads<T> VaeGrads<T>::zeros_like(const Vae<T>& model) {
    VaeGrads<T> g;
    g.layers.resize(model.layers.size());
    for (size_t i = 0; i < model.layers.size(); ++i) {
        g.layers[i].weights = MatrixX<T>::Zero(model.layers[i].weights.rows(),
                                               model.layers[i].weights.cols());
        g.layers[i].bias = VectorX<T>::Zero(model.layers[i].bias.size());
    }
    return g;
}

template <typename T>
bool VaeGrads<T>::all_finite() const {
    for (const DenseGrads<T>& g : layers) {
        if (!g.weights.allFinite() || !g.bias.allFinite()) return false;
    }
    return true;
}

template <typename T>
LossReport vae_forward(const Vae<T>& model, const MatrixX<T>& x, const MatrixX<T>& noise,
                       VaeCache<T>& cache) {
    if (x.rows() != model.input_dim) {
        throw DimensionError("vae_forward: input has " + std::to_string(x.rows()) +
                             " rows, model expects " + std::to_string(model.input_dim));
    }
    if (noise.rows() != model.latent_dim || noise.cols() != x.cols()) {
        throw DimensionError("vae_forward: noise shape mismatch");
    }
    cache.enc_inputs.clear();
    cache.enc_preacts.clear();
    cache.dec_inputs.clear();
    cache.dec_preacts.clear();

    cache.enc_inputs.push_back(x);
    MatrixX<T> a = x;
    for (int i = 0; i < model.depth; ++i) {
        MatrixX<T> pre;
        a = dense_forward(model.layers[model.enc_idx(i)], a, &pre);
        cache.enc_preacts.push_back(std::move(pre));
        cache.enc_inputs.push_back(a);
    }
    cache.mu = dense_forward(model.layers[model.mu_idx()], a);
    cache.logvar = dense_forward(model.layers[model.logvar_idx()], a);
    cache.noise = noise;
    cache.z = reparameterize(cache.mu, cache.logvar, noise);

    cache.dec_inputs.push_back(cache.z);
    a = cache.z;
    for (int i = 0; i < model.depth; ++i) {
        MatrixX<T> pre;
        a = dense_forward(model.layers[model.dec_idx(i)], a, &pre);
        cache.dec_preacts.push_back(std::move(pre));
        cache.dec_inputs.push_back(a);
    }
    cache.x_hat = dense_forward(model.layers[model.out_idx()], a, &cache.out_preact);

    return vae_loss(cache.x_hat, x, cache.mu, cache.logvar);
}

template <typename T>
void vae_backward(const Vae<T>& model, const VaeCache<T>& cache, const MatrixX<T>& x,
                  VaeGrads<T>& grads) {
    if (grads.layers.size() != model.layers.size()) grads = VaeGrads<T>::zeros_like(model);

    MatrixX<T> d_x_hat, d_mu_kl, d_logvar_kl;
    vae_loss(cache.x_hat, x, cache.mu, cache.logvar, &d_x_hat, &d_mu_kl, &d_logvar_kl);

    // decoder
    MatrixX<T> grad = dense_backward(model.layers[model.out_idx()], cache.dec_inputs[model.depth],
                                     cache.out_preact, d_x_hat, grads.layers[model.out_idx()]);
    for (int i = model.depth - 1; i >= 0; --i) {
        grad = dense_backward(model.layers[model.dec_idx(i)], cache.dec_inputs[i],
                              cache.dec_preacts[i], grad, grads.layers[model.dec_idx(i)]);
    }

    // through the reparameterization: z = mu + exp(logvar/2) .* noise
    const MatrixX<T> d_z = grad;
    MatrixX<T> d_mu = d_z + d_mu_kl;
    MatrixX<T> d_logvar =
        (d_z.array() * cache.noise.array() * (cache.logvar.array() / T(2)).exp() * T(0.5))
            .matrix() +
        d_logvar_kl;

    // heads share the encoder trunk output
    const MatrixX<T>& trunk = cache.enc_inputs[model.depth];
    DenseGrads<T>& mu_g = grads.layers[model.mu_idx()];
    DenseGrads<T>& lv_g = grads.layers[model.logvar_idx()];
    MatrixX<T> d_trunk = dense_backward(model.layers[model.mu_idx()], trunk, cache.mu, d_mu, mu_g);
    d_trunk += dense_backward(model.layers[model.logvar_idx()], trunk, cache.logvar, d_logvar,
                              lv_g);

    // encoder
    grad = d_trunk;
    for (int i = model.depth - 1; i >= 0; --i) {
        grad = dense_backward(model.layers[model.enc_idx(i)], cache.enc_inputs[i],
                              cache.enc_preacts[i], grad, grads.layers[model.enc_idx(i)]);
    }
}

template <typename T>
LossReport vae_loss_and_grads(const Vae<T>& model, const MatrixX<T>& x, const MatrixX<T>& noise,
                              VaeGrads<T>& grads) {
    VaeCache<T> cache;
    const LossReport report = vae_forward(model, x, noise, cache);
    vae_backward(model, cache, x, grads);
    return report;
}

template <typename T>
AdamState<T> AdamState<T>::init(const Vae<T>& model, T lr_) {
    AdamState<T> s;
    s.lr = lr_;
    s.step = 0;
    s.m.resize(model.layers.size());
    s.v.resize(model.layers.size());
    for (size_t i = 0; i < model.layers.size(); ++i) {
        const auto& l = model.layers[i];
        s.m[i].weights = MatrixX<T>::Zero(l.weights.rows(), l.weights.cols());
        s.m[i].bias = VectorX<T>::Zero(l.bias.size());
        s.v[i].weights = MatrixX<T>::Zero(l.weights.rows(), l.weights.cols());
        s.v[i].bias = VectorX<T>::Zero(l.bias.size());
    }
    return s;
}

template <typename T>
void AdamState<T>::update(Vae<T>& model, const VaeGrads<T>& grads) {
    if (grads.layers.size() != model.layers.size() || m.size() != model.layers.size()) {
        throw DimensionError("AdamState::update: shape mismatch");
    }
    if (!grads.all_finite()) throw Error("AdamState::update: non-finite gradients");
    ++step;
    const T bc1 = T(1) - static_cast<T>(std::pow(static_cast<double>(beta1), step));
    const T bc2 = T(1) - static_cast<T>(std::pow(static_cast<double>(beta2), step));
    auto update_one = [&](auto& param, auto& m1, auto& m2, const auto& g) {
        m1 = beta1 * m1 + (T(1) - beta1) * g;
        m2 = (beta2 * m2.array() + (T(1) - beta2) * g.array().square()).matrix();
        param.array() -= lr * (m1.array() / bc1) / ((m2.array() / bc2).sqrt() + eps);
    };
    for (size_t i = 0; i < model.layers.size(); ++i) {
        update_one(model.layers[i].weights, m[i].weights, v[i].weights, grads.layers[i].weights);
        update_one(model.layers[i].bias, m[i].bias, v[i].bias, grads.layers[i].bias);
    }
}

template <typename T>
TrainResult train(Vae<T>& model, AdamState<T>& adam, const MatrixX<T>& data,
                  const TrainOptions& opt) {
    if (data.rows() != model.input_dim) {
        throw DimensionError("train: data has " + std::to_string(data.rows()) +
                             " rows, model expects " + std::to_string(model.input_dim));
    }
    if (data.cols() < 1) throw Error("train: empty dataset");
    if (opt.batch_size < 1) throw ConfigError("train: batch_size must be >= 1");
    adam.lr = static_cast<T>(opt.lr);

    const int n = static_cast<int>(data.cols());
    std::mt19937_64 rng(opt.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);

    TrainResult result;
    VaeCache<T> cache;
    VaeGrads<T> grads = VaeGrads<T>::zeros_like(model);

    double best_loss = std::numeric_limits<double>::infinity();
    int stale_epochs = 0;

    for (int epoch = 0; epoch < opt.epochs; ++epoch) {
        std::shuffle(perm.begin(), perm.end(), rng);
        double epoch_sum = 0.0;
        for (int begin = 0; begin < n; begin += opt.batch_size) {
            const int b = std::min(opt.batch_size, n - begin);
            MatrixX<T> xb(model.input_dim, b);
            for (int j = 0; j < b; ++j) xb.col(j) = data.col(perm[begin + j]);
            MatrixX<T> noise(model.latent_dim, b);
            for (int j = 0; j < b; ++j) {
                for (int i = 0; i < model.latent_dim; ++i) {
                    noise(i, j) = static_cast<T>(normal(rng));
                }
            }
            const LossReport report = vae_forward(model, xb, noise, cache);
            if (!std::isfinite(report.total)) {
                throw Error("train: non-finite loss in epoch " + std::to_string(epoch) +
                            (opt.checkpoint_path.empty()
                                 ? std::string()
                                 : "; last good checkpoint at " + opt.checkpoint_path));
            }
            vae_backward(model, cache, xb, grads);
            adam.update(model, grads);
            result.batch_history.push_back(report);
            epoch_sum += report.total * b;
        }
        const double epoch_loss = epoch_sum / n;
        result.epoch_loss.push_back(epoch_loss);
        result.epochs_run = epoch + 1;
        if (opt.verbose) {
            std::fprintf(stderr, "epoch %d  loss %.6f\n", epoch, epoch_loss);
        }
        if (!opt.checkpoint_path.empty()) {
            if constexpr (std::is_same_v<T, float>) {
                save_checkpoint(opt.checkpoint_path, model, &adam);
            } else {
                const Vae<float> snapshot = to_float(model);
                save_checkpoint(opt.checkpoint_path, snapshot, nullptr);
            }
        }
        if (epoch_loss < best_loss * (1.0 - opt.plateau_tol)) {
            best_loss = epoch_loss;
            stale_epochs = 0;
        } else {
            best_loss = std::min(best_loss, epoch_loss);
            if (++stale_epochs >= opt.plateau_window) {
                result.early_stopped = true;
                break;
            }
        }
    }
    return result;
}

// explicit instantiations
#define LVAE_INSTANTIATE(T)                                                                       \
    template T apply_activation<T>(Activation, T);                                               \
    template T activation_derivative<T>(Activation, T);                                          \
    template MatrixX<T> dense_forward<T>(const DenseLayer<T>&, const MatrixX<T>&, MatrixX<T>*);  \
    template MatrixX<T> dense_backward<T>(const DenseLayer<T>&, const MatrixX<T>&,               \
                                          const MatrixX<T>&, const MatrixX<T>&, DenseGrads<T>&); \
    template struct Vae<T>;                                                                      \
    template struct VaeGrads<T>;                                                                 \
    template struct AdamState<T>;                                                                \
    template Vae<double> to_double<T>(const Vae<T>&);                                            \
    template Vae<float> to_float<T>(const Vae<T>&);                                              \
    template void encode<T>(const Vae<T>&, const MatrixX<T>&, MatrixX<T>&, MatrixX<T>&);         \
    template MatrixX<T> reparameterize<T>(const MatrixX<T>&, const MatrixX<T>&,                  \
                                          const MatrixX<T>&);                                    \
    template MatrixX<T> decode<T>(const Vae<T>&, const MatrixX<T>&);                             \
    template MatrixX<T> decode_with_cache<T>(const Vae<T>&, const MatrixX<T>&, DecodeCache<T>&); \
    template MatrixX<T> decode_backward<T>(const Vae<T>&, const DecodeCache<T>&,                 \
                                           const MatrixX<T>&);                                   \
    template MatrixX<T> reconstruct<T>(const Vae<T>&, const MatrixX<T>&);                        \
    template LossReport vae_loss<T>(const MatrixX<T>&, const MatrixX<T>&, const MatrixX<T>&,     \
                                    const MatrixX<T>&, MatrixX<T>*, MatrixX<T>*, MatrixX<T>*);   \
    template LossReport vae_forward<T>(const Vae<T>&, const MatrixX<T>&, const MatrixX<T>&,      \
                                       VaeCache<T>&);                                            \
    template void vae_backward<T>(const Vae<T>&, const VaeCache<T>&, const MatrixX<T>&,          \
                                  VaeGrads<T>&);                                                 \
    template LossReport vae_loss_and_grads<T>(const Vae<T>&, const MatrixX<T>&,                  \
                                              const MatrixX<T>&, VaeGrads<T>&);                  \
    template TrainResult train<T>(Vae<T>&, AdamState<T>&, const MatrixX<T>&, const TrainOptions&);

LVAE_INSTANTIATE(float)
LVAE_INSTANTIATE(double)

#undef LVAE_INSTANTIATE

}  // namespace lvae
