#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "lvae/error.hpp"

namespace lvae {

template <typename T>
using MatrixX = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
template <typename T>
using VectorX = Eigen::Matrix<T, Eigen::Dynamic, 1>;

enum class Activation : uint32_t { Identity = 0, Elu = 1, Sigmoid = 2 };

// Scalar activations with exact derivatives. elu'(0) uses the right-limit
// convention (= 1). sigmoid clamps its argument to [-500, 500] so extreme
// pre-activations saturate without underflowing to exactly 0 or 1.
template <typename T>
inline T elu(T x) {
    return x >= T(0) ? x : std::expm1(x);
}
template <typename T>
inline T elu_derivative(T x) {
    return x >= T(0) ? T(1) : std::exp(x);
}
template <typename T>
inline T sigmoid(T x) {
    const T xc = x < T(-500) ? T(-500) : (x > T(500) ? T(500) : x);
    if (xc >= T(0)) {
        return T(1) / (T(1) + std::exp(-xc));
    }
    const T e = std::exp(xc);
    return e / (T(1) + e);
}
template <typename T>
inline T sigmoid_derivative(T x) {
    const T s = sigmoid(x);
    return s * (T(1) - s);
}

template <typename T>
T apply_activation(Activation act, T x);
template <typename T>
T activation_derivative(Activation act, T x);

template <typename T>
struct DenseLayer {
    MatrixX<T> weights;  // out x in
    VectorX<T> bias;     // out
    Activation activation = Activation::Identity;

    int in_dim() const { return static_cast<int>(weights.cols()); }
    int out_dim() const { return static_cast<int>(weights.rows()); }
};

template <typename T>
struct DenseGrads {
    MatrixX<T> weights;
    VectorX<T> bias;
};

/// activation(W x + b) column-wise over a batch; optionally records the
/// pre-activation for the backward pass.
template <typename T>
MatrixX<T> dense_forward(const DenseLayer<T>& layer, const MatrixX<T>& input,
                         MatrixX<T>* pre_activation = nullptr);

/// Backward through one layer: output_grad is dL/d(activation output).
/// Fills dL/dW and dL/db; returns dL/d(input).
template <typename T>
MatrixX<T> dense_backward(const DenseLayer<T>& layer, const MatrixX<T>& input,
                          const MatrixX<T>& pre_activation, const MatrixX<T>& output_grad,
                          DenseGrads<T>& grads);

/// Dense VAE. Layer order is fixed: depth encoder hidden layers (elu),
/// mu head, logvar head (identity), depth decoder hidden layers (elu),
/// output head (sigmoid). All hidden layers are hidden_width wide.
template <typename T>
struct Vae {
    std::vector<DenseLayer<T>> layers;
    int input_dim = 0;
    int latent_dim = 0;
    int hidden_width = 0;
    int depth = 0;

    static Vae init(int input_dim, int latent_dim, int hidden_width, int depth, uint64_t seed);

    int enc_idx(int i) const { return i; }
    int mu_idx() const { return depth; }
    int logvar_idx() const { return depth + 1; }
    int dec_idx(int i) const { return depth + 2 + i; }
    int out_idx() const { return 2 * depth + 2; }
    int layer_count() const { return 2 * depth + 3; }

    long parameter_count() const;
    bool all_finite() const;
};

template <typename T>
Vae<double> to_double(const Vae<T>& model);
template <typename T>
Vae<float> to_float(const Vae<T>& model);

template <typename T>
void encode(const Vae<T>& model, const MatrixX<T>& x, MatrixX<T>& mu, MatrixX<T>& logvar);

/// z = mu + exp(logvar / 2) .* noise
template <typename T>
MatrixX<T> reparameterize(const MatrixX<T>& mu, const MatrixX<T>& logvar,
                          const MatrixX<T>& noise);

template <typename T>
MatrixX<T> decode(const Vae<T>& model, const MatrixX<T>& z);

/// encode -> take the mean -> decode (noise-free evaluation path).
template <typename T>
MatrixX<T> reconstruct(const Vae<T>& model, const MatrixX<T>& x);

struct LossReport {
    double total = 0.0;
    double reconstruction = 0.0;  // binary cross-entropy
    double kl = 0.0;
};

inline constexpr double kBceClip = 1e-7;

/// BCE summed over pixels + KL summed over latent dims, both averaged over
/// the batch (columns). Optional gradients: d_x_hat is the BCE term only;
/// d_mu / d_logvar are the KL term only.
template <typename T>
LossReport vae_loss(const MatrixX<T>& x_hat, const MatrixX<T>& x, const MatrixX<T>& mu,
                    const MatrixX<T>& logvar, MatrixX<T>* d_x_hat = nullptr,
                    MatrixX<T>* d_mu = nullptr, MatrixX<T>* d_logvar = nullptr);

template <typename T>
struct VaeCache {
    std::vector<MatrixX<T>> enc_inputs;   // x, then activations entering each next layer
    std::vector<MatrixX<T>> enc_preacts;
    MatrixX<T> mu, logvar;
    MatrixX<T> noise, z;
    std::vector<MatrixX<T>> dec_inputs;
    std::vector<MatrixX<T>> dec_preacts;
    MatrixX<T> out_preact;
    MatrixX<T> x_hat;
};

template <typename T>
struct VaeGrads {
    std::vector<DenseGrads<T>> layers;
    static VaeGrads zeros_like(const Vae<T>& model);
    bool all_finite() const;
};

template <typename T>
LossReport vae_forward(const Vae<T>& model, const MatrixX<T>& x, const MatrixX<T>& noise,
                       VaeCache<T>& cache);

template <typename T>
void vae_backward(const Vae<T>& model, const VaeCache<T>& cache, const MatrixX<T>& x,
                  VaeGrads<T>& grads);

/// Forward + backward in one call (gradient-check entry point).
template <typename T>
LossReport vae_loss_and_grads(const Vae<T>& model, const MatrixX<T>& x, const MatrixX<T>& noise,
                              VaeGrads<T>& grads);

// Decoder-only forward/backward, used by the latent-space design search.
template <typename T>
struct DecodeCache {
    std::vector<MatrixX<T>> inputs;
    std::vector<MatrixX<T>> preacts;
    MatrixX<T> out_preact;
    MatrixX<T> x_hat;
};

template <typename T>
MatrixX<T> decode_with_cache(const Vae<T>& model, const MatrixX<T>& z, DecodeCache<T>& cache);

/// Backpropagates dL/d(decoder output) to dL/dz.
template <typename T>
MatrixX<T> decode_backward(const Vae<T>& model, const DecodeCache<T>& cache,
                           const MatrixX<T>& d_x_hat);

template <typename T>
struct AdamState {
    T lr = T(1e-4);
    T beta1 = T(0.9);
    T beta2 = T(0.999);
    T eps = T(1e-8);
    long step = 0;
    std::vector<DenseGrads<T>> m, v;

    static AdamState init(const Vae<T>& model, T lr = T(1e-4));
    /// Standard bias-corrected update. Throws on non-finite gradients.
    void update(Vae<T>& model, const VaeGrads<T>& grads);
};

struct TrainOptions {
    int epochs = 200;
    int batch_size = 128;
    uint64_t seed = 1;
    double lr = 1e-4;
    int plateau_window = 20;
    double plateau_tol = 1e-4;
    std::string checkpoint_path;  // empty = no per-epoch checkpointing
    bool verbose = false;
};

struct TrainResult {
    std::vector<LossReport> batch_history;
    std::vector<double> epoch_loss;  // mean per-sample loss
    int epochs_run = 0;
    bool early_stopped = false;
};

/// Seeded shuffled mini-batch training with per-epoch checkpointing and
/// plateau early stopping. data is input_dim x N. Deterministic for a
/// fixed seed on one platform.
template <typename T>
TrainResult train(Vae<T>& model, AdamState<T>& adam, const MatrixX<T>& data,
                  const TrainOptions& opt);

}  // namespace lvae
