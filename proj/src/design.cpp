#include "lvae/design.hpp"

#include <cmath>
#include <random>

#include "lvae/threading.hpp"

namespace lvae {

DesignProblem DesignProblem::from_config(const Config& cfg, Field2D target_half) {
    DesignProblem p;
    p.mask = half_mask(2 * target_half.width, target_half.height, Half::Right);
    p.target_half = std::move(target_half);
    p.alpha = cfg.get_real("design.alpha");
    p.beta = cfg.get_real("design.beta");
    p.bound = cfg.get_real("design.bound");
    p.restarts = static_cast<int>(cfg.get_int("design.restarts"));
    p.seed = static_cast<uint64_t>(cfg.get_int("design.seed"));
    p.optimizer.memory = static_cast<int>(cfg.get_int("design.lbfgs_memory"));
    p.optimizer.max_iter = static_cast<int>(cfg.get_int("design.max_iter"));
    p.optimizer.tol = cfg.get_real("design.tol");
    return p;
}

void DesignProblem::validate(const Vae<double>& model) const {
    const long combined = static_cast<long>(mask.width) * mask.height;
    if (mask.width != 2 * target_half.width || mask.height != target_half.height) {
        throw DimensionError("DesignProblem: mask must cover the combined image");
    }
    if (combined != model.input_dim) {
        throw DimensionError("DesignProblem: combined image has " + std::to_string(combined) +
                             " pixels, decoder emits " + std::to_string(model.input_dim));
    }
    if (mask != half_mask(mask.width, mask.height, Half::Right)) {
        throw DimensionError("DesignProblem: mask must be the right-half indicator");
    }
    if (alpha < 0.0 || beta < 0.0) throw ConfigError("DesignProblem: alpha/beta must be >= 0");
    if (bound <= 0.0) throw ConfigError("DesignProblem: bound must be positive");
    if (restarts < 1) throw ConfigError("DesignProblem: restarts must be >= 1");
}

ObjectiveBreakdown design_objective(const Eigen::VectorXd& z, const DesignProblem& problem,
                                    const Vae<double>& model, Eigen::VectorXd* grad) {
    const int height = problem.target_half.height;
    const int half_w = problem.target_half.width;
    const int width = 2 * half_w;

    DecodeCache<double> cache;
    MatrixX<double> zc = z;
    const MatrixX<double> g = decode_with_cache(model, zc, cache);

    // Decoder output as a combined-image field (row-major flattening).
    Field2D image(width, height);
    for (long i = 0; i < g.rows(); ++i) image.data[static_cast<size_t>(i)] = g(i, 0);

    ObjectiveBreakdown value;

    // match: || M.*G - y ||^2 over the masked (final) half
    double match = 0.0;
    for (int r = 0; r < height; ++r) {
        for (int c = 0; c < half_w; ++c) {
            const double d = image.at(r, c + half_w) - problem.target_half.at(r, c);
            match += d * d;
        }
    }
    value.match = match;

    // volume: ( vol((1-M).*G) - vol(y) )^2
    double vol_initial = 0.0;
    for (int r = 0; r < height; ++r) {
        for (int c = 0; c < half_w; ++c) vol_initial += image.at(r, c);
    }
    const double vol_target = volume(problem.target_half);
    const double vol_diff = vol_initial - vol_target;
    value.volume = vol_diff * vol_diff;

    value.tv = total_variation(image);
    value.total = value.match + problem.alpha * value.volume + problem.beta * value.tv;

    if (grad) {
        Field2D d_image(width, height, 0.0);
        for (int r = 0; r < height; ++r) {
            for (int c = 0; c < half_w; ++c) {
                d_image.at(r, c + half_w) =
                    2.0 * (image.at(r, c + half_w) - problem.target_half.at(r, c));
                d_image.at(r, c) = problem.alpha * 2.0 * vol_diff;
            }
        }
        if (problem.beta != 0.0) {
            const Field2D tv_grad = tv_subgradient(image);
            for (size_t i = 0; i < d_image.data.size(); ++i) {
                d_image.data[i] += problem.beta * tv_grad.data[i];
            }
        }
        MatrixX<double> d_g(g.rows(), 1);
        for (long i = 0; i < g.rows(); ++i) d_g(i, 0) = d_image.data[static_cast<size_t>(i)];
        *grad = decode_backward(model, cache, d_g).col(0);
    }
    return value;
}

DesignResult design(const DesignProblem& problem, const Vae<double>& model, int threads) {
    problem.validate(model);

    // Draw all starting points up front from one stream so a run with more
    // restarts shares the seed-stream prefix of a run with fewer.
    std::mt19937_64 rng(problem.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<Eigen::VectorXd> starts(problem.restarts);
    for (int i = 0; i < problem.restarts; ++i) {
        Eigen::VectorXd z0(model.latent_dim);
        for (int j = 0; j < model.latent_dim; ++j) z0(j) = normal(rng);
        starts[i] = z0.cwiseMax(-problem.bound).cwiseMin(problem.bound);
    }

    const Eigen::VectorXd lower = Eigen::VectorXd::Constant(model.latent_dim, -problem.bound);
    const Eigen::VectorXd upper = Eigen::VectorXd::Constant(model.latent_dim, problem.bound);

    std::vector<LbfgsbResult> results(problem.restarts);
    parallel_for(problem.restarts, threads, [&](int i) {
        auto objective = [&](const Eigen::VectorXd& z, Eigen::VectorXd& grad) {
            return design_objective(z, problem, model, &grad).total;
        };
        results[i] = lbfgsb_minimize(objective, starts[i], lower, upper, problem.optimizer);
    });

    int best = -1;
    for (int i = 0; i < problem.restarts; ++i) {
        if (!std::isfinite(results[i].value)) continue;
        if (best < 0 || results[i].value < results[best].value) best = i;
    }
    if (best < 0) throw Error("design: every restart failed to produce a finite objective");

    DesignResult out;
    out.z_hat = results[best].x;
    out.objective = design_objective(out.z_hat, problem, model, nullptr);
    for (int i = 0; i < problem.restarts; ++i) {
        out.restarts_log.push_back(
            {i, results[i].value, results[i].iterations, results[i].converged});
    }

    const MatrixX<double> g = decode(model, MatrixX<double>(out.z_hat));
    const int half_w = problem.target_half.width;
    const int height = problem.target_half.height;
    Field2D combined(2 * half_w, height);
    for (long i = 0; i < g.rows(); ++i) combined.data[static_cast<size_t>(i)] = g(i, 0);
    const PairedSample pair = PairedSample::from_combined(std::move(combined));
    out.design = pair.initial();
    out.generated_final = pair.final_shape();
    return out;
}

}  // namespace lvae
