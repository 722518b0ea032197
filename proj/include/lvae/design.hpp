#pragma once

#include <cstdint>

#include "lvae/config.hpp"
#include "lvae/field.hpp"
#include "lvae/lbfgsb.hpp"
#include "lvae/nn.hpp"

namespace lvae {

/// Inverse-design problem over the frozen decoder: find z minimizing
///   || M .* G(z) - y ||^2
///   + alpha * ( vol((1-M) .* G(z)) - vol(y) )^2
///   + beta * TV(G(z)),
/// with z box-constrained to [-bound, bound] per coordinate.
struct DesignProblem {
    Field2D target_half;   // y: the final-shape half (H x W)
    BinaryImage mask;      // M: right-half indicator on the combined image (H x 2W)
    double alpha = 0.1;
    double beta = 0.2;
    double bound = 3.0;
    int restarts = 8;
    uint64_t seed = 1;
    LbfgsbOptions optimizer;

    static DesignProblem from_config(const Config& cfg, Field2D target_half);
    void validate(const Vae<double>& model) const;
};

struct ObjectiveBreakdown {
    double total = 0.0;
    double match = 0.0;    // || M.*G(z) - y ||^2
    double volume = 0.0;   // ( vol((1-M).*G) - vol(y) )^2, unweighted
    double tv = 0.0;       // TV(G(z)), unweighted
};

struct RestartLog {
    int index = 0;
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
};

struct DesignResult {
    Eigen::VectorXd z_hat;
    ObjectiveBreakdown objective;
    Field2D design;           // initial-layout half of G(z_hat), grayscale
    Field2D generated_final;  // final-shape half of G(z_hat)
    std::vector<RestartLog> restarts_log;
};

/// Value and (optionally) gradient of the design objective at z. The
/// gradient is exact backpropagation through the decoder; the TV term uses
/// the sign subgradient with sign(0) = 0.
ObjectiveBreakdown design_objective(const Eigen::VectorXd& z, const DesignProblem& problem,
                                    const Vae<double>& model, Eigen::VectorXd* grad = nullptr);

/// Multi-restart bound-constrained search: restarts initial points are
/// drawn ~N(0, I) from the problem seed (clipped to bounds) and optimized
/// independently (in parallel); the best final value wins, ties broken by
/// restart index.
DesignResult design(const DesignProblem& problem, const Vae<double>& model, int threads = 1);

}  // namespace lvae
