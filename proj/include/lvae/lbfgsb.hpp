#pragma once

#include <Eigen/Dense>
#include <functional>

namespace lvae {

/// Objective callback: returns f(x) and fills grad (same size as x).
using BoxObjective = std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd& grad)>;

struct LbfgsbOptions {
    int memory = 10;       // stored correction pairs
    int max_iter = 500;
    double tol = 1e-6;     // projected-gradient infinity norm
    double armijo_c1 = 1e-4;
    int max_backtracks = 60;
};

struct LbfgsbResult {
    Eigen::VectorXd x;
    double value = 0.0;
    Eigen::VectorXd grad;
    int iterations = 0;
    int evaluations = 0;
    bool converged = false;           // projected gradient below tol
    bool line_search_failed = false;  // stopped early; x is best-so-far
};

/// Limited-memory BFGS with projection onto box bounds. Accepted iterates
/// have non-increasing objective values and every evaluated point lies
/// inside [lower, upper]. Non-finite objective values during the line
/// search trigger further backtracking; an unrecoverable search returns
/// the best point seen with line_search_failed set.
LbfgsbResult lbfgsb_minimize(const BoxObjective& objective, Eigen::VectorXd x0,
                             const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                             const LbfgsbOptions& options = {});

}  // namespace lvae
