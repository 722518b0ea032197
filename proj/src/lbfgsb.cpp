#include "lvae/lbfgsb.hpp"

#include <cmath>
#include <deque>

#include "lvae/error.hpp"

namespace lvae {

namespace {

Eigen::VectorXd project(const Eigen::VectorXd& x, const Eigen::VectorXd& lo,
                        const Eigen::VectorXd& hi) {
    return x.cwiseMax(lo).cwiseMin(hi);
}

struct Pair {
    Eigen::VectorXd s, y;
    double rho;
};

// Standard two-loop recursion; H0 = (s.y / y.y) I from the newest pair.
Eigen::VectorXd two_loop(const std::deque<Pair>& pairs, const Eigen::VectorXd& grad) {
    Eigen::VectorXd q = grad;
    std::vector<double> alpha(pairs.size());
    for (int i = static_cast<int>(pairs.size()) - 1; i >= 0; --i) {
        alpha[i] = pairs[i].rho * pairs[i].s.dot(q);
        q -= alpha[i] * pairs[i].y;
    }
    if (!pairs.empty()) {
        const Pair& last = pairs.back();
        q *= last.s.dot(last.y) / last.y.squaredNorm();
    }
    for (size_t i = 0; i < pairs.size(); ++i) {
        const double beta = pairs[i].rho * pairs[i].y.dot(q);
        q += (alpha[i] - beta) * pairs[i].s;
    }
    return q;
}

}  // namespace

LbfgsbResult lbfgsb_minimize(const BoxObjective& objective, Eigen::VectorXd x0,
                             const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                             const LbfgsbOptions& options) {
    const Eigen::Index n = x0.size();
    if (lower.size() != n || upper.size() != n) {
        throw DimensionError("lbfgsb_minimize: bounds size does not match x0");
    }
    if ((lower.array() > upper.array()).any()) {
        throw Error("lbfgsb_minimize: lower bound exceeds upper bound");
    }

    LbfgsbResult result;
    Eigen::VectorXd x = project(x0, lower, upper);
    Eigen::VectorXd grad(n);
    double f = objective(x, grad);
    ++result.evaluations;
    if (!std::isfinite(f)) throw Error("lbfgsb_minimize: objective non-finite at start");

    std::deque<Pair> pairs;
    Eigen::VectorXd trial(n), trial_grad(n);

    for (int iter = 0; iter < options.max_iter; ++iter) {
        result.iterations = iter;
        const double pg_norm = (x - project(x - grad, lower, upper)).lpNorm<Eigen::Infinity>();
        if (pg_norm < options.tol) {
            result.converged = true;
            break;
        }

        Eigen::VectorXd direction = -two_loop(pairs, grad);
        bool used_fallback = pairs.empty();
        if (used_fallback) direction = -grad;

        bool accepted = false;
        for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
            // First iterate with bare -grad: cap the step so the initial
            // trial is not astronomically far outside the box.
            double alpha = 1.0;
            if (used_fallback) {
                const double dmax = direction.lpNorm<Eigen::Infinity>();
                if (dmax > 1.0) alpha = 1.0 / dmax;
            }
            for (int bt = 0; bt < options.max_backtracks; ++bt) {
                trial = project(x + alpha * direction, lower, upper);
                const Eigen::VectorXd dx = trial - x;
                const double gdx = grad.dot(dx);
                if (dx.lpNorm<Eigen::Infinity>() == 0.0) break;  // projection pinned us
                if (gdx < 0.0) {
                    const double f_trial = objective(trial, trial_grad);
                    ++result.evaluations;
                    if (std::isfinite(f_trial) &&
                        f_trial <= f + options.armijo_c1 * gdx) {
                        // curvature-guarded memory update
                        const Eigen::VectorXd s = trial - x;
                        const Eigen::VectorXd y = trial_grad - grad;
                        const double sy = s.dot(y);
                        if (sy > 1e-10 * s.norm() * y.norm()) {
                            pairs.push_back({s, y, 1.0 / sy});
                            if (static_cast<int>(pairs.size()) > options.memory) {
                                pairs.pop_front();
                            }
                        }
                        x = trial;
                        f = f_trial;
                        grad = trial_grad;
                        accepted = true;
                        break;
                    }
                }
                alpha *= 0.5;
            }
            if (!accepted && !used_fallback) {
                // quasi-Newton direction failed; drop memory, retry steepest
                pairs.clear();
                direction = -grad;
                used_fallback = true;
            }
        }
        if (!accepted) {
            result.line_search_failed = true;
            break;
        }
    }

    result.x = x;
    result.value = f;
    result.grad = grad;
    return result;
}

}  // namespace lvae
