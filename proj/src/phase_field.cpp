#include "lvae/phase_field.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

namespace lvae {

PhaseParams PhaseParams::from_config(const Config& cfg, int nx, int ny) {
    PhaseParams p;
    p.nx = nx;
    p.ny = ny;
    p.lx = cfg.get_real("solver.lx");
    p.ly = cfg.get_real("solver.ly");
    p.epsilon = cfg.get_real("solver.epsilon");
    p.interface_cells = cfg.get_real("solver.interface_cells");
    p.dt = cfg.get_real("solver.dt");
    p.dt_scale = cfg.get_real("solver.dt_scale");
    p.stab_b = cfg.get_real("solver.stab_b");
    p.stab_s = cfg.get_real("solver.stab_s");
    p.steady_tol = cfg.get_real("solver.steady_tol");
    p.max_steps = cfg.get_int("solver.max_steps");
    p.check_interval = static_cast<int>(cfg.get_int("solver.check_interval"));
    p.max_escalations = static_cast<int>(cfg.get_int("solver.max_escalations"));
    p.smooth_iters = static_cast<int>(cfg.get_int("solver.smooth_iters"));
    p.smooth_dt_factor = cfg.get_real("solver.smooth_dt_factor");
    return p;
}

PhaseParams PhaseParams::resolved() const {
    PhaseParams p = *this;
    if (p.nx < 2 || p.ny < 2) throw ConfigError("PhaseParams: grid must be at least 2x2");
    if (p.lx <= 0.0) throw ConfigError("PhaseParams: lx must be positive");
    if (p.ly <= 0.0) p.ly = p.lx * static_cast<double>(p.ny) / p.nx;
    const double h = p.cell_h();
    if (p.epsilon <= 0.0) {
        // Equilibrium profile is tanh(s / sqrt(2 eps)); pick eps so the
        // interface spans interface_cells grid cells.
        const double width = p.interface_cells * h;
        p.epsilon = 0.5 * width * width;
    }
    if (std::sqrt(2.0 * p.epsilon) < 3.0 * h - 1e-12) {
        throw ConfigError("PhaseParams: interface width " +
                          std::to_string(std::sqrt(2.0 * p.epsilon)) +
                          " under-resolved (< 3 cells of " + std::to_string(h) + ")");
    }
    const double c0 = p.flux_prefactor();
    if (p.stab_b < 0.0 || p.stab_s < 0.0) {
        throw ConfigError("PhaseParams: stabilizers must be >= 0");
    }
    if (p.stab_b == 0.0) p.stab_b = c0 * p.epsilon;
    if (p.stab_s == 0.0) p.stab_s = 2.0 * c0;
    if (p.dt <= 0.0) p.dt = 0.1 * h * h * h * h / (c0 * p.epsilon) * p.dt_scale;
    if (p.dt <= 0.0) throw ConfigError("PhaseParams: dt must be positive");
    if (p.stab_b <= 0.0 && p.stab_s <= 0.0) {
        throw ConfigError("PhaseParams: need a positive stabilizer (B or S)");
    }
    if (p.check_interval < 1) throw ConfigError("PhaseParams: check_interval must be >= 1");
    if (p.max_steps < 1) throw ConfigError("PhaseParams: max_steps must be >= 1");
    return p;
}

PhaseFieldSolver::PhaseFieldSolver(const PhaseParams& params)
    : params_(params.resolved()),
      ws_(params_.nx, params_.ny, params_.lx, params_.ly),
      stab_b_(params_.stab_b),
      stab_s_(params_.stab_s) {}

void PhaseFieldSolver::spectral_step(std::vector<double>& phi, Mobility mob, double dt,
                                     double stab_b, double stab_s, long step_index) {
    const int ny = params_.ny;
    const int nxc = ws_.spectral_cols();
    const double eps = params_.epsilon;
    const double c0 = params_.flux_prefactor();
    const auto& kx2 = ws_.kx2();
    const auto& ky2 = ws_.ky2();
    const auto& kxg = ws_.kx_grad();
    const auto& kyg = ws_.ky_grad();

    ws_.forward(phi, phi_hat_);

    // mu = -eps lap(phi) + f'(phi)
    work_hat_.resize(phi_hat_.size());
    for (int r = 0; r < ny; ++r) {
        const size_t row = static_cast<size_t>(r) * nxc;
        for (int c = 0; c < nxc; ++c) {
            work_hat_[row + c] = -(kx2[c] + ky2[r]) * phi_hat_[row + c];
        }
    }
    ws_.inverse(work_hat_, lap_);
    mu_.resize(phi.size());
    for (size_t i = 0; i < phi.size(); ++i) {
        mu_[i] = -eps * lap_[i] + bulk_energy_derivative(phi[i]);
    }

    // grad mu in spectral space, flux product in real space; the 2/3-rule
    // truncation keeps the cubic/quartic products from folding energy back
    // into the resolved band
    ws_.forward(mu_, mu_hat_);
    const auto& keep = ws_.dealias_keep();
    jx_hat_.resize(mu_hat_.size());
    jy_hat_.resize(mu_hat_.size());
    for (int r = 0; r < ny; ++r) {
        const size_t row = static_cast<size_t>(r) * nxc;
        for (int c = 0; c < nxc; ++c) {
            const std::complex<double> v =
                keep[row + c] ? mu_hat_[row + c] : std::complex<double>(0.0, 0.0);
            jx_hat_[row + c] = std::complex<double>(-kxg[c] * v.imag(), kxg[c] * v.real());
            jy_hat_[row + c] = std::complex<double>(-kyg[r] * v.imag(), kyg[r] * v.real());
        }
    }
    ws_.inverse(jx_hat_, gx_);
    ws_.inverse(jy_hat_, gy_);
    if (mob == Mobility::Degenerate) {
        for (size_t i = 0; i < phi.size(); ++i) {
            const double m = c0 * mobility(phi[i]);
            gx_[i] *= m;
            gy_[i] *= m;
        }
    } else {
        for (size_t i = 0; i < phi.size(); ++i) {
            gx_[i] *= c0;
            gy_[i] *= c0;
        }
    }
    ws_.forward(gx_, jx_hat_);
    ws_.forward(gy_, jy_hat_);

    // phi_hat update; the k = 0 mode has zero flux divergence, so mass is
    // conserved exactly.
    for (int r = 0; r < ny; ++r) {
        const size_t row = static_cast<size_t>(r) * nxc;
        for (int c = 0; c < nxc; ++c) {
            const size_t i = row + c;
            if (!keep[i]) continue;
            const std::complex<double> jx = jx_hat_[i];
            const std::complex<double> jy = jy_hat_[i];
            const std::complex<double> div(-kxg[c] * jx.imag() - kyg[r] * jy.imag(),
                                           kxg[c] * jx.real() + kyg[r] * jy.real());
            const double k2 = kx2[c] + ky2[r];
            const double denom = 1.0 + (stab_s * k2 + stab_b * k2 * k2) * dt;
            phi_hat_[i] += div * (dt / denom);
        }
    }
    ws_.inverse(phi_hat_, phi);

    for (double v : phi) {
        if (!std::isfinite(v)) {
            throw SolverError("phase field diverged to non-finite values", step_index);
        }
    }
}

void PhaseFieldSolver::step(Field2D& phi, Mobility mob, long step_index) {
    step_with_dt(phi, mob, params_.dt, step_index);
}

void PhaseFieldSolver::step_with_dt(Field2D& phi, Mobility mob, double dt, long step_index) {
    if (phi.width != params_.nx || phi.height != params_.ny) {
        throw DimensionError("PhaseFieldSolver::step: field is " + std::to_string(phi.width) +
                             "x" + std::to_string(phi.height) + ", solver grid is " +
                             std::to_string(params_.nx) + "x" + std::to_string(params_.ny));
    }
    spectral_step(phi.data, mob, dt, stab_b_, stab_s_, step_index);
}

Field2D PhaseFieldSolver::chemical_potential(const Field2D& phi) {
    if (phi.width != params_.nx || phi.height != params_.ny) {
        throw DimensionError("chemical_potential: field dims do not match solver grid");
    }
    const int ny = params_.ny;
    const int nxc = ws_.spectral_cols();
    const auto& kx2 = ws_.kx2();
    const auto& ky2 = ws_.ky2();
    ws_.forward(phi.data, phi_hat_);
    work_hat_.resize(phi_hat_.size());
    for (int r = 0; r < ny; ++r) {
        const size_t row = static_cast<size_t>(r) * nxc;
        for (int c = 0; c < nxc; ++c) {
            work_hat_[row + c] = -(kx2[c] + ky2[r]) * phi_hat_[row + c];
        }
    }
    ws_.inverse(work_hat_, lap_);
    Field2D mu(phi.width, phi.height);
    for (size_t i = 0; i < phi.data.size(); ++i) {
        mu.data[i] = -params_.epsilon * lap_[i] + bulk_energy_derivative(phi.data[i]);
    }
    return mu;
}

double PhaseFieldSolver::energy(const Field2D& phi) {
    if (phi.width != params_.nx || phi.height != params_.ny) {
        throw DimensionError("energy: field dims do not match solver grid");
    }
    const int ny = params_.ny;
    const int nxc = ws_.spectral_cols();
    const auto& kxg = ws_.kx_grad();
    const auto& kyg = ws_.ky_grad();
    ws_.forward(phi.data, phi_hat_);
    work_hat_.resize(phi_hat_.size());
    jy_hat_.resize(phi_hat_.size());
    for (int r = 0; r < ny; ++r) {
        const size_t row = static_cast<size_t>(r) * nxc;
        for (int c = 0; c < nxc; ++c) {
            const std::complex<double> v = phi_hat_[row + c];
            work_hat_[row + c] = std::complex<double>(-kxg[c] * v.imag(), kxg[c] * v.real());
            jy_hat_[row + c] = std::complex<double>(-kyg[r] * v.imag(), kyg[r] * v.real());
        }
    }
    ws_.inverse(work_hat_, gx_);
    ws_.inverse(jy_hat_, gy_);
    const double area = params_.cell_dx() * params_.cell_dy();
    double e = 0.0;
    for (size_t i = 0; i < phi.data.size(); ++i) {
        const double p = phi.data[i];
        const double w = 1.0 - p * p;
        e += 0.5 * params_.epsilon * (gx_[i] * gx_[i] + gy_[i] * gy_[i]) + 0.25 * w * w;
    }
    return e * area;
}

double PhaseFieldSolver::mass(const Field2D& phi) const {
    double sum = 0.0;
    for (double v : phi.data) sum += v;
    return sum / static_cast<double>(phi.data.size());
}

EvolveResult PhaseFieldSolver::evolve_to_steady(Field2D phi) {
    if (phi.width != params_.nx || phi.height != params_.ny) {
        throw DimensionError("evolve_to_steady: field dims do not match solver grid");
    }
    stab_b_ = params_.stab_b;
    stab_s_ = params_.stab_s;
    project_band(phi);

    EvolveResult result;
    result.series.push_back({0, 0.0, mass(phi), energy(phi)});

    Field2D checkpoint = phi;
    long checkpoint_step = 0;
    double checkpoint_energy = result.series.front().energy;
    std::vector<double> prev;

    long step_count = 0;
    while (step_count < params_.max_steps) {
        const long todo =
            std::min<long>(params_.check_interval, params_.max_steps - step_count);
        for (long k = 0; k < todo; ++k) {
            if (k == todo - 1) prev = phi.data;
            step_with_dt(phi, Mobility::Degenerate, params_.dt, step_count);
            ++step_count;
        }
        double delta = 0.0;
        for (size_t i = 0; i < phi.data.size(); ++i) {
            delta = std::max(delta, std::abs(phi.data[i] - prev[i]));
        }
        const double rate = delta / params_.dt;
        const double e_now = energy(phi);

        if (e_now > checkpoint_energy * (1.0 + 1e-12) + 1e-12) {
            // Dissipation violated: double the stabilizers and redo the
            // interval from the last good state.
            if (result.escalations >= params_.max_escalations) {
                throw SolverError("energy increased after " +
                                      std::to_string(params_.max_escalations) +
                                      " stabilizer escalations",
                                  step_count);
            }
            ++result.escalations;
            stab_b_ *= 2.0;
            stab_s_ *= 2.0;
            phi = checkpoint;
            step_count = checkpoint_step;
            continue;
        }

        result.series.push_back({step_count, step_count * params_.dt, mass(phi), e_now});
        checkpoint = phi;
        checkpoint_step = step_count;
        checkpoint_energy = e_now;

        if (rate < params_.steady_tol) {
            result.converged = true;
            break;
        }
    }

    result.phi = std::move(phi);
    result.steps = step_count;
    return result;
}

Field2D PhaseFieldSolver::smooth_constant_mobility(const Field2D& img01, int iters,
                                                   double dt_small) {
    if (img01.width != params_.nx || img01.height != params_.ny) {
        throw DimensionError("smooth_constant_mobility: image dims do not match solver grid");
    }
    if (dt_small <= 0.0) throw ConfigError("smooth_constant_mobility: dt must be positive");
    Field2D phi = gray_to_phase(img01);
    project_band(phi);
    for (int i = 0; i < iters; ++i) {
        spectral_step(phi.data, Mobility::Constant, dt_small, stab_b_, stab_s_, i);
    }
    return phi;
}

void PhaseFieldSolver::project_band(Field2D& phi) {
    if (phi.width != params_.nx || phi.height != params_.ny) {
        throw DimensionError("project_band: field dims do not match solver grid");
    }
    ws_.forward(phi.data, phi_hat_);
    const auto& keep = ws_.dealias_keep();
    for (size_t i = 0; i < phi_hat_.size(); ++i) {
        if (!keep[i]) phi_hat_[i] = 0.0;
    }
    ws_.inverse(phi_hat_, phi.data);
}

std::vector<double> interface_heights(const Field2D& phi, double ly) {
    const int nx = phi.width;
    const int ny = phi.height;
    const double dy = ly / ny;
    std::vector<double> h(nx);
    for (int c = 0; c < nx; ++c) {
        bool found = false;
        for (int r = ny - 1; r >= 1; --r) {
            const double upper = phi.at(r, c);      // larger y
            const double lower = phi.at(r - 1, c);  // smaller y
            if (upper < 0.0 && lower >= 0.0) {
                // crossing between y(r-1) and y(r)
                const double y_lower = (r - 1 + 0.5) * dy;
                const double t = lower / (lower - upper);  // in [0, 1)
                h[c] = y_lower + t * dy;
                found = true;
                break;
            }
        }
        if (!found) throw Error("interface_heights: no void->solid crossing in column " +
                                std::to_string(c));
    }
    return h;
}

namespace {

double mode_amplitude(const std::vector<double>& heights, int mode) {
    const int n = static_cast<int>(heights.size());
    double re = 0.0, im = 0.0;
    for (int c = 0; c < n; ++c) {
        const double arg = -2.0 * M_PI * mode * c / n;
        re += heights[c] * std::cos(arg);
        im += heights[c] * std::sin(arg);
    }
    return 2.0 * std::hypot(re, im) / n;
}

}  // namespace

MullinsFit mullins_decay_fit(const PhaseParams& params, int mode, double a0) {
    if (a0 <= 0.0) throw Error("mullins_decay_fit: perturbation amplitude must be positive");
    if (mode < 1) throw Error("mullins_decay_fit: mode must be >= 1");
    const PhaseParams p = params.resolved();
    PhaseFieldSolver solver(p);

    // Solid slab between y_bot and y_top + a0 sin(k x); tanh profiles at
    // both faces so the field is smooth across the periodic wrap.
    const double delta = std::sqrt(2.0 * p.epsilon);
    const double y_bot = 0.30 * p.ly;
    const double y_top = 0.70 * p.ly;
    const double k = 2.0 * M_PI * mode / p.lx;
    Field2D phi(p.nx, p.ny);
    for (int r = 0; r < p.ny; ++r) {
        const double y = (r + 0.5) * p.cell_dy();
        for (int c = 0; c < p.nx; ++c) {
            const double x = (c + 0.5) * p.cell_dx();
            const double h = y_top + a0 * std::sin(k * x);
            phi.at(r, c) =
                std::tanh((y - y_bot) / delta) + std::tanh((h - y) / delta) - 1.0;
        }
    }

    MullinsFit fit;
    const double amp0 = mode_amplitude(interface_heights(phi, p.ly), mode);
    fit.samples.push_back({0.0, amp0});

    long step_count = 0;
    while (step_count < p.max_steps) {
        for (int i = 0; i < p.check_interval; ++i) {
            solver.step(phi, PhaseFieldSolver::Mobility::Degenerate, step_count);
            ++step_count;
        }
        const double amp = mode_amplitude(interface_heights(phi, p.ly), mode);
        fit.samples.push_back({step_count * p.dt, amp});
        if (amp < amp0 / 3.0) break;
        if (fit.samples.size() > 400) break;
    }
    if (fit.samples.size() < 5) {
        throw Error("mullins_decay_fit: too few samples before decay completed");
    }
    for (size_t i = 1; i < fit.samples.size(); ++i) {
        if (fit.samples[i].second > fit.samples[i - 1].second * 1.02) {
            throw Error("mullins_decay_fit: amplitude not monotonically decreasing");
        }
    }

    // least-squares slope of ln(amp) vs t
    double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
    const double n = static_cast<double>(fit.samples.size());
    for (const auto& [t, a] : fit.samples) {
        const double y = std::log(a);
        st += t;
        sy += y;
        stt += t * t;
        sty += t * y;
    }
    const double slope = (n * sty - st * sy) / (n * stt - st * st);
    fit.rate = -slope;
    return fit;
}

}  // namespace lvae
