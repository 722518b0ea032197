#pragma once

#include <memory>
#include <vector>

#include "lvae/config.hpp"
#include "lvae/field.hpp"
#include "lvae/spectral.hpp"

namespace lvae {

/// f'(phi) for the double well f(phi) = (1 - phi^2)^2 / 4.
inline double bulk_energy_derivative(double phi) { return phi * phi * phi - phi; }

/// Degenerate mobility (1 - phi^2)^2; phi is clamped to [-1, 1] first so
/// overshoots cannot produce spurious bulk transport.
inline double mobility(double phi) {
    const double p = phi < -1.0 ? -1.0 : (phi > 1.0 ? 1.0 : phi);
    const double t = 1.0 - p * p;
    return t * t;
}

/// Grid geometry plus the numerical knobs of the semi-implicit spectral
/// scheme. Zeros mean "derive from the grid": see resolved().
struct PhaseParams {
    int nx = 0;
    int ny = 0;
    double lx = 1.0;
    double ly = 0.0;        // 0 = square pixels
    double epsilon = 0.0;   // 0 = interface width of interface_cells cells
    double interface_cells = 4.0;
    double dt = 0.0;        // 0 = auto, scaled by dt_scale
    double dt_scale = 1.0;
    double stab_b = 0.0;    // 0 = (9/(4 eps)) * eps
    double stab_s = 0.0;    // 0 = 2 * 9/(4 eps)
    double steady_tol = 1e-6;
    long max_steps = 400000;
    int check_interval = 100;
    int max_escalations = 3;
    int smooth_iters = 20;
    double smooth_dt_factor = 0.01;

    static PhaseParams from_config(const Config& cfg, int nx, int ny);

    double cell_dx() const { return lx / nx; }
    double cell_dy() const { return ly / ny; }
    double cell_h() const { return cell_dx() > cell_dy() ? cell_dx() : cell_dy(); }
    double flux_prefactor() const { return 9.0 / (4.0 * epsilon); }

    /// Fills every zero field with its derived default and validates:
    /// the equilibrium interface width sqrt(2 eps) must span >= 3 cells
    /// and at least one stabilizer must be positive.
    PhaseParams resolved() const;
};

struct TimePoint {
    long step;
    double time;
    double mass;    // mean(phi)
    double energy;  // gl_energy
};

struct EvolveResult {
    Field2D phi;
    long steps = 0;
    bool converged = false;
    int escalations = 0;
    std::vector<TimePoint> series;
};

struct MullinsFit {
    double rate = 0.0;                               // fitted exponential decay rate
    std::vector<std::pair<double, double>> samples;  // (time, amplitude)
};

/// Cahn-Hilliard solver for surface diffusion on a fully periodic domain:
///   d phi / dt = div( (9/(4 eps)) M(phi) grad mu ),  mu = -eps lap phi + f'(phi)
/// stepped by the stabilized semi-implicit spectral scheme
///   phi^{n+1} = phi^n + dt F{NL} / (1 + (S |k|^2 + B |k|^4) dt).
/// The nonlinear flux is evaluated pseudo-spectrally: derivatives in
/// spectral space, the mobility product in real space. The k = 0 mode is
/// untouched, so the mean of phi is conserved to roundoff.
///
/// One instance is single-threaded; run one instance per worker when
/// processing batches of samples in parallel.
class PhaseFieldSolver {
public:
    enum class Mobility { Degenerate, Constant };

    explicit PhaseFieldSolver(const PhaseParams& params);

    const PhaseParams& params() const { return params_; }

    /// One scheme step in place. Throws SolverError (with the given step
    /// index) if the state stops being finite.
    void step(Field2D& phi, Mobility mob, long step_index = 0);
    void step_with_dt(Field2D& phi, Mobility mob, double dt, long step_index = 0);

    /// mu = -eps lap(phi) + f'(phi) with the spectral Laplacian.
    Field2D chemical_potential(const Field2D& phi);

    /// Ginzburg-Landau energy sum( eps/2 |grad phi|^2 + f(phi) ) * dA.
    double energy(const Field2D& phi);

    double mass(const Field2D& phi) const;

    /// Degenerate-mobility evolution until the per-step rate
    /// ||phi^{n+1} - phi^n||_inf / dt drops below steady_tol (checked every
    /// check_interval steps) or max_steps is hit. If the energy rises
    /// between checks the stabilizers B and S are doubled and the run
    /// restarts from the last good checkpoint, at most max_escalations
    /// times.
    EvolveResult evolve_to_steady(Field2D phi);

    /// Constant-mobility smoothing pass: maps a [0,1] image to
    /// phi = 2 img - 1 and runs `iters` steps with M == 1 at dt_small.
    Field2D smooth_constant_mobility(const Field2D& img01, int iters, double dt_small);

    /// Projects the field onto the de-aliased (2/3-rule) band. States fed
    /// to step()/evolve_to_steady() are kept band-limited so the truncated
    /// update leaves no frozen unresolved content behind.
    void project_band(Field2D& phi);

private:
    void spectral_step(std::vector<double>& phi, Mobility mob, double dt, double stab_b,
                       double stab_s, long step_index);

    PhaseParams params_;
    SpectralWorkspace ws_;
    // scratch
    std::vector<std::complex<double>> phi_hat_, mu_hat_, work_hat_, jx_hat_, jy_hat_;
    std::vector<double> lap_, mu_, gx_, gy_;
    double stab_b_ = 0.0, stab_s_ = 0.0;  // working copies; escalation doubles them
};

/// Decay-rate oracle for the sharp-interface (Mullins) limit: perturbs a
/// flat interface by a0*sin(2 pi mode x / lx), tracks the Fourier
/// amplitude of the interface height, and fits an exponential decay.
/// Linear theory predicts rate proportional to k^4.
MullinsFit mullins_decay_fit(const PhaseParams& params, int mode, double a0);

/// Sub-pixel height of the upper void->solid interface per column,
/// measured downward from the top of the domain; used by the Mullins fit.
std::vector<double> interface_heights(const Field2D& phi, double ly);

}  // namespace lvae
