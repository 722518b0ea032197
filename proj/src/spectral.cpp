#include "lvae/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <mutex>

namespace lvae {

namespace {
// FFTW plan creation/destruction is not thread-safe; execution is.
std::mutex& plan_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace

SpectralWorkspace::SpectralWorkspace(int nx, int ny, double lx, double ly)
    : nx_(nx), ny_(ny), nxc_(nx / 2 + 1), lx_(lx), ly_(ly) {
    if (nx < 2 || ny < 2) throw DimensionError("SpectralWorkspace: grid must be at least 2x2");
    if (lx <= 0.0 || ly <= 0.0) throw ConfigError("SpectralWorkspace: domain lengths must be > 0");

    kx_grad_.resize(nxc_);
    kx2_.resize(nxc_);
    for (int c = 0; c < nxc_; ++c) {
        const double k = 2.0 * M_PI * c / lx;
        kx2_[c] = k * k;
        // Zero the Nyquist wavenumber (c == nx/2 for even nx) in gradients.
        kx_grad_[c] = (nx % 2 == 0 && c == nx / 2) ? 0.0 : k;
    }
    ky_grad_.resize(ny);
    ky2_.resize(ny);
    for (int r = 0; r < ny; ++r) {
        const int m = r <= ny / 2 ? r : r - ny;
        const double k = 2.0 * M_PI * m / ly;
        ky2_[r] = k * k;
        ky_grad_[r] = (ny % 2 == 0 && r == ny / 2) ? 0.0 : k;
    }

    dealias_keep_.assign(static_cast<size_t>(nxc_) * ny, 0);
    for (int r = 0; r < ny; ++r) {
        const int my = r <= ny / 2 ? r : r - ny;
        for (int c = 0; c < nxc_; ++c) {
            if (c <= nx / 3 && std::abs(my) <= ny / 3) {
                dealias_keep_[static_cast<size_t>(r) * nxc_ + c] = 1;
            }
        }
    }

    rbuf_ = fftw_alloc_real(static_cast<size_t>(nx) * ny);
    fftw_complex* cbuf = fftw_alloc_complex(static_cast<size_t>(nxc_) * ny);
    cbuf_ = cbuf;
    std::lock_guard<std::mutex> lock(plan_mutex());
    // FFTW_ESTIMATE keeps plan selection deterministic across runs.
    plan_fwd_ = fftw_plan_dft_r2c_2d(ny, nx, rbuf_, cbuf, FFTW_ESTIMATE);
    plan_bwd_ = fftw_plan_dft_c2r_2d(ny, nx, cbuf, rbuf_, FFTW_ESTIMATE);
}

SpectralWorkspace::~SpectralWorkspace() {
    std::lock_guard<std::mutex> lock(plan_mutex());
    fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
    fftw_destroy_plan(static_cast<fftw_plan>(plan_bwd_));
    fftw_free(rbuf_);
    fftw_free(static_cast<fftw_complex*>(cbuf_));
}

void SpectralWorkspace::forward(const std::vector<double>& real,
                                std::vector<std::complex<double>>& spec) {
    const size_t n = static_cast<size_t>(nx_) * ny_;
    const size_t nc = static_cast<size_t>(nxc_) * ny_;
    if (real.size() != n) throw DimensionError("SpectralWorkspace::forward: size mismatch");
    spec.resize(nc);
    std::memcpy(rbuf_, real.data(), n * sizeof(double));
    fftw_execute(static_cast<fftw_plan>(plan_fwd_));
    std::memcpy(spec.data(), cbuf_, nc * sizeof(std::complex<double>));
}

void SpectralWorkspace::inverse(const std::vector<std::complex<double>>& spec,
                                std::vector<double>& real) {
    const size_t n = static_cast<size_t>(nx_) * ny_;
    const size_t nc = static_cast<size_t>(nxc_) * ny_;
    if (spec.size() != nc) throw DimensionError("SpectralWorkspace::inverse: size mismatch");
    real.resize(n);
    std::memcpy(cbuf_, spec.data(), nc * sizeof(std::complex<double>));
    fftw_execute(static_cast<fftw_plan>(plan_bwd_));
    const double scale = 1.0 / static_cast<double>(n);
    for (size_t i = 0; i < n; ++i) real[i] = rbuf_[i] * scale;
}

}  // namespace lvae
