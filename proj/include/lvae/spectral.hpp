#pragma once

#include <complex>
#include <vector>

#include "lvae/field.hpp"

namespace lvae {

/// FFT plans plus wavevector tables for one periodic nx-by-ny grid.
/// Transforms are real-to-complex: spectra have ny rows of nx/2+1 columns.
/// The inverse is normalized so inverse(forward(x)) == x up to roundoff.
///
/// Wavevector tables follow the usual FFT ordering with k = 2*pi*m/l.
/// kx_grad/ky_grad zero the Nyquist mode so first derivatives of real
/// fields stay real; kx2/ky2 keep the full magnitude for the Laplacian.
/// The k = 0 entries are exactly zero.
class SpectralWorkspace {
public:
    SpectralWorkspace(int nx, int ny, double lx, double ly);
    ~SpectralWorkspace();

    SpectralWorkspace(const SpectralWorkspace&) = delete;
    SpectralWorkspace& operator=(const SpectralWorkspace&) = delete;

    int nx() const { return nx_; }
    int ny() const { return ny_; }
    int spectral_cols() const { return nxc_; }
    double lx() const { return lx_; }
    double ly() const { return ly_; }

    void forward(const std::vector<double>& real, std::vector<std::complex<double>>& spec);
    void inverse(const std::vector<std::complex<double>>& spec, std::vector<double>& real);

    const std::vector<double>& kx_grad() const { return kx_grad_; }  // size nx/2+1
    const std::vector<double>& ky_grad() const { return ky_grad_; }  // size ny
    const std::vector<double>& kx2() const { return kx2_; }
    const std::vector<double>& ky2() const { return ky2_; }

    /// 2/3-rule truncation mask over the r2c spectrum (1 = keep): modes with
    /// |m_x| <= nx/3 and |m_y| <= ny/3. Used to de-alias nonlinear products.
    const std::vector<uint8_t>& dealias_keep() const { return dealias_keep_; }

private:
    int nx_, ny_, nxc_;
    double lx_, ly_;
    std::vector<double> kx_grad_, ky_grad_, kx2_, ky2_;
    std::vector<uint8_t> dealias_keep_;
    double* rbuf_;
    void* cbuf_;      // fftw_complex[]
    void* plan_fwd_;  // fftw_plan
    void* plan_bwd_;
};

}  // namespace lvae
