#pragma once

#include "lvae/config.hpp"
#include "lvae/field.hpp"

namespace lvae {

/// Forward model of optical pattern transfer: aerial image by 2-D Gaussian
/// convolution (zero-padded boundary), resist by hard threshold.
struct LithoParams {
    double sigma = 0.0;     // pixels; 0 = sigma_frac * mask width
    double sigma_frac = 0.06;
    int kernel_radius = 0;  // 0 = ceil(3 sigma)
    double threshold = 0.5;

    static LithoParams from_config(const Config& cfg);

    /// Fills derived fields for a given mask width and validates
    /// sigma > 0, radius >= ceil(3 sigma), threshold in (0, 1).
    LithoParams resolved(int mask_width) const;
};

/// Normalized (2r+1)^2 Gaussian, values proportional to
/// exp(-(i^2+j^2)/(2 sigma^2)); sums to 1 within 1e-12.
Field2D gaussian_kernel(double sigma, int radius);

/// Zero-padded convolution of mask with the Gaussian kernel; output has the
/// mask's dimensions and values in [0, 1]. FFT implementation.
Field2D aerial_image(const Field2D& mask, const LithoParams& params);

/// Same contract via the direct O(N^2 K^2) sum; second route for the
/// FFT-vs-direct consistency check.
Field2D aerial_image_direct(const Field2D& mask, const LithoParams& params);

/// Pixel -> 1 iff aerial intensity > t.
BinaryImage resist_threshold(const Field2D& aerial, double t);

/// resist_threshold(aerial_image(mask)).
BinaryImage litho_forward(const Field2D& mask, const LithoParams& params);

}  // namespace lvae
