#include "lvae/litho.hpp"

#include <algorithm>
#include <cmath>

#include "lvae/spectral.hpp"

namespace lvae {

LithoParams LithoParams::from_config(const Config& cfg) {
    LithoParams p;
    p.sigma = cfg.get_real("litho.sigma");
    p.sigma_frac = cfg.get_real("litho.sigma_frac");
    p.kernel_radius = static_cast<int>(cfg.get_int("litho.kernel_radius"));
    p.threshold = cfg.get_real("litho.threshold");
    return p;
}

LithoParams LithoParams::resolved(int mask_width) const {
    LithoParams p = *this;
    if (p.sigma <= 0.0) p.sigma = p.sigma_frac * mask_width;
    if (p.sigma <= 0.0) throw ConfigError("LithoParams: sigma must be positive");
    const int min_radius = static_cast<int>(std::ceil(3.0 * p.sigma));
    if (p.kernel_radius <= 0) p.kernel_radius = min_radius;
    if (p.kernel_radius < min_radius) {
        throw ConfigError("LithoParams: kernel_radius " + std::to_string(p.kernel_radius) +
                          " < ceil(3 sigma) = " + std::to_string(min_radius));
    }
    if (p.threshold <= 0.0 || p.threshold >= 1.0) {
        throw ConfigError("LithoParams: threshold must be in (0, 1)");
    }
    return p;
}

Field2D gaussian_kernel(double sigma, int radius) {
    if (sigma <= 0.0) throw ConfigError("gaussian_kernel: sigma must be positive");
    if (radius < 1) throw ConfigError("gaussian_kernel: radius must be >= 1");
    const int size = 2 * radius + 1;
    Field2D kernel(size, size);
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        for (int j = -radius; j <= radius; ++j) {
            const double v = std::exp(-(i * i + j * j) / (2.0 * sigma * sigma));
            kernel.at(i + radius, j + radius) = v;
            sum += v;
        }
    }
    for (double& v : kernel.data) v /= sum;
    return kernel;
}

Field2D aerial_image_direct(const Field2D& mask, const LithoParams& params) {
    const LithoParams p = params.resolved(mask.width);
    const Field2D kernel = gaussian_kernel(p.sigma, p.kernel_radius);
    const int r = p.kernel_radius;
    Field2D out(mask.width, mask.height);
    for (int i = 0; i < mask.height; ++i) {
        for (int j = 0; j < mask.width; ++j) {
            double acc = 0.0;
            for (int u = -r; u <= r; ++u) {
                const int ii = i + u;
                if (ii < 0 || ii >= mask.height) continue;
                for (int v = -r; v <= r; ++v) {
                    const int jj = j + v;
                    if (jj < 0 || jj >= mask.width) continue;
                    acc += kernel.at(u + r, v + r) * mask.at(ii, jj);
                }
            }
            out.at(i, j) = std::clamp(acc, 0.0, 1.0);
        }
    }
    return out;
}

Field2D aerial_image(const Field2D& mask, const LithoParams& params) {
    const LithoParams p = params.resolved(mask.width);
    const Field2D kernel = gaussian_kernel(p.sigma, p.kernel_radius);
    const int r = p.kernel_radius;
    // Pad so circular convolution equals the zero-padded linear one.
    const int pw = mask.width + 2 * r;
    const int ph = mask.height + 2 * r;
    SpectralWorkspace ws(pw, ph, static_cast<double>(pw), static_cast<double>(ph));

    std::vector<double> mask_pad(static_cast<size_t>(pw) * ph, 0.0);
    for (int i = 0; i < mask.height; ++i) {
        for (int j = 0; j < mask.width; ++j) {
            mask_pad[static_cast<size_t>(i) * pw + j] = mask.at(i, j);
        }
    }
    // Kernel centered at the origin with wrap-around indexing.
    std::vector<double> kern_pad(static_cast<size_t>(pw) * ph, 0.0);
    for (int u = -r; u <= r; ++u) {
        const int i = (u + ph) % ph;
        for (int v = -r; v <= r; ++v) {
            const int j = (v + pw) % pw;
            kern_pad[static_cast<size_t>(i) * pw + j] = kernel.at(u + r, v + r);
        }
    }

    std::vector<std::complex<double>> mask_hat, kern_hat;
    ws.forward(mask_pad, mask_hat);
    ws.forward(kern_pad, kern_hat);
    for (size_t i = 0; i < mask_hat.size(); ++i) mask_hat[i] *= kern_hat[i];
    std::vector<double> conv;
    ws.inverse(mask_hat, conv);

    Field2D out(mask.width, mask.height);
    for (int i = 0; i < mask.height; ++i) {
        for (int j = 0; j < mask.width; ++j) {
            out.at(i, j) = std::clamp(conv[static_cast<size_t>(i) * pw + j], 0.0, 1.0);
        }
    }
    return out;
}

BinaryImage resist_threshold(const Field2D& aerial, double t) {
    return binarize(aerial, t);
}

BinaryImage litho_forward(const Field2D& mask, const LithoParams& params) {
    const LithoParams p = params.resolved(mask.width);
    return resist_threshold(aerial_image(mask, p), p.threshold);
}

}  // namespace lvae
