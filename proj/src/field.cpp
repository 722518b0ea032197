#include "lvae/field.hpp"

#include <cmath>
#include <string>

namespace lvae {

namespace {

void require_valid_dims(int width, int height, const char* what) {
    if (width < 1 || height < 1) {
        throw DimensionError(std::string(what) + ": dimensions must be >= 1, got " +
                             std::to_string(width) + "x" + std::to_string(height));
    }
}

}  // namespace

Field2D::Field2D(int width_, int height_, double fill)
    : width(width_), height(height_) {
    require_valid_dims(width_, height_, "Field2D");
    data.assign(static_cast<size_t>(width_) * height_, fill);
}

bool Field2D::all_finite() const {
    for (double v : data) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

BinaryImage::BinaryImage(int width_, int height_, uint8_t fill)
    : width(width_), height(height_) {
    require_valid_dims(width_, height_, "BinaryImage");
    data.assign(static_cast<size_t>(width_) * height_, fill);
}

Field2D BinaryImage::to_field() const {
    Field2D out(width, height);
    for (size_t i = 0; i < data.size(); ++i) out.data[i] = data[i] ? 1.0 : 0.0;
    return out;
}

PairedSample PairedSample::from_halves(const Field2D& initial, const Field2D& final_shape) {
    if (!initial.same_shape(final_shape)) {
        throw DimensionError("concat_pair: halves differ, " + std::to_string(initial.width) + "x" +
                             std::to_string(initial.height) + " vs " +
                             std::to_string(final_shape.width) + "x" +
                             std::to_string(final_shape.height));
    }
    const int w = initial.width;
    const int h = initial.height;
    PairedSample pair;
    pair.combined_ = Field2D(2 * w, h);
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            pair.combined_.at(r, c) = initial.at(r, c);
            pair.combined_.at(r, c + w) = final_shape.at(r, c);
        }
    }
    return pair;
}

PairedSample PairedSample::from_combined(Field2D combined) {
    require_valid_dims(combined.width, combined.height, "PairedSample");
    if (combined.width % 2 != 0) {
        throw DimensionError("PairedSample: combined width must be even, got " +
                             std::to_string(combined.width));
    }
    PairedSample pair;
    pair.combined_ = std::move(combined);
    return pair;
}

Field2D PairedSample::initial() const {
    const int w = half_width();
    Field2D out(w, combined_.height);
    for (int r = 0; r < combined_.height; ++r)
        for (int c = 0; c < w; ++c) out.at(r, c) = combined_.at(r, c);
    return out;
}

Field2D PairedSample::final_shape() const {
    const int w = half_width();
    Field2D out(w, combined_.height);
    for (int r = 0; r < combined_.height; ++r)
        for (int c = 0; c < w; ++c) out.at(r, c) = combined_.at(r, c + w);
    return out;
}

PairedSample concat_pair(const Field2D& initial, const Field2D& final_shape) {
    return PairedSample::from_halves(initial, final_shape);
}

std::pair<Field2D, Field2D> split_pair(const PairedSample& pair) {
    return {pair.initial(), pair.final_shape()};
}

BinaryImage half_mask(int width, int height, Half which) {
    if (width % 2 != 0) {
        throw DimensionError("half_mask: combined width must be even, got " +
                             std::to_string(width));
    }
    BinaryImage mask(width, height);
    const int w = width / 2;
    const int begin = which == Half::Right ? w : 0;
    for (int r = 0; r < height; ++r)
        for (int c = begin; c < begin + w; ++c) mask.at(r, c) = 1;
    return mask;
}

Field2D apply_mask(const Field2D& img, const BinaryImage& mask) {
    if (img.width != mask.width || img.height != mask.height) {
        throw DimensionError("apply_mask: image " + std::to_string(img.width) + "x" +
                             std::to_string(img.height) + " vs mask " +
                             std::to_string(mask.width) + "x" + std::to_string(mask.height));
    }
    Field2D out = img;
    for (size_t i = 0; i < out.data.size(); ++i) {
        if (!mask.data[i]) out.data[i] = 0.0;
    }
    return out;
}

double volume(const Field2D& img) {
    double sum = 0.0;
    for (double v : img.data) sum += v;
    return sum;
}

double total_variation(const Field2D& img) {
    double tv = 0.0;
    for (int r = 0; r < img.height; ++r) {
        for (int c = 0; c + 1 < img.width; ++c) {
            tv += std::abs(img.at(r, c + 1) - img.at(r, c));
        }
    }
    for (int r = 0; r + 1 < img.height; ++r) {
        for (int c = 0; c < img.width; ++c) {
            tv += std::abs(img.at(r + 1, c) - img.at(r, c));
        }
    }
    return tv;
}

namespace {
inline double sgn(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }
}  // namespace

Field2D tv_subgradient(const Field2D& img) {
    Field2D grad(img.width, img.height, 0.0);
    for (int r = 0; r < img.height; ++r) {
        for (int c = 0; c + 1 < img.width; ++c) {
            const double s = sgn(img.at(r, c + 1) - img.at(r, c));
            grad.at(r, c + 1) += s;
            grad.at(r, c) -= s;
        }
    }
    for (int r = 0; r + 1 < img.height; ++r) {
        for (int c = 0; c < img.width; ++c) {
            const double s = sgn(img.at(r + 1, c) - img.at(r, c));
            grad.at(r + 1, c) += s;
            grad.at(r, c) -= s;
        }
    }
    return grad;
}

BinaryImage binarize(const Field2D& img, double threshold) {
    BinaryImage out(img.width, img.height);
    for (size_t i = 0; i < img.data.size(); ++i) out.data[i] = img.data[i] > threshold ? 1 : 0;
    return out;
}

Field2D phase_to_gray(const Field2D& phi) {
    Field2D out = phi;
    for (double& v : out.data) v = 0.5 * (v + 1.0);
    return out;
}

Field2D gray_to_phase(const Field2D& gray) {
    Field2D out = gray;
    for (double& v : out.data) v = 2.0 * v - 1.0;
    return out;
}

}  // namespace lvae
