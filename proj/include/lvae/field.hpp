#pragma once

#include <cstdint>
#include <vector>

#include "lvae/error.hpp"

namespace lvae {

/// Real-valued pixel grid, row-major. The universal carrier for images,
/// phase fields and convolution kernels. data[r*width + c].
struct Field2D {
    int width = 0;
    int height = 0;
    std::vector<double> data;

    Field2D() = default;
    Field2D(int width_, int height_, double fill = 0.0);

    double& at(int r, int c) { return data[static_cast<size_t>(r) * width + c]; }
    double at(int r, int c) const { return data[static_cast<size_t>(r) * width + c]; }

    size_t size() const { return data.size(); }
    bool same_shape(const Field2D& other) const {
        return width == other.width && height == other.height;
    }
    bool all_finite() const;

    bool operator==(const Field2D& other) const = default;
};

/// Pixel grid with every value exactly 0 or 1.
struct BinaryImage {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> data;

    BinaryImage() = default;
    BinaryImage(int width_, int height_, uint8_t fill = 0);

    uint8_t& at(int r, int c) { return data[static_cast<size_t>(r) * width + c]; }
    uint8_t at(int r, int c) const { return data[static_cast<size_t>(r) * width + c]; }

    size_t size() const { return data.size(); }
    bool same_shape(const BinaryImage& other) const {
        return width == other.width && height == other.height;
    }
    Field2D to_field() const;

    bool operator==(const BinaryImage& other) const = default;
};

/// Side-by-side pair: initial layout in columns [0, W), final shape in
/// [W, 2W) of the combined image.
class PairedSample {
public:
    PairedSample() = default;
    static PairedSample from_halves(const Field2D& initial, const Field2D& final_shape);
    static PairedSample from_combined(Field2D combined);

    const Field2D& combined() const { return combined_; }
    int half_width() const { return combined_.width / 2; }
    Field2D initial() const;
    Field2D final_shape() const;

    bool operator==(const PairedSample& other) const = default;

private:
    Field2D combined_;
};

enum class Half { Left, Right };

PairedSample concat_pair(const Field2D& initial, const Field2D& final_shape);
std::pair<Field2D, Field2D> split_pair(const PairedSample& pair);

/// Indicator of one half of a combined image; width is the combined (even)
/// width. The right-half mask is 1 exactly on columns [W, 2W).
BinaryImage half_mask(int width, int height, Half which);

Field2D apply_mask(const Field2D& img, const BinaryImage& mask);

/// Sum of all pixel values.
double volume(const Field2D& img);

/// Anisotropic total variation: sum of |right-neighbor diffs| plus
/// |down-neighbor diffs|, non-periodic at image edges.
double total_variation(const Field2D& img);

/// Subgradient of total_variation; ties use sign(0) = 0.
Field2D tv_subgradient(const Field2D& img);

/// Pixel -> 1 iff value > threshold (strict).
BinaryImage binarize(const Field2D& img, double threshold = 0.5);

/// Grayscale conventions: solid = 1, void = 0; phase field maps through
/// p = (phi + 1) / 2.
Field2D phase_to_gray(const Field2D& phi);
Field2D gray_to_phase(const Field2D& gray);

}  // namespace lvae
