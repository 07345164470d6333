#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "pccseg/error.hpp"

namespace pccseg {

using Rgb = std::array<std::uint8_t, 3>;

// Class id of a pixel: 0 = unlabeled/unclassified, 1..c = user classes.
using ClassId = std::uint8_t;

struct RgbImage {
    int width = 0;
    int height = 0;
    std::vector<Rgb> pixels;  // row-major

    RgbImage() = default;
    RgbImage(int w, int h, Rgb fill = {0, 0, 0});

    std::size_t size() const { return pixels.size(); }
    Rgb& at(int col, int row) { return pixels[static_cast<std::size_t>(row) * width + col]; }
    const Rgb& at(int col, int row) const { return pixels[static_cast<std::size_t>(row) * width + col]; }

    friend bool operator==(const RgbImage&, const RgbImage&) = default;
};

// Scribble layer with canonical class ids. `raw_values[id - 1]` is the raw
// 8-bit value that id was assigned from.
struct LabelLayer {
    int width = 0;
    int height = 0;
    std::vector<ClassId> labels;  // row-major
    std::vector<std::uint8_t> raw_values;

    int num_classes() const { return static_cast<int>(raw_values.size()); }
    std::size_t labeled_count() const;
};

template <typename Scalar>
using FeatureMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, 5, Eigen::RowMajor>;

// A pixel dataset ready for graph construction: one feature row per pixel.
template <typename Scalar = double>
struct Dataset {
    FeatureMatrix<Scalar> features;
    std::vector<ClassId> labels;
    int width = 0;
    int height = 0;
};

RgbImage load_image(std::span<const std::uint8_t> png_bytes);

// Canonicalizes distinct nonzero raw values to 1..c in ascending order.
LabelLayer load_label_layer(std::span<const std::uint8_t> png_bytes, const RgbImage& image);
LabelLayer make_label_layer(int width, int height, std::span<const std::uint8_t> raw);

// Inverse of canonicalization: class ids back to their raw 8-bit values.
std::vector<std::uint8_t> encode_raw(const LabelLayer& layer);

RgbImage downscale(const RgbImage& image, int new_width, int new_height);

void validate(const RgbImage& image);

/// Per-pixel features (x, y, r, g, b). Spatial terms are min-max normalized
/// onto [0, spatial_weight]; colors onto [0, 1].
template <typename Scalar = double>
FeatureMatrix<Scalar> extract_features(const RgbImage& image, Scalar spatial_weight = Scalar(1)) {
    validate(image);
    if (!(spatial_weight >= Scalar(0)))
        throw ValidationError("invalid_params", "spatial_weight must be non-negative");
    const Scalar wx = Scalar(std::max(image.width - 1, 1));
    const Scalar wy = Scalar(std::max(image.height - 1, 1));
    FeatureMatrix<Scalar> f(static_cast<Eigen::Index>(image.size()), 5);
    for (int row = 0; row < image.height; ++row) {
        for (int col = 0; col < image.width; ++col) {
            const Eigen::Index i = static_cast<Eigen::Index>(row) * image.width + col;
            const Rgb& px = image.at(col, row);
            f(i, 0) = spatial_weight * (Scalar(col) / wx);  // exact at the far edge
            f(i, 1) = spatial_weight * (Scalar(row) / wy);
            f(i, 2) = Scalar(px[0]) / Scalar(255);
            f(i, 3) = Scalar(px[1]) / Scalar(255);
            f(i, 4) = Scalar(px[2]) / Scalar(255);
        }
    }
    return f;
}

template <typename Scalar = double>
Dataset<Scalar> make_dataset(const RgbImage& image, const LabelLayer& layer, Scalar spatial_weight = Scalar(1)) {
    if (layer.width != image.width || layer.height != image.height)
        throw ValidationError("dimension_mismatch", "scribble layer size differs from image size");
    return {extract_features<Scalar>(image, spatial_weight), layer.labels, image.width, image.height};
}

}  // namespace pccseg
