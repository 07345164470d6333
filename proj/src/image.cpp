#include "pccseg/image.hpp"

#include <algorithm>
#include <array>
#include <string>

#include "pccseg/png_codec.hpp"

namespace pccseg {

RgbImage::RgbImage(int w, int h, Rgb fill)
    : width(w), height(h), pixels(static_cast<std::size_t>(std::max(w, 0)) * std::max(h, 0), fill) {}

std::size_t LabelLayer::labeled_count() const {
    return static_cast<std::size_t>(std::count_if(labels.begin(), labels.end(), [](ClassId c) { return c != 0; }));
}

void validate(const RgbImage& image) {
    if (image.width < 1 || image.height < 1)
        throw ValidationError("invalid_image", "image must be at least 1x1");
    if (image.pixels.size() != static_cast<std::size_t>(image.width) * image.height)
        throw ValidationError("invalid_image", "pixel count does not match width x height");
}

RgbImage load_image(std::span<const std::uint8_t> png_bytes) {
    const png::Raster raster = png::decode_rgb(png_bytes);
    RgbImage image;
    image.width = raster.width;
    image.height = raster.height;
    validate(RgbImage(raster.width, raster.height));
    image.pixels.resize(static_cast<std::size_t>(raster.width) * raster.height);
    for (std::size_t i = 0; i < image.pixels.size(); ++i)
        image.pixels[i] = {raster.samples[3 * i], raster.samples[3 * i + 1], raster.samples[3 * i + 2]};
    return image;
}

LabelLayer make_label_layer(int width, int height, std::span<const std::uint8_t> raw) {
    if (width < 1 || height < 1 || raw.size() != static_cast<std::size_t>(width) * height)
        throw ValidationError("dimension_mismatch", "label layer size does not match its buffer");

    std::array<bool, 256> present{};
    for (std::uint8_t v : raw)
        present[v] = true;

    LabelLayer layer;
    layer.width = width;
    layer.height = height;
    std::array<ClassId, 256> class_of{};
    for (int v = 1; v < 256; ++v) {
        if (present[v]) {
            layer.raw_values.push_back(static_cast<std::uint8_t>(v));
            class_of[v] = static_cast<ClassId>(layer.raw_values.size());
        }
    }
    if (layer.raw_values.empty())
        throw ValidationError("no_scribbles", "scribble layer contains no labeled pixels");

    layer.labels.resize(raw.size());
    std::transform(raw.begin(), raw.end(), layer.labels.begin(), [&](std::uint8_t v) { return class_of[v]; });
    return layer;
}

LabelLayer load_label_layer(std::span<const std::uint8_t> png_bytes, const RgbImage& image) {
    const png::Raster raster = png::decode_samples(png_bytes);
    if (raster.width != image.width || raster.height != image.height) {
        throw ValidationError("dimension_mismatch",
                              "scribble layer is " + std::to_string(raster.width) + "x" +
                                  std::to_string(raster.height) + ", image is " + std::to_string(image.width) +
                                  "x" + std::to_string(image.height));
    }
    if (raster.channels == 1)
        return make_label_layer(raster.width, raster.height, raster.samples);

    // Color PNGs are accepted only when every pixel is gray.
    std::vector<std::uint8_t> gray(static_cast<std::size_t>(raster.width) * raster.height);
    for (std::size_t i = 0; i < gray.size(); ++i) {
        const std::uint8_t r = raster.samples[3 * i];
        if (raster.samples[3 * i + 1] != r || raster.samples[3 * i + 2] != r)
            throw ValidationError("invalid_scribbles", "scribble layer must be grayscale");
        gray[i] = r;
    }
    return make_label_layer(raster.width, raster.height, gray);
}

std::vector<std::uint8_t> encode_raw(const LabelLayer& layer) {
    std::vector<std::uint8_t> raw(layer.labels.size());
    std::transform(layer.labels.begin(), layer.labels.end(), raw.begin(),
                   [&](ClassId c) -> std::uint8_t { return c == 0 ? 0 : layer.raw_values.at(c - 1u); });
    return raw;
}

RgbImage downscale(const RgbImage& image, int new_width, int new_height) {
    validate(image);
    if (new_width < 1 || new_height < 1 || new_width > image.width || new_height > image.height)
        throw ValidationError("invalid_params", "downscale target must be between 1x1 and the source size");

    RgbImage out(new_width, new_height);
    for (int oy = 0; oy < new_height; ++oy) {
        // Source box [y0, y1) covers output row oy; boxes tile the source exactly.
        const int y0 = static_cast<int>(static_cast<long long>(oy) * image.height / new_height);
        const int y1 = static_cast<int>(static_cast<long long>(oy + 1) * image.height / new_height);
        for (int ox = 0; ox < new_width; ++ox) {
            const int x0 = static_cast<int>(static_cast<long long>(ox) * image.width / new_width);
            const int x1 = static_cast<int>(static_cast<long long>(ox + 1) * image.width / new_width);
            std::array<std::uint64_t, 3> sum{};
            for (int y = y0; y < y1; ++y)
                for (int x = x0; x < x1; ++x)
                    for (int ch = 0; ch < 3; ++ch)
                        sum[ch] += image.at(x, y)[ch];
            const std::uint64_t count = static_cast<std::uint64_t>(y1 - y0) * (x1 - x0);
            for (int ch = 0; ch < 3; ++ch)
                out.at(ox, oy)[ch] = static_cast<std::uint8_t>((2 * sum[ch] + count) / (2 * count));
        }
    }
    return out;
}

}  // namespace pccseg
