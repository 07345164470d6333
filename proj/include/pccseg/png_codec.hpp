#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace pccseg::png {

// 8-bit samples after libpng normalization; `channels` is 1 or 3.
struct Raster {
    int width = 0;
    int height = 0;
    int channels = 0;
    bool paletted = false;  // samples are palette indices
    std::vector<std::uint8_t> samples;
};

// Any PNG as 8-bit RGB. Alpha is dropped, gray is replicated to all channels.
Raster decode_rgb(std::span<const std::uint8_t> bytes);

// Gray/palette PNGs keep one sample per pixel (palette images yield their
// indices); RGB inputs keep three channels for the caller to inspect.
Raster decode_samples(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> encode_rgb(int width, int height, std::span<const std::uint8_t> rgb);
std::vector<std::uint8_t> encode_gray(int width, int height, std::span<const std::uint8_t> gray);

}  // namespace pccseg::png
