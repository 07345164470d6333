#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "pccseg/engine.hpp"
#include "pccseg/graph.hpp"
#include "pccseg/image.hpp"

namespace pccseg {

inline constexpr std::size_t kDefaultPixelCap = 1'000'000;

struct SegmentationParams {
    GraphConfig graph;
    double spatial_weight = 1.0;
    EngineConfig engine;
    std::size_t pixel_cap = kDefaultPixelCap;
};

struct SegmentationResult {
    int width = 0;
    int height = 0;
    int num_classes = 0;
    std::vector<ClassId> label_map;
    std::vector<double> confidence;  // max domination per pixel
    int sweeps_run = 0;
    bool converged = false;
    double elapsed_ms = 0.0;
    std::map<int, std::size_t> per_class_counts;
};

using Palette = std::vector<Rgb>;  // indexed by class id; entry 0 is black

// Sixteen distinct colors: black for unclassified, then fifteen classes.
const Palette& default_palette();

SegmentationResult segment(const RgbImage& image, const LabelLayer& scribbles, const SegmentationParams& params,
                           const Engine::StepCallback& trace = {});

RgbImage render_label_map(const SegmentationResult& result, const Palette& palette = default_palette());

RgbImage render_overlay(const RgbImage& image, const SegmentationResult& result, double alpha,
                        const Palette& palette = default_palette());

std::vector<std::uint8_t> encode_png(const RgbImage& image);

// {"sweeps_run", "converged", "elapsed_ms", "per_class_counts"} as one JSON object.
std::string stats_json(const SegmentationResult& result);

}  // namespace pccseg
