#include "pccseg/pipeline.hpp"

#include <chrono>
#include <cmath>

#include <json.hpp>

#include "pccseg/png_codec.hpp"

namespace pccseg {

const Palette& default_palette() {
    static const Palette palette = {
        {0, 0, 0},       {230, 25, 75},   {60, 180, 75},   {0, 130, 200},
        {255, 225, 25},  {245, 130, 48},  {145, 30, 180},  {70, 240, 240},
        {240, 50, 230},  {210, 245, 60},  {250, 190, 212}, {0, 128, 128},
        {170, 110, 40},  {128, 0, 0},     {0, 0, 128},     {255, 255, 255},
    };
    return palette;
}

SegmentationResult segment(const RgbImage& image, const LabelLayer& scribbles, const SegmentationParams& params,
                           const Engine::StepCallback& trace) {
    const auto start = std::chrono::steady_clock::now();
    validate(image);
    if (image.size() > params.pixel_cap)
        throw ValidationError("pixel_cap", "image has " + std::to_string(image.size()) + " pixels, limit is " +
                                               std::to_string(params.pixel_cap));
    const Dataset<double> data = make_dataset(image, scribbles, params.spatial_weight);
    if (scribbles.labeled_count() == 0)
        throw ValidationError("no_scribbles", "scribble layer contains no labeled pixels");
    params.engine.validate();

    const PixelGraph graph = build_graph(data.features, params.graph);
    Engine engine(graph, data.labels, params.engine, scribbles.num_classes());
    if (trace)
        engine.set_step_callback(trace);
    const RunStats stats = engine.run();

    SegmentationResult result;
    result.width = image.width;
    result.height = image.height;
    result.num_classes = engine.num_classes();
    result.label_map = engine.read_labels();
    result.confidence = engine.confidence();
    result.sweeps_run = stats.sweeps;
    result.converged = stats.converged;
    for (ClassId c : result.label_map)
        ++result.per_class_counts[c];
    result.elapsed_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return result;
}

namespace {

const Rgb& palette_entry(const Palette& palette, ClassId c) {
    if (c >= palette.size())
        throw ValidationError("invalid_palette", "no palette color for class " + std::to_string(c));
    return palette[c];
}

}  // namespace

RgbImage render_label_map(const SegmentationResult& result, const Palette& palette) {
    RgbImage out(result.width, result.height);
    for (std::size_t i = 0; i < result.label_map.size(); ++i)
        out.pixels[i] = result.label_map[i] == 0 ? Rgb{0, 0, 0} : palette_entry(palette, result.label_map[i]);
    return out;
}

RgbImage render_overlay(const RgbImage& image, const SegmentationResult& result, double alpha,
                        const Palette& palette) {
    if (!(alpha >= 0.0 && alpha <= 1.0))
        throw ValidationError("invalid_params", "alpha must lie in [0, 1]");
    if (image.width != result.width || image.height != result.height)
        throw ValidationError("dimension_mismatch", "overlay image and result differ in size");
    const RgbImage labels = render_label_map(result, palette);
    RgbImage out(image.width, image.height);
    for (std::size_t i = 0; i < out.pixels.size(); ++i)
        for (int ch = 0; ch < 3; ++ch) {
            const double v = (1.0 - alpha) * image.pixels[i][ch] + alpha * labels.pixels[i][ch];
            out.pixels[i][ch] = static_cast<std::uint8_t>(std::floor(v + 0.5));
        }
    return out;
}

std::vector<std::uint8_t> encode_png(const RgbImage& image) {
    validate(image);
    std::vector<std::uint8_t> rgb;
    rgb.reserve(image.size() * 3);
    for (const Rgb& px : image.pixels)
        rgb.insert(rgb.end(), px.begin(), px.end());
    return png::encode_rgb(image.width, image.height, rgb);
}

std::string stats_json(const SegmentationResult& result) {
    nlohmann::json counts = nlohmann::json::object();
    for (const auto& [cls, count] : result.per_class_counts)
        counts[std::to_string(cls)] = count;
    const nlohmann::json doc = {
        {"sweeps_run", result.sweeps_run},
        {"converged", result.converged},
        {"elapsed_ms", static_cast<std::int64_t>(std::llround(result.elapsed_ms))},
        {"per_class_counts", counts},
    };
    return doc.dump();
}

}  // namespace pccseg
