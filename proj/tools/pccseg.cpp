// pccseg: scribble-seeded image segmentation by particle competition.
//
//   pccseg segment --image a.png --scribbles s.png --out seg.png [--overlay o.png]
//   pccseg serve --port 8765 [--ui-dir ui/dist]
//   pccseg graph-dump --image a.png --out graph.dot [--downscale 10x7]
//
// Exit codes: 0 success, 1 usage/validation, 2 I/O/runtime.

#include <CLI11.hpp>
#include <json.hpp>

#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <string>
#include <vector>

#include "pccseg/error.hpp"
#include "pccseg/graph.hpp"
#include "pccseg/log.hpp"
#include "pccseg/pipeline.hpp"
#include "pccseg/service.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitIo = 2;

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<std::uint8_t> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot read '" + path + "'");
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::string& path, const std::vector<std::uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot write '" + path + "'");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out)
        throw IoError("failed writing '" + path + "'");
}

struct GraphFlags {
    std::string mode = "knn";
    int k = 10;
    double sigma = 0.1;
    double spatial_weight = 1.0;

    void attach(CLI::App* cmd) {
        cmd->add_option("--graph", mode, "Graph rule")->check(CLI::IsMember({"knn", "epsilon"}))->capture_default_str();
        cmd->add_option("--k", k, "Neighbors per node (knn)")->check(CLI::PositiveNumber)->capture_default_str();
        cmd->add_option("--sigma", sigma, "Distance threshold (epsilon)")->capture_default_str();
        cmd->add_option("--spatial-weight", spatial_weight, "Scale of x/y features relative to color")
            ->check(CLI::NonNegativeNumber)
            ->capture_default_str();
    }

    pccseg::GraphConfig config() const { return {pccseg::parse_graph_mode(mode), k, sigma}; }
};

struct SegmentFlags {
    std::string image, scribbles, out, overlay, trace, stats;
    double alpha = 0.5;
    GraphFlags graph;
    pccseg::EngineConfig engine;
};

const char* rule_name(pccseg::MoveRule rule) { return rule == pccseg::MoveRule::Greedy ? "greedy" : "random"; }

int run_segment(const SegmentFlags& f) {
    const pccseg::RgbImage image = pccseg::load_image(read_file(f.image));
    const pccseg::LabelLayer scribbles = pccseg::load_label_layer(read_file(f.scribbles), image);

    pccseg::SegmentationParams params;
    params.graph = f.graph.config();
    params.spatial_weight = f.graph.spatial_weight;
    params.engine = f.engine;

    std::optional<std::ofstream> trace_out;
    pccseg::Engine::StepCallback trace;
    if (!f.trace.empty()) {
        trace_out.emplace(f.trace);
        if (!*trace_out)
            throw IoError("cannot write '" + f.trace + "'");
        trace = [&out = *trace_out](const pccseg::StepRecord& r) {
            out << nlohmann::json{{"sweep", r.sweep},       {"particle", r.particle}, {"rule", rule_name(r.rule)},
                                  {"target", r.target},     {"accepted", r.accepted}, {"strength", r.strength}}
                       .dump()
                << '\n';
        };
    }

    pccseg::log::info("segmenting " + std::to_string(image.width) + "x" + std::to_string(image.height) + " image, " +
                      std::to_string(scribbles.labeled_count()) + " seeds, " +
                      std::to_string(scribbles.num_classes()) + " classes");
    const pccseg::SegmentationResult result = pccseg::segment(image, scribbles, params, trace);

    write_file(f.out, pccseg::encode_png(pccseg::render_label_map(result)));
    if (!f.overlay.empty())
        write_file(f.overlay, pccseg::encode_png(pccseg::render_overlay(image, result, f.alpha)));
    const std::string stats = pccseg::stats_json(result);
    if (!f.stats.empty())
        write_file(f.stats, std::vector<std::uint8_t>(stats.begin(), stats.end()));
    std::cout << stats << std::endl;
    return kExitOk;
}

struct DumpFlags {
    std::string image, out, downscale;
    GraphFlags graph;
};

int run_graph_dump(const DumpFlags& f) {
    pccseg::RgbImage image = pccseg::load_image(read_file(f.image));
    if (!f.downscale.empty()) {
        int w = 0, h = 0;
        char sep = 0;
        if (std::sscanf(f.downscale.c_str(), "%d%c%d", &w, &sep, &h) != 3 || (sep != 'x' && sep != 'X'))
            throw pccseg::ValidationError("invalid_params", "--downscale expects WIDTHxHEIGHT");
        image = pccseg::downscale(image, w, h);
    }
    const auto features = pccseg::extract_features<double>(image, f.graph.spatial_weight);
    const pccseg::GraphConfig config = f.graph.config();
    // A single pixel has no neighbors to find; emit the lone node.
    const pccseg::PixelGraph graph = image.size() == 1
                                         ? pccseg::PixelGraph::from_edges(1, {})
                                         : pccseg::build_graph(features, config);
    std::ofstream out(f.out);
    if (!out)
        throw IoError("cannot write '" + f.out + "'");
    pccseg::write_dot(out, graph, image.width);
    if (!out)
        throw IoError("failed writing '" + f.out + "'");
    std::cout << nlohmann::json{{"nodes", graph.size()}, {"edges", graph.edge_count()}}.dump() << std::endl;
    return kExitOk;
}

struct ServeFlags {
    std::string host = "127.0.0.1";
    int port = 8765;
    std::string ui_dir;
    std::size_t workers = 0;
};

pccseg::service::Server* g_server = nullptr;

void on_signal(int) {
    if (g_server)
        g_server->stop();
}

int run_serve(const ServeFlags& f) {
    pccseg::service::Options options;
    options.ui_dir = f.ui_dir;
    options.max_concurrent_runs = f.workers;
    pccseg::service::Server server(options);
    if (!server.bind(f.host, f.port)) {
        std::cerr << "pccseg: cannot bind " << f.host << ":" << f.port << '\n';
        return kExitIo;
    }
    g_server = &server;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    pccseg::log::info("listening on http://" + f.host + ":" + std::to_string(f.port));
    server.listen();
    g_server = nullptr;
    return kExitOk;
}

template <typename Fn>
int guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const pccseg::ValidationError& ex) {
        std::cerr << "pccseg: " << ex.what() << " [" << ex.code() << "]\n";
        return kExitUsage;
    } catch (const IoError& ex) {
        std::cerr << "pccseg: " << ex.what() << '\n';
        return kExitIo;
    } catch (const pccseg::DecodeError& ex) {
        std::cerr << "pccseg: " << ex.what() << '\n';
        return kExitIo;
    } catch (const std::exception& ex) {
        std::cerr << "pccseg: " << ex.what() << '\n';
        return kExitIo;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Scribble-seeded image segmentation by particle competition and cooperation"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(pccseg::service::kVersion));

    SegmentFlags seg;
    auto* segment = app.add_subcommand("segment", "Segment one image from a scribble layer");
    segment->add_option("--image", seg.image, "RGB input PNG")->required();
    segment->add_option("--scribbles", seg.scribbles, "8-bit grayscale scribble PNG (0 = unlabeled)")->required();
    segment->add_option("--out", seg.out, "Label-map PNG to write")->required();
    segment->add_option("--overlay", seg.overlay, "Overlay PNG to write");
    segment->add_option("--alpha", seg.alpha, "Overlay opacity")->check(CLI::Range(0.0, 1.0))->capture_default_str();
    segment->add_option("--stats", seg.stats, "JSON stats sidecar to write");
    segment->add_option("--trace", seg.trace, "NDJSON per-step trace to write");
    seg.graph.attach(segment);
    segment->add_option("--pgrd", seg.engine.p_grd, "Greedy-rule probability")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    segment->add_option("--delta-v", seg.engine.delta_v, "Domination step")->capture_default_str();
    segment->add_option("--max-sweeps", seg.engine.max_sweeps, "Sweep cap")->capture_default_str();
    segment->add_option("--check-interval", seg.engine.check_interval, "Sweeps between convergence checks")
        ->capture_default_str();
    segment->add_option("--epsilon-conv", seg.engine.epsilon_conv, "Convergence threshold")->capture_default_str();
    segment->add_option("--patience", seg.engine.patience, "Stable checks before stopping")->capture_default_str();
    segment->add_option("--distance-exponent", seg.engine.distance_exponent, "Greedy distance falloff exponent")
        ->capture_default_str();
    segment->add_option("--seed", seg.engine.rng_seed, "Random seed")->capture_default_str();

    ServeFlags serve_flags;
    auto* serve = app.add_subcommand("serve", "Run the HTTP API and UI");
    serve->add_option("--port", serve_flags.port, "TCP port")->check(CLI::Range(1, 65535))->capture_default_str();
    serve->add_option("--host", serve_flags.host, "Bind address")->capture_default_str();
    serve->add_option("--ui-dir", serve_flags.ui_dir, "Directory of built UI assets served at /");
    serve->add_option("--workers", serve_flags.workers, "Concurrent segmentation runs (0 = cores)")
        ->capture_default_str();

    DumpFlags dump;
    auto* graph_dump = app.add_subcommand("graph-dump", "Write the pixel graph as Graphviz DOT");
    graph_dump->add_option("--image", dump.image, "RGB input PNG")->required();
    graph_dump->add_option("--out", dump.out, "DOT file to write")->required();
    graph_dump->add_option("--downscale", dump.downscale, "Box-downscale first, e.g. 10x7");
    dump.graph.attach(graph_dump);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    if (*segment)
        return guarded([&] { return run_segment(seg); });
    if (*serve)
        return guarded([&] { return run_serve(serve_flags); });
    return guarded([&] { return run_graph_dump(dump); });
}
