#include "pccseg/service.hpp"

#include <httplib.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <thread>

#include "pccseg/base64.hpp"
#include "pccseg/error.hpp"
#include "pccseg/log.hpp"

namespace pccseg::service {

using nlohmann::json;

namespace {

template <typename T>
void read_field(const json& obj, const char* key, T& out) {
    if (auto it = obj.find(key); it != obj.end() && !it->is_null())
        out = it->get<T>();
}

std::vector<std::uint8_t> decode_field(const json& body, const char* key) {
    auto it = body.find(key);
    if (it == body.end() || !it->is_string())
        throw DecodeError(std::string("missing string field '") + key + "'");
    return base64::decode(it->get_ref<const std::string&>());
}

constexpr const char* kFallbackIndex = R"(<!doctype html>
<html><head><meta charset="utf-8"><title>pccseg</title></head>
<body><h1>pccseg service</h1>
<p>No UI bundle is installed. Start the server with <code>--ui-dir</code> pointing at the built scribble UI,
or call <code>POST /api/segment</code> directly.</p></body></html>
)";

}  // namespace

SegmentationParams parse_params(const json& params, SegmentationParams base) {
    if (params.is_null())
        return base;
    if (!params.is_object())
        throw ValidationError("invalid_params", "params must be an object");
    try {
        if (auto g = params.find("graph"); g != params.end() && !g->is_null()) {
            if (!g->is_object())
                throw ValidationError("invalid_params", "params.graph must be an object");
            if (auto m = g->find("mode"); m != g->end())
                base.graph.mode = parse_graph_mode(m->get<std::string>());
            read_field(*g, "k", base.graph.k);
            read_field(*g, "sigma", base.graph.sigma);
        }
        read_field(params, "spatial_weight", base.spatial_weight);
        if (auto e = params.find("engine"); e != params.end() && !e->is_null()) {
            if (!e->is_object())
                throw ValidationError("invalid_params", "params.engine must be an object");
            EngineConfig& cfg = base.engine;
            read_field(*e, "p_grd", cfg.p_grd);
            read_field(*e, "delta_v", cfg.delta_v);
            read_field(*e, "max_sweeps", cfg.max_sweeps);
            read_field(*e, "check_interval", cfg.check_interval);
            read_field(*e, "epsilon_conv", cfg.epsilon_conv);
            read_field(*e, "patience", cfg.patience);
            read_field(*e, "rng_seed", cfg.rng_seed);
            read_field(*e, "distance_exponent", cfg.distance_exponent);
        }
    } catch (const json::exception& ex) {
        throw ValidationError("invalid_params", std::string("bad parameter type: ") + ex.what());
    }
    return base;
}

Reply error_reply(int status, std::string code, std::string message) {
    return {status, json{{"error", std::move(code)}, {"message", std::move(message)}}};
}

Reply handle_segment(std::string_view request_body, const Options& options) {
    json body;
    try {
        body = json::parse(request_body);
    } catch (const json::parse_error& ex) {
        return error_reply(400, "malformed_json", ex.what());
    }
    if (!body.is_object())
        return error_reply(400, "malformed_json", "request body must be a JSON object");

    try {
        std::vector<std::uint8_t> image_png, scribble_png;
        try {
            image_png = decode_field(body, "image_png_b64");
            scribble_png = decode_field(body, "scribbles_png_b64");
        } catch (const DecodeError& ex) {
            return error_reply(400, "malformed_base64", ex.what());
        }

        SegmentationParams base = options.defaults;
        base.pixel_cap = options.pixel_cap;
        const json no_params;
        const auto it = body.find("params");
        const SegmentationParams params = parse_params(it == body.end() ? no_params : *it, base);

        double alpha = 0.5;
        if (it != body.end() && it->is_object()) {
            try {
                read_field(*it, "overlay_alpha", alpha);
            } catch (const json::exception& ex) {
                throw ValidationError("invalid_params", ex.what());
            }
        }
        if (!(alpha >= 0.0 && alpha <= 1.0))
            throw ValidationError("invalid_params", "overlay_alpha must lie in [0, 1]");

        RgbImage image;
        LabelLayer scribbles;
        try {
            image = load_image(image_png);
            if (image.size() > params.pixel_cap)
                throw ValidationError("pixel_cap", "image has " + std::to_string(image.size()) +
                                                       " pixels, limit is " + std::to_string(params.pixel_cap));
            scribbles = load_label_layer(scribble_png, image);
        } catch (const DecodeError& ex) {
            return error_reply(400, "malformed_png", ex.what());
        }

        const SegmentationResult result = segment(image, scribbles, params);
        json counts = json::object();
        for (const auto& [cls, count] : result.per_class_counts)
            counts[std::to_string(cls)] = count;
        return {200, json{
                         {"labels_png_b64", base64::encode(encode_png(render_label_map(result)))},
                         {"overlay_png_b64", base64::encode(encode_png(render_overlay(image, result, alpha)))},
                         {"width", result.width},
                         {"height", result.height},
                         {"num_classes", result.num_classes},
                         {"sweeps_run", result.sweeps_run},
                         {"converged", result.converged},
                         {"elapsed_ms", static_cast<std::int64_t>(std::llround(result.elapsed_ms))},
                         {"per_class_counts", counts},
                     }};
    } catch (const ValidationError& ex) {
        const int status = ex.code() == "pixel_cap" ? 413 : 422;
        return error_reply(status, ex.code(), ex.what());
    } catch (const std::exception& ex) {
        return error_reply(500, "internal", ex.what());
    }
}

Server::Server(Options options) : options_(std::move(options)), http_(std::make_unique<httplib::Server>()) {
    std::size_t slots = options_.max_concurrent_runs;
    if (slots == 0)
        slots = std::max(1u, std::thread::hardware_concurrency());
    slots_ = std::make_unique<std::counting_semaphore<>>(static_cast<std::ptrdiff_t>(slots));

    // Plain SO_REUSEADDR: with SO_REUSEPORT a second server would silently share the port.
    http_->set_socket_options([](socket_t sock) {
        int yes = 1;
        setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
    });
    http_->set_payload_max_length(256u << 20);
    http_->set_default_headers({
        {"Access-Control-Allow-Origin", "*"},
        {"Access-Control-Allow-Methods", "GET, POST, HEAD, OPTIONS"},
        {"Access-Control-Allow-Headers", "Content-Type"},
    });

    auto send = [](httplib::Response& res, const Reply& reply) {
        res.status = reply.status;
        res.set_content(reply.body.dump(), "application/json");
    };

    http_->Get("/api/health", [send](const httplib::Request&, httplib::Response& res) {
        send(res, {200, json{{"status", "ok"}, {"version", kVersion}}});
    });

    http_->Post("/api/segment", [this, send](const httplib::Request& req, httplib::Response& res) {
        slots_->acquire();
        Reply reply;
        try {
            reply = handle_segment(req.body, options_);
        } catch (...) {
            slots_->release();
            throw;
        }
        slots_->release();
        send(res, reply);
    });

    http_->Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

    bool mounted = false;
    if (!options_.ui_dir.empty()) {
        std::error_code ec;
        if (std::filesystem::is_directory(options_.ui_dir, ec))
            mounted = http_->set_mount_point("/", options_.ui_dir);
        if (!mounted)
            log::warn("UI directory '" + options_.ui_dir + "' not found; serving placeholder page");
    }
    if (!mounted) {
        http_->Get("/", [](const httplib::Request&, httplib::Response& res) {
            res.set_content(kFallbackIndex, "text/html; charset=utf-8");
        });
    }

    http_->set_error_handler([send](const httplib::Request& req, httplib::Response& res) {
        if (!res.body.empty())
            return;
        if (res.status == 404)
            send(res, error_reply(404, "not_found", "no route for " + req.method + " " + req.path));
        else
            send(res, error_reply(res.status, "http_error", "request failed"));
    });

    http_->set_exception_handler([send](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
        std::string what = "unknown error";
        try {
            std::rethrow_exception(ep);
        } catch (const std::exception& ex) {
            what = ex.what();
        } catch (...) {
        }
        send(res, error_reply(500, "internal", what));
    });

    http_->set_logger([](const httplib::Request& req, const httplib::Response& res) {
        log::info(req.method + " " + req.path + " " + std::to_string(res.status) + " " +
                  std::to_string(res.body.size()) + "B");
    });
}

Server::~Server() { stop(); }

bool Server::bind(const std::string& host, int port) { return http_->bind_to_port(host, port); }

int Server::bind_any_port(const std::string& host) { return http_->bind_to_any_port(host); }

bool Server::listen() { return http_->listen_after_bind(); }

void Server::stop() {
    if (http_)
        http_->stop();
}

bool Server::running() const { return http_->is_running(); }

}  // namespace pccseg::service
