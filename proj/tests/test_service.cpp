#include <doctest.h>

#include <json.hpp>

#include <chrono>
#include <future>
#include <thread>

#include "pccseg/base64.hpp"
#include "pccseg/png_codec.hpp"
#include "pccseg/service.hpp"
#include "support.hpp"

// After Eigen: resolv.h defines a `_res` macro that collides with Eigen parameter names.
#include <httplib.h>

using namespace pccseg;
using namespace pccseg::testing;
using nlohmann::json;

namespace {

json segment_request(int w, int h, std::uint64_t seed = 7) {
    return json{
        {"image_png_b64", base64::encode(encode_png(two_region_image(w, h)))},
        {"scribbles_png_b64", base64::encode(png::encode_gray(w, h, two_region_scribbles(w, h)))},
        {"params", {{"engine", {{"rng_seed", seed}}}}},
    };
}

class LiveServer {
public:
    explicit LiveServer(service::Options options = {}) : server_(std::move(options)) {
        port_ = server_.bind_any_port("127.0.0.1");
        REQUIRE(port_ > 0);
        thread_ = std::thread([this] { server_.listen(); });
        for (int i = 0; i < 200 && !server_.running(); ++i)
            std::this_thread::sleep_for(std::chrono::milliseconds(5));
        REQUIRE(server_.running());
    }
    ~LiveServer() {
        server_.stop();
        thread_.join();
    }
    httplib::Client client() const {
        httplib::Client c("127.0.0.1", port_);
        c.set_read_timeout(60, 0);
        return c;
    }

private:
    service::Server server_;
    int port_ = 0;
    std::thread thread_;
};

}  // namespace

TEST_CASE("segment handler returns label and overlay PNGs") {
    const service::Reply reply = service::handle_segment(segment_request(24, 16).dump(), {});
    REQUIRE(reply.status == 200);
    const json& body = reply.body;
    CHECK(body["width"] == 24);
    CHECK(body["height"] == 16);
    CHECK(body["num_classes"] == 2);
    CHECK(body["converged"] == true);
    CHECK(body["sweeps_run"].get<int>() > 0);
    CHECK(body["per_class_counts"]["1"].get<int>() + body["per_class_counts"]["2"].get<int>() == 24 * 16);

    const RgbImage labels = load_image(base64::decode(body["labels_png_b64"].get<std::string>()));
    const RgbImage overlay = load_image(base64::decode(body["overlay_png_b64"].get<std::string>()));
    CHECK(labels.width == 24);
    CHECK(labels.height == 16);
    CHECK(overlay.width == 24);
    CHECK(overlay.height == 16);
    CHECK(labels.at(0, 0) == default_palette()[1]);
    CHECK(labels.at(23, 15) == default_palette()[2]);
}

TEST_CASE("segment handler is deterministic for a fixed seed") {
    const std::string req = segment_request(20, 12, 42).dump();
    const service::Reply a = service::handle_segment(req, {});
    const service::Reply b = service::handle_segment(req, {});
    REQUIRE(a.status == 200);
    CHECK(a.body["labels_png_b64"] == b.body["labels_png_b64"]);
    CHECK(a.body["overlay_png_b64"] == b.body["overlay_png_b64"]);
}

TEST_CASE("segment handler error mapping") {
    SUBCASE("empty scribbles") {
        json req = segment_request(8, 8);
        req["scribbles_png_b64"] = base64::encode(png::encode_gray(8, 8, std::vector<std::uint8_t>(64, 0)));
        const service::Reply r = service::handle_segment(req.dump(), {});
        CHECK(r.status == 422);
        CHECK(r.body["error"] == "no_scribbles");
    }
    SUBCASE("dimension mismatch") {
        json req = segment_request(8, 8);
        req["scribbles_png_b64"] = base64::encode(png::encode_gray(8, 7, std::vector<std::uint8_t>(56, 1)));
        const service::Reply r = service::handle_segment(req.dump(), {});
        CHECK(r.status == 422);
        CHECK(r.body["error"] == "dimension_mismatch");
    }
    SUBCASE("malformed JSON") {
        CHECK(service::handle_segment("{not json", {}).status == 400);
        CHECK(service::handle_segment("[1, 2]", {}).body["error"] == "malformed_json");
    }
    SUBCASE("malformed base64") {
        json req = segment_request(8, 8);
        req["image_png_b64"] = "@@@@";
        const service::Reply r = service::handle_segment(req.dump(), {});
        CHECK(r.status == 400);
        CHECK(r.body["error"] == "malformed_base64");
    }
    SUBCASE("missing field") {
        json req = segment_request(8, 8);
        req.erase("scribbles_png_b64");
        CHECK(service::handle_segment(req.dump(), {}).status == 400);
    }
    SUBCASE("bytes that are not a PNG") {
        json req = segment_request(8, 8);
        req["image_png_b64"] = base64::encode(std::vector<std::uint8_t>{1, 2, 3, 4});
        const service::Reply r = service::handle_segment(req.dump(), {});
        CHECK(r.status == 400);
        CHECK(r.body["error"] == "malformed_png");
    }
    SUBCASE("bad parameters") {
        json req = segment_request(8, 8);
        req["params"] = {{"engine", {{"p_grd", 2.0}}}};
        CHECK(service::handle_segment(req.dump(), {}).status == 422);
        req["params"] = {{"graph", {{"k", "ten"}}}};
        const service::Reply r = service::handle_segment(req.dump(), {});
        CHECK(r.status == 422);
        CHECK(r.body["error"] == "invalid_params");
        req["params"] = {{"overlay_alpha", 3}};
        CHECK(service::handle_segment(req.dump(), {}).status == 422);
    }
    SUBCASE("pixel cap") {
        service::Options options;
        options.pixel_cap = 63;
        const service::Reply r = service::handle_segment(segment_request(8, 8).dump(), options);
        CHECK(r.status == 413);
        CHECK(r.body["error"] == "pixel_cap");
    }
}

TEST_CASE("params override server defaults field by field") {
    SegmentationParams base;
    base.engine.delta_v = 0.2;
    const SegmentationParams p = service::parse_params(
        json{{"graph", {{"mode", "epsilon"}, {"sigma", 0.3}}}, {"engine", {{"p_grd", 0.9}}}}, base);
    CHECK(p.graph.mode == GraphMode::Epsilon);
    CHECK(p.graph.sigma == 0.3);
    CHECK(p.graph.k == 10);
    CHECK(p.engine.p_grd == 0.9);
    CHECK(p.engine.delta_v == 0.2);
    CHECK_THROWS_AS(service::parse_params(json::array(), base), ValidationError);
}

TEST_CASE("live server routes") {
    LiveServer live;
    httplib::Client c = live.client();

    auto health = c.Get("/api/health");
    REQUIRE(health);
    CHECK(health->status == 200);
    const json h = json::parse(health->body);
    CHECK(h["status"] == "ok");
    CHECK(h["version"] == service::kVersion);
    CHECK(health->get_header_value("Access-Control-Allow-Origin") == "*");

    auto head = c.Head("/api/health");
    REQUIRE(head);
    CHECK(head->status == 200);

    auto missing = c.Get("/api/nope");
    REQUIRE(missing);
    CHECK(missing->status == 404);
    CHECK(json::parse(missing->body)["error"] == "not_found");

    auto preflight = c.Options("/api/segment");
    REQUIRE(preflight);
    CHECK(preflight->status == 204);

    auto index = c.Get("/");
    REQUIRE(index);
    CHECK(index->status == 200);
    CHECK(index->body.find("<html") != std::string::npos);

    auto bad = c.Post("/api/segment", "{", "application/json");
    REQUIRE(bad);
    CHECK(bad->status == 400);
    CHECK(json::parse(bad->body)["error"] == "malformed_json");
}

TEST_CASE("live server handles concurrent segment requests") {
    service::Options options;
    options.max_concurrent_runs = 2;
    LiveServer live(options);
    const std::string req = segment_request(30, 20, 5).dump();

    std::vector<std::future<std::pair<int, std::string>>> calls;
    for (int i = 0; i < 4; ++i)
        calls.push_back(std::async(std::launch::async, [&] {
            httplib::Client c = live.client();
            auto res = c.Post("/api/segment", req, "application/json");
            return res ? std::pair{res->status, res->body} : std::pair{-1, std::string()};
        }));
    std::vector<std::string> labels;
    for (auto& f : calls) {
        const auto [status, body] = f.get();
        REQUIRE(status == 200);
        labels.push_back(json::parse(body)["labels_png_b64"].get<std::string>());
    }
    for (const auto& l : labels)
        CHECK(l == labels.front());
}

TEST_CASE("static UI directory is served at the root") {
    const std::string dir = "pccseg_ui_fixture";
    std::filesystem::create_directories(dir);
    {
        std::ofstream(dir + "/index.html") << "<!doctype html><title>fixture</title>";
    }
    service::Options options;
    options.ui_dir = dir;
    {
        LiveServer live(options);
        auto res = live.client().Get("/");
        REQUIRE(res);
        CHECK(res->status == 200);
        CHECK(res->body.find("fixture") != std::string::npos);
    }
    std::filesystem::remove_all(dir);
}
