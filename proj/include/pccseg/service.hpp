#pragma once

#include <json.hpp>

#include <cstddef>
#include <memory>
#include <semaphore>
#include <string>
#include <string_view>

#include "pccseg/pipeline.hpp"

namespace httplib {
class Server;
}

namespace pccseg::service {

inline constexpr const char* kVersion = PCCSEG_VERSION;

struct Options {
    std::size_t max_concurrent_runs = 0;  // 0 = number of processor cores
    std::string ui_dir;                   // static assets served at "/"
    std::size_t pixel_cap = kDefaultPixelCap;
    SegmentationParams defaults;
};

struct Reply {
    int status = 200;
    nlohmann::json body;
};

// Params object of a segment request; absent fields keep `base` values.
SegmentationParams parse_params(const nlohmann::json& params, SegmentationParams base = {});

// JSON in, JSON out; the transport-independent half of POST /api/segment.
Reply handle_segment(std::string_view request_body, const Options& options);

Reply error_reply(int status, std::string code, std::string message);

class Server {
public:
    explicit Server(Options options);
    ~Server();
    Server(const Server&) = delete;
    Server& operator=(const Server&) = delete;

    // Returns false if the address cannot be bound.
    bool bind(const std::string& host, int port);
    int bind_any_port(const std::string& host);
    // Blocks until stop().
    bool listen();
    void stop();
    bool running() const;

private:
    Options options_;
    std::unique_ptr<httplib::Server> http_;
    std::unique_ptr<std::counting_semaphore<>> slots_;
};

}  // namespace pccseg::service
