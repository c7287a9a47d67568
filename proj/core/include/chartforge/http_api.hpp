#pragma once

#include "chartforge/error.hpp"
#include "chartforge/studio.hpp"

#include <memory>
#include <string>

namespace chartforge::server {

/// HTTP status used for each error code.
int http_status(ErrorCode code);

/// JSON service API over a Studio:
///   POST /projects                      GET /projects/{id}
///   GET  /projects/{id}/semantics       POST /projects/{id}/generate
///   POST /projects/{id}/replicate       POST /projects/{id}/refine
///   POST /projects/{id}/evaluate        POST /projects/{id}/export
///   PUT  /projects/{id}/layers          POST /projects/{id}/gallery/{entry}
///   GET  /assets/{id}
class HttpService {
  public:
    explicit HttpService(Studio& studio);
    ~HttpService();
    HttpService(const HttpService&) = delete;
    HttpService& operator=(const HttpService&) = delete;

    /// Binds and serves until stop(); returns false if binding failed.
    bool listen(const std::string& host, int port);
    /// Binds to a free port and returns it (serve with listen_after_bind).
    int bind_any_port(const std::string& host);
    bool listen_after_bind();
    void stop();
    void wait_until_ready() const;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace chartforge::server
