#include "chartforge/error.hpp"
#include "chartforge/genclient.hpp"
#include "chartforge/wire.hpp"

#include <httplib.h>

namespace chartforge::gen {

namespace {

struct Endpoint {
    std::string origin; // scheme://host[:port]
    std::string prefix; // path without trailing slash
};

Endpoint split_endpoint(const std::string& url) {
    const auto scheme = url.find("://");
    const auto path_start = url.find('/', scheme == std::string::npos ? 0 : scheme + 3);
    Endpoint e;
    e.origin = path_start == std::string::npos ? url : url.substr(0, path_start);
    e.prefix = path_start == std::string::npos ? std::string{} : url.substr(path_start);
    while (!e.prefix.empty() && e.prefix.back() == '/') e.prefix.pop_back();
    return e;
}

wire::json post_json(const BackendDescriptor& d, const std::string& path, const wire::json& body) {
    const Endpoint ep = split_endpoint(d.endpoint);
    httplib::Client client(ep.origin);
    if (!client.is_valid()) throw Error(ErrorCode::BackendUnreachable, "invalid endpoint '" + d.endpoint + "'");
    const auto sec = std::chrono::duration_cast<std::chrono::seconds>(d.timeout);
    const auto usec = std::chrono::duration_cast<std::chrono::microseconds>(d.timeout - sec);
    client.set_connection_timeout(sec.count(), usec.count());
    client.set_read_timeout(sec.count(), usec.count());
    client.set_write_timeout(sec.count(), usec.count());

    auto res = client.Post(ep.prefix + path, body.dump(), "application/json");
    if (!res) {
        const auto err = res.error();
        if (err == httplib::Error::Read || err == httplib::Error::Write)
            throw Error(ErrorCode::BackendTimeout, d.endpoint + path + ": " + httplib::to_string(err));
        throw Error(ErrorCode::BackendUnreachable, d.endpoint + path + ": " + httplib::to_string(err));
    }
    if (res->status == 408 || res->status == 504)
        throw Error(ErrorCode::BackendTimeout, d.endpoint + path + " answered " + std::to_string(res->status));
    if (res->status >= 400 && res->status < 500)
        throw Error(ErrorCode::InvalidRequest, d.endpoint + path + " rejected the request: " + res->body);
    if (res->status != 200)
        throw Error(ErrorCode::BackendUnreachable, d.endpoint + path + " answered " + std::to_string(res->status));
    try {
        return wire::json::parse(res->body);
    } catch (const wire::json::exception& e) {
        throw Error(ErrorCode::MalformedInput, std::string("backend response: ") + e.what());
    }
}

} // namespace

HttpBackend::HttpBackend(BackendDescriptor descriptor) : descriptor_(std::move(descriptor)) { descriptor_.validate(); }

GenResult HttpBackend::run(const GenRequest& request) {
    GenResult result = wire::result_from_json(post_json(descriptor_, "/generate", wire::request_to_json(request)));
    if (result.backend_id.empty()) result.backend_id = descriptor_.endpoint;
    // Backends may key the grid by the raw object text.
    const std::string token = object_token(request.prompt_object);
    if (!result.attention.contains(token))
        if (auto it = result.attention.find(request.prompt_object); it != result.attention.end())
            result.attention.emplace(token, it->second);
    return result;
}

std::vector<semantics::Keyword> HttpKeywordProvider::score_terms(std::string_view title) const {
    wire::json res;
    try {
        res = post_json(descriptor_, "/keywords", wire::json{{"title", title}});
    } catch (const Error& e) {
        throw Error(ErrorCode::ProviderUnavailable, e.what());
    }
    std::vector<semantics::Keyword> out;
    try {
        for (const auto& k : res.at("keywords"))
            out.push_back({k.at("term").get<std::string>(), k.at("score").get<double>()});
    } catch (const wire::json::exception& e) {
        throw Error(ErrorCode::ProviderUnavailable, std::string("keyword response: ") + e.what());
    }
    return out;
}

std::vector<std::uint8_t> HttpSegmentationProvider::alpha_matte(const RasterImage& image) const {
    try {
        const auto res = post_json(descriptor_, "/segment", wire::json{{"image", wire::image_to_base64(image)}});
        const RasterImage matte = wire::image_from_base64(res.at("alpha").get<std::string>());
        if (matte.size() != image.size()) throw Error(ErrorCode::ProviderUnavailable, "matte size differs");
        std::vector<std::uint8_t> out(static_cast<std::size_t>(image.width()) * image.height());
        // The matte is a PNG; its alpha channel carries the mask.
        for (int y = 0; y < image.height(); ++y)
            for (int x = 0; x < image.width(); ++x) out[static_cast<std::size_t>(y) * image.width() + x] = matte.alpha(x, y);
        return out;
    } catch (const Error& e) {
        if (e.code() == ErrorCode::ProviderUnavailable) throw;
        throw Error(ErrorCode::ProviderUnavailable, e.what());
    } catch (const wire::json::exception& e) {
        throw Error(ErrorCode::ProviderUnavailable, std::string("segment response: ") + e.what());
    }
}

} // namespace chartforge::gen
