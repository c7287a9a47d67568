#include "chartforge/wire.hpp"

#include "chartforge/error.hpp"
#include "chartforge/png_io.hpp"

#include <openssl/evp.h>

namespace chartforge::wire {

std::string base64_encode(std::span<const std::uint8_t> bytes) {
    std::string out(4 * ((bytes.size() + 2) / 3), '\0');
    const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), bytes.data(),
                                  static_cast<int>(bytes.size()));
    out.resize(static_cast<std::size_t>(n));
    return out;
}

std::vector<std::uint8_t> base64_decode(std::string_view text) {
    std::string clean;
    clean.reserve(text.size());
    for (char c : text)
        if (c != '\n' && c != '\r' && c != ' ') clean.push_back(c);
    if (clean.size() % 4 != 0) throw Error(ErrorCode::MalformedInput, "base64 length is not a multiple of 4");
    std::vector<std::uint8_t> out(3 * clean.size() / 4);
    const int n = EVP_DecodeBlock(out.data(), reinterpret_cast<const unsigned char*>(clean.data()),
                                  static_cast<int>(clean.size()));
    if (n < 0) throw Error(ErrorCode::MalformedInput, "invalid base64");
    // EVP_DecodeBlock keeps the zero bytes produced by '=' padding.
    std::size_t len = static_cast<std::size_t>(n);
    if (!clean.empty() && clean.back() == '=') --len;
    if (clean.size() >= 2 && clean[clean.size() - 2] == '=') --len;
    out.resize(len);
    return out;
}

std::string image_to_base64(const RasterImage& image) { return base64_encode(encode_png(image)); }

RasterImage image_from_base64(std::string_view text) { return decode_png(base64_decode(text)); }

json grid_to_json(const attention::AttentionGrid& grid) {
    return json{{"n", grid.side}, {"values", grid.values}};
}

attention::AttentionGrid grid_from_json(const json& j, std::string token) {
    try {
        return attention::AttentionGrid(j.at("n").get<int>(), j.at("values").get<std::vector<double>>(),
                                        std::move(token));
    } catch (const json::exception& e) {
        throw Error(ErrorCode::MalformedInput, std::string("attention grid: ") + e.what());
    }
}

json request_to_json(const gen::GenRequest& r) {
    json j{{"prompt_object", r.prompt_object},
           {"prompt_description", r.prompt_description},
           {"mode", gen::to_string(r.mode)},
           {"seed", r.seed},
           {"width", r.size.width},
           {"height", r.size.height}};
    j["init_image"] = r.init_image ? json(image_to_base64(*r.init_image)) : json(nullptr);
    j["strength"] = r.strength ? json(*r.strength) : json(nullptr);
    return j;
}

gen::GenRequest request_from_json(const json& j) {
    try {
        gen::GenRequest r;
        r.prompt_object = j.at("prompt_object").get<std::string>();
        r.prompt_description = j.value("prompt_description", std::string{});
        r.mode = gen::gen_mode_from_string(j.value("mode", std::string{"txt2img"}));
        r.seed = j.value("seed", std::uint64_t{0});
        r.size = {j.value("width", 512), j.value("height", 512)};
        if (j.contains("init_image") && !j["init_image"].is_null())
            r.init_image = image_from_base64(j["init_image"].get<std::string>());
        if (j.contains("strength") && !j["strength"].is_null()) r.strength = j["strength"].get<double>();
        return r;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidRequest, e.what());
    }
}

json result_to_json(const gen::GenResult& r) {
    json att = json::object();
    for (const auto& [token, grid] : r.attention) att[token] = grid_to_json(grid);
    return json{{"image", image_to_base64(r.image)}, {"attention", att}, {"backend_id", r.backend_id}, {"seed", r.seed}};
}

gen::GenResult result_from_json(const json& j) {
    try {
        gen::GenResult r;
        r.image = image_from_base64(j.at("image").get<std::string>());
        if (j.contains("attention"))
            for (const auto& [token, grid] : j.at("attention").items())
                r.attention.emplace(token, grid_from_json(grid, token));
        r.backend_id = j.value("backend_id", std::string{});
        r.seed = j.value("seed", std::uint64_t{0});
        return r;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::MalformedInput, std::string("backend response: ") + e.what());
    }
}

} // namespace chartforge::wire
