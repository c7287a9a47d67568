#pragma once

#include "chartforge/attention.hpp"
#include "chartforge/genclient.hpp"
#include "chartforge/raster.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

// JSON encodings shared by the backend protocol and the HTTP service.
namespace chartforge::wire {

using nlohmann::json;

std::string base64_encode(std::span<const std::uint8_t> bytes);
/// Throws MalformedInput on invalid input.
std::vector<std::uint8_t> base64_decode(std::string_view text);

std::string image_to_base64(const RasterImage& image);
RasterImage image_from_base64(std::string_view text);

/// {"n": 16, "values": [... n*n reals, row-major ...]}
json grid_to_json(const attention::AttentionGrid& grid);
attention::AttentionGrid grid_from_json(const json& j, std::string token = {});

json request_to_json(const gen::GenRequest& request);
gen::GenRequest request_from_json(const json& j);

json result_to_json(const gen::GenResult& result);
gen::GenResult result_from_json(const json& j);

} // namespace chartforge::wire
