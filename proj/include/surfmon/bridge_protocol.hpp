#pragma once

// Wire format shared with the external segmentation bridge. One JSON object
// per message; over stdio each message is a single line.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "surfmon/segmenter.hpp"

namespace surfmon::bridge {

struct Request {
  std::string id;
  int width = 0;
  int height = 0;
  int channels = 1;
  std::vector<std::uint8_t> pixels;
  nlohmann::json backend_options = nlohmann::json::object();

  friend bool operator==(const Request&, const Request&) = default;
};

struct Response {
  std::string id;
  std::optional<std::vector<MaskRecord>> masks;
  std::optional<std::string> error;
  // Optional provenance (e.g. checkpoint path); carried, never interpreted.
  std::optional<nlohmann::json> metadata;

  friend bool operator==(const Response&, const Response&) = default;
};

std::string base64_encode(std::span<const std::uint8_t> data);
// Throws InvalidArgument on characters outside the standard alphabet or bad padding.
std::vector<std::uint8_t> base64_decode(std::string_view text);

nlohmann::json to_json(const Request& request);
// Throws InvalidArgument; a pixel buffer of the wrong size reports "length".
Request request_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Response& response);
// Throws MalformedBackendReply unless exactly one of masks/error is present
// and every field has the right type. Mask geometry is not checked here.
Response response_from_json(const nlohmann::json& j);

}  // namespace surfmon::bridge
