#include "surfmon/bridge_protocol.hpp"

#include <array>

#include "surfmon/error.hpp"

namespace surfmon::bridge {
namespace {

constexpr char kAlphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

constexpr std::array<std::int8_t, 256> make_decode_table() {
  std::array<std::int8_t, 256> t{};
  for (auto& v : t) v = -1;
  for (int i = 0; i < 64; ++i) t[static_cast<unsigned char>(kAlphabet[i])] = static_cast<std::int8_t>(i);
  return t;
}

constexpr auto kDecode = make_decode_table();

}  // namespace

std::string base64_encode(std::span<const std::uint8_t> data) {
  std::string out;
  out.reserve((data.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 3 <= data.size(); i += 3) {
    const std::uint32_t v = (data[i] << 16) | (data[i + 1] << 8) | data[i + 2];
    out.push_back(kAlphabet[(v >> 18) & 63]);
    out.push_back(kAlphabet[(v >> 12) & 63]);
    out.push_back(kAlphabet[(v >> 6) & 63]);
    out.push_back(kAlphabet[v & 63]);
  }
  const std::size_t rest = data.size() - i;
  if (rest == 1) {
    const std::uint32_t v = data[i] << 16;
    out.push_back(kAlphabet[(v >> 18) & 63]);
    out.push_back(kAlphabet[(v >> 12) & 63]);
    out.append("==");
  } else if (rest == 2) {
    const std::uint32_t v = (data[i] << 16) | (data[i + 1] << 8);
    out.push_back(kAlphabet[(v >> 18) & 63]);
    out.push_back(kAlphabet[(v >> 12) & 63]);
    out.push_back(kAlphabet[(v >> 6) & 63]);
    out.push_back('=');
  }
  return out;
}

std::vector<std::uint8_t> base64_decode(std::string_view text) {
  if (text.size() % 4 != 0) throw Error(ErrorKind::InvalidArgument, "base64 length must be a multiple of 4");
  std::size_t pad = 0;
  if (!text.empty() && text.back() == '=') ++pad;
  if (pad == 1 && text[text.size() - 2] == '=') ++pad;

  std::vector<std::uint8_t> out;
  out.reserve(text.size() / 4 * 3);
  for (std::size_t i = 0; i < text.size(); i += 4) {
    std::uint32_t v = 0;
    const bool last = i + 4 == text.size();
    for (std::size_t k = 0; k < 4; ++k) {
      const char ch = text[i + k];
      std::int8_t d;
      if (ch == '=') {
        if (!last || k < 4 - pad) throw Error(ErrorKind::InvalidArgument, "misplaced base64 padding");
        d = 0;
      } else {
        d = kDecode[static_cast<unsigned char>(ch)];
        if (d < 0) throw Error(ErrorKind::InvalidArgument, "invalid base64 character");
      }
      v = (v << 6) | static_cast<std::uint32_t>(d);
    }
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    if (!last || pad < 2) out.push_back(static_cast<std::uint8_t>(v >> 8));
    if (!last || pad < 1) out.push_back(static_cast<std::uint8_t>(v));
  }
  return out;
}

nlohmann::json to_json(const Request& r) {
  return {{"id", r.id},
          {"width", r.width},
          {"height", r.height},
          {"channels", r.channels},
          {"pixels_b64", base64_encode(r.pixels)},
          {"backend_options", r.backend_options}};
}

Request request_from_json(const nlohmann::json& j) {
  auto fail = [](const std::string& what) { return Error(ErrorKind::InvalidArgument, what); };
  if (!j.is_object()) throw fail("request must be a JSON object");
  Request r;
  if (!j.contains("id") || !j["id"].is_string()) throw fail("request.id must be a string");
  r.id = j["id"].get<std::string>();
  for (const char* key : {"width", "height", "channels"}) {
    if (!j.contains(key) || !j[key].is_number_integer()) {
      throw fail(std::string("request.") + key + " must be an integer");
    }
  }
  r.width = j["width"].get<int>();
  r.height = j["height"].get<int>();
  r.channels = j["channels"].get<int>();
  if (r.width < 1 || r.height < 1 || (r.channels != 1 && r.channels != 3)) {
    throw fail("request dimensions are invalid");
  }
  if (!j.contains("pixels_b64") || !j["pixels_b64"].is_string()) throw fail("request.pixels_b64 must be a string");
  r.pixels = base64_decode(j["pixels_b64"].get<std::string>());
  const auto expected = static_cast<std::size_t>(r.width) * r.height * r.channels;
  if (r.pixels.size() != expected) {
    throw fail("decoded pixel length " + std::to_string(r.pixels.size()) + " != expected length " +
               std::to_string(expected));
  }
  if (const auto opts = j.find("backend_options"); opts != j.end() && !opts->is_null()) {
    if (!opts->is_object()) throw fail("request.backend_options must be an object");
    r.backend_options = *opts;
  }
  return r;
}

nlohmann::json to_json(const Response& r) {
  nlohmann::json j{{"id", r.id}};
  if (r.masks) {
    auto arr = nlohmann::json::array();
    for (const auto& m : *r.masks) arr.push_back(to_json(m));
    j["masks"] = std::move(arr);
  }
  if (r.error) j["error"] = *r.error;
  if (r.metadata) j["metadata"] = *r.metadata;
  return j;
}

Response response_from_json(const nlohmann::json& j) {
  auto fail = [](const std::string& what) { return Error(ErrorKind::MalformedBackendReply, what); };
  if (!j.is_object()) throw fail("response must be a JSON object");
  Response r;
  if (!j.contains("id") || !j["id"].is_string()) throw fail("response.id must be a string");
  r.id = j["id"].get<std::string>();
  const bool has_masks = j.contains("masks") && !j["masks"].is_null();
  const bool has_error = j.contains("error") && !j["error"].is_null();
  if (has_masks == has_error) throw fail("response must carry exactly one of masks/error");
  if (has_masks) {
    if (!j["masks"].is_array()) throw fail("response.masks must be an array");
    std::vector<MaskRecord> masks;
    for (const auto& m : j["masks"]) masks.push_back(mask_from_json(m));
    r.masks = std::move(masks);
  } else {
    if (!j["error"].is_string()) throw fail("response.error must be a string");
    r.error = j["error"].get<std::string>();
  }
  if (const auto meta = j.find("metadata"); meta != j.end() && !meta->is_null()) r.metadata = *meta;
  return r;
}

}  // namespace surfmon::bridge
