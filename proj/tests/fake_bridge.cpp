// Line-protocol stand-in for an external segmentation bridge.
// Usage: fake_bridge <mode>
//   echo        one mask per request: bbox [0, 0, max(1, pixels[0]) clipped to width, 1]
//   reverse     collect two requests, answer them in reverse order
//   bad-mask    answer with a bbox outside the window
//   wrong-id    answer with an id nobody asked for
//   error       answer with an error field
//   garbage     answer with a line that is not JSON
//   exit        exit without answering
//   silent      read requests, never answer
// Requests that fail validation are answered with an error and the loop continues.
#include <iostream>
#include <string>
#include <vector>

#include "surfmon/bridge_protocol.hpp"
#include "surfmon/error.hpp"

using namespace surfmon;

namespace {

nlohmann::json echo_reply(const bridge::Request& req) {
  const int w = std::max(1, std::min<int>(req.width, req.pixels.empty() ? 1 : req.pixels[0]));
  bridge::Response resp;
  resp.id = req.id;
  resp.masks = std::vector<MaskRecord>{MaskRecord{0, 0, w, 1, 1, std::nullopt}};
  resp.metadata = nlohmann::json{{"backend", "fake"}};
  return bridge::to_json(resp);
}

}  // namespace

int main(int argc, char** argv) {
  const std::string mode = argc > 1 ? argv[1] : "echo";
  if (mode == "exit") return 0;
  std::vector<bridge::Request> held;
  std::string line;
  while (std::getline(std::cin, line)) {
    bridge::Request req;
    try {
      req = bridge::request_from_json(nlohmann::json::parse(line));
    } catch (const std::exception& e) {
      nlohmann::json id = nullptr;
      try {
        id = nlohmann::json::parse(line).value("id", "");
      } catch (...) {
      }
      std::cout << nlohmann::json{{"id", id.is_string() ? id : nlohmann::json("")}, {"error", e.what()}}.dump()
                << std::endl;
      continue;
    }
    if (mode == "silent") continue;
    if (mode == "echo") {
      std::cout << echo_reply(req).dump() << std::endl;
    } else if (mode == "reverse") {
      held.push_back(req);
      if (held.size() == 2) {
        std::cout << echo_reply(held[1]).dump() << '\n' << echo_reply(held[0]).dump() << std::endl;
        held.clear();
      }
    } else if (mode == "bad-mask") {
      nlohmann::json j{{"id", req.id},
                       {"masks", {{{"bbox", {req.width, 0, 5, 5}}, {"pixel_count", 3}}}}};
      std::cout << j.dump() << std::endl;
    } else if (mode == "wrong-id") {
      std::cout << nlohmann::json{{"id", "nobody"}, {"masks", nlohmann::json::array()}}.dump() << std::endl;
    } else if (mode == "error") {
      std::cout << nlohmann::json{{"id", req.id}, {"error", "model not loaded"}}.dump() << std::endl;
    } else if (mode == "garbage") {
      std::cout << "this is not json" << std::endl;
    } else {
      std::cerr << "unknown mode " << mode << '\n';
      return 2;
    }
  }
  return 0;
}
