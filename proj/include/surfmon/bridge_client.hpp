#pragma once

#include <chrono>
#include <memory>
#include <string>

#include "json.hpp"
#include "surfmon/segmenter.hpp"

namespace surfmon {

// Client side of the segmentation bridge.
//
// Endpoint forms:
//   http://host:port       POST /segment per window
//   stdio:<command line>   spawn the command, newline-delimited JSON over its
//                          stdin/stdout; replies are matched by id, so any
//                          number of requests may be in flight at once
//
// Transport failures raise BackendUnavailable, protocol violations raise
// MalformedBackendReply, and a well-formed error reply raises BackendError.
std::unique_ptr<Segmenter> make_bridge_client(
    const std::string& endpoint, const nlohmann::json& backend_options,
    std::chrono::milliseconds timeout = std::chrono::milliseconds(120000));

}  // namespace surfmon
