#include "surfmon/bridge_client.hpp"

#include <fcntl.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <cstdio>
#include <cstring>
#include <future>
#include <map>
#include <mutex>
#include <thread>

#include "httplib.h"
#include "surfmon/bridge_protocol.hpp"
#include "surfmon/error.hpp"

extern char** environ;

namespace surfmon {
namespace {

std::atomic<std::uint64_t> g_request_counter{0};

bridge::Request make_request(const WindowView& window, const WindowIdentity& id,
                             const nlohmann::json& options) {
  bridge::Request req;
  req.id = id.key() + "#" + std::to_string(g_request_counter.fetch_add(1));
  req.width = window.width;
  req.height = window.height;
  req.channels = window.channels;
  req.pixels = window.pixels;
  req.backend_options = options;
  return req;
}

// Shared post-processing: id echo, error replies, mask invariants.
std::vector<MaskRecord> accept_reply(const bridge::Response& resp, const bridge::Request& req) {
  if (resp.id != req.id) {
    throw Error(ErrorKind::MalformedBackendReply, "reply id " + resp.id + " does not match " + req.id);
  }
  if (resp.error) throw Error(ErrorKind::BackendError, "bridge reported: " + *resp.error);
  std::vector<MaskRecord> masks = *resp.masks;
  for (const auto& m : masks) {
    if (auto problem = mask_violation(m, req.width, req.height)) {
      throw Error(ErrorKind::MalformedBackendReply, "mask violates invariants: " + *problem);
    }
  }
  canonicalize(masks);
  return masks;
}

bridge::Response parse_reply(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::MalformedBackendReply, std::string("reply is not JSON: ") + e.what());
  }
  return bridge::response_from_json(j);
}

class HttpBridgeClient final : public Segmenter {
 public:
  HttpBridgeClient(std::string base_url, nlohmann::json options, std::chrono::milliseconds timeout)
      : base_url_(std::move(base_url)), options_(std::move(options)), timeout_(timeout) {}

  std::vector<MaskRecord> segment(const WindowView& window, const WindowIdentity& id) override {
    const bridge::Request req = make_request(window, id, options_);
    httplib::Client client(base_url_);
    client.set_connection_timeout(timeout_);
    client.set_read_timeout(timeout_);
    client.set_write_timeout(timeout_);
    auto res = client.Post("/segment", bridge::to_json(req).dump(), "application/json");
    if (!res) {
      throw Error(ErrorKind::BackendUnavailable,
                  base_url_ + ": " + httplib::to_string(res.error()));
    }
    if (res->status != 200 && res->body.empty()) {
      throw Error(ErrorKind::MalformedBackendReply, "HTTP status " + std::to_string(res->status));
    }
    return accept_reply(parse_reply(res->body), req);
  }

 private:
  std::string base_url_;
  nlohmann::json options_;
  std::chrono::milliseconds timeout_;
};

class StdioBridgeClient final : public Segmenter {
 public:
  StdioBridgeClient(const std::string& command, nlohmann::json options, std::chrono::milliseconds timeout)
      : options_(std::move(options)), timeout_(timeout) {
    static std::once_flag sigpipe_once;
    std::call_once(sigpipe_once, [] { ::signal(SIGPIPE, SIG_IGN); });

    int to_child[2];
    int from_child[2];
    if (::pipe2(to_child, O_CLOEXEC) != 0 || ::pipe2(from_child, O_CLOEXEC) != 0) {
      throw Error(ErrorKind::BackendUnavailable, std::string("pipe: ") + std::strerror(errno));
    }
    posix_spawn_file_actions_t actions;
    posix_spawn_file_actions_init(&actions);
    posix_spawn_file_actions_adddup2(&actions, to_child[0], STDIN_FILENO);
    posix_spawn_file_actions_adddup2(&actions, from_child[1], STDOUT_FILENO);

    const std::string shell_cmd = "exec " + command;
    const char* argv[] = {"/bin/sh", "-c", shell_cmd.c_str(), nullptr};
    const int rc = ::posix_spawn(&pid_, "/bin/sh", &actions, nullptr, const_cast<char**>(argv), environ);
    posix_spawn_file_actions_destroy(&actions);
    ::close(to_child[0]);
    ::close(from_child[1]);
    if (rc != 0) {
      ::close(to_child[1]);
      ::close(from_child[0]);
      throw Error(ErrorKind::BackendUnavailable, "cannot spawn bridge: " + std::string(std::strerror(rc)));
    }
    write_fd_ = to_child[1];
    read_stream_ = ::fdopen(from_child[0], "r");
    reader_ = std::thread([this] { read_loop(); });
  }

  ~StdioBridgeClient() override {
    {
      std::lock_guard lock(write_mutex_);
      if (write_fd_ >= 0) ::close(write_fd_);
      write_fd_ = -1;
    }
    ::kill(pid_, SIGTERM);
    int status = 0;
    ::waitpid(pid_, &status, 0);
    if (reader_.joinable()) reader_.join();
    if (read_stream_ != nullptr) std::fclose(read_stream_);
  }

  std::vector<MaskRecord> segment(const WindowView& window, const WindowIdentity& id) override {
    const bridge::Request req = make_request(window, id, options_);
    std::future<bridge::Response> reply;
    {
      std::lock_guard lock(pending_mutex_);
      if (dead_) throw Error(ErrorKind::BackendUnavailable, "bridge process has exited");
      reply = pending_[req.id].get_future();
    }
    try {
      send_line(bridge::to_json(req).dump());
    } catch (...) {
      std::lock_guard lock(pending_mutex_);
      pending_.erase(req.id);
      throw;
    }
    if (reply.wait_for(timeout_) != std::future_status::ready) {
      std::lock_guard lock(pending_mutex_);
      pending_.erase(req.id);
      throw Error(ErrorKind::BackendUnavailable, "bridge did not answer " + req.id + " in time");
    }
    return accept_reply(reply.get(), req);
  }

 private:
  void send_line(std::string line) {
    line.push_back('\n');
    std::lock_guard lock(write_mutex_);
    std::size_t off = 0;
    while (off < line.size()) {
      const ssize_t n = write_fd_ < 0 ? -1 : ::write(write_fd_, line.data() + off, line.size() - off);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw Error(ErrorKind::BackendUnavailable, "write to bridge failed");
      }
      off += static_cast<std::size_t>(n);
    }
  }

  void fail_all(ErrorKind kind, const std::string& why) {
    // Caller holds pending_mutex_.
    for (auto& [id, promise] : pending_) {
      promise.set_exception(std::make_exception_ptr(Error(kind, why)));
    }
    pending_.clear();
  }

  void read_loop() {
    std::string line;
    char buf[4096];
    while (std::fgets(buf, sizeof buf, read_stream_) != nullptr) {
      line.append(buf);
      if (line.empty() || line.back() != '\n') continue;
      line.pop_back();
      dispatch(line);
      line.clear();
    }
    std::lock_guard lock(pending_mutex_);
    dead_ = true;
    fail_all(ErrorKind::BackendUnavailable, "bridge closed its output");
  }

  void dispatch(const std::string& line) {
    std::lock_guard lock(pending_mutex_);
    try {
      bridge::Response resp = parse_reply(line);
      const auto it = pending_.find(resp.id);
      if (it == pending_.end()) {
        // Cannot tell which request this belongs to; nothing in flight can be trusted.
        fail_all(ErrorKind::MalformedBackendReply, "reply id " + resp.id + " matches no pending request");
        return;
      }
      it->second.set_value(std::move(resp));
      pending_.erase(it);
    } catch (const Error& e) {
      fail_all(ErrorKind::MalformedBackendReply, e.what());
    }
  }

  nlohmann::json options_;
  std::chrono::milliseconds timeout_;
  pid_t pid_ = -1;
  int write_fd_ = -1;
  std::FILE* read_stream_ = nullptr;
  std::thread reader_;
  std::mutex write_mutex_;
  std::mutex pending_mutex_;
  std::map<std::string, std::promise<bridge::Response>> pending_;
  bool dead_ = false;
};

}  // namespace

std::unique_ptr<Segmenter> make_bridge_client(const std::string& endpoint,
                                              const nlohmann::json& backend_options,
                                              std::chrono::milliseconds timeout) {
  if (endpoint.rfind("stdio:", 0) == 0) {
    const std::string command = endpoint.substr(6);
    if (command.empty()) throw Error(ErrorKind::Config, "stdio endpoint needs a command");
    return std::make_unique<StdioBridgeClient>(command, backend_options, timeout);
  }
  if (endpoint.rfind("http://", 0) == 0) {
    return std::make_unique<HttpBridgeClient>(endpoint, backend_options, timeout);
  }
  throw Error(ErrorKind::Config, "unsupported bridge endpoint: " + endpoint);
}

}  // namespace surfmon
