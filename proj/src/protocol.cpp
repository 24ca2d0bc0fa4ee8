//
// Project latentbo - Copyright 2026 The latentbo Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "latentbo/protocol.hpp"

#include <cerrno>
#include <csignal>
#include <cstring>

#include <fcntl.h>
#include <poll.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

extern char** environ;

namespace latentbo {

namespace {

std::string describe(const std::vector<std::string>& cmd) {
  std::string s;
  for (const auto& a : cmd) {
    if (!s.empty()) s += ' ';
    s += a;
  }
  return s;
}

}  // namespace

ProtocolClient::ProtocolClient(std::vector<std::string> command, std::chrono::milliseconds timeout)
    : command_(std::move(command)), timeout_(timeout) {
  if (command_.empty()) throw ProtocolError("endpoint command is empty");
  // a dead endpoint must surface as a write error, not kill the process
  std::signal(SIGPIPE, SIG_IGN);

  int in_pipe[2], out_pipe[2];
  if (pipe(in_pipe) != 0) throw ProtocolError(std::string("pipe: ") + std::strerror(errno));
  if (pipe(out_pipe) != 0) {
    close(in_pipe[0]);
    close(in_pipe[1]);
    throw ProtocolError(std::string("pipe: ") + std::strerror(errno));
  }
  fcntl(in_pipe[1], F_SETFD, FD_CLOEXEC);
  fcntl(out_pipe[0], F_SETFD, FD_CLOEXEC);

  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_adddup2(&actions, in_pipe[0], STDIN_FILENO);
  posix_spawn_file_actions_adddup2(&actions, out_pipe[1], STDOUT_FILENO);
  posix_spawn_file_actions_addclose(&actions, in_pipe[0]);
  posix_spawn_file_actions_addclose(&actions, out_pipe[1]);

  std::vector<char*> argv;
  for (auto& a : command_) argv.push_back(a.data());
  argv.push_back(nullptr);
  pid_t pid = -1;
  const int rc = posix_spawnp(&pid, argv[0], &actions, nullptr, argv.data(), environ);
  posix_spawn_file_actions_destroy(&actions);
  close(in_pipe[0]);
  close(out_pipe[1]);
  if (rc != 0) {
    close(in_pipe[1]);
    close(out_pipe[0]);
    throw ProtocolError("cannot start endpoint '" + describe(command_) + "': " + std::strerror(rc));
  }
  pid_ = pid;
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];

  try {
    auto resp = roundtrip({{"id", 0}, {"op", "hello"}});
    info_.name = resp.value("name", std::string{});
    if (!resp.contains("d") || !resp["d"].is_number_integer() || !resp.contains("l_max") ||
        !resp["l_max"].is_number_integer())
      throw ProtocolError("hello response lacks integer d / l_max");
    info_.d = resp["d"].get<int>();
    info_.l_max = resp["l_max"].get<int>();
    if (info_.d < 1 || info_.l_max < 1) throw ProtocolError("hello declared non-positive d or l_max");
  } catch (...) {
    shutdown();
    throw;
  }
}

ProtocolClient::~ProtocolClient() { shutdown(); }

void ProtocolClient::shutdown() noexcept {
  if (to_child_ >= 0) close(to_child_);
  if (from_child_ >= 0) close(from_child_);
  to_child_ = from_child_ = -1;
  if (pid_ > 0) {
    int status = 0;
    // closing stdin asks the endpoint to exit; give it a moment
    for (int i = 0; i < 50; ++i) {
      if (waitpid(pid_, &status, WNOHANG) == pid_) {
        pid_ = -1;
        return;
      }
      usleep(10000);
    }
    kill(pid_, SIGKILL);
    waitpid(pid_, &status, 0);
    pid_ = -1;
  }
}

nlohmann::json ProtocolClient::call(const std::string& op, nlohmann::json fields) {
  std::lock_guard<std::mutex> lock(mutex_);
  nlohmann::json req = nlohmann::json::object();
  req["id"] = next_id_++;
  req["op"] = op;
  for (auto& [k, v] : fields.items()) req[k] = v;
  return roundtrip(std::move(req));
}

nlohmann::json ProtocolClient::roundtrip(nlohmann::json request) {
  const auto id = request["id"].get<std::uint64_t>();
  const auto op = request["op"].get<std::string>();
  write_line(request.dump());
  const std::string line = read_line();
  nlohmann::json resp;
  try {
    resp = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw ProtocolError("malformed response to '" + op + "': " + e.what());
  }
  if (!resp.is_object() || !resp.contains("id") || !resp["id"].is_number_unsigned())
    throw ProtocolError("response to '" + op + "' has no id");
  if (resp["id"].get<std::uint64_t>() != id)
    throw ProtocolError("response id " + resp["id"].dump() + " does not match request id " +
                        std::to_string(id));
  if (!resp.contains("ok") || !resp["ok"].is_boolean())
    throw ProtocolError("response to '" + op + "' has no ok flag");
  if (!resp["ok"].get<bool>())
    throw ProtocolError("endpoint error on '" + op + "': " + resp.value("error", std::string("unknown")));
  return resp;
}

void ProtocolClient::write_line(const std::string& line) {
  if (to_child_ < 0) throw ProtocolError("endpoint is closed");
  std::string data = line + '\n';
  std::size_t off = 0;
  while (off < data.size()) {
    const ssize_t n = write(to_child_, data.data() + off, data.size() - off);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw ProtocolError(std::string("write to endpoint failed: ") + std::strerror(errno));
    }
    off += static_cast<std::size_t>(n);
  }
}

std::string ProtocolClient::read_line() {
  if (from_child_ < 0) throw ProtocolError("endpoint is closed");
  const auto deadline = std::chrono::steady_clock::now() + timeout_;
  for (;;) {
    const auto nl = buffer_.find('\n');
    if (nl != std::string::npos) {
      std::string line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      return line;
    }
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) throw ProtocolError("endpoint timed out after " + std::to_string(timeout_.count()) + " ms");
    pollfd pfd{from_child_, POLLIN, 0};
    const int pr = poll(&pfd, 1, static_cast<int>(left.count()));
    if (pr < 0) {
      if (errno == EINTR) continue;
      throw ProtocolError(std::string("poll failed: ") + std::strerror(errno));
    }
    if (pr == 0) continue;
    char chunk[4096];
    const ssize_t n = read(from_child_, chunk, sizeof chunk);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw ProtocolError(std::string("read from endpoint failed: ") + std::strerror(errno));
    }
    if (n == 0) throw ProtocolError("endpoint closed its output");
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

}  // namespace latentbo
