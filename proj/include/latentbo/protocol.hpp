//
// Project latentbo - Copyright 2026 The latentbo Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef LATENTBO_PROTOCOL_HPP
#define LATENTBO_PROTOCOL_HPP

#include <chrono>
#include <cstdint>
#include <mutex>
#include <string>
#include <vector>

#include <json.hpp>

#include "latentbo/types.hpp"

namespace latentbo {

/// Information returned by the endpoint handshake.
struct EndpointInfo {
  std::string name;
  int d = 0;
  int l_max = 0;
};

/// Client side of the newline-delimited JSON protocol spoken over a child
/// process's stdin/stdout. One request is in flight at a time; every
/// response must echo the request id.
class ProtocolClient {
public:
  /// Spawns `command` (argv form, PATH lookup) and performs the hello
  /// handshake. Throws ProtocolError if the process cannot be started or
  /// the handshake fails.
  explicit ProtocolClient(std::vector<std::string> command,
                          std::chrono::milliseconds timeout = std::chrono::milliseconds(30000));
  ~ProtocolClient();

  ProtocolClient(const ProtocolClient&) = delete;
  ProtocolClient& operator=(const ProtocolClient&) = delete;

  [[nodiscard]] const EndpointInfo& info() const { return info_; }

  /// Sends {"id":n,"op":op,...fields} and returns the response object
  /// after checking id and ok. A response with ok:false raises
  /// ProtocolError carrying the endpoint's message.
  nlohmann::json call(const std::string& op, nlohmann::json fields = nlohmann::json::object());

  /// Requests sent so far, excluding the handshake.
  [[nodiscard]] std::uint64_t request_count() const { return next_id_ - 1; }

private:
  nlohmann::json roundtrip(nlohmann::json request);
  void write_line(const std::string& line);
  std::string read_line();
  void shutdown() noexcept;

  std::vector<std::string> command_;
  std::chrono::milliseconds timeout_;
  int pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string buffer_;
  std::uint64_t next_id_ = 1;
  EndpointInfo info_;
  std::mutex mutex_;
};

}  // namespace latentbo

#endif  // LATENTBO_PROTOCOL_HPP
