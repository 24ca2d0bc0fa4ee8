//
// Project latentbo - Copyright 2026 The latentbo Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "latentbo/server.hpp"

#include <istream>
#include <ostream>

namespace latentbo {

namespace {

nlohmann::json error_reply(const nlohmann::json& id, const std::string& message) {
  return {{"id", id}, {"ok", false}, {"error", message}};
}

const std::string& text_field(const nlohmann::json& req) {
  if (!req.contains("text") || !req["text"].is_string()) throw InvalidArgument("missing string field 'text'");
  return req["text"].get_ref<const std::string&>();
}

}  // namespace

nlohmann::json handle_request(Codec& codec, Objective* oracle, const nlohmann::json& request) {
  nlohmann::json id = nullptr;
  try {
    if (!request.is_object()) return error_reply(id, "request is not an object");
    if (request.contains("id")) id = request["id"];
    if (!id.is_number_unsigned()) return error_reply(id, "missing or invalid 'id'");
    if (!request.contains("op") || !request["op"].is_string()) return error_reply(id, "missing 'op'");
    const auto& op = request["op"].get_ref<const std::string&>();

    nlohmann::json reply = {{"id", id}, {"ok", true}};
    if (op == "hello") {
      reply["name"] = codec.name();
      reply["d"] = codec.dim();
      reply["l_max"] = codec.l_max();
    } else if (op == "encode") {
      reply["embedding"] = embedding_to_json(codec.encode(text_field(request)).vectors);
    } else if (op == "decode") {
      if (!request.contains("embedding")) throw InvalidArgument("missing field 'embedding'");
      if (!request.contains("prompt_id") || !request["prompt_id"].is_string())
        throw InvalidArgument("missing string field 'prompt_id'");
      const auto z = embedding_from_json(request["embedding"], codec.dim());
      reply["text"] = codec.decode_repair(z, request["prompt_id"].get<std::string>());
    } else if (op == "validate") {
      reply["valid"] = codec.validate(text_field(request));
    } else if (op == "score") {
      if (oracle == nullptr) return error_reply(id, "this endpoint has no oracle");
      reply["score"] = oracle->score(text_field(request));
    } else {
      return error_reply(id, "unknown op '" + op + "'");
    }
    return reply;
  } catch (const std::exception& e) {
    return error_reply(id, e.what());
  }
}

std::string handle_line(Codec& codec, Objective* oracle, const std::string& line) {
  const auto req = nlohmann::json::parse(line, nullptr, false);
  if (req.is_discarded()) return error_reply(nullptr, "malformed JSON").dump();
  return handle_request(codec, oracle, req).dump();
}

std::size_t serve(Codec& codec, Objective* oracle, std::istream& in, std::ostream& out) {
  std::size_t n = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    out << handle_line(codec, oracle, line) << '\n';
    out.flush();
    ++n;
  }
  return n;
}

}  // namespace latentbo
