//
// Project latentbo - Copyright 2026 The latentbo Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef LATENTBO_SERVER_HPP
#define LATENTBO_SERVER_HPP

#include <cstddef>
#include <iosfwd>
#include <string>

#include <json.hpp>

#include "latentbo/codec.hpp"
#include "latentbo/oracle.hpp"

namespace latentbo {

/// Answers one request object. Failures become `{"id":..,"ok":false,
/// "error":..}`; this never throws for malformed requests.
nlohmann::json handle_request(Codec& codec, Objective* oracle, const nlohmann::json& request);

/// Same, for one raw line (parse errors reply with a null id).
std::string handle_line(Codec& codec, Objective* oracle, const std::string& line);

/// Serves newline-delimited requests until end of input. Returns the
/// number of requests answered.
std::size_t serve(Codec& codec, Objective* oracle, std::istream& in, std::ostream& out);

}  // namespace latentbo

#endif  // LATENTBO_SERVER_HPP
