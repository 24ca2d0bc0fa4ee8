//
// Project latentbo - Copyright 2026 The latentbo Authors.
// SPDX-License-Identifier: Apache-2.0
//

// Plays back a recorded session: each incoming request must equal the
// next recorded request (as JSON), and the recorded response is sent back.
// Transcript lines are prefixed with "> " (request) or "< " (response).

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <json.hpp>

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: transcript_replay TRANSCRIPT\n";
    return 1;
  }
  std::ifstream in(argv[1]);
  if (!in) {
    std::cerr << "transcript_replay: cannot open " << argv[1] << "\n";
    return 1;
  }
  std::vector<std::pair<nlohmann::json, std::string>> steps;
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("> ", 0) == 0) {
      steps.emplace_back(nlohmann::json::parse(line.substr(2)), std::string{});
    } else if (line.rfind("< ", 0) == 0 && !steps.empty()) {
      steps.back().second = line.substr(2);
    }
  }
  std::size_t i = 0;
  while (std::getline(std::cin, line)) {
    if (i >= steps.size()) {
      std::cerr << "transcript_replay: unexpected extra request\n";
      return 1;
    }
    const auto req = nlohmann::json::parse(line, nullptr, false);
    if (req.is_discarded() || req != steps[i].first) {
      std::cerr << "transcript_replay: request " << i << " differs\n  got:      " << line
                << "\n  expected: " << steps[i].first.dump() << "\n";
      return 1;
    }
    std::cout << steps[i].second << "\n" << std::flush;
    ++i;
  }
  return i == steps.size() ? 0 : 1;
}
