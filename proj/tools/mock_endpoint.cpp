//
// Project latentbo - Copyright 2026 The latentbo Authors.
// SPDX-License-Identifier: Apache-2.0
//

// Serves the mock codec and synthetic objective over the line protocol on
// stdin/stdout.

#include <iostream>

#include <CLI11.hpp>

#include "latentbo/codec.hpp"
#include "latentbo/config.hpp"
#include "latentbo/oracle.hpp"
#include "latentbo/server.hpp"

int main(int argc, char** argv) {
  using namespace latentbo;
  const CodecConfig codec_defaults;
  const OracleConfig oracle_defaults;
  std::string alphabet = codec_defaults.alphabet;
  int d = 16;
  int l_max = 80;
  std::uint64_t table_seed = codec_defaults.table_seed;
  std::string target = oracle_defaults.target;
  bool no_oracle = false;

  CLI::App app{"Mock codec endpoint"};
  app.add_option("--alphabet", alphabet);
  app.add_option("--d", d);
  app.add_option("--l-max", l_max);
  app.add_option("--table-seed", table_seed);
  app.add_option("--target", target, "Synthetic objective target");
  app.add_flag("--no-oracle", no_oracle, "Reject score requests");
  CLI11_PARSE(app, argc, argv);

  try {
    MockCodec codec(alphabet, d, l_max, table_seed);
    SyntheticObjective oracle(target, oracle_defaults.w_match, oracle_defaults.w_len);
    std::ios::sync_with_stdio(false);
    serve(codec, no_oracle ? nullptr : &oracle, std::cin, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "mock_endpoint: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
