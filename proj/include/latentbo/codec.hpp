//
// Project latentbo - Copyright 2026 The latentbo Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef LATENTBO_CODEC_HPP
#define LATENTBO_CODEC_HPP

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>

#include "latentbo/protocol.hpp"
#include "latentbo/types.hpp"

namespace latentbo {

/// Identifiers of the repair prompts understood by decode endpoints.
inline constexpr std::array<std::string_view, 3> kPromptIds{"repair", "no_knowledge", "no_role"};

bool is_known_prompt(std::string_view prompt_id);

/// String <-> latent-sequence boundary.
class Codec {
public:
  virtual ~Codec() = default;

  [[nodiscard]] virtual std::string name() const = 0;
  [[nodiscard]] virtual int dim() const = 0;
  [[nodiscard]] virtual int l_max() const = 0;

  virtual TokenEmbeddingSeq encode(const std::string& text) = 0;
  /// Maps a (possibly perturbed) latent sequence back to a non-empty string.
  virtual std::string decode_repair(const MatrixXd& tokens, const std::string& prompt_id) = 0;
  virtual bool validate(const std::string& text) = 0;
};

/// Deterministic per-character codec with a seeded standard-normal table.
/// Embeddings carry no positional information: the row of a character is
/// the same wherever it occurs. Decoding maps each row to the nearest
/// table row (ties to the lowest token id) and truncates at l_max.
class MockCodec final : public Codec {
public:
  MockCodec(std::string alphabet, int d, int l_max, std::uint64_t table_seed);

  /// Uses an explicit table without checking it (fault-injection fixtures
  /// rely on this).
  static MockCodec from_table(std::string alphabet, MatrixXd table, int l_max);

  [[nodiscard]] std::string name() const override { return "mock"; }
  [[nodiscard]] int dim() const override { return static_cast<int>(table_.cols()); }
  [[nodiscard]] int l_max() const override { return l_max_; }
  [[nodiscard]] const std::string& alphabet() const { return alphabet_; }
  [[nodiscard]] const MatrixXd& table() const { return table_; }

  /// Smallest distance between two distinct table rows.
  [[nodiscard]] double min_row_distance() const;
  /// Rows pairwise distinct and finite.
  [[nodiscard]] bool table_is_valid() const;

  /// Token id of `c`, or -1.
  [[nodiscard]] int token_id(char c) const;
  [[nodiscard]] int nearest_token(const Eigen::Ref<const Eigen::RowVectorXd>& row) const;

  TokenEmbeddingSeq encode(const std::string& text) override;
  std::string decode_repair(const MatrixXd& tokens, const std::string& prompt_id) override;
  bool validate(const std::string& text) override;

private:
  MockCodec() = default;
  void build_index();

  std::string alphabet_;
  MatrixXd table_;
  int l_max_ = 0;
  std::array<int, 256> index_{};
};

/// Codec backed by an external endpoint speaking the line protocol.
class ExternalCodec final : public Codec {
public:
  /// `expected_d` / `expected_l_max` (when > 0) must match the handshake.
  ExternalCodec(std::shared_ptr<ProtocolClient> client, int expected_d = 0, int expected_l_max = 0);

  [[nodiscard]] std::string name() const override { return client_->info().name; }
  [[nodiscard]] int dim() const override { return client_->info().d; }
  [[nodiscard]] int l_max() const override { return client_->info().l_max; }
  [[nodiscard]] const std::shared_ptr<ProtocolClient>& client() const { return client_; }

  TokenEmbeddingSeq encode(const std::string& text) override;
  std::string decode_repair(const MatrixXd& tokens, const std::string& prompt_id) override;
  bool validate(const std::string& text) override;

private:
  std::shared_ptr<ProtocolClient> client_;
};

nlohmann::json embedding_to_json(const MatrixXd& tokens);
MatrixXd embedding_from_json(const nlohmann::json& rows, int expected_d);

}  // namespace latentbo

#endif  // LATENTBO_CODEC_HPP
