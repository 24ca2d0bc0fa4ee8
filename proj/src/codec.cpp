//
// Project latentbo - Copyright 2026 The latentbo Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "latentbo/codec.hpp"

#include <algorithm>
#include <limits>
#include <random>

namespace latentbo {

bool is_known_prompt(std::string_view prompt_id) {
  return std::find(kPromptIds.begin(), kPromptIds.end(), prompt_id) != kPromptIds.end();
}

MockCodec::MockCodec(std::string alphabet, int d, int l_max, std::uint64_t table_seed)
    : alphabet_(std::move(alphabet)), l_max_(l_max) {
  if (alphabet_.empty()) throw InvalidArgument("mock alphabet is empty");
  if (d < 1) throw InvalidArgument("mock codec needs d >= 1");
  if (l_max < 1) throw InvalidArgument("mock codec needs l_max >= 1");
  build_index();
  std::mt19937_64 rng(table_seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  table_.resize(static_cast<Eigen::Index>(alphabet_.size()), d);
  for (Eigen::Index i = 0; i < table_.rows(); ++i)
    for (Eigen::Index j = 0; j < table_.cols(); ++j) table_(i, j) = normal(rng);
  if (!table_is_valid()) throw InvalidArgument("mock embedding table has coincident rows");
}

MockCodec MockCodec::from_table(std::string alphabet, MatrixXd table, int l_max) {
  if (static_cast<Eigen::Index>(alphabet.size()) != table.rows())
    throw InvalidArgument("alphabet size does not match table rows");
  if (table.cols() < 1 || l_max < 1) throw InvalidArgument("mock codec needs d >= 1 and l_max >= 1");
  MockCodec c;
  c.alphabet_ = std::move(alphabet);
  c.table_ = std::move(table);
  c.l_max_ = l_max;
  c.build_index();
  return c;
}

void MockCodec::build_index() {
  index_.fill(-1);
  for (std::size_t i = 0; i < alphabet_.size(); ++i) {
    auto& slot = index_[static_cast<unsigned char>(alphabet_[i])];
    if (slot != -1) throw InvalidArgument(std::string("duplicate alphabet character '") + alphabet_[i] + "'");
    slot = static_cast<int>(i);
  }
}

double MockCodec::min_row_distance() const {
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < table_.rows(); ++i)
    for (Eigen::Index j = i + 1; j < table_.rows(); ++j)
      best = std::min(best, (table_.row(i) - table_.row(j)).norm());
  return best;
}

bool MockCodec::table_is_valid() const { return table_.allFinite() && min_row_distance() > 0.0; }

int MockCodec::token_id(char c) const { return index_[static_cast<unsigned char>(c)]; }

int MockCodec::nearest_token(const Eigen::Ref<const Eigen::RowVectorXd>& row) const {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < table_.rows(); ++i) {
    const double d = (table_.row(i) - row).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(i);
    }
  }
  return best;
}

TokenEmbeddingSeq MockCodec::encode(const std::string& text) {
  if (text.empty()) throw InvalidArgument("cannot encode an empty string");
  if (static_cast<int>(text.size()) > l_max_)
    throw InvalidArgument("text length " + std::to_string(text.size()) + " exceeds l_max " +
                          std::to_string(l_max_));
  TokenEmbeddingSeq seq;
  seq.vectors.resize(static_cast<Eigen::Index>(text.size()), table_.cols());
  for (std::size_t t = 0; t < text.size(); ++t) {
    const int id = token_id(text[t]);
    if (id < 0) throw InvalidArgument(std::string("character '") + text[t] + "' is not in the mock alphabet");
    seq.token_ids.push_back(id);
    seq.vectors.row(static_cast<Eigen::Index>(t)) = table_.row(id);
  }
  return seq;
}

std::string MockCodec::decode_repair(const MatrixXd& tokens, const std::string& prompt_id) {
  if (!is_known_prompt(prompt_id)) throw InvalidArgument("unknown prompt id '" + prompt_id + "'");
  if (tokens.rows() < 1 || tokens.cols() != table_.cols())
    throw InvalidArgument("decode: embedding shape does not match codec dimension");
  if (!tokens.allFinite()) throw InvalidArgument("decode: non-finite embedding");
  const Eigen::Index n = std::min<Eigen::Index>(tokens.rows(), l_max_);
  std::string out;
  out.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index t = 0; t < n; ++t) out.push_back(alphabet_[static_cast<std::size_t>(nearest_token(tokens.row(t)))]);
  return out;
}

bool MockCodec::validate(const std::string& text) {
  if (text.empty() || static_cast<int>(text.size()) > l_max_) return false;
  return std::all_of(text.begin(), text.end(), [&](char c) { return token_id(c) >= 0; });
}

nlohmann::json embedding_to_json(const MatrixXd& tokens) {
  if (!tokens.allFinite()) throw InvalidArgument("embedding contains non-finite entries");
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < tokens.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < tokens.cols(); ++j) row.push_back(tokens(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

MatrixXd embedding_from_json(const nlohmann::json& rows, int expected_d) {
  if (!rows.is_array() || rows.empty()) throw ProtocolError("embedding must be a non-empty array of rows");
  MatrixXd m(static_cast<Eigen::Index>(rows.size()), expected_d);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& row = rows[i];
    if (!row.is_array() || static_cast<int>(row.size()) != expected_d)
      throw ProtocolError("embedding row " + std::to_string(i) + " does not have width " +
                          std::to_string(expected_d));
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (!row[j].is_number()) throw ProtocolError("embedding entry is not a number");
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = row[j].get<double>();
    }
  }
  if (!m.allFinite()) throw ProtocolError("embedding contains non-finite entries");
  return m;
}

ExternalCodec::ExternalCodec(std::shared_ptr<ProtocolClient> client, int expected_d, int expected_l_max)
    : client_(std::move(client)) {
  if (!client_) throw InvalidArgument("external codec needs a protocol client");
  if (expected_d > 0 && expected_d != client_->info().d)
    throw ProtocolError("endpoint declared d=" + std::to_string(client_->info().d) + ", expected " +
                        std::to_string(expected_d));
  if (expected_l_max > 0 && expected_l_max != client_->info().l_max)
    throw ProtocolError("endpoint declared l_max=" + std::to_string(client_->info().l_max) +
                        ", expected " + std::to_string(expected_l_max));
}

TokenEmbeddingSeq ExternalCodec::encode(const std::string& text) {
  if (text.empty()) throw InvalidArgument("cannot encode an empty string");
  const auto resp = client_->call("encode", {{"text", text}});
  if (!resp.contains("embedding")) throw ProtocolError("encode response lacks embedding");
  TokenEmbeddingSeq seq;
  seq.vectors = embedding_from_json(resp["embedding"], dim());
  if (seq.vectors.rows() > l_max())
    throw ProtocolError("encode returned " + std::to_string(seq.vectors.rows()) +
                        " tokens, above l_max " + std::to_string(l_max()));
  // the protocol does not transmit token ids; positions stand in for them
  for (Eigen::Index i = 0; i < seq.vectors.rows(); ++i) seq.token_ids.push_back(i);
  return seq;
}

std::string ExternalCodec::decode_repair(const MatrixXd& tokens, const std::string& prompt_id) {
  if (!is_known_prompt(prompt_id)) throw InvalidArgument("unknown prompt id '" + prompt_id + "'");
  if (tokens.rows() < 1 || tokens.cols() != dim())
    throw InvalidArgument("decode: embedding shape does not match endpoint dimension");
  const auto resp =
      client_->call("decode", {{"embedding", embedding_to_json(tokens)}, {"prompt_id", prompt_id}});
  if (!resp.contains("text") || !resp["text"].is_string())
    throw ProtocolError("decode response lacks text");
  auto text = resp["text"].get<std::string>();
  if (text.empty()) throw ProtocolError("endpoint violated the repair contract: empty decode");
  return text;
}

bool ExternalCodec::validate(const std::string& text) {
  const auto resp = client_->call("validate", {{"text", text}});
  if (!resp.contains("valid") || !resp["valid"].is_boolean())
    throw ProtocolError("validate response lacks boolean 'valid'");
  return resp["valid"].get<bool>();
}

}  // namespace latentbo
