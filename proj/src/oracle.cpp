//
// Project latentbo - Copyright 2026 The latentbo Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "latentbo/oracle.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "latentbo/types.hpp"

namespace latentbo {

SyntheticObjective::SyntheticObjective(std::string target, double w_match, double w_len)
    : target_(std::move(target)), w_match_(w_match), w_len_(w_len) {
  if (target_.empty()) throw InvalidArgument("synthetic target must be non-empty");
  if (!std::isfinite(w_match_) || !std::isfinite(w_len_))
    throw InvalidArgument("synthetic objective weights must be finite");
  target_bigrams_ = bigrams(target_);
}

double SyntheticObjective::evaluate(const std::string& text) {
  if (text.empty()) throw InvalidArgument("cannot score an empty string");
  const double j = jaccard(bigrams(text), target_bigrams_);
  const double len_gap = std::fabs(static_cast<double>(text.size()) - static_cast<double>(target_.size()));
  return -w_match_ * j + w_len_ * len_gap;
}

ExternalObjective::ExternalObjective(std::shared_ptr<ProtocolClient> client) : client_(std::move(client)) {
  if (!client_) throw InvalidArgument("external objective needs a protocol client");
}

double ExternalObjective::evaluate(const std::string& text) {
  auto once = [&] {
    const auto resp = client_->call("score", {{"text", text}});
    if (!resp.contains("score") || !resp["score"].is_number())
      throw ProtocolError("score response lacks a number");
    const double s = resp["score"].get<double>();
    if (!std::isfinite(s)) throw ProtocolError("endpoint returned a non-finite score");
    return s;
  };
  try {
    return once();
  } catch (const ProtocolError&) {
    return once();
  }
}

std::string ScoreCache::escape(const std::string& text) {
  std::string out;
  for (unsigned char c : text) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '\t': out += "\\t"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      default:
        if (c < 0x20 || c == 0x7f) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\x%02x", c);
          out += buf;
        } else {
          out += static_cast<char>(c);
        }
    }
  }
  return out;
}

std::string ScoreCache::unescape(const std::string& field) {
  std::string out;
  for (std::size_t i = 0; i < field.size(); ++i) {
    if (field[i] != '\\') {
      out += field[i];
      continue;
    }
    if (++i >= field.size()) throw InvalidArgument("dangling escape in cache record");
    switch (field[i]) {
      case '\\': out += '\\'; break;
      case 't': out += '\t'; break;
      case 'n': out += '\n'; break;
      case 'r': out += '\r'; break;
      case 'x': {
        if (i + 2 >= field.size())
          throw InvalidArgument("truncated \\x escape in cache record");
        out += static_cast<char>(std::stoi(field.substr(i + 1, 2), nullptr, 16));
        i += 2;
        break;
      }
      default: throw InvalidArgument("unknown escape in cache record");
    }
  }
  return out;
}

std::string ScoreCache::format_score(double score) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", score);
  return buf;
}

ScoreCache::ScoreCache(std::filesystem::path path) : path_(std::move(path)) {
  std::ifstream in(*path_);
  if (!in) return;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto tab = line.rfind('\t');
    if (tab == std::string::npos)
      throw InvalidArgument(path_->string() + ":" + std::to_string(lineno) + ": malformed cache record");
    char* end = nullptr;
    const std::string num = line.substr(tab + 1);
    const double v = std::strtod(num.c_str(), &end);
    if (end == num.c_str() || *end != '\0' || !std::isfinite(v))
      throw InvalidArgument(path_->string() + ":" + std::to_string(lineno) + ": bad score");
    entries_.emplace(unescape(line.substr(0, tab)), v);
  }
}

std::optional<double> ScoreCache::find(const std::string& text) const {
  auto it = entries_.find(text);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void ScoreCache::put(const std::string& text, double score) {
  if (!entries_.emplace(text, score).second) return;
  if (!path_) return;
  const std::string line = escape(text) + '\t' + format_score(score) + '\n';
  std::ofstream out(*path_, std::ios::app | std::ios::binary);
  out.write(line.data(), static_cast<std::streamsize>(line.size()));
  out.flush();
  if (!out) throw Error("cannot append to score cache " + path_->string());
}

std::vector<double> batch_score(Objective& oracle, ScoreCache& cache,
                                const std::vector<std::string>& texts) {
  std::vector<double> out;
  out.reserve(texts.size());
  for (std::size_t i = 0; i < texts.size(); ++i) {
    if (auto hit = cache.find(texts[i])) {
      out.push_back(*hit);
      continue;
    }
    double s = 0.0;
    try {
      s = oracle.score(texts[i]);
    } catch (const std::exception& e) {
      throw Error("scoring text #" + std::to_string(i) + " ('" + texts[i] + "') failed: " + e.what());
    }
    cache.put(texts[i], s);
    out.push_back(s);
  }
  return out;
}

}  // namespace latentbo
