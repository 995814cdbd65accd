#pragma once

#include <algorithm>
#include <cstddef>
#include <fstream>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "relforge/errors.hpp"
#include "relforge/preprocess.hpp"

namespace relforge {

// Fixed special token ids. [sep] is reserved outside frequency ranking so the
// summarizer can attend to section boundaries.
inline constexpr int kPadId = 0;
inline constexpr int kUnkId = 1;
inline constexpr int kStartId = 2;
inline constexpr int kStopId = 3;
inline constexpr int kSepId = 4;
inline constexpr std::size_t kNumSpecials = 5;

inline const std::vector<std::string>& special_tokens() {
  static const std::vector<std::string> specials = {"<pad>", "<unk>", "<s>", "</s>", "[sep]"};
  return specials;
}

// Whitespace split, then leading/trailing punctuation peeled off as separate
// single-character tokens. "[sep]" stays atomic.
inline std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i >= text.size()) break;
    std::size_t j = i;
    while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
    std::string_view word = text.substr(i, j - i);
    i = j;

    // Peel punctuation, but keep "[sep]" (and any peeled-down remainder that
    // becomes it) in one piece.
    std::vector<std::string> tail;
    while (!word.empty() && word != "[sep]") {
      if (detail::is_ascii_punct(word.front()) && word.substr(0, 5) != "[sep]") {
        tokens.emplace_back(1, word.front());
        word.remove_prefix(1);
      } else if (detail::is_ascii_punct(word.back()) &&
                 (word.size() < 5 || word.substr(word.size() - 5) != "[sep]")) {
        tail.emplace_back(1, word.back());
        word.remove_suffix(1);
      } else {
        break;
      }
    }
    if (!word.empty()) tokens.emplace_back(word);
    tokens.insert(tokens.end(), tail.rbegin(), tail.rend());
  }
  return tokens;
}

class Vocabulary {
public:
  Vocabulary() {
    for (const auto& s : special_tokens()) push(s);
  }

  std::size_t size() const { return id_to_token_.size(); }

  int id_of(const std::string& token) const {
    auto it = token_to_id_.find(token);
    return it == token_to_id_.end() ? kUnkId : it->second;
  }

  bool contains(const std::string& token) const { return token_to_id_.count(token) > 0; }

  const std::string& token_of(int id) const {
    if (id < 0 || static_cast<std::size_t>(id) >= id_to_token_.size())
      throw data_error("token id out of range: " + std::to_string(id));
    return id_to_token_[static_cast<std::size_t>(id)];
  }

  void add_token(const std::string& token) {
    if (!token_to_id_.count(token)) push(token);
  }

  void save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw data_error("cannot write vocabulary file: " + path);
    for (const auto& t : id_to_token_) out << t << "\n";
  }

  static Vocabulary load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open vocabulary file: " + path);
    Vocabulary v;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line_no <= kNumSpecials) {
        if (line != special_tokens()[line_no - 1])
          throw data_error("vocabulary file " + path + ": bad specials header at line " +
                           std::to_string(line_no) + " (got \"" + line + "\")");
        continue;
      }
      if (line.empty()) throw data_error("vocabulary file " + path + ": empty token at line " +
                                         std::to_string(line_no));
      v.add_token(line);
    }
    if (line_no < kNumSpecials)
      throw data_error("vocabulary file " + path + ": truncated specials header");
    return v;
  }

private:
  void push(const std::string& token) {
    token_to_id_.emplace(token, static_cast<int>(id_to_token_.size()));
    id_to_token_.push_back(token);
  }

  std::unordered_map<std::string, int> token_to_id_;
  std::vector<std::string> id_to_token_;
};

// Most frequent tokens kept until the cap (which bounds the total size,
// specials included); frequency ties break lexicographically.
inline Vocabulary build_vocab(const std::vector<std::vector<std::string>>& corpus,
                              std::size_t cap) {
  if (cap <= kNumSpecials)
    throw data_error("vocabulary cap must exceed the number of special tokens");
  std::map<std::string, std::size_t> counts;
  for (const auto& tokens : corpus)
    for (const auto& t : tokens) {
      bool special = std::find(special_tokens().begin(), special_tokens().end(), t) !=
                     special_tokens().end();
      if (!special) ++counts[t];
    }
  std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(), counts.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  Vocabulary v;
  for (const auto& [token, count] : ranked) {
    (void)count;
    if (v.size() >= cap) break;
    v.add_token(token);
  }
  return v;
}

// Per-example encoding with the copy mechanism's extended ids: each OOV
// source token gets a temporary id >= |vocab|, consistent within the example.
struct EncodedExample {
  std::vector<int> src_ids;
  std::vector<int> src_ext_ids;
  std::vector<int> tgt_ids;
  std::vector<int> tgt_ext_ids;
  std::vector<std::string> oov_tokens;
};

inline constexpr std::size_t kDefaultMaxSrcTokens = 360;
inline constexpr std::size_t kDefaultMaxTgtTokens = 30;

inline EncodedExample encode_example(std::vector<std::string> src_tokens,
                                     std::vector<std::string> tgt_tokens,
                                     const Vocabulary& vocab,
                                     std::size_t max_src = kDefaultMaxSrcTokens,
                                     std::size_t max_tgt = kDefaultMaxTgtTokens) {
  if (src_tokens.size() > max_src) src_tokens.resize(max_src);
  if (tgt_tokens.size() > max_tgt) tgt_tokens.resize(max_tgt);

  EncodedExample ex;
  const int base = static_cast<int>(vocab.size());
  std::unordered_map<std::string, int> oov_ids;
  for (const auto& t : src_tokens) {
    int id = vocab.id_of(t);
    ex.src_ids.push_back(id);
    if (id == kUnkId && t != special_tokens()[kUnkId]) {
      auto [it, inserted] = oov_ids.emplace(t, base + static_cast<int>(ex.oov_tokens.size()));
      if (inserted) ex.oov_tokens.push_back(t);
      ex.src_ext_ids.push_back(it->second);
    } else {
      ex.src_ext_ids.push_back(id);
    }
  }
  for (const auto& t : tgt_tokens) {
    int id = vocab.id_of(t);
    ex.tgt_ids.push_back(id);
    if (id == kUnkId && t != special_tokens()[kUnkId]) {
      auto it = oov_ids.find(t);
      ex.tgt_ext_ids.push_back(it == oov_ids.end() ? kUnkId : it->second);
    } else {
      ex.tgt_ext_ids.push_back(id);
    }
  }
  return ex;
}

// Extended ids back to surface forms (copied OOVs restored).
inline std::vector<std::string> decode_extended(const std::vector<int>& ext_ids,
                                                const Vocabulary& vocab,
                                                const std::vector<std::string>& oov_tokens) {
  std::vector<std::string> out;
  const int base = static_cast<int>(vocab.size());
  for (int id : ext_ids) {
    if (id >= base) {
      std::size_t k = static_cast<std::size_t>(id - base);
      if (k >= oov_tokens.size())
        throw data_error("extended id out of range: " + std::to_string(id));
      out.push_back(oov_tokens[k]);
    } else {
      out.push_back(vocab.token_of(id));
    }
  }
  return out;
}

inline std::string join_tokens(const std::vector<std::string>& tokens) {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out += ' ';
    out += t;
  }
  return out;
}

// Splits a "title [sep] description [sep] commits" input back into its three
// sections (as token-joined text).
inline std::array<std::string, 3> split_input_sections(const std::string& input_text) {
  std::array<std::string, 3> sections;
  std::size_t section = 0;
  std::vector<std::string> current;
  for (auto& tok : tokenize(input_text)) {
    if (tok == special_tokens()[kSepId]) {
      if (section < 2) sections[section++] = join_tokens(current);
      current.clear();
    } else {
      current.push_back(std::move(tok));
    }
  }
  sections[section] = join_tokens(current);
  return sections;
}

}  // namespace relforge
