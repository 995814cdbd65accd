#pragma once

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "relforge/errors.hpp"
#include "relforge/types.hpp"

namespace relforge {

struct CleaningReport {
  std::size_t sentences_removed = 0;
  std::size_t sha_replacements = 0;
  std::size_t version_replacements = 0;
  std::size_t number_replacements = 0;
  bool template_stripped = false;
};

struct CleanResult {
  std::string text;
  CleaningReport report;
};

// Ordered category -> keyword list. Order is the match precedence.
struct KeywordTable {
  std::vector<std::pair<ChangeCategory, std::vector<std::string>>> entries;

  static KeywordTable defaults() {
    KeywordTable t;
    t.entries = {
        {ChangeCategory::IssuesFixed, {"fix", "bug", "issue"}},
        {ChangeCategory::NonFunctional,
         {"enhance", "improve", "performance", "optimize", "security"}},
        {ChangeCategory::NewFeatures, {"add", "feature", "new"}},
        {ChangeCategory::Documentation, {"doc", "documentation", "wiki"}},
    };
    return t;
  }

  void validate() const {
    std::set<std::string> seen;
    for (const auto& [cat, kws] : entries) {
      (void)cat;
      for (const auto& kw : kws) {
        if (kw.empty()) throw data_error("keyword table: empty keyword");
        for (char c : kw)
          if (std::isupper(static_cast<unsigned char>(c)))
            throw data_error("keyword table: keyword must be lowercase: \"" + kw + "\"");
        if (!seen.insert(kw).second)
          throw data_error("keyword table: keyword under two categories: \"" + kw + "\"");
      }
    }
  }
};

// Override file: one JSON record per line, {"category": label, "keywords": [...]}.
inline KeywordTable load_keyword_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open keyword table: " + path);
  KeywordTable t;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.contains("category") || !j.contains("keywords"))
      throw data_error("keyword table line " + std::to_string(line_no) + ": malformed record");
    std::vector<std::string> kws;
    for (const auto& k : j.at("keywords")) kws.push_back(k.get<std::string>());
    t.entries.emplace_back(category_from_label(j.at("category").get<std::string>()),
                           std::move(kws));
  }
  t.validate();
  return t;
}

namespace detail {

inline bool is_ascii_punct(char c) {
  unsigned char u = static_cast<unsigned char>(c);
  return u < 128 && std::ispunct(u);
}

inline std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

inline std::string to_lower_ascii(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    unsigned char u = static_cast<unsigned char>(c);
    if (u < 128) c = static_cast<char>(std::tolower(u));
  }
  return out;
}

// Split on newlines, then after ". ", "! ", "? " within each line.
inline std::vector<std::string> split_sentences(std::string_view text) {
  std::vector<std::string> sentences;
  std::size_t line_start = 0;
  auto flush_line = [&](std::string_view line) {
    std::size_t start = 0;
    for (std::size_t i = 0; i + 1 < line.size(); ++i) {
      char c = line[i];
      if ((c == '.' || c == '!' || c == '?') && line[i + 1] == ' ') {
        sentences.emplace_back(line.substr(start, i + 1 - start));
        start = i + 2;
        while (start < line.size() && line[start] == ' ') ++start;
        i = start == 0 ? 0 : start - 1;
      }
    }
    if (start < line.size()) sentences.emplace_back(line.substr(start));
  };
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || text[i] == '\n') {
      std::string_view line = text.substr(line_start, i - line_start);
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      if (!line.empty()) flush_line(line);
      line_start = i + 1;
    }
  }
  return sentences;
}

inline bool is_hex_char(char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
}

inline bool is_ident_char(char c) {
  unsigned char u = static_cast<unsigned char>(c);
  return (u < 128 && std::isalnum(u)) || c == '_' || c == '-';
}

// Deletion rules, applied to whole (lowercased) sentences.
inline bool sentence_should_go(std::string_view s) {
  for (char c : s)
    if (static_cast<unsigned char>(c) >= 128) return true;  // non-ASCII
  if (s.find("http://") != std::string_view::npos ||
      s.find("https://") != std::string_view::npos ||
      s.find("www.") != std::string_view::npos)
    return true;
  std::string t = trim(s);
  if (!t.empty() && t[0] == '#') return true;  // markdown headline
  if (t.rfind("signed-off-by:", 0) == 0 || t.rfind("co-authored-by:", 0) == 0)
    return true;  // signature trailer
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '#' && i + 1 < s.size() && std::isdigit(static_cast<unsigned char>(s[i + 1])))
      return true;  // GitHub reference "#123"
    if (s[i] == '@' && i + 1 < s.size() && is_ident_char(s[i + 1]))
      return true;  // mention or email
  }
  return false;
}

inline bool all_hex(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), is_hex_char);
}

// v?digits(.digits){2,}  or  v digits(.digits)*
inline bool is_version_token(std::string_view s) {
  std::size_t i = 0;
  bool has_v = false;
  if (i < s.size() && s[i] == 'v') {
    has_v = true;
    ++i;
  }
  if (i >= s.size() || !std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  int dot_groups = 0;
  while (i < s.size()) {
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) break;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
    if (i < s.size() && s[i] == '.') {
      if (i + 1 >= s.size() || !std::isdigit(static_cast<unsigned char>(s[i + 1])))
        return false;
      ++dot_groups;
      ++i;
    }
  }
  if (i != s.size()) return false;
  return has_v || dot_groups >= 2;
}

inline bool is_number_token(std::string_view s) {
  std::size_t i = 0;
  if (i >= s.size() || !std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
  if (i < s.size() && s[i] == '.') {
    ++i;
    if (i >= s.size()) return false;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
  }
  return i == s.size();
}

// Replace any 40-hex run bounded by non-hex neighbors inside `core`.
inline bool replace_embedded_sha(std::string& core) {
  bool replaced = false;
  for (std::size_t i = 0; i < core.size();) {
    if (!is_hex_char(core[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < core.size() && is_hex_char(core[j])) ++j;
    if (j - i == 40) {
      core.replace(i, j - i, "sha");
      i += 3;
      replaced = true;
    } else {
      i = j;
    }
  }
  return replaced;
}

// Token-level sha/version/number rewriting for one surviving sentence.
// Tokens are whitespace-delimited; leading/trailing punctuation is kept
// around the rewritten core. Whitespace is normalized to single spaces.
inline std::string rewrite_tokens(std::string_view sentence, CleaningReport& report) {
  std::string out;
  std::size_t i = 0;
  while (i < sentence.size()) {
    while (i < sentence.size() && std::isspace(static_cast<unsigned char>(sentence[i]))) ++i;
    if (i >= sentence.size()) break;
    std::size_t j = i;
    while (j < sentence.size() && !std::isspace(static_cast<unsigned char>(sentence[j]))) ++j;
    std::string_view token = sentence.substr(i, j - i);
    i = j;

    std::size_t b = 0, e = token.size();
    while (b < e && is_ascii_punct(token[b])) ++b;
    while (e > b && is_ascii_punct(token[e - 1])) --e;
    std::string lead(token.substr(0, b));
    std::string core(token.substr(b, e - b));
    std::string tail(token.substr(e));

    if (all_hex(core) && core.size() >= 7 && core.size() <= 40) {
      core = "sha";
      ++report.sha_replacements;
    } else if (replace_embedded_sha(core)) {
      ++report.sha_replacements;
    } else if (is_version_token(core)) {
      core = "version";
      ++report.version_replacements;
    } else if (is_number_token(core)) {
      core = "0";
      ++report.number_replacements;
    }

    if (!out.empty()) out += ' ';
    out += lead;
    out += core;
    out += tail;
  }
  return out;
}

}  // namespace detail

// Drop every description line that exactly matches a template line (both
// sides trimmed). Absent template leaves the description untouched.
inline std::string strip_template(const std::string& description,
                                  const std::optional<std::string>& tmpl) {
  if (!tmpl) return description;
  std::set<std::string> template_lines;
  {
    std::size_t start = 0;
    for (std::size_t i = 0; i <= tmpl->size(); ++i) {
      if (i == tmpl->size() || (*tmpl)[i] == '\n') {
        template_lines.insert(detail::trim(std::string_view(*tmpl).substr(start, i - start)));
        start = i + 1;
      }
    }
  }
  std::string out;
  std::size_t start = 0;
  bool first = true;
  for (std::size_t i = 0; i <= description.size(); ++i) {
    if (i == description.size() || description[i] == '\n') {
      std::string_view line = std::string_view(description).substr(start, i - start);
      if (!template_lines.count(detail::trim(line))) {
        if (!first) out += '\n';
        out.append(line);
        first = false;
      }
      start = i + 1;
    }
  }
  return out;
}

// The remove-and-replace pass: lowercase, drop noisy sentences whole, then
// rewrite sha/version/number tokens in the survivors.
inline CleanResult clean_text(const std::string& text) {
  CleanResult result;
  std::string lowered = detail::to_lower_ascii(text);
  std::string out;
  for (const std::string& sentence : detail::split_sentences(lowered)) {
    if (detail::sentence_should_go(sentence)) {
      ++result.report.sentences_removed;
      continue;
    }
    std::string rewritten = detail::rewrite_tokens(sentence, result.report);
    if (rewritten.empty()) continue;
    if (!out.empty()) out += ' ';
    out += rewritten;
  }
  result.text = std::move(out);
  return result;
}

// First category whose keyword substring-matches (case-insensitive) wins;
// table order is the precedence.
inline ChangeCategory unify_category(const std::string& raw, const KeywordTable& table) {
  std::string lowered = detail::to_lower_ascii(raw);
  for (const auto& [cat, keywords] : table.entries)
    for (const auto& kw : keywords)
      if (lowered.find(kw) != std::string::npos) return cat;
  return ChangeCategory::Unknown;
}

inline ChangeCategory unify_category(const std::string& raw) {
  return unify_category(raw, KeywordTable::defaults());
}

// title [sep] description [sep] commit-messages, each section cleaned.
// Empty sections drop out but both "[sep]" delimiters always remain.
inline std::string build_summarizer_input(const PullRequest& pr,
                                          const std::optional<std::string>& tmpl = {}) {
  std::string title = clean_text(pr.title).text;
  if (title.empty())
    throw data_error("PR " + pr.repo + "#" + std::to_string(pr.number) +
                     ": title is empty after cleaning");
  std::string description = clean_text(strip_template(pr.description, tmpl)).text;
  std::string commits;
  for (const auto& m : pr.commit_messages) {
    if (!commits.empty()) commits += ' ';
    commits += m;
  }
  commits = clean_text(commits).text;

  std::string out = title;
  out += " [sep]";
  if (!description.empty()) {
    out += ' ';
    out += description;
  }
  out += " [sep]";
  if (!commits.empty()) {
    out += ' ';
    out += commits;
  }
  return out;
}

// Classifier input: PR title with leading/trailing punctuation stripped,
// lowercased, interior untouched.
inline std::string build_classifier_input(const std::string& title) {
  std::string_view s(title);
  std::size_t b = 0, e = s.size();
  auto strippable = [](char c) {
    return std::isspace(static_cast<unsigned char>(c)) || detail::is_ascii_punct(c);
  };
  while (b < e && strippable(s[b])) ++b;
  while (e > b && strippable(s[e - 1])) --e;
  std::string out = detail::to_lower_ascii(s.substr(b, e - b));
  if (out.empty()) throw data_error("title is empty after stripping punctuation");
  return out;
}

}  // namespace relforge
