#pragma once

#include <array>
#include <cstdint>
#include <ctime>
#include <cstdio>
#include <string>
#include <utility>
#include <vector>

#include "relforge/errors.hpp"

namespace relforge {

// The closed label set. Unknown is the "no keyword matched" bucket; it never
// appears in classifier training data and renders under "Other Changes".
enum class ChangeCategory {
  IssuesFixed,
  NonFunctional,
  NewFeatures,
  Documentation,
  Unknown,
};

// The four trainable classes, in fixed declaration order. This order is the
// classifier's output layout and the tie-break order everywhere.
inline constexpr std::array<ChangeCategory, 4> kTrainableCategories = {
    ChangeCategory::IssuesFixed,
    ChangeCategory::NonFunctional,
    ChangeCategory::NewFeatures,
    ChangeCategory::Documentation,
};

inline const char* category_label(ChangeCategory c) {
  switch (c) {
    case ChangeCategory::IssuesFixed: return "issues_fixed";
    case ChangeCategory::NonFunctional: return "non_functional";
    case ChangeCategory::NewFeatures: return "new_features";
    case ChangeCategory::Documentation: return "documentation";
    case ChangeCategory::Unknown: return "unknown";
  }
  return "unknown";
}

inline ChangeCategory category_from_label(const std::string& label) {
  if (label == "issues_fixed") return ChangeCategory::IssuesFixed;
  if (label == "non_functional") return ChangeCategory::NonFunctional;
  if (label == "new_features") return ChangeCategory::NewFeatures;
  if (label == "documentation") return ChangeCategory::Documentation;
  if (label == "unknown") return ChangeCategory::Unknown;
  throw data_error("unknown category label: \"" + label + "\"");
}

// Human-facing section headings used in rendered notes.
inline const char* category_heading(ChangeCategory c) {
  switch (c) {
    case ChangeCategory::NewFeatures: return "Features";
    case ChangeCategory::IssuesFixed: return "Fixes";
    case ChangeCategory::NonFunctional: return "Non-functional";
    case ChangeCategory::Documentation: return "Documentation";
    case ChangeCategory::Unknown: return "Other Changes";
  }
  return "Other Changes";
}

// UTC timestamps travel as "YYYY-MM-DDTHH:MM:SSZ" strings; comparisons use
// epoch seconds.
inline std::int64_t parse_utc(const std::string& iso) {
  std::tm tm{};
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
  if (std::sscanf(iso.c_str(), "%d-%d-%dT%d:%d:%d", &y, &mo, &d, &h, &mi, &s) != 6)
    throw data_error("bad UTC timestamp: \"" + iso + "\"");
  tm.tm_year = y - 1900;
  tm.tm_mon = mo - 1;
  tm.tm_mday = d;
  tm.tm_hour = h;
  tm.tm_min = mi;
  tm.tm_sec = s;
  return static_cast<std::int64_t>(timegm(&tm));
}

inline std::string format_utc(std::int64_t epoch_seconds) {
  std::time_t t = static_cast<std::time_t>(epoch_seconds);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ",
                tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday,
                tm.tm_hour, tm.tm_min, tm.tm_sec);
  return buf;
}

inline std::string format_utc_date(std::int64_t epoch_seconds) {
  return format_utc(epoch_seconds).substr(0, 10);
}

// One merged pull request as collected from the forge. commit_messages are
// ordered by commit creation time, ascending.
struct PullRequest {
  std::string repo;  // "owner/name"
  int number = 0;
  std::string title;
  std::string description;
  std::vector<std::string> commit_messages;
  std::string merged_at;  // UTC ISO-8601

  bool operator==(const PullRequest&) const = default;
};

struct ReleaseEntry {
  int pr_number = 0;
  std::string text;
  ChangeCategory category = ChangeCategory::Unknown;

  bool operator==(const ReleaseEntry&) const = default;
};

struct ReleaseNote {
  std::string version;
  std::string date;  // ISO-8601 date
  // Each category appears at most once; entries carry the group's category.
  std::vector<std::pair<ChangeCategory, std::vector<ReleaseEntry>>> groups;
};

// One training/eval sample: preprocessed source text, preprocessed target
// entry, the unified category, and provenance.
struct DatasetRecord {
  std::string repo;
  int pr_number = 0;
  std::string input_text;
  std::string target_text;
  ChangeCategory category = ChangeCategory::Unknown;
  std::string merged_at;

  bool operator==(const DatasetRecord&) const = default;
};

}  // namespace relforge
