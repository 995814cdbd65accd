#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "relforge/errors.hpp"
#include "relforge/types.hpp"

namespace relforge {

// Fixed section order of rendered notes. Unknown renders last, as the
// catch-all "Other Changes".
inline constexpr std::array<ChangeCategory, 5> kSectionOrder = {
    ChangeCategory::NewFeatures,  ChangeCategory::IssuesFixed,
    ChangeCategory::NonFunctional, ChangeCategory::Documentation,
    ChangeCategory::Unknown,
};

struct PairedChange {
  int pr_number = 0;
  std::string entry_text;
  ChangeCategory category = ChangeCategory::Unknown;
  std::string source_url;
};

// Joins entries and categories on PR number; both maps must cover exactly
// the same PRs. Output is ordered by PR number ascending.
inline std::vector<PairedChange> pair_entries(
    const std::map<int, std::string>& entries,
    const std::map<int, ChangeCategory>& categories, const std::string& repo = "") {
  std::string unmatched;
  for (const auto& [pr, text] : entries) {
    (void)text;
    if (!categories.count(pr)) {
      if (!unmatched.empty()) unmatched += ", ";
      unmatched += std::to_string(pr);
    }
  }
  for (const auto& [pr, cat] : categories) {
    (void)cat;
    if (!entries.count(pr)) {
      if (!unmatched.empty()) unmatched += ", ";
      unmatched += std::to_string(pr);
    }
  }
  if (!unmatched.empty())
    throw data_error("pair_entries: unmatched PR numbers: " + unmatched);

  std::vector<PairedChange> out;
  out.reserve(entries.size());
  for (const auto& [pr, text] : entries) {
    PairedChange p;
    p.pr_number = pr;
    p.entry_text = text;
    p.category = categories.at(pr);
    if (!repo.empty())
      p.source_url = "https://github.com/" + repo + "/pull/" + std::to_string(pr);
    out.push_back(std::move(p));
  }
  return out;
}

// Heading strings and section order, overridable via config.
struct NoteStyle {
  std::vector<ChangeCategory> order{kSectionOrder.begin(), kSectionOrder.end()};
  std::map<ChangeCategory, std::string> headings;

  std::string heading_for(ChangeCategory c) const {
    auto it = headings.find(c);
    return it != headings.end() ? it->second : category_heading(c);
  }
};

// Groups pairs by category in the configured section order; entries within a
// group stay ordered by PR number.
inline ReleaseNote build_note(const std::string& version, const std::string& date,
                              const std::vector<PairedChange>& pairs,
                              const NoteStyle& style = {}) {
  ReleaseNote note;
  note.version = version;
  note.date = date;
  for (ChangeCategory section : style.order) {
    std::vector<ReleaseEntry> entries;
    for (const auto& p : pairs) {
      if (p.category != section) continue;
      ReleaseEntry e;
      e.pr_number = p.pr_number;
      e.text = p.entry_text;
      e.category = p.category;
      entries.push_back(std::move(e));
    }
    if (!entries.empty()) note.groups.emplace_back(section, std::move(entries));
  }
  return note;
}

// Deterministic markdown: top heading, one "###" section per non-empty
// group, one "- <text> (#<pr>)" bullet per entry.
inline std::string render_markdown(const ReleaseNote& note, const NoteStyle& style = {}) {
  std::string out = "# " + note.version + " — " + note.date + "\n";
  bool any = false;
  for (const auto& [category, entries] : note.groups) {
    if (entries.empty()) continue;
    any = true;
    out += "\n### ";
    out += style.heading_for(category);
    out += "\n\n";
    for (const auto& e : entries) {
      out += "- " + e.text + " (#" + std::to_string(e.pr_number) + ")\n";
    }
  }
  if (!any) out += "\n_No changes._\n";
  return out;
}

}  // namespace relforge
