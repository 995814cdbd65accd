#pragma once

#include <array>
#include <fstream>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "relforge/errors.hpp"
#include "relforge/rng.hpp"
#include "relforge/types.hpp"

namespace relforge {

namespace detail {

inline nlohmann::json record_to_json(const DatasetRecord& r) {
  return nlohmann::json{
      {"repo", r.repo},
      {"pr_number", r.pr_number},
      {"input_text", r.input_text},
      {"target_text", r.target_text},
      {"category", category_label(r.category)},
      {"merged_at", r.merged_at},
  };
}

inline DatasetRecord record_from_json(const nlohmann::json& j, std::size_t line_no) {
  for (const char* key : {"repo", "pr_number", "input_text", "target_text",
                          "category", "merged_at"}) {
    if (!j.contains(key))
      throw data_error("line " + std::to_string(line_no) +
                       ": missing field \"" + key + "\"");
  }
  DatasetRecord r;
  try {
    r.repo = j.at("repo").get<std::string>();
    r.pr_number = j.at("pr_number").get<int>();
    r.input_text = j.at("input_text").get<std::string>();
    r.target_text = j.at("target_text").get<std::string>();
    r.category = category_from_label(j.at("category").get<std::string>());
    r.merged_at = j.at("merged_at").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw data_error("line " + std::to_string(line_no) + ": " + e.what());
  }
  if (r.pr_number <= 0)
    throw data_error("line " + std::to_string(line_no) + ": pr_number must be positive");
  return r;
}

}  // namespace detail

// Line-delimited JSON, one record per line. Malformed lines report their
// 1-based line number; duplicate (repo, pr_number) pairs are rejected.
inline std::vector<DatasetRecord> load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open dataset file: " + path);
  std::vector<DatasetRecord> records;
  std::set<std::pair<std::string, int>> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded())
      throw data_error("line " + std::to_string(line_no) + ": malformed record");
    DatasetRecord r = detail::record_from_json(j, line_no);
    if (!seen.insert({r.repo, r.pr_number}).second)
      throw data_error("line " + std::to_string(line_no) + ": duplicate record for " +
                       r.repo + "#" + std::to_string(r.pr_number));
    records.push_back(std::move(r));
  }
  return records;
}

inline void save_dataset(const std::vector<DatasetRecord>& records,
                         const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw data_error("cannot write dataset file: " + path);
  for (const auto& r : records)
    out << detail::record_to_json(r).dump() << "\n";
  if (!out) throw data_error("I/O failure writing dataset file: " + path);
}

struct SplitRatios {
  double train = 8.0;
  double val = 1.0;
  double test = 1.0;
};

struct DatasetSplit {
  std::vector<DatasetRecord> train;
  std::vector<DatasetRecord> val;
  std::vector<DatasetRecord> test;
};

// Seeded shuffle, then partition by cumulative proportion: floor(n*ratio)
// per part, leftovers distributed in declaration order (train first).
inline DatasetSplit split_dataset(const std::vector<DatasetRecord>& records,
                                  SplitRatios ratios, std::uint64_t seed) {
  if (records.empty()) throw data_error("cannot split an empty dataset");
  for (double w : {ratios.train, ratios.val, ratios.test})
    if (w <= 0.0) throw data_error("split ratios must be positive");

  std::vector<DatasetRecord> shuffled = records;
  Rng rng(seed);
  rng.shuffle(shuffled);

  const std::size_t n = shuffled.size();
  const double total = ratios.train + ratios.val + ratios.test;
  std::array<std::size_t, 3> sizes{};
  std::array<double, 3> weights{ratios.train, ratios.val, ratios.test};
  std::size_t assigned = 0;
  for (int i = 0; i < 3; ++i) {
    sizes[i] = static_cast<std::size_t>(static_cast<double>(n) * weights[i] / total);
    assigned += sizes[i];
  }
  for (int i = 0; assigned < n; i = (i + 1) % 3, ++assigned) ++sizes[i];

  DatasetSplit out;
  auto it = shuffled.begin();
  out.train.assign(it, it + sizes[0]);
  it += sizes[0];
  out.val.assign(it, it + sizes[1]);
  it += sizes[1];
  out.test.assign(it, it + sizes[2]);
  return out;
}

}  // namespace relforge
