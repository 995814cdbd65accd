#pragma once

#include <fstream>
#include <set>
#include <string>

#include <json.hpp>

#include "relforge/classifier.hpp"
#include "relforge/errors.hpp"
#include "relforge/notegen.hpp"
#include "relforge/summarizer.hpp"

namespace relforge {

// Everything the CLI can configure. Every key has a default; unknown keys in
// a config file are rejected. Flag overrides beat the file, which beats the
// defaults.
struct RunConfig {
  SummarizerConfig summarizer;
  ClassifierConfig classifier;
  std::string keyword_table_path;
  std::string synonym_table_path;
  NoteStyle note_style;
};

namespace detail {

inline void reject_unknown_keys(const nlohmann::json& obj, const std::set<std::string>& known,
                                const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (!known.count(key))
      throw usage_error("config: unknown key \"" + key + "\" in " + where);
  }
}

template <typename T>
void maybe(const nlohmann::json& obj, const char* key, T& out) {
  if (obj.contains(key)) out = obj.at(key).get<T>();
}

}  // namespace detail

inline RunConfig parse_run_config(const nlohmann::json& j) {
  RunConfig cfg;
  detail::reject_unknown_keys(j,
                              {"summarizer", "classifier", "keyword_table", "synonym_table",
                               "headings", "section_order"},
                              "top level");
  if (j.contains("summarizer")) {
    const auto& s = j.at("summarizer");
    detail::reject_unknown_keys(s,
                                {"embed_dim", "hidden", "vocab_cap", "batch", "beam",
                                 "max_src", "max_tgt", "lr", "clip_norm", "epochs",
                                 "patience", "seed"},
                                "summarizer");
    detail::maybe(s, "embed_dim", cfg.summarizer.embed_dim);
    detail::maybe(s, "hidden", cfg.summarizer.hidden);
    detail::maybe(s, "vocab_cap", cfg.summarizer.vocab_cap);
    detail::maybe(s, "batch", cfg.summarizer.batch);
    detail::maybe(s, "beam", cfg.summarizer.beam);
    detail::maybe(s, "max_src", cfg.summarizer.max_src);
    detail::maybe(s, "max_tgt", cfg.summarizer.max_tgt);
    detail::maybe(s, "lr", cfg.summarizer.lr);
    detail::maybe(s, "clip_norm", cfg.summarizer.clip_norm);
    detail::maybe(s, "epochs", cfg.summarizer.epochs);
    detail::maybe(s, "patience", cfg.summarizer.patience);
    detail::maybe(s, "seed", cfg.summarizer.seed);
  }
  if (j.contains("classifier")) {
    const auto& c = j.at("classifier");
    detail::reject_unknown_keys(c,
                                {"embed_dim", "vocab_cap", "batch", "lr", "epochs", "seed",
                                 "train_ratio", "test_ratio", "class_weights", "n_aug",
                                 "alpha", "aug_seed"},
                                "classifier");
    detail::maybe(c, "embed_dim", cfg.classifier.embed_dim);
    detail::maybe(c, "vocab_cap", cfg.classifier.vocab_cap);
    detail::maybe(c, "batch", cfg.classifier.batch);
    detail::maybe(c, "lr", cfg.classifier.lr);
    detail::maybe(c, "epochs", cfg.classifier.epochs);
    detail::maybe(c, "seed", cfg.classifier.seed);
    detail::maybe(c, "train_ratio", cfg.classifier.train_ratio);
    detail::maybe(c, "test_ratio", cfg.classifier.test_ratio);
    detail::maybe(c, "class_weights", cfg.classifier.class_weights);
    detail::maybe(c, "n_aug", cfg.classifier.aug.n_aug);
    detail::maybe(c, "alpha", cfg.classifier.aug.alpha);
    detail::maybe(c, "aug_seed", cfg.classifier.aug.seed);
  }
  detail::maybe(j, "keyword_table", cfg.keyword_table_path);
  detail::maybe(j, "synonym_table", cfg.synonym_table_path);
  if (j.contains("headings"))
    for (const auto& [label, heading] : j.at("headings").items())
      cfg.note_style.headings[category_from_label(label)] = heading.get<std::string>();
  if (j.contains("section_order")) {
    cfg.note_style.order.clear();
    for (const auto& label : j.at("section_order"))
      cfg.note_style.order.push_back(category_from_label(label.get<std::string>()));
  }
  return cfg;
}

inline RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw usage_error("cannot open config file: " + path);
  nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded()) throw usage_error("config file is not valid JSON: " + path);
  return parse_run_config(j);
}

}  // namespace relforge
