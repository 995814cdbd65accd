#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "relforge/checkpoint.hpp"
#include "relforge/errors.hpp"
#include "relforge/metrics.hpp"
#include "relforge/neural.hpp"
#include "relforge/preprocess.hpp"
#include "relforge/synonyms.hpp"
#include "relforge/textproc.hpp"
#include "relforge/types.hpp"

namespace relforge {

inline constexpr std::size_t kNumClasses = 4;

struct AugmentationConfig {
  std::size_t n_aug = 9;   // augmented copies per sentence
  double alpha = 0.1;      // per-operation strength
  std::uint64_t seed = 29;
};

struct ClassifierConfig {
  std::size_t embed_dim = 100;
  std::size_t vocab_cap = 30000;
  std::size_t batch = 32;
  double lr = 1e-3;
  std::size_t epochs = 50;
  std::uint64_t seed = 17;
  double train_ratio = 7.0;  // 7:1 train/test split
  double test_ratio = 1.0;
  bool class_weights = false;  // inverse-frequency loss weights
  AugmentationConfig aug;
};

// Averaged-embedding linear classifier: y = mean of word vectors, z = W y + b,
// p = softmax(z) over the four classes in kTrainableCategories order.
struct ClassifierParams {
  std::size_t vocab = 0;
  std::size_t embed = 0;
  Tensor embedding;  // vocab x embed
  Tensor w;          // 4 x embed
  Tensor b;          // 4

  static ClassifierParams create(std::size_t vocab, std::size_t embed) {
    ClassifierParams p;
    p.vocab = vocab;
    p.embed = embed;
    p.embedding = Tensor::matrix(vocab, embed);
    p.w = Tensor::matrix(kNumClasses, embed);
    p.b = Tensor::vector(kNumClasses);
    return p;
  }

  void init(Rng& rng) {
    init_uniform(embedding, rng);
    init_uniform(w, rng);
  }

  std::vector<ParamRef> params() {
    return {{"embedding", &embedding}, {"w", &w}, {"b", &b}};
  }
};

inline std::vector<double> embed_average(const ClassifierParams& p,
                                         const std::vector<int>& token_ids) {
  if (token_ids.empty()) throw data_error("embed_average over an empty token list");
  std::vector<double> y(p.embed, 0.0);
  for (int id : token_ids) {
    std::size_t row = (id < 0 || static_cast<std::size_t>(id) >= p.vocab)
                          ? static_cast<std::size_t>(kUnkId)
                          : static_cast<std::size_t>(id);
    const double* r = p.embedding.v.data() + row * p.embed;
    for (std::size_t k = 0; k < p.embed; ++k) y[k] += r[k];
  }
  const double inv = 1.0 / static_cast<double>(token_ids.size());
  for (double& x : y) x *= inv;
  return y;
}

struct ClassifierModel {
  ClassifierConfig config;
  Vocabulary vocab;
  ClassifierParams params;
};

struct Prediction {
  ChangeCategory category = ChangeCategory::Unknown;
  std::array<double, kNumClasses> probabilities{};
};

// Softmax over the class scores; argmax with ties broken by class order.
inline Prediction predict(const std::string& title, const ClassifierModel& model) {
  std::vector<std::string> tokens = tokenize(build_classifier_input(title));
  std::vector<int> ids;
  ids.reserve(tokens.size());
  for (const auto& t : tokens) ids.push_back(model.vocab.id_of(t));
  std::vector<double> y = embed_average(model.params, ids);
  std::vector<double> z = matvec(model.params.w, y);
  for (std::size_t k = 0; k < kNumClasses; ++k) z[k] += model.params.b.v[k];
  std::vector<double> probs = softmax(z);
  Prediction out;
  std::size_t best = 0;
  for (std::size_t k = 0; k < kNumClasses; ++k) {
    out.probabilities[k] = probs[k];
    if (probs[k] > probs[best]) best = k;
  }
  out.category = kTrainableCategories[best];
  return out;
}

// ---------------------------------------------------------------------------
// EDA-style augmentation: each variant applies one uniformly chosen operation
// (synonym replacement, random swap, random insert, random deletion).

namespace detail {

inline std::size_t eda_op_count(double alpha, std::size_t len) {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(alpha * static_cast<double>(len))));
}

inline std::vector<std::string> eda_synonym_replace(std::vector<std::string> tokens,
                                                    const SynonymTable& syn, double alpha,
                                                    Rng& rng) {
  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < tokens.size(); ++i)
    if (syn.count(tokens[i])) candidates.push_back(i);
  if (candidates.empty()) return tokens;
  std::size_t n = std::min(eda_op_count(alpha, tokens.size()), candidates.size());
  rng.shuffle(candidates);
  for (std::size_t k = 0; k < n; ++k) {
    const auto& options = syn.at(tokens[candidates[k]]);
    tokens[candidates[k]] = options[rng.below(options.size())];
  }
  return tokens;
}

inline std::vector<std::string> eda_random_swap(std::vector<std::string> tokens, double alpha,
                                                Rng& rng) {
  if (tokens.size() < 2) return tokens;
  std::size_t n = eda_op_count(alpha, tokens.size());
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t i = rng.below(tokens.size());
    std::size_t j = rng.below(tokens.size());
    std::swap(tokens[i], tokens[j]);
  }
  return tokens;
}

inline std::vector<std::string> eda_random_insert(std::vector<std::string> tokens,
                                                  const SynonymTable& syn, double alpha,
                                                  Rng& rng) {
  std::size_t n = eda_op_count(alpha, tokens.size());
  for (std::size_t k = 0; k < n; ++k) {
    // Pick a word that has synonyms; give up after a few tries.
    for (int attempt = 0; attempt < 8; ++attempt) {
      const std::string& w = tokens[rng.below(tokens.size())];
      auto it = syn.find(w);
      if (it == syn.end()) continue;
      const auto& options = it->second;
      std::string insert = options[rng.below(options.size())];
      std::size_t pos = rng.below(tokens.size() + 1);
      tokens.insert(tokens.begin() + static_cast<std::ptrdiff_t>(pos), std::move(insert));
      break;
    }
  }
  return tokens;
}

inline std::vector<std::string> eda_random_delete(const std::vector<std::string>& tokens,
                                                  double alpha, Rng& rng) {
  std::vector<std::string> out;
  for (const auto& t : tokens)
    if (rng.real() >= alpha) out.push_back(t);
  if (out.empty()) out.push_back(tokens[rng.below(tokens.size())]);  // never empty
  return out;
}

}  // namespace detail

inline std::vector<std::vector<std::string>> augment(const std::vector<std::string>& tokens,
                                                     const AugmentationConfig& cfg,
                                                     const SynonymTable& synonyms =
                                                         bundled_synonyms()) {
  if (tokens.empty()) throw data_error("augment over an empty sentence");
  std::vector<std::vector<std::string>> variants;
  variants.reserve(cfg.n_aug);
  Rng rng(cfg.seed);
  for (std::size_t v = 0; v < cfg.n_aug; ++v) {
    switch (rng.below(4)) {
      case 0:
        variants.push_back(detail::eda_synonym_replace(tokens, synonyms, cfg.alpha, rng));
        break;
      case 1:
        variants.push_back(detail::eda_random_swap(tokens, cfg.alpha, rng));
        break;
      case 2:
        variants.push_back(detail::eda_random_insert(tokens, synonyms, cfg.alpha, rng));
        break;
      default:
        variants.push_back(detail::eda_random_delete(tokens, cfg.alpha, rng));
        break;
    }
  }
  return variants;
}

// ---------------------------------------------------------------------------
// Training.

struct ClassifierTrainResult {
  ClassifierModel model;
  std::vector<double> epoch_losses;
  double train_accuracy = 0.0;
  ClassReport test_report;
  std::size_t augmented_total = 0;
};

struct LabeledTitle {
  std::string title;
  ChangeCategory category = ChangeCategory::Unknown;
};

// Cross-entropy + Adam over the linear head and embeddings. The train/test
// split is 7:1; augmentation applies to the training split only.
inline ClassifierTrainResult train_classifier(const std::vector<LabeledTitle>& records,
                                              const ClassifierConfig& cfg,
                                              const SynonymTable& synonyms = bundled_synonyms(),
                                              const std::function<void(std::size_t, double)>&
                                                  on_epoch = {}) {
  if (records.empty()) throw data_error("train_classifier: no records");
  for (const auto& r : records)
    if (r.category == ChangeCategory::Unknown)
      throw data_error("train_classifier: records must not carry the unknown category");

  // Seeded shuffle, then floor split with the remainder going to train.
  std::vector<std::size_t> order(records.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(cfg.seed);
  rng.shuffle(order);
  const double total_ratio = cfg.train_ratio + cfg.test_ratio;
  std::size_t n_test = static_cast<std::size_t>(static_cast<double>(records.size()) *
                                                cfg.test_ratio / total_ratio);
  std::size_t n_train = records.size() - n_test;

  struct Sample {
    std::vector<std::string> tokens;
    std::size_t label;
  };
  std::vector<Sample> train;
  std::vector<LabeledTitle> test;
  std::set<std::size_t> train_classes;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const auto& r = records[order[k]];
    if (k < n_train) {
      Sample s;
      s.tokens = tokenize(build_classifier_input(r.title));
      s.label = class_index(r.category);
      train_classes.insert(s.label);
      train.push_back(std::move(s));
    } else {
      test.push_back(r);
    }
  }
  if (train_classes.size() < kNumClasses) {
    std::string missing;
    for (std::size_t k = 0; k < kNumClasses; ++k)
      if (!train_classes.count(k)) {
        if (!missing.empty()) missing += ", ";
        missing += category_label(kTrainableCategories[k]);
      }
    throw data_error("train_classifier: classes missing from training data: " + missing);
  }

  // Augment the training split with per-sentence derived seeds.
  ClassifierTrainResult result;
  const std::size_t originals = train.size();
  for (std::size_t i = 0; i < originals; ++i) {
    AugmentationConfig acfg = cfg.aug;
    acfg.seed = cfg.aug.seed ^ (0x9e3779b97f4a7c15ULL * (i + 1));
    for (auto& variant : augment(train[i].tokens, acfg, synonyms)) {
      train.push_back({std::move(variant), train[i].label});
      ++result.augmented_total;
    }
  }

  // Vocabulary over the (augmented) training tokens.
  std::vector<std::vector<std::string>> corpus;
  corpus.reserve(train.size());
  for (const auto& s : train) corpus.push_back(s.tokens);
  Vocabulary vocab = build_vocab(corpus, cfg.vocab_cap);

  ClassifierParams params = ClassifierParams::create(vocab.size(), cfg.embed_dim);
  params.init(rng);

  std::array<double, kNumClasses> class_weight;
  class_weight.fill(1.0);
  if (cfg.class_weights) {
    std::array<std::size_t, kNumClasses> counts{};
    for (const auto& s : train) ++counts[s.label];
    for (std::size_t k = 0; k < kNumClasses; ++k)
      class_weight[k] = static_cast<double>(train.size()) /
                        (kNumClasses * std::max<std::size_t>(1, counts[k]));
  }

  std::vector<std::vector<int>> train_ids(train.size());
  for (std::size_t i = 0; i < train.size(); ++i) {
    train_ids[i].reserve(train[i].tokens.size());
    for (const auto& t : train[i].tokens) train_ids[i].push_back(vocab.id_of(t));
  }

  auto refs = params.params();
  AdamState adam;
  adam.hyper.lr = cfg.lr;
  std::vector<Tensor> grads;
  for (const auto& r : refs) {
    Tensor t = *r.tensor;
    t.fill(0.0);
    grads.push_back(std::move(t));
  }

  std::vector<std::size_t> idx(train.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    rng.shuffle(idx);
    double epoch_loss = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < idx.size(); start += cfg.batch) {
      const std::size_t end = std::min(idx.size(), start + cfg.batch);
      for (auto& g : grads) g.fill(0.0);
      double batch_loss = 0.0;
      for (std::size_t k = start; k < end; ++k) {
        const auto& ids = train_ids[idx[k]];
        const std::size_t label = train[idx[k]].label;
        std::vector<double> y = embed_average(params, ids);
        std::vector<double> z = matvec(params.w, y);
        for (std::size_t d = 0; d < kNumClasses; ++d) z[d] += params.b.v[d];
        std::vector<double> p = softmax(z);
        batch_loss += class_weight[label] * nll_loss(p, label);

        // d loss / d z = weight * (p - onehot)
        std::vector<double> dz(kNumClasses);
        for (std::size_t d = 0; d < kNumClasses; ++d)
          dz[d] = class_weight[label] * (p[d] - (d == label ? 1.0 : 0.0));
        std::vector<double> dy(params.embed, 0.0);
        for (std::size_t d = 0; d < kNumClasses; ++d) {
          grads[2].v[d] += dz[d];
          for (std::size_t c = 0; c < params.embed; ++c) {
            grads[1].at(d, c) += dz[d] * y[c];
            dy[c] += dz[d] * params.w.at(d, c);
          }
        }
        const double inv_q = 1.0 / static_cast<double>(ids.size());
        for (int id : ids) {
          std::size_t row = (id < 0 || static_cast<std::size_t>(id) >= params.vocab)
                                ? static_cast<std::size_t>(kUnkId)
                                : static_cast<std::size_t>(id);
          for (std::size_t c = 0; c < params.embed; ++c)
            grads[0].at(row, c) += dy[c] * inv_q;
        }
      }
      const double inv = 1.0 / static_cast<double>(end - start);
      for (auto& g : grads)
        for (double& x : g.v) x *= inv;
      adam_update(refs, grads, adam);
      epoch_loss += batch_loss * inv;
      ++batches;
    }
    epoch_loss /= static_cast<double>(batches);
    result.epoch_losses.push_back(epoch_loss);
    if (on_epoch) on_epoch(epoch, epoch_loss);
  }

  result.model.config = cfg;
  result.model.vocab = std::move(vocab);
  result.model.params = std::move(params);

  std::size_t correct = 0;
  for (std::size_t i = 0; i < train.size(); ++i) {
    std::vector<double> y = embed_average(result.model.params, train_ids[i]);
    std::vector<double> z = matvec(result.model.params.w, y);
    for (std::size_t d = 0; d < kNumClasses; ++d) z[d] += result.model.params.b.v[d];
    std::size_t best = 0;
    for (std::size_t d = 1; d < kNumClasses; ++d)
      if (z[d] > z[best]) best = d;
    if (best == train[i].label) ++correct;
  }
  result.train_accuracy = static_cast<double>(correct) / static_cast<double>(train.size());

  if (!test.empty()) {
    std::vector<ChangeCategory> golds, preds;
    for (const auto& r : test) {
      golds.push_back(r.category);
      preds.push_back(predict(r.title, result.model).category);
    }
    result.test_report = classification_report(golds, preds);
  }
  return result;
}

// ---------------------------------------------------------------------------
// Persistence.

inline constexpr const char* kClassifierTag = "classifier/v1";

inline void save_classifier(ClassifierModel& model, const std::string& path) {
  nlohmann::json hyper;
  hyper["embed_dim"] = model.config.embed_dim;
  hyper["vocab"] = model.params.vocab;
  auto& labels = hyper["labels"] = nlohmann::json::array();
  for (auto c : kTrainableCategories) labels.push_back(category_label(c));
  auto refs = model.params.params();
  save_checkpoint(path, kClassifierTag, hyper, refs);
  model.vocab.save(path + ".vocab");
}

inline ClassifierModel load_classifier(const std::string& path) {
  ClassifierModel model;
  model.vocab = Vocabulary::load(path + ".vocab");
  {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw model_error("cannot open checkpoint: " + path);
    std::string magic, header_line;
    std::getline(in, magic);
    if (magic != kCheckpointMagic) throw model_error("not a checkpoint file: " + path);
    std::getline(in, header_line);
    nlohmann::json header = nlohmann::json::parse(header_line, nullptr, false);
    if (header.is_discarded()) throw model_error("corrupt checkpoint header: " + path);
    const auto& hyper = header.at("hyper");
    model.config.embed_dim = hyper.at("embed_dim").get<std::size_t>();
    if (hyper.at("vocab").get<std::size_t>() != model.vocab.size())
      throw model_error("checkpoint/vocabulary size mismatch for " + path);
    std::size_t i = 0;
    for (const auto& label : hyper.at("labels")) {
      if (label.get<std::string>() != category_label(kTrainableCategories[i++]))
        throw model_error("checkpoint label order mismatch for " + path);
    }
  }
  model.params = ClassifierParams::create(model.vocab.size(), model.config.embed_dim);
  auto refs = model.params.params();
  load_checkpoint(path, kClassifierTag, refs);
  return model;
}

}  // namespace relforge
