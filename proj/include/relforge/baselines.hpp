#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "relforge/errors.hpp"
#include "relforge/metrics.hpp"
#include "relforge/preprocess.hpp"
#include "relforge/rng.hpp"
#include "relforge/textproc.hpp"
#include "relforge/types.hpp"

namespace relforge {

inline constexpr std::size_t kLeadCmDefaultTokens = 9;

// First k tokens of the cleaned commit messages, in commit order.
inline std::string lead_cm(const PullRequest& pr, std::size_t k = kLeadCmDefaultTokens) {
  std::vector<std::string> tokens;
  for (const auto& msg : pr.commit_messages) {
    for (auto& t : tokenize(clean_text(msg).text)) {
      tokens.push_back(std::move(t));
      if (tokens.size() >= k) return join_tokens(tokens);
    }
  }
  return join_tokens(tokens);
}

// Same rule applied to a pre-joined commit section (dataset evaluation path).
inline std::string lead_cm_from_text(const std::string& cleaned_commit_text,
                                     std::size_t k = kLeadCmDefaultTokens) {
  std::vector<std::string> tokens = tokenize(cleaned_commit_text);
  if (tokens.size() > k) tokens.resize(k);
  return join_tokens(tokens);
}

inline std::string pr_title(const PullRequest& pr) { return clean_text(pr.title).text; }

// Class prior over the four trainable categories.
struct CategoryPrior {
  std::array<double, kNumClasses> probabilities{};

  static CategoryPrior from_counts(const std::array<std::size_t, kNumClasses>& counts) {
    std::size_t total = 0;
    for (auto c : counts) total += c;
    if (total == 0) throw data_error("category prior from empty counts");
    CategoryPrior p;
    for (std::size_t i = 0; i < kNumClasses; ++i)
      p.probabilities[i] = static_cast<double>(counts[i]) / static_cast<double>(total);
    return p;
  }

  static CategoryPrior from_golds(const std::vector<ChangeCategory>& golds) {
    std::array<std::size_t, kNumClasses> counts{};
    for (auto g : golds) ++counts[class_index(g)];
    return from_counts(counts);
  }

  void validate() const {
    double sum = 0.0;
    for (double p : probabilities) {
      if (p < 0.0) throw data_error("category prior has a negative probability");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-12)
      throw data_error("category prior does not sum to 1");
  }

  ChangeCategory sample(Rng& rng) const {
    double u = rng.real();
    double acc = 0.0;
    for (std::size_t i = 0; i < kNumClasses; ++i) {
      acc += probabilities[i];
      if (u < acc) return kTrainableCategories[i];
    }
    return kTrainableCategories[kNumClasses - 1];
  }
};

struct RandomGuessResult {
  // Arithmetic means of per-trial metrics.
  std::array<ClassStats, kNumClasses> per_class{};
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
  double accuracy = 0.0;
  std::size_t trials = 0;
  std::vector<std::vector<ChangeCategory>> trial_predictions;
};

// Samples one category per input from the prior, per trial; metrics are
// computed per trial and then averaged.
inline RandomGuessResult random_guess(const std::vector<ChangeCategory>& golds,
                                      const CategoryPrior& prior, std::size_t trials,
                                      std::uint64_t seed) {
  prior.validate();
  if (golds.empty()) throw data_error("random_guess over an empty gold set");
  RandomGuessResult out;
  out.trials = trials;
  Rng rng(seed);
  for (std::size_t t = 0; t < trials; ++t) {
    std::vector<ChangeCategory> preds;
    preds.reserve(golds.size());
    for (std::size_t i = 0; i < golds.size(); ++i) preds.push_back(prior.sample(rng));
    ClassReport report = classification_report(golds, preds);
    for (std::size_t k = 0; k < kNumClasses; ++k) {
      out.per_class[k].precision += report.per_class[k].precision;
      out.per_class[k].recall += report.per_class[k].recall;
      out.per_class[k].f1 += report.per_class[k].f1;
    }
    out.macro_precision += report.macro_precision;
    out.macro_recall += report.macro_recall;
    out.macro_f1 += report.macro_f1;
    out.accuracy += report.accuracy;
    out.trial_predictions.push_back(std::move(preds));
  }
  const double inv = 1.0 / static_cast<double>(trials);
  for (auto& c : out.per_class) {
    c.precision *= inv;
    c.recall *= inv;
    c.f1 *= inv;
  }
  out.macro_precision *= inv;
  out.macro_recall *= inv;
  out.macro_f1 *= inv;
  out.accuracy *= inv;
  return out;
}

// The keyword heuristic baseline shares the unification rule.
inline ChangeCategory keyword_classify(const std::string& title,
                                       const KeywordTable& table = KeywordTable::defaults()) {
  return unify_category(title, table);
}

}  // namespace relforge
