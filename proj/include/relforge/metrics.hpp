#pragma once

#include <algorithm>
#include <chrono>
#include <cstddef>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "relforge/errors.hpp"
#include "relforge/types.hpp"

namespace relforge {

struct RougeScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

inline double f1_of(double p, double r) { return (p + r) > 0.0 ? 2.0 * p * r / (p + r) : 0.0; }

using TokenSeq = std::vector<std::string>;

namespace detail {

inline std::map<TokenSeq, std::size_t> ngram_counts(const TokenSeq& tokens, std::size_t n) {
  std::map<TokenSeq, std::size_t> counts;
  if (tokens.size() >= n && n > 0)
    for (std::size_t i = 0; i + n <= tokens.size(); ++i)
      ++counts[TokenSeq(tokens.begin() + i, tokens.begin() + i + n)];
  return counts;
}

struct RougeNRaw {
  std::size_t overlap = 0;   // clipped n-gram match count
  std::size_t ref_total = 0; // n-grams in the reference
  std::size_t cand_total = 0;
};

inline RougeNRaw rouge_n_raw(const TokenSeq& reference, const TokenSeq& candidate,
                             std::size_t n) {
  auto ref_counts = ngram_counts(reference, n);
  auto cand_counts = ngram_counts(candidate, n);
  RougeNRaw raw;
  for (const auto& [gram, cnt] : ref_counts) {
    raw.ref_total += cnt;
    auto it = cand_counts.find(gram);
    if (it != cand_counts.end()) raw.overlap += std::min(cnt, it->second);
  }
  for (const auto& [gram, cnt] : cand_counts) raw.cand_total += cnt;
  return raw;
}

inline std::size_t lcs_length(const TokenSeq& a, const TokenSeq& b) {
  const std::size_t n = a.size(), m = b.size();
  std::vector<std::size_t> prev(m + 1, 0), cur(m + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j)
      cur[j] = (a[i - 1] == b[j - 1]) ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    std::swap(prev, cur);
  }
  return prev[m];
}

}  // namespace detail

// Clipped n-gram overlap. Precision is against the candidate's gram count,
// recall against the reference's; an empty gram set zeroes its ratio.
inline RougeScore rouge_n(const TokenSeq& reference, const TokenSeq& candidate,
                          std::size_t n) {
  if (n < 1) throw data_error("rouge_n requires n >= 1");
  auto raw = detail::rouge_n_raw(reference, candidate, n);
  RougeScore s;
  s.precision = raw.cand_total ? static_cast<double>(raw.overlap) / raw.cand_total : 0.0;
  s.recall = raw.ref_total ? static_cast<double>(raw.overlap) / raw.ref_total : 0.0;
  s.f1 = f1_of(s.precision, s.recall);
  return s;
}

inline RougeScore rouge_l(const TokenSeq& reference, const TokenSeq& candidate) {
  const std::size_t l = detail::lcs_length(reference, candidate);
  RougeScore s;
  s.precision = candidate.empty() ? 0.0 : static_cast<double>(l) / candidate.size();
  s.recall = reference.empty() ? 0.0 : static_cast<double>(l) / reference.size();
  s.f1 = f1_of(s.precision, s.recall);
  return s;
}

struct CorpusRouge {
  RougeScore rouge1_micro, rouge2_micro, rougel_micro;
  RougeScore rouge1_macro, rouge2_macro, rougel_macro;
  std::size_t pairs = 0;
};

// Micro-aggregation sums numerators and denominators over the whole set;
// macro averages per-pair scores. Both are reported.
inline CorpusRouge corpus_rouge(const std::vector<std::pair<TokenSeq, TokenSeq>>& pairs) {
  if (pairs.empty()) throw data_error("corpus_rouge over an empty set");
  CorpusRouge out;
  out.pairs = pairs.size();
  std::size_t ov1 = 0, ref1 = 0, cand1 = 0;
  std::size_t ov2 = 0, ref2 = 0, cand2 = 0;
  std::size_t lsum = 0, ref_len = 0, cand_len = 0;
  for (const auto& [ref, cand] : pairs) {
    auto r1 = detail::rouge_n_raw(ref, cand, 1);
    auto r2 = detail::rouge_n_raw(ref, cand, 2);
    ov1 += r1.overlap;
    ref1 += r1.ref_total;
    cand1 += r1.cand_total;
    ov2 += r2.overlap;
    ref2 += r2.ref_total;
    cand2 += r2.cand_total;
    lsum += detail::lcs_length(ref, cand);
    ref_len += ref.size();
    cand_len += cand.size();

    auto s1 = rouge_n(ref, cand, 1);
    auto s2 = rouge_n(ref, cand, 2);
    auto sl = rouge_l(ref, cand);
    out.rouge1_macro.precision += s1.precision;
    out.rouge1_macro.recall += s1.recall;
    out.rouge1_macro.f1 += s1.f1;
    out.rouge2_macro.precision += s2.precision;
    out.rouge2_macro.recall += s2.recall;
    out.rouge2_macro.f1 += s2.f1;
    out.rougel_macro.precision += sl.precision;
    out.rougel_macro.recall += sl.recall;
    out.rougel_macro.f1 += sl.f1;
  }
  auto finish_micro = [](std::size_t ov, std::size_t ref, std::size_t cand) {
    RougeScore s;
    s.precision = cand ? static_cast<double>(ov) / cand : 0.0;
    s.recall = ref ? static_cast<double>(ov) / ref : 0.0;
    s.f1 = f1_of(s.precision, s.recall);
    return s;
  };
  out.rouge1_micro = finish_micro(ov1, ref1, cand1);
  out.rouge2_micro = finish_micro(ov2, ref2, cand2);
  out.rougel_micro = finish_micro(lsum, ref_len, cand_len);
  const double n = static_cast<double>(pairs.size());
  for (RougeScore* s : {&out.rouge1_macro, &out.rouge2_macro, &out.rougel_macro}) {
    s->precision /= n;
    s->recall /= n;
    s->f1 /= n;
  }
  return out;
}

struct ClassStats {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t gold_count = 0;
  std::size_t predicted_count = 0;
};

struct ClassReport {
  // Indexed by kTrainableCategories order.
  std::array<ClassStats, 4> per_class{};
  // confusion[gold][pred]
  std::array<std::array<std::size_t, 4>, 4> confusion{};
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
  double accuracy = 0.0;
  std::size_t samples = 0;
};

inline std::size_t class_index(ChangeCategory c) {
  for (std::size_t i = 0; i < kTrainableCategories.size(); ++i)
    if (kTrainableCategories[i] == c) return i;
  throw data_error(std::string("category outside the 4-class set: ") + category_label(c));
}

namespace detail {

inline ClassReport class_report_impl(const std::vector<ChangeCategory>& golds,
                                     const std::vector<ChangeCategory>& preds,
                                     bool allow_abstain) {
  if (golds.size() != preds.size())
    throw data_error("classification_report: golds and preds differ in length");
  ClassReport r;
  r.samples = golds.size();
  std::size_t correct = 0;
  std::array<std::size_t, 4> abstained_golds{};
  for (std::size_t i = 0; i < golds.size(); ++i) {
    std::size_t g = class_index(golds[i]);
    if (allow_abstain && preds[i] == ChangeCategory::Unknown) {
      ++abstained_golds[g];
      continue;
    }
    std::size_t p = class_index(preds[i]);
    ++r.confusion[g][p];
    if (g == p) ++correct;
  }
  for (std::size_t k = 0; k < 4; ++k) {
    std::size_t tp = r.confusion[k][k];
    std::size_t gold = 0, pred = 0;
    for (std::size_t j = 0; j < 4; ++j) {
      gold += r.confusion[k][j];
      pred += r.confusion[j][k];
    }
    auto& c = r.per_class[k];
    c.gold_count = gold;
    c.predicted_count = pred;
    c.precision = pred ? static_cast<double>(tp) / pred : 0.0;
    c.recall = gold ? static_cast<double>(tp) / gold : 0.0;
    c.f1 = f1_of(c.precision, c.recall);
    r.macro_precision += c.precision / 4.0;
    r.macro_recall += c.recall / 4.0;
    r.macro_f1 += c.f1 / 4.0;
  }
  r.accuracy = r.samples ? static_cast<double>(correct) / r.samples : 0.0;
  return r;
}

struct TimingRow {
  std::size_t input_size = 0;
  double ms_per_item = 0.0;  // mean over repetitions
};

struct TimingTable {
  std::vector<TimingRow> rows;
  double average_ms_per_item = 0.0;
  std::size_t repetitions = 0;
};

// Runs the model over batches of each requested size, `repetitions` times
// each, and reports the mean per-item wall-clock latency.
inline TimingTable timing_harness(const std::function<void(std::size_t)>& runner,
                                  const std::vector<std::size_t>& input_sizes,
                                  std::size_t repetitions = 10) {
  TimingTable table;
  table.repetitions = repetitions;
  for (std::size_t n : input_sizes) {
    double total_ms = 0.0;
    for (std::size_t rep = 0; rep < repetitions; ++rep) {
      auto t0 = std::chrono::steady_clock::now();
      runner(n);
      auto t1 = std::chrono::steady_clock::now();
      total_ms += std::chrono::duration<double, std::milli>(t1 - t0).count();
    }
    TimingRow row;
    row.input_size = n;
    row.ms_per_item =
        n && repetitions ? total_ms / static_cast<double>(repetitions) / static_cast<double>(n)
                         : 0.0;
    table.rows.push_back(row);
  }
  if (!table.rows.empty()) {
    double sum = 0.0;
    for (const auto& r : table.rows) sum += r.ms_per_item;
    table.average_ms_per_item = sum / static_cast<double>(table.rows.size());
  }
  return table;
}

inline std::vector<std::size_t> default_bench_sizes() {
  std::vector<std::size_t> sizes;
  for (std::size_t n = 10; n <= 100; n += 10) sizes.push_back(n);
  return sizes;
}

}  // namespace relforge
