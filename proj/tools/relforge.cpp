// relforge — release notes from merged pull requests.
//
// Subcommands: collect, train, generate, eval, bench. Exit codes: 0 success,
// 1 usage error, 2 data error, 3 model error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "relforge/baselines.hpp"
#include "relforge/classifier.hpp"
#include "relforge/collector.hpp"
#include "relforge/config.hpp"
#include "relforge/corpus.hpp"
#include "relforge/metrics.hpp"
#include "relforge/notegen.hpp"
#include "relforge/summarizer.hpp"
#include "relforge/textproc.hpp"

namespace rf = relforge;

namespace {

struct CommonOpts {
  std::string config_path;
  std::optional<std::uint64_t> seed;
};

rf::RunConfig effective_config(const CommonOpts& common) {
  rf::RunConfig cfg;
  if (!common.config_path.empty()) cfg = rf::load_run_config(common.config_path);
  if (common.seed) {
    cfg.summarizer.seed = *common.seed;
    cfg.classifier.seed = *common.seed;
  }
  return cfg;
}

// Pipeline stages fail with their stage name up front.
template <typename F>
auto stage(const std::string& name, F&& fn) {
  try {
    return fn();
  } catch (const rf::usage_error& e) {
    throw rf::usage_error(name + ": " + e.what());
  } catch (const rf::model_error& e) {
    throw rf::model_error(name + ": " + e.what());
  } catch (const rf::data_error& e) {
    throw rf::data_error(name + ": " + e.what());
  }
}

std::vector<rf::PullRequest> collect_prs(const std::string& fixture,
                                         const std::string& repo,
                                         const std::string& from_tag,
                                         const std::string& to_tag,
                                         std::string* repo_out = nullptr) {
  if (!fixture.empty()) {
    rf::FixtureContents contents = rf::replay_fixture(rf::FixtureArchive{fixture});
    if (repo_out) *repo_out = contents.range.repo;
    return contents.prs;
  }
  if (repo.empty() || from_tag.empty() || to_tag.empty())
    throw rf::usage_error("need either --fixture or --repo with --from-tag/--to-tag");
  rf::ReleaseRange range{repo, from_tag, to_tag};
  range.validate();
  rf::GithubConfig gh;
  gh.token = rf::github_token_from_env();
  rf::GithubClient client(gh);
  std::vector<int> numbers = client.list_merged_prs(range);
  if (repo_out) *repo_out = repo;
  return client.fetch_prs(repo, numbers);
}

void write_text(const std::string& out_path, const std::string& text) {
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw rf::data_error("cannot write output file: " + out_path);
  out << text;
}

// ---------------------------------------------------------------------------

int cmd_collect(const std::string& fixture, const std::string& repo,
                const std::string& from_tag, const std::string& to_tag,
                const std::string& out_path) {
  std::string repo_name;
  std::vector<rf::PullRequest> prs =
      stage("collect", [&] { return collect_prs(fixture, repo, from_tag, to_tag, &repo_name); });
  rf::ReleaseRange range{repo_name.empty() ? repo : repo_name, from_tag, to_tag};
  if (!fixture.empty()) {
    rf::FixtureContents contents = rf::replay_fixture(rf::FixtureArchive{fixture});
    range = contents.range;
  }
  rf::write_fixture(out_path, range, prs);
  std::fprintf(stdout, "collected %zu merged PRs into %s\n", prs.size(), out_path.c_str());
  return 0;
}

int cmd_train(const std::string& which, const std::string& data_path,
              const std::string& out_path, const rf::RunConfig& cfg) {
  std::vector<rf::DatasetRecord> records = rf::load_dataset(data_path);
  if (records.empty()) throw rf::data_error("dataset is empty: " + data_path);

  if (which == "summarizer") {
    rf::SummarizerConfig scfg = cfg.summarizer;
    rf::DatasetSplit split = rf::split_dataset(records, {}, scfg.seed);
    auto encode_all = [&](const std::vector<rf::DatasetRecord>& rs, const rf::Vocabulary& vocab,
                          std::vector<rf::EncodedExample>& out) {
      std::size_t skipped = 0;
      for (const auto& r : rs) {
        auto src = rf::tokenize(r.input_text);
        auto tgt = rf::tokenize(r.target_text);
        if (src.empty() || tgt.empty()) {
          ++skipped;
          continue;
        }
        out.push_back(rf::encode_example(src, tgt, vocab, scfg.max_src, scfg.max_tgt));
      }
      return skipped;
    };

    std::vector<std::vector<std::string>> corpus;
    for (const auto& r : split.train) {
      corpus.push_back(rf::tokenize(r.input_text));
      corpus.push_back(rf::tokenize(r.target_text));
    }
    rf::Vocabulary vocab = rf::build_vocab(corpus, scfg.vocab_cap);

    std::vector<rf::EncodedExample> train_set, val_set;
    std::size_t skipped = encode_all(split.train, vocab, train_set);
    skipped += encode_all(split.val, vocab, val_set);
    if (skipped)
      std::fprintf(stderr, "skipped %zu records with empty input or target\n", skipped);
    if (train_set.empty()) throw rf::data_error("no usable training records");

    rf::SummarizerModel model;
    model.config = scfg;
    model.vocab = vocab;
    model.params = rf::SummarizerParams::create(vocab.size(), scfg.embed_dim, scfg.hidden);
    rf::Rng init_rng(scfg.seed);
    model.params.init(init_rng);

    rf::train_summarizer(model.params, train_set, val_set, scfg,
                         [](const rf::EpochMetrics& m) {
                           std::fprintf(stdout, "epoch %zu train_loss %.12g val_loss %.12g\n",
                                        m.epoch, m.train_loss, m.val_loss);
                           std::fflush(stdout);
                         });
    rf::save_summarizer(model, out_path);
    std::fprintf(stdout, "saved summarizer checkpoint to %s (vocab %zu)\n", out_path.c_str(),
                 model.vocab.size());
    return 0;
  }

  if (which == "classifier") {
    std::vector<rf::LabeledTitle> titles;
    std::size_t dropped_unknown = 0;
    for (const auto& r : records) {
      if (r.category == rf::ChangeCategory::Unknown) {
        ++dropped_unknown;
        continue;
      }
      std::string title = rf::split_input_sections(r.input_text)[0];
      if (title.empty()) continue;
      titles.push_back({title, r.category});
    }
    if (dropped_unknown)
      std::fprintf(stderr, "dropped %zu records with unknown category\n", dropped_unknown);
    rf::SynonymTable synonyms = cfg.synonym_table_path.empty()
                                    ? rf::bundled_synonyms()
                                    : rf::load_synonyms(cfg.synonym_table_path);
    rf::ClassifierTrainResult result = rf::train_classifier(
        titles, cfg.classifier, synonyms, [](std::size_t epoch, double loss) {
          std::fprintf(stdout, "epoch %zu train_loss %.12g\n", epoch, loss);
          std::fflush(stdout);
        });
    rf::save_classifier(result.model, out_path);
    std::fprintf(stdout,
                 "saved classifier checkpoint to %s (vocab %zu, train accuracy %.4f, "
                 "test macro-F1 %.4f)\n",
                 out_path.c_str(), result.model.vocab.size(), result.train_accuracy,
                 result.test_report.macro_f1);
    return 0;
  }

  throw rf::usage_error("unknown model \"" + which + "\" (expected summarizer or classifier)");
}

int cmd_generate(const std::string& fixture, const std::string& repo,
                 const std::string& from_tag, const std::string& to_tag,
                 const std::string& version, const std::string& date,
                 const std::string& summarizer_ckpt, const std::string& classifier_ckpt,
                 std::optional<std::size_t> beam, const std::string& out_path,
                 const rf::RunConfig& cfg) {
  if (version.empty()) throw rf::usage_error("--version is required");

  std::string repo_name;
  std::vector<rf::PullRequest> prs =
      stage("collect", [&] { return collect_prs(fixture, repo, from_tag, to_tag, &repo_name); });

  std::string note_date = date.empty()
                              ? rf::format_utc_date(std::chrono::duration_cast<std::chrono::seconds>(
                                                        std::chrono::system_clock::now()
                                                            .time_since_epoch())
                                                        .count())
                              : date;
  if (prs.empty()) {
    rf::ReleaseNote note;
    note.version = version;
    note.date = note_date;
    write_text(out_path, rf::render_markdown(note, cfg.note_style));
    return 0;
  }

  rf::SummarizerModel summarizer =
      stage("load-summarizer", [&] { return rf::load_summarizer(summarizer_ckpt); });
  if (beam) summarizer.config.beam = *beam;
  rf::ClassifierModel classifier =
      stage("load-classifier", [&] { return rf::load_classifier(classifier_ckpt); });

  std::map<int, std::string> entries;
  std::map<int, rf::ChangeCategory> categories;
  for (const auto& pr : prs) {
    entries[pr.number] =
        stage("summarize", [&] { return rf::summarize(pr, summarizer); });
    categories[pr.number] =
        stage("classify", [&] { return rf::predict(pr.title, classifier).category; });
  }

  std::string markdown = stage("render", [&] {
    auto pairs = rf::pair_entries(entries, categories, repo_name);
    return rf::render_markdown(rf::build_note(version, note_date, pairs, cfg.note_style),
                               cfg.note_style);
  });
  write_text(out_path, markdown);
  return 0;
}

// Evaluation: entry systems score corpus ROUGE against the reference entries;
// category systems produce a classification report.

void print_rouge_table(const std::string& system, const rf::CorpusRouge& r,
                       const std::string& format, std::string& out) {
  char buf[512];
  if (format == "records") {
    nlohmann::json line{{"system", system},
                        {"aggregation", "micro"},
                        {"rouge1_p", r.rouge1_micro.precision * 100.0},
                        {"rouge1_r", r.rouge1_micro.recall * 100.0},
                        {"rouge1_f1", r.rouge1_micro.f1 * 100.0},
                        {"rouge2_p", r.rouge2_micro.precision * 100.0},
                        {"rouge2_r", r.rouge2_micro.recall * 100.0},
                        {"rouge2_f1", r.rouge2_micro.f1 * 100.0},
                        {"rougel_p", r.rougel_micro.precision * 100.0},
                        {"rougel_r", r.rougel_micro.recall * 100.0},
                        {"rougel_f1", r.rougel_micro.f1 * 100.0}};
    out += line.dump() + "\n";
    nlohmann::json macro{{"system", system},
                         {"aggregation", "macro"},
                         {"rouge1_p", r.rouge1_macro.precision * 100.0},
                         {"rouge1_r", r.rouge1_macro.recall * 100.0},
                         {"rouge1_f1", r.rouge1_macro.f1 * 100.0},
                         {"rouge2_p", r.rouge2_macro.precision * 100.0},
                         {"rouge2_r", r.rouge2_macro.recall * 100.0},
                         {"rouge2_f1", r.rouge2_macro.f1 * 100.0},
                         {"rougel_p", r.rougel_macro.precision * 100.0},
                         {"rougel_r", r.rougel_macro.recall * 100.0},
                         {"rougel_f1", r.rougel_macro.f1 * 100.0}};
    out += macro.dump() + "\n";
    return;
  }
  out += "                 ROUGE-1                 ROUGE-2                 ROUGE-L\n";
  out += "system    aggr   P      R      F1       P      R      F1       P      R      F1\n";
  auto row = [&](const char* aggr, const rf::RougeScore& a, const rf::RougeScore& b,
                 const rf::RougeScore& c) {
    std::snprintf(buf, sizeof(buf),
                  "%-9s %-6s %-6.2f %-6.2f %-8.2f %-6.2f %-6.2f %-8.2f %-6.2f %-6.2f %-6.2f\n",
                  system.c_str(), aggr, a.precision * 100, a.recall * 100, a.f1 * 100,
                  b.precision * 100, b.recall * 100, b.f1 * 100, c.precision * 100,
                  c.recall * 100, c.f1 * 100);
    out += buf;
  };
  row("micro", r.rouge1_micro, r.rouge2_micro, r.rougel_micro);
  row("macro", r.rouge1_macro, r.rouge2_macro, r.rougel_macro);
}

void print_class_report(const std::string& system, const rf::ClassReport& r,
                        const std::string& format, std::string& out) {
  if (format == "records") {
    for (std::size_t k = 0; k < rf::kNumClasses; ++k) {
      nlohmann::json line{{"system", system},
                          {"category", rf::category_label(rf::kTrainableCategories[k])},
                          {"precision", r.per_class[k].precision * 100.0},
                          {"recall", r.per_class[k].recall * 100.0},
                          {"f1", r.per_class[k].f1 * 100.0},
                          {"gold_count", r.per_class[k].gold_count}};
      out += line.dump() + "\n";
    }
    nlohmann::json macro{{"system", system},
                         {"category", "macro"},
                         {"precision", r.macro_precision * 100.0},
                         {"recall", r.macro_recall * 100.0},
                         {"f1", r.macro_f1 * 100.0},
                         {"accuracy", r.accuracy * 100.0}};
    out += macro.dump() + "\n";
    return;
  }
  char buf[256];
  out += "system    category        P      R      F1     gold\n";
  for (std::size_t k = 0; k < rf::kNumClasses; ++k) {
    std::snprintf(buf, sizeof(buf), "%-9s %-15s %-6.2f %-6.2f %-6.2f %zu\n", system.c_str(),
                  rf::category_label(rf::kTrainableCategories[k]),
                  r.per_class[k].precision * 100, r.per_class[k].recall * 100,
                  r.per_class[k].f1 * 100, r.per_class[k].gold_count);
    out += buf;
  }
  std::snprintf(buf, sizeof(buf), "%-9s %-15s %-6.2f %-6.2f %-6.2f accuracy %.2f\n",
                system.c_str(), "macro", r.macro_precision * 100, r.macro_recall * 100,
                r.macro_f1 * 100, r.accuracy * 100);
  out += buf;
}

int cmd_eval(const std::string& data_path, const std::string& system,
             const std::string& summarizer_ckpt, const std::string& classifier_ckpt,
             std::optional<std::size_t> beam, std::uint64_t seed, const std::string& format,
             const std::string& out_path) {
  std::vector<rf::DatasetRecord> records = rf::load_dataset(data_path);
  if (records.empty()) throw rf::data_error("dataset is empty: " + data_path);
  std::string out;

  const bool entry_system =
      system == "deeprelease" || system == "leadcm" || system == "prtitle";
  const bool category_system =
      system == "deeprelease" || system == "rg" || system == "keywords";
  if (!entry_system && !category_system)
    throw rf::usage_error("unknown system \"" + system +
                          "\" (expected deeprelease, leadcm, prtitle, rg, or keywords)");

  if (entry_system && (system != "deeprelease" || !summarizer_ckpt.empty())) {
    std::optional<rf::SummarizerModel> model;
    if (system == "deeprelease") {
      model = rf::load_summarizer(summarizer_ckpt);
      if (beam) model->config.beam = *beam;
    }
    std::vector<std::pair<rf::TokenSeq, rf::TokenSeq>> pairs;
    for (const auto& r : records) {
      rf::TokenSeq ref = rf::tokenize(r.target_text);
      if (ref.empty()) continue;
      rf::TokenSeq cand;
      if (system == "prtitle") {
        cand = rf::tokenize(rf::split_input_sections(r.input_text)[0]);
      } else if (system == "leadcm") {
        cand = rf::tokenize(
            rf::lead_cm_from_text(rf::split_input_sections(r.input_text)[2]));
      } else {
        rf::TokenSeq src = rf::tokenize(r.input_text);
        if (src.empty()) continue;
        rf::EncodedExample ex = rf::encode_example(src, {}, model->vocab,
                                                   model->config.max_src,
                                                   model->config.max_tgt);
        rf::BeamConfig bc;
        bc.width = model->config.beam;
        bc.max_len = model->config.max_tgt;
        cand = rf::decode_extended(rf::beam_search(model->params, ex, bc), model->vocab,
                                   ex.oov_tokens);
      }
      pairs.emplace_back(std::move(ref), std::move(cand));
    }
    if (pairs.empty()) throw rf::data_error("no evaluable records for entry metrics");
    print_rouge_table(system, rf::corpus_rouge(pairs), format, out);
  }

  if (category_system && (system != "deeprelease" || !classifier_ckpt.empty())) {
    std::vector<rf::ChangeCategory> golds;
    std::vector<std::string> titles;
    for (const auto& r : records) {
      if (r.category == rf::ChangeCategory::Unknown) continue;
      std::string title = rf::split_input_sections(r.input_text)[0];
      if (title.empty()) continue;
      golds.push_back(r.category);
      titles.push_back(std::move(title));
    }
    if (golds.empty()) throw rf::data_error("no evaluable records for category metrics");

    if (system == "rg") {
      rf::CategoryPrior prior = rf::CategoryPrior::from_golds(golds);
      rf::RandomGuessResult rg = rf::random_guess(golds, prior, 30, seed);
      rf::ClassReport averaged;
      averaged.per_class = rg.per_class;
      averaged.macro_precision = rg.macro_precision;
      averaged.macro_recall = rg.macro_recall;
      averaged.macro_f1 = rg.macro_f1;
      averaged.accuracy = rg.accuracy;
      averaged.samples = golds.size();
      for (std::size_t k = 0; k < golds.size(); ++k)
        ++averaged.per_class[rf::class_index(golds[k])].gold_count;
      print_class_report("rg", averaged, format, out);
    } else {
      std::vector<rf::ChangeCategory> preds;
      if (system == "keywords") {
        for (const auto& t : titles) {
          rf::ChangeCategory c = rf::keyword_classify(t);
          // The heuristic can abstain; score abstentions as the majority
          // fallback (first class in order).
          preds.push_back(c == rf::ChangeCategory::Unknown ? rf::kTrainableCategories[0] : c);
        }
      } else {
        rf::ClassifierModel model = rf::load_classifier(classifier_ckpt);
        for (const auto& t : titles) preds.push_back(rf::predict(t, model).category);
      }
      print_class_report(system, rf::classification_report(golds, preds), format, out);
    }
  }

  write_text(out_path, out);
  return 0;
}

int cmd_bench(const std::string& fixture, const std::string& summarizer_ckpt,
              const std::string& classifier_ckpt, std::vector<std::size_t> sizes,
              std::size_t repetitions, const std::string& out_path) {
  rf::FixtureContents contents = rf::replay_fixture(rf::FixtureArchive{fixture});
  if (contents.prs.empty()) throw rf::data_error("bench fixture has no PRs");
  rf::SummarizerModel summarizer = rf::load_summarizer(summarizer_ckpt);
  rf::ClassifierModel classifier = rf::load_classifier(classifier_ckpt);
  if (sizes.empty()) sizes = rf::default_bench_sizes();

  const auto& prs = contents.prs;
  auto entry_runner = [&](std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) rf::summarize(prs[i % prs.size()], summarizer);
  };
  auto category_runner = [&](std::size_t n) {
    for (std::size_t i = 0; i < n; ++i)
      rf::predict(prs[i % prs.size()].title, classifier);
  };
  rf::TimingTable entry_table = rf::timing_harness(entry_runner, sizes, repetitions);
  rf::TimingTable category_table = rf::timing_harness(category_runner, sizes, repetitions);

  std::string out = "#PR      Entry Summarizer    Category Discriminator\n";
  char buf[160];
  for (std::size_t i = 0; i < entry_table.rows.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%-8zu %-19.3f %.3f\n", entry_table.rows[i].input_size,
                  entry_table.rows[i].ms_per_item, category_table.rows[i].ms_per_item);
    out += buf;
  }
  std::snprintf(buf, sizeof(buf), "%-8s %-19.3f %.3f\n", "Average",
                entry_table.average_ms_per_item, category_table.average_ms_per_item);
  out += buf;
  out += "(milliseconds per item; " + std::to_string(repetitions) + " repetitions per size)\n";
  write_text(out_path, out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"relforge: generate grouped release notes from merged pull requests"};
  app.require_subcommand(1);

  CommonOpts common;
  app.add_option("--config", common.config_path, "JSON config file");
  app.add_option("--seed", common.seed, "master RNG seed");

  // collect
  auto* collect = app.add_subcommand("collect", "collect merged PRs into an archive");
  std::string c_fixture, c_repo, c_from, c_to, c_out;
  collect->add_option("--fixture", c_fixture, "replay a recorded fixture instead of the API");
  collect->add_option("--repo", c_repo, "owner/name");
  collect->add_option("--from-tag", c_from, "previous release tag");
  collect->add_option("--to-tag", c_to, "current release tag (or HEAD)");
  collect->add_option("--out", c_out, "output archive path")->required();

  // train
  auto* train = app.add_subcommand("train", "train the summarizer or the classifier");
  std::string t_which, t_data, t_out;
  train->add_option("model", t_which, "summarizer|classifier")->required();
  train->add_option("data", t_data, "dataset file (JSON lines)")->required();
  train->add_option("--out", t_out, "checkpoint output path")->required();
  std::optional<std::size_t> t_epochs, t_batch;
  std::optional<double> t_lr;
  train->add_option("--epochs", t_epochs, "training epochs");
  train->add_option("--batch", t_batch, "batch size");
  train->add_option("--lr", t_lr, "learning rate");

  // generate
  auto* generate = app.add_subcommand("generate", "run the full pipeline to a markdown note");
  std::string g_fixture, g_repo, g_from, g_to, g_version, g_date, g_sum, g_cls, g_out;
  std::optional<std::size_t> g_beam;
  generate->add_option("--fixture", g_fixture, "replay a recorded fixture instead of the API");
  generate->add_option("--repo", g_repo, "owner/name");
  generate->add_option("--from-tag", g_from, "previous release tag");
  generate->add_option("--to-tag", g_to, "current release tag (or HEAD)");
  generate->add_option("--version", g_version, "release version string")->required();
  generate->add_option("--date", g_date, "release date (default: today, UTC)");
  generate->add_option("--summarizer-ckpt", g_sum, "summarizer checkpoint")->required();
  generate->add_option("--classifier-ckpt", g_cls, "classifier checkpoint")->required();
  generate->add_option("--beam", g_beam, "beam width override");
  generate->add_option("--out", g_out, "output file (default stdout)");

  // eval
  auto* eval = app.add_subcommand("eval", "evaluate a system on a dataset");
  std::string e_data, e_system, e_sum, e_cls, e_format = "md", e_out;
  std::optional<std::size_t> e_beam;
  eval->add_option("data", e_data, "dataset file")->required();
  eval->add_option("system", e_system, "deeprelease|leadcm|prtitle|rg|keywords")->required();
  eval->add_option("--summarizer-ckpt", e_sum, "summarizer checkpoint");
  eval->add_option("--classifier-ckpt", e_cls, "classifier checkpoint");
  eval->add_option("--beam", e_beam, "beam width override");
  eval->add_option("--format", e_format, "md|records")
      ->check(CLI::IsMember({"md", "records"}));
  eval->add_option("--out", e_out, "output file (default stdout)");

  // bench
  auto* bench = app.add_subcommand("bench", "inference timing table");
  std::string b_fixture, b_sum, b_cls, b_out;
  std::vector<std::size_t> b_sizes;
  std::size_t b_reps = 10;
  bench->add_option("--fixture", b_fixture, "PR fixture to draw inputs from")->required();
  bench->add_option("--summarizer-ckpt", b_sum, "summarizer checkpoint")->required();
  bench->add_option("--classifier-ckpt", b_cls, "classifier checkpoint")->required();
  bench->add_option("sizes", b_sizes, "input sizes (default 10..100 step 10)");
  bench->add_option("--repetitions", b_reps, "repetitions per size");
  bench->add_option("--out", b_out, "output file (default stdout)");

  try {
    app.parse(argc, argv);

    rf::RunConfig cfg = effective_config(common);
    if (t_epochs) {
      cfg.summarizer.epochs = *t_epochs;
      cfg.classifier.epochs = *t_epochs;
    }
    if (t_batch) {
      cfg.summarizer.batch = *t_batch;
      cfg.classifier.batch = *t_batch;
    }
    if (t_lr) {
      cfg.summarizer.lr = *t_lr;
      cfg.classifier.lr = *t_lr;
    }

    if (collect->parsed())
      return cmd_collect(c_fixture, c_repo, c_from, c_to, c_out);
    if (train->parsed()) return cmd_train(t_which, t_data, t_out, cfg);
    if (generate->parsed())
      return cmd_generate(g_fixture, g_repo, g_from, g_to, g_version, g_date, g_sum, g_cls,
                          g_beam, g_out, cfg);
    if (eval->parsed())
      return cmd_eval(e_data, e_system, e_sum, e_cls, e_beam, common.seed.value_or(13),
                      e_format, e_out);
    if (bench->parsed())
      return cmd_bench(b_fixture, b_sum, b_cls, b_sizes, b_reps, b_out);
    return 1;
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const rf::usage_error& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 1;
  } catch (const rf::data_error& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return 2;
  } catch (const rf::model_error& e) {
    std::fprintf(stderr, "model error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
