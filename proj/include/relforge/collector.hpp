#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "relforge/errors.hpp"
#include "relforge/types.hpp"

namespace relforge {

struct ReleaseRange {
  std::string repo;  // "owner/name"
  std::string from_tag;
  std::string to_tag;  // git tag or "HEAD"

  void validate() const {
    if (repo.find('/') == std::string::npos)
      throw usage_error("repo must be \"owner/name\", got \"" + repo + "\"");
    if (from_tag == to_tag)
      throw usage_error("release range endpoints must differ (" + from_tag + ")");
  }
};

// ---------------------------------------------------------------------------
// Fixture archives: a header line with the range metadata, then one PR record
// per line in the corpus line format. Replay is deterministic and offline.

struct FixtureArchive {
  std::string path;
};

inline constexpr const char* kFixtureTag = "relforge-fixture/v1";

namespace detail {

inline nlohmann::json pr_to_json(const PullRequest& pr) {
  return nlohmann::json{{"repo", pr.repo},
                        {"number", pr.number},
                        {"title", pr.title},
                        {"description", pr.description},
                        {"commit_messages", pr.commit_messages},
                        {"merged_at", pr.merged_at}};
}

inline PullRequest pr_from_json(const nlohmann::json& j, std::size_t line_no) {
  for (const char* key :
       {"repo", "number", "title", "description", "commit_messages", "merged_at"}) {
    if (!j.contains(key))
      throw data_error("fixture line " + std::to_string(line_no) + ": missing field \"" +
                       key + "\"");
  }
  PullRequest pr;
  try {
    pr.repo = j.at("repo").get<std::string>();
    pr.number = j.at("number").get<int>();
    pr.title = j.at("title").get<std::string>();
    pr.description = j.at("description").get<std::string>();
    pr.commit_messages = j.at("commit_messages").get<std::vector<std::string>>();
    pr.merged_at = j.at("merged_at").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw data_error("fixture line " + std::to_string(line_no) + ": " + e.what());
  }
  if (pr.number <= 0)
    throw data_error("fixture line " + std::to_string(line_no) + ": number must be positive");
  return pr;
}

}  // namespace detail

inline void write_fixture(const std::string& path, const ReleaseRange& range,
                          const std::vector<PullRequest>& prs) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw data_error("cannot write fixture: " + path);
  nlohmann::json header{{"fixture", kFixtureTag},
                        {"repo", range.repo},
                        {"from_tag", range.from_tag},
                        {"to_tag", range.to_tag}};
  out << header.dump() << "\n";
  for (const auto& pr : prs) out << detail::pr_to_json(pr).dump() << "\n";
  if (!out) throw data_error("I/O failure writing fixture: " + path);
}

struct FixtureContents {
  ReleaseRange range;
  std::vector<PullRequest> prs;
};

inline FixtureContents replay_fixture(const FixtureArchive& archive) {
  std::ifstream in(archive.path);
  if (!in) throw data_error("cannot open fixture: " + archive.path);
  std::string line;
  if (!std::getline(in, line))
    throw data_error("corrupt fixture " + archive.path + ": missing header");
  nlohmann::json header = nlohmann::json::parse(line, nullptr, false);
  if (header.is_discarded() || header.value("fixture", "") != kFixtureTag)
    throw data_error("corrupt fixture " + archive.path + ": bad header");
  FixtureContents out;
  out.range.repo = header.value("repo", "");
  out.range.from_tag = header.value("from_tag", "");
  out.range.to_tag = header.value("to_tag", "");
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded())
      throw data_error("corrupt fixture " + archive.path + ": bad record at line " +
                       std::to_string(line_no));
    out.prs.push_back(detail::pr_from_json(j, line_no));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Live GitHub access over GraphQL v4.

inline std::string github_token_from_env() {
  const char* t = std::getenv("RELFORGE_GITHUB_TOKEN");
  return t ? t : "";
}

struct GithubConfig {
  std::string base_url = "https://api.github.com";
  std::string token;
  int page_size = 100;
  int max_attempts = 5;
  int backoff_base_ms = 1000;  // doubles per retry
  int timeout_seconds = 30;
};

struct MergedPrStub {
  int number = 0;
  std::int64_t merged_at = 0;
};

// Half-open boundary (from, to] on merge timestamps, ascending by merge time.
inline std::vector<int> filter_by_range(std::vector<MergedPrStub> stubs,
                                        std::int64_t from_time, std::int64_t to_time) {
  std::vector<MergedPrStub> kept;
  for (const auto& s : stubs)
    if (s.merged_at > from_time && s.merged_at <= to_time) kept.push_back(s);
  std::sort(kept.begin(), kept.end(), [](const MergedPrStub& a, const MergedPrStub& b) {
    if (a.merged_at != b.merged_at) return a.merged_at < b.merged_at;
    return a.number < b.number;
  });
  std::vector<int> numbers;
  numbers.reserve(kept.size());
  for (const auto& s : kept) numbers.push_back(s.number);
  return numbers;
}

namespace detail {

// Commit messages sorted ascending by creation time (stable on ties).
inline PullRequest pr_from_graphql(const nlohmann::json& node, const std::string& repo) {
  if (node.is_null()) throw data_error("PR not found in " + repo);
  if (!node.value("merged", false))
    throw data_error("PR " + repo + "#" + std::to_string(node.value("number", 0)) +
                     " is not merged");
  PullRequest pr;
  pr.repo = repo;
  pr.number = node.at("number").get<int>();
  pr.title = node.value("title", "");
  pr.description = node.contains("body") && !node.at("body").is_null()
                       ? node.at("body").get<std::string>()
                       : "";
  pr.merged_at = node.value("mergedAt", "");
  struct Stamped {
    std::int64_t at;
    std::size_t index;
    std::string message;
  };
  std::vector<Stamped> commits;
  if (node.contains("commits"))
    for (const auto& c : node.at("commits").at("nodes")) {
      const auto& commit = c.at("commit");
      commits.push_back({parse_utc(commit.value("committedDate", "1970-01-01T00:00:00Z")),
                         commits.size(), commit.value("message", "")});
    }
  std::sort(commits.begin(), commits.end(), [](const Stamped& a, const Stamped& b) {
    if (a.at != b.at) return a.at < b.at;
    return a.index < b.index;
  });
  for (auto& c : commits) pr.commit_messages.push_back(std::move(c.message));
  return pr;
}

}  // namespace detail

class GithubClient {
public:
  explicit GithubClient(GithubConfig config) : config_(std::move(config)) {}

  // GraphQL POST with bounded exponential backoff on transport and
  // rate-limit failures.
  nlohmann::json graphql(const std::string& query, const nlohmann::json& variables) {
    nlohmann::json body{{"query", query}, {"variables", variables}};
    httplib::Client cli(config_.base_url);
    cli.set_connection_timeout(config_.timeout_seconds);
    cli.set_read_timeout(config_.timeout_seconds);
    httplib::Headers headers{{"User-Agent", "relforge"}};
    if (!config_.token.empty())
      headers.emplace("Authorization", "Bearer " + config_.token);

    int backoff_ms = config_.backoff_base_ms;
    for (int attempt = 1;; ++attempt) {
      auto res = cli.Post("/graphql", headers, body.dump(), "application/json");
      if (res) {
        if (res->status == 401 || res->status == 403) {
          auto retry_after = res->get_header_value("Retry-After");
          if (!retry_after.empty() || res->status == 429) {
            if (attempt < config_.max_attempts) {
              std::this_thread::sleep_for(std::chrono::milliseconds(backoff_ms));
              backoff_ms *= 2;
              continue;
            }
            throw data_error("GitHub rate limit exceeded; retry after " +
                             (retry_after.empty() ? std::string("unknown") : retry_after) +
                             " seconds");
          }
          throw data_error("GitHub authentication failed (HTTP " +
                           std::to_string(res->status) + "); set RELFORGE_GITHUB_TOKEN");
        }
        if (res->status == 429 || res->status >= 500) {
          if (attempt < config_.max_attempts) {
            std::this_thread::sleep_for(std::chrono::milliseconds(backoff_ms));
            backoff_ms *= 2;
            continue;
          }
          throw data_error("GitHub API failed with HTTP " + std::to_string(res->status) +
                           " after " + std::to_string(attempt) + " attempts");
        }
        if (res->status != 200)
          throw data_error("GitHub API returned HTTP " + std::to_string(res->status));
        nlohmann::json parsed = nlohmann::json::parse(res->body, nullptr, false);
        if (parsed.is_discarded())
          throw data_error("GitHub API returned unparsable JSON");
        if (parsed.contains("errors") && !parsed.at("errors").empty())
          throw data_error("GitHub GraphQL error: " +
                           parsed.at("errors")[0].value("message", "unknown"));
        return parsed.at("data");
      }
      if (attempt < config_.max_attempts) {
        std::this_thread::sleep_for(std::chrono::milliseconds(backoff_ms));
        backoff_ms *= 2;
        continue;
      }
      throw data_error("GitHub API transport failure after " + std::to_string(attempt) +
                       " attempts: " + httplib::to_string(res.error()));
    }
  }

  // Commit timestamp behind a tag (through annotated tags); "HEAD" means now.
  std::int64_t tag_commit_time(const std::string& repo, const std::string& tag) {
    if (tag == "HEAD")
      return std::chrono::duration_cast<std::chrono::seconds>(
                 std::chrono::system_clock::now().time_since_epoch())
          .count();
    auto [owner, name] = split_repo(repo);
    static const char* q = R"(
      query($owner: String!, $name: String!, $tag: String!) {
        repository(owner: $owner, name: $name) {
          ref(qualifiedName: $tag) {
            target {
              ... on Commit { committedDate }
              ... on Tag { target { ... on Commit { committedDate } } }
            }
          }
        }
      })";
    nlohmann::json data = graphql(
        q, {{"owner", owner}, {"name", name}, {"tag", "refs/tags/" + tag}});
    const auto& repo_node = data.at("repository");
    if (repo_node.is_null()) throw data_error("unknown repository: " + repo);
    const auto& ref = repo_node.at("ref");
    if (ref.is_null()) throw data_error("unknown tag \"" + tag + "\" in " + repo);
    const auto& target = ref.at("target");
    std::string date = target.value("committedDate", "");
    if (date.empty() && target.contains("target"))
      date = target.at("target").value("committedDate", "");
    if (date.empty()) throw data_error("tag \"" + tag + "\" does not point at a commit");
    return parse_utc(date);
  }

  // Numbers of PRs merged in (from_tag, to_tag], ascending by merge time.
  std::vector<int> list_merged_prs(const ReleaseRange& range) {
    range.validate();
    const std::int64_t from_time = tag_commit_time(range.repo, range.from_tag);
    const std::int64_t to_time = tag_commit_time(range.repo, range.to_tag);
    static const char* q = R"(
      query($q: String!, $first: Int!, $after: String) {
        search(query: $q, type: ISSUE, first: $first, after: $after) {
          pageInfo { hasNextPage endCursor }
          nodes { ... on PullRequest { number mergedAt } }
        }
      })";
    const std::string search = "repo:" + range.repo + " is:pr is:merged merged:" +
                               format_utc(from_time) + ".." + format_utc(to_time);
    std::vector<MergedPrStub> stubs;
    nlohmann::json after;
    for (;;) {
      nlohmann::json vars{{"q", search}, {"first", config_.page_size}};
      if (!after.is_null()) vars["after"] = after;
      nlohmann::json data = graphql(q, vars);
      const auto& search_node = data.at("search");
      for (const auto& node : search_node.at("nodes")) {
        if (!node.contains("number")) continue;
        stubs.push_back(
            {node.at("number").get<int>(), parse_utc(node.value("mergedAt", ""))});
      }
      if (!search_node.at("pageInfo").value("hasNextPage", false)) break;
      after = search_node.at("pageInfo").at("endCursor");
    }
    return filter_by_range(std::move(stubs), from_time, to_time);
  }

  PullRequest fetch_pr(const std::string& repo, int number) {
    auto [owner, name] = split_repo(repo);
    static const char* q = R"(
      query($owner: String!, $name: String!, $number: Int!, $first: Int!, $after: String) {
        repository(owner: $owner, name: $name) {
          pullRequest(number: $number) {
            number title body merged mergedAt
            commits(first: $first, after: $after) {
              pageInfo { hasNextPage endCursor }
              nodes { commit { message committedDate } }
            }
          }
        }
      })";
    nlohmann::json merged_node;
    nlohmann::json after;
    for (;;) {
      nlohmann::json vars{
          {"owner", owner}, {"name", name}, {"number", number}, {"first", config_.page_size}};
      if (!after.is_null()) vars["after"] = after;
      nlohmann::json data = graphql(q, vars);
      const auto& repo_node = data.at("repository");
      if (repo_node.is_null()) throw data_error("unknown repository: " + repo);
      const auto& pr_node = repo_node.at("pullRequest");
      if (pr_node.is_null())
        throw data_error("PR " + repo + "#" + std::to_string(number) + " not found");
      if (merged_node.is_null()) {
        merged_node = pr_node;
      } else {
        for (const auto& c : pr_node.at("commits").at("nodes"))
          merged_node["commits"]["nodes"].push_back(c);
      }
      if (!pr_node.at("commits").at("pageInfo").value("hasNextPage", false)) break;
      after = pr_node.at("commits").at("pageInfo").at("endCursor");
    }
    return detail::pr_from_graphql(merged_node, repo);
  }

  // Concurrent fetches with a bounded in-flight limit; results are merged
  // by PR number regardless of completion order.
  std::vector<PullRequest> fetch_prs(const std::string& repo, const std::vector<int>& numbers,
                                     std::size_t max_in_flight = 8) {
    std::vector<PullRequest> out(numbers.size());
    std::vector<std::string> failures(numbers.size());
    std::atomic<std::size_t> cursor{0};
    auto worker = [&]() {
      for (;;) {
        std::size_t i = cursor.fetch_add(1);
        if (i >= numbers.size()) return;
        try {
          out[i] = fetch_pr(repo, numbers[i]);
        } catch (const std::exception& e) {
          failures[i] = e.what();
        }
      }
    };
    std::vector<std::thread> threads;
    const std::size_t n_threads = std::min(max_in_flight, numbers.size());
    for (std::size_t t = 0; t < n_threads; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
    for (const auto& f : failures)
      if (!f.empty()) throw data_error(f);
    std::sort(out.begin(), out.end(),
              [](const PullRequest& a, const PullRequest& b) { return a.number < b.number; });
    return out;
  }

private:
  static std::pair<std::string, std::string> split_repo(const std::string& repo) {
    auto slash = repo.find('/');
    if (slash == std::string::npos)
      throw usage_error("repo must be \"owner/name\", got \"" + repo + "\"");
    return {repo.substr(0, slash), repo.substr(slash + 1)};
  }

  GithubConfig config_;
};

}  // namespace relforge
