#pragma once

#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "socialsim/error.hpp"

namespace socialsim {

enum class PromptTag { enrich, like, reblog, comment, topics, post, plan, summary, reflect };

std::string_view to_string(PromptTag tag);
std::optional<PromptTag> parse_prompt_tag(std::string_view s);

/// 0 for decision tags (like, reblog, comment, reflect, plan); 0.7 for generative ones.
double default_temperature(PromptTag tag);
int default_max_tokens(PromptTag tag);

struct ChatRequest {
  PromptTag tag = PromptTag::like;
  std::string prompt;
  double temperature = 0.0;
  int max_tokens = 256;
  /// Deterministic identity of the call site: "<agent>:<turn>:<tag>[:<detail>]".
  std::string seed_key;

  /// Request with the tag's default sampling parameters.
  static ChatRequest make(PromptTag tag, std::string prompt, std::string seed_key);
};

/// A failed completion. `status` is the HTTP status, 0 for transport
/// failures, -1 for non-HTTP failures such as a scripted fixture miss.
class BackendError : public Error {
 public:
  BackendError(int status, const std::string& what) : Error("backend", what), status_(status) {}
  int status() const noexcept { return status_; }
  bool retryable() const noexcept { return status_ == 0 || status_ == 408 || status_ == 429 || status_ >= 500; }

 private:
  int status_;
};

struct FixtureMiss : BackendError {
  explicit FixtureMiss(const std::string& what) : BackendError(-1, what) {}
};

/// Chat-completion contract shared by every backend. `complete` must be safe
/// to call concurrently.
class ChatBackend {
 public:
  virtual ~ChatBackend() = default;
  virtual std::string complete(const ChatRequest& request) = 0;
  virtual std::string_view name() const = 0;
  virtual bool is_remote() const { return false; }
};

using BackendPtr = std::shared_ptr<ChatBackend>;

// ---------------------------------------------------------------------------
// Remote (OpenAI-compatible)

struct RemoteConfig {
  std::string base_url;  // e.g. https://api.openai.com/v1
  std::string api_key;
  std::string model;
  std::chrono::seconds timeout{120};
  bool trace = false;

  /// API_BASE_URL, API_KEY, MODEL_NAME; SOCIALSIM_TRACE=1 enables trace logging.
  static RemoteConfig from_env();
};

class RemoteBackend final : public ChatBackend {
 public:
  explicit RemoteBackend(RemoteConfig config);
  std::string complete(const ChatRequest& request) override;
  std::string_view name() const override { return "remote"; }
  bool is_remote() const override { return true; }

  /// Request body sent for `request` (exposed for tests and trace logs).
  std::string request_body(const ChatRequest& request) const;

 private:
  RemoteConfig config_;
};

// ---------------------------------------------------------------------------
// Scripted fixtures

struct ScriptedEntry {
  PromptTag tag = PromptTag::like;
  std::string key;
  std::string completion;
};

std::vector<ScriptedEntry> read_fixtures(const std::filesystem::path& path);
void write_fixtures(const std::vector<ScriptedEntry>& entries, const std::filesystem::path& path);

/// Looks up (tag, sha256(prompt)) first, then (tag, seed_key).
class ScriptedBackend final : public ChatBackend {
 public:
  explicit ScriptedBackend(const std::vector<ScriptedEntry>& entries);
  static std::shared_ptr<ScriptedBackend> from_file(const std::filesystem::path& path);

  std::string complete(const ChatRequest& request) override;
  std::string_view name() const override { return "scripted"; }

 private:
  std::map<std::pair<PromptTag, std::string>, std::string> table_;
};

/// Fixture key that matches a request by prompt content.
std::string prompt_key(std::string_view prompt);

// ---------------------------------------------------------------------------
// Heuristic offline stand-in

struct HeuristicThresholds {
  double like = 0.14;
  double reblog = 0.20;
  double comment = 0.17;
};

/// Rule table answering every prompt kind without a model. A pure function
/// of the request.
std::string heuristic_rules(const ChatRequest& request, const HeuristicThresholds& thresholds = {});

class HeuristicBackend final : public ChatBackend {
 public:
  explicit HeuristicBackend(HeuristicThresholds thresholds = {}) : thresholds_(thresholds) {}
  std::string complete(const ChatRequest& request) override { return heuristic_rules(request, thresholds_); }
  std::string_view name() const override { return "heuristic"; }

 private:
  HeuristicThresholds thresholds_;
};

/// Wraps a backend and records each completion keyed by seed_key, producing
/// a fixture table that replays the same run through ScriptedBackend.
class RecordingBackend final : public ChatBackend {
 public:
  explicit RecordingBackend(BackendPtr inner) : inner_(std::move(inner)) {}
  std::string complete(const ChatRequest& request) override;
  std::string_view name() const override { return inner_->name(); }
  bool is_remote() const override { return inner_->is_remote(); }

  std::vector<ScriptedEntry> entries() const;

 private:
  BackendPtr inner_;
  mutable std::mutex mutex_;
  std::map<std::pair<PromptTag, std::string>, std::string> recorded_;
};

// ---------------------------------------------------------------------------
// Budget and retries

struct RetryPolicy {
  int max_attempts = 3;
  std::chrono::milliseconds base_backoff{500};
  double multiplier = 2.0;
};

using Sleeper = std::function<void(std::chrono::milliseconds)>;

/// Limits in-flight requests and retries retryable BackendErrors with
/// exponential backoff. Non-remote backends are returned unwrapped.
BackendPtr with_budget(BackendPtr backend, std::size_t max_inflight, RetryPolicy policy, Sleeper sleeper = {});

class BudgetedBackend final : public ChatBackend {
 public:
  BudgetedBackend(BackendPtr inner, std::size_t max_inflight, RetryPolicy policy, Sleeper sleeper);
  std::string complete(const ChatRequest& request) override;
  std::string_view name() const override { return inner_->name(); }
  bool is_remote() const override { return inner_->is_remote(); }

  std::size_t peak_inflight() const;

 private:
  BackendPtr inner_;
  std::size_t max_inflight_;
  RetryPolicy policy_;
  Sleeper sleeper_;
  mutable std::mutex mutex_;
  std::condition_variable slot_free_;
  std::size_t inflight_ = 0;
  std::size_t peak_ = 0;
};

}  // namespace socialsim
