#include "socialsim/llm.hpp"

#include <cmath>
#include <cstdlib>
#include <iostream>
#include <thread>

#include <fmt/format.h>
#include <json.hpp>

#include "socialsim/http.hpp"
#include "socialsim/text.hpp"

namespace socialsim {

using nlohmann::json;

namespace {

constexpr std::pair<PromptTag, std::string_view> kTagNames[] = {
    {PromptTag::enrich, "enrich"}, {PromptTag::like, "like"},       {PromptTag::reblog, "reblog"},
    {PromptTag::comment, "comment"}, {PromptTag::topics, "topics"}, {PromptTag::post, "post"},
    {PromptTag::plan, "plan"},     {PromptTag::summary, "summary"}, {PromptTag::reflect, "reflect"},
};

}  // namespace

std::string_view to_string(PromptTag tag) {
  for (const auto& [t, n] : kTagNames)
    if (t == tag) return n;
  return "unknown";
}

std::optional<PromptTag> parse_prompt_tag(std::string_view s) {
  for (const auto& [t, n] : kTagNames)
    if (n == s) return t;
  return std::nullopt;
}

double default_temperature(PromptTag tag) {
  switch (tag) {
    case PromptTag::like:
    case PromptTag::reblog:
    case PromptTag::comment:
    case PromptTag::reflect:
    case PromptTag::plan:
      return 0.0;
    default:
      return 0.7;
  }
}

int default_max_tokens(PromptTag tag) {
  switch (tag) {
    case PromptTag::like:
    case PromptTag::reblog:
      return 8;
    case PromptTag::reflect:
      return 16;
    case PromptTag::enrich:
      return 1024;
    default:
      return 256;
  }
}

ChatRequest ChatRequest::make(PromptTag tag, std::string prompt, std::string seed_key) {
  ChatRequest r;
  r.tag = tag;
  r.prompt = std::move(prompt);
  r.temperature = default_temperature(tag);
  r.max_tokens = default_max_tokens(tag);
  r.seed_key = std::move(seed_key);
  return r;
}

// ---------------------------------------------------------------------------

RemoteConfig RemoteConfig::from_env() {
  auto env = [](const char* name) {
    const char* v = std::getenv(name);
    return std::string(v ? v : "");
  };
  RemoteConfig c;
  c.base_url = env("API_BASE_URL");
  c.api_key = env("API_KEY");
  c.model = env("MODEL_NAME");
  c.trace = env("SOCIALSIM_TRACE") == "1";
  if (c.base_url.empty()) throw ConfigError("API_BASE_URL is not set");
  if (c.model.empty()) throw ConfigError("MODEL_NAME is not set");
  while (!c.base_url.empty() && c.base_url.back() == '/') c.base_url.pop_back();
  return c;
}

RemoteBackend::RemoteBackend(RemoteConfig config) : config_(std::move(config)) {}

std::string RemoteBackend::request_body(const ChatRequest& request) const {
  json body = {
      {"model", config_.model},
      {"messages", json::array({{{"role", "user"}, {"content", request.prompt}}})},
      {"temperature", request.temperature},
      {"max_tokens", request.max_tokens},
  };
  return body.dump();
}

std::string RemoteBackend::complete(const ChatRequest& request) {
  const std::string url = config_.base_url + "/chat/completions";
  const std::string body = request_body(request);
  http::Headers headers;
  if (!config_.api_key.empty()) headers.emplace_back("Authorization", "Bearer " + config_.api_key);
  if (config_.trace)
    std::cerr << fmt::format("trace: POST {} Authorization: Bearer [redacted] body={}\n", url, body);

  auto response = http::post_json(url, body, headers, config_.timeout);
  if (config_.trace)
    std::cerr << fmt::format("trace: status={} body={}\n", response.status, response.body);
  if (response.status == 0) throw BackendError(0, fmt::format("transport failure: {}", response.error));
  if (response.status < 200 || response.status >= 300)
    throw BackendError(response.status, fmt::format("HTTP {} from {}", response.status, url));

  try {
    auto doc = json::parse(response.body);
    return doc.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const json::exception& e) {
    throw BackendError(response.status, fmt::format("unexpected completion payload: {}", e.what()));
  }
}

// ---------------------------------------------------------------------------

std::string prompt_key(std::string_view prompt) { return text::sha256_hex(prompt); }

std::vector<ScriptedEntry> read_fixtures(const std::filesystem::path& path) {
  std::vector<ScriptedEntry> out;
  const std::string data = text::read_file(path);
  std::size_t line_no = 0, pos = 0;
  while (pos < data.size()) {
    auto end = data.find('\n', pos);
    if (end == std::string::npos) end = data.size();
    std::string_view line = text::trim(std::string_view(data).substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (line.empty()) continue;
    try {
      auto j = json::parse(line);
      auto tag = parse_prompt_tag(j.at("tag").get<std::string>());
      if (!tag) throw ParseError(fmt::format("line {}", line_no), "unknown tag");
      out.push_back({*tag, j.at("key").get<std::string>(), j.at("completion").get<std::string>()});
    } catch (const json::exception& e) {
      throw ParseError(fmt::format("line {}", line_no),
                       fmt::format("{}: malformed fixture at line {}: {}", path.string(), line_no, e.what()));
    }
  }
  return out;
}

void write_fixtures(const std::vector<ScriptedEntry>& entries, const std::filesystem::path& path) {
  std::string out;
  for (const auto& e : entries) {
    json j = {{"tag", std::string(to_string(e.tag))}, {"key", e.key}, {"completion", e.completion}};
    out += j.dump();
    out += '\n';
  }
  text::write_file(path, out);
}

ScriptedBackend::ScriptedBackend(const std::vector<ScriptedEntry>& entries) {
  for (const auto& e : entries) table_.insert_or_assign({e.tag, e.key}, e.completion);
}

std::shared_ptr<ScriptedBackend> ScriptedBackend::from_file(const std::filesystem::path& path) {
  return std::make_shared<ScriptedBackend>(read_fixtures(path));
}

std::string ScriptedBackend::complete(const ChatRequest& request) {
  if (auto it = table_.find({request.tag, prompt_key(request.prompt)}); it != table_.end()) return it->second;
  if (auto it = table_.find({request.tag, request.seed_key}); it != table_.end()) return it->second;
  throw FixtureMiss(fmt::format("no fixture for tag={} key={}", to_string(request.tag), request.seed_key));
}

// ---------------------------------------------------------------------------

std::string RecordingBackend::complete(const ChatRequest& request) {
  std::string completion = inner_->complete(request);
  std::lock_guard lock(mutex_);
  auto [it, inserted] = recorded_.try_emplace({request.tag, request.seed_key}, completion);
  if (!inserted && it->second != completion)
    throw ValidationError(fmt::format("seed key {} recorded twice with different completions", request.seed_key));
  return completion;
}

std::vector<ScriptedEntry> RecordingBackend::entries() const {
  std::lock_guard lock(mutex_);
  std::vector<ScriptedEntry> out;
  out.reserve(recorded_.size());
  for (const auto& [k, v] : recorded_) out.push_back({k.first, k.second, v});
  return out;
}

// ---------------------------------------------------------------------------

BudgetedBackend::BudgetedBackend(BackendPtr inner, std::size_t max_inflight, RetryPolicy policy, Sleeper sleeper)
    : inner_(std::move(inner)), max_inflight_(max_inflight), policy_(policy), sleeper_(std::move(sleeper)) {
  if (max_inflight_ < 1) throw ConfigError("max_inflight must be at least 1");
  if (policy_.max_attempts < 1) throw ConfigError("max_attempts must be at least 1");
  if (!sleeper_) sleeper_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

std::string BudgetedBackend::complete(const ChatRequest& request) {
  for (int attempt = 1;; ++attempt) {
    {
      std::unique_lock lock(mutex_);
      slot_free_.wait(lock, [&] { return inflight_ < max_inflight_; });
      ++inflight_;
      peak_ = std::max(peak_, inflight_);
    }
    auto release = [&] {
      {
        std::lock_guard lock(mutex_);
        --inflight_;
      }
      slot_free_.notify_one();
    };
    try {
      std::string out = inner_->complete(request);
      release();
      return out;
    } catch (const BackendError& e) {
      release();
      if (!e.retryable() || attempt >= policy_.max_attempts) throw;
    } catch (...) {
      release();
      throw;
    }
    auto delay = std::chrono::duration<double, std::milli>(policy_.base_backoff) *
                 std::pow(policy_.multiplier, attempt - 1);
    sleeper_(std::chrono::duration_cast<std::chrono::milliseconds>(delay));
  }
}

std::size_t BudgetedBackend::peak_inflight() const {
  std::lock_guard lock(mutex_);
  return peak_;
}

BackendPtr with_budget(BackendPtr backend, std::size_t max_inflight, RetryPolicy policy, Sleeper sleeper) {
  if (max_inflight < 1) throw ConfigError("max_inflight must be at least 1");
  if (!backend->is_remote()) return backend;
  return std::make_shared<BudgetedBackend>(std::move(backend), max_inflight, policy, std::move(sleeper));
}

}  // namespace socialsim
