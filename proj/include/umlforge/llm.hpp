#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>

namespace umlforge {

inline constexpr double kDefaultTemperature = 0.0;
inline constexpr int kDefaultMaxTokens = 4096;

struct LlmRequest {
  /// Pipeline stage issuing the request; part of the fixture key, never sent to a server.
  std::string stage;
  std::string system_prompt;
  std::string user_prompt;
  double temperature = kDefaultTemperature;
  int max_tokens = kDefaultMaxTokens;

  /// Throws std::invalid_argument unless temperature >= 0 and max_tokens > 0.
  void check() const;
};

/// Chat-completion backend. Implementations must be safe to call concurrently.
class LlmBackend {
 public:
  virtual ~LlmBackend() = default;
  virtual std::string complete(const LlmRequest& request) = 0;
};

/// 64-bit FNV-1a over stage, system prompt and user prompt, as 16 hex digits.
std::string request_hash(const LlmRequest& request);

/// Fixture file name for a request: "{stage}-{hash}.txt".
std::string fixture_name(const LlmRequest& request);

/// Replays responses recorded under `fixture_name`. Immutable after construction.
class MockBackend final : public LlmBackend {
 public:
  /// Loads every `*.txt` file in `directory`. Throws ConfigError if it is not a directory.
  static MockBackend from_directory(const std::filesystem::path& directory);

  explicit MockBackend(std::map<std::string, std::string> responses_by_fixture_name);

  /// Throws BackendError when no fixture exists for the request.
  std::string complete(const LlmRequest& request) override;

  std::size_t size() const noexcept { return responses_.size(); }

 private:
  std::map<std::string, std::string> responses_;
};

/// Forwards to another backend and writes each response as a fixture file.
class RecordingBackend final : public LlmBackend {
 public:
  RecordingBackend(LlmBackend& inner, std::filesystem::path directory);

  std::string complete(const LlmRequest& request) override;

 private:
  LlmBackend& inner_;
  std::filesystem::path directory_;
  std::mutex mutex_;
};

/// Answers from a callback; handy for tests and for authoring fixtures.
class ScriptedBackend final : public LlmBackend {
 public:
  using Script = std::function<std::string(const LlmRequest&)>;
  explicit ScriptedBackend(Script script) : script_(std::move(script)) {}

  std::string complete(const LlmRequest& request) override { return script_(request); }

 private:
  Script script_;
};

struct HttpBackendOptions {
  /// Full chat-completions URL, e.g. https://api.openai.com/v1/chat/completions
  std::string endpoint;
  std::string model;
  std::string api_key;
  int timeout_seconds = 120;
};

/// OpenAI-style chat-completion client: POSTs {model, messages, temperature,
/// max_tokens} and returns choices[0].message.content.
class HttpBackend final : public LlmBackend {
 public:
  explicit HttpBackend(HttpBackendOptions options);

  std::string complete(const LlmRequest& request) override;

 private:
  HttpBackendOptions options_;
  std::string base_url_;
  std::string path_;
};

}  // namespace umlforge
