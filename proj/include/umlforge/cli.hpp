#pragma once

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "umlforge/llm.hpp"

namespace umlforge {

enum class BackendKind { Http, Mock, Record };

/// Settings for `generate`. Built from defaults, then a config file, then flags.
struct RunConfig {
  BackendKind backend = BackendKind::Http;
  std::optional<std::string> endpoint;
  std::optional<std::string> model_name;
  double temperature = kDefaultTemperature;
  int max_tokens = kDefaultMaxTokens;
  bool verify = true;
  std::optional<std::filesystem::path> prompt_dir;
  std::optional<std::filesystem::path> fixture_dir;

  /// Keys: backend, endpoint, model, temperature, max_tokens, verify, prompts, fixtures.
  /// Relative paths are resolved against `base_dir`. Throws ConfigError.
  void merge_json(const nlohmann::json& document, const std::filesystem::path& base_dir = {});

  /// Throws ConfigError: http and record need endpoint and model, mock and record need fixtures.
  void check() const;
};

std::optional<BackendKind> parse_backend_kind(std::string_view text);

/// Reads a JSON config file into `config`. Throws ConfigError.
void load_run_config(const std::filesystem::path& path, RunConfig& config);

/// Backend for a checked config. `api_key` is required for http and record.
/// `inner` receives the HTTP backend wrapped by record mode.
std::unique_ptr<LlmBackend> make_backend(const RunConfig& config, const std::optional<std::string>& api_key,
                                         std::unique_ptr<LlmBackend>& inner);

/// Exit codes of `run_cli`.
enum ExitCode : int {
  kExitOk = 0,
  kExitInput = 1,   // unreadable, unparseable or invalid input files
  kExitConfig = 2,  // bad flags or configuration
  kExitStage = 3,   // a pipeline stage failed
};

/// Entry point of the `umlforge` tool; `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace umlforge
