#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

namespace umlforge {

/// Content of a file compiled into the library (prompt templates, JSON schemas),
/// keyed by its path relative to the source tree, e.g. "prompts/validator.txt".
/// Empty view if unknown.
std::string_view embedded_resource(std::string_view name);

struct PromptTemplate {
  std::string system;
  std::string user;
  std::string repair;  // optional; appended to the user prompt on a format-repair retry
};

/// Parses the `### system` / `### user` / `### repair` sections of a template file.
/// Lines starting with '#' before the first section are comments.
PromptTemplate parse_prompt_template(std::string_view text);

/// Replaces `{{name}}` placeholders; unknown placeholders are left untouched.
std::string render_prompt(std::string_view text, const std::map<std::string, std::string>& values);

/// One template per pipeline stage.
class PromptSet {
 public:
  /// The templates shipped in prompts/, compiled in.
  static PromptSet defaults();

  /// Reads `{stage}.txt` for every stage from `directory`. Throws ConfigError on a missing file.
  static PromptSet load(const std::filesystem::path& directory);

  /// Throws ConfigError for an unknown stage.
  const PromptTemplate& at(std::string_view stage) const;

 private:
  std::map<std::string, PromptTemplate, std::less<>> templates_;
};

}  // namespace umlforge
