#include "umlforge/prompts.hpp"

#include <array>
#include <fstream>
#include <sstream>

#include "umlforge/errors.hpp"
#include "umlforge/pipeline.hpp"

namespace umlforge {
namespace {

std::string strip_trailing_newlines(std::string text) {
  while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) text.pop_back();
  return text;
}

}  // namespace

PromptTemplate parse_prompt_template(std::string_view text) {
  PromptTemplate out;
  std::string* current = nullptr;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.starts_with("### ")) {
      const auto section = line.substr(4);
      if (section == "system") {
        current = &out.system;
      } else if (section == "user") {
        current = &out.user;
      } else if (section == "repair") {
        current = &out.repair;
      } else {
        throw ConfigError("unknown prompt section: " + section);
      }
      continue;
    }
    if (!current) {
      if (line.empty() || line.starts_with("#")) continue;
      throw ConfigError("prompt text before the first section: " + line);
    }
    *current += line;
    *current += '\n';
  }
  out.system = strip_trailing_newlines(std::move(out.system));
  out.user = strip_trailing_newlines(std::move(out.user));
  out.repair = strip_trailing_newlines(std::move(out.repair));
  if (out.system.empty() || out.user.empty()) throw ConfigError("prompt template needs system and user sections");
  return out;
}

std::string render_prompt(std::string_view text, const std::map<std::string, std::string>& values) {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    if (text.substr(i, 2) == "{{") {
      const auto close = text.find("}}", i + 2);
      if (close != std::string_view::npos) {
        const auto key = std::string(text.substr(i + 2, close - i - 2));
        if (auto it = values.find(key); it != values.end()) {
          out += it->second;
          i = close + 2;
          continue;
        }
      }
    }
    out += text[i++];
  }
  return out;
}

PromptSet PromptSet::defaults() {
  PromptSet set;
  for (auto stage : kStages) {
    const auto text = embedded_resource("prompts/" + std::string(stage) + ".txt");
    set.templates_.emplace(std::string(stage), parse_prompt_template(text));
  }
  return set;
}

PromptSet PromptSet::load(const std::filesystem::path& directory) {
  PromptSet set;
  for (auto stage : kStages) {
    const auto path = directory / (std::string(stage) + ".txt");
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("prompt template not found: " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    set.templates_.emplace(std::string(stage), parse_prompt_template(text.str()));
  }
  return set;
}

const PromptTemplate& PromptSet::at(std::string_view stage) const {
  auto it = templates_.find(stage);
  if (it == templates_.end()) throw ConfigError("no prompt template for stage " + std::string(stage));
  return it->second;
}

}  // namespace umlforge
