#include "umlforge/llm.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "umlforge/errors.hpp"

namespace umlforge {

void LlmRequest::check() const {
  if (!(temperature >= 0.0)) throw std::invalid_argument("temperature must be >= 0");
  if (max_tokens <= 0) throw std::invalid_argument("max_tokens must be > 0");
}

std::string request_hash(const LlmRequest& request) {
  std::uint64_t hash = 0xcbf29ce484222325ull;
  auto feed = [&](std::string_view s) {
    for (unsigned char c : s) {
      hash ^= c;
      hash *= 0x100000001b3ull;
    }
    hash ^= 0xff;  // field separator
    hash *= 0x100000001b3ull;
  };
  feed(request.stage);
  feed(request.system_prompt);
  feed(request.user_prompt);
  char buffer[17];
  std::snprintf(buffer, sizeof buffer, "%016llx", static_cast<unsigned long long>(hash));
  return buffer;
}

std::string fixture_name(const LlmRequest& request) {
  return request.stage + "-" + request_hash(request) + ".txt";
}

MockBackend::MockBackend(std::map<std::string, std::string> responses_by_fixture_name)
    : responses_(std::move(responses_by_fixture_name)) {}

MockBackend MockBackend::from_directory(const std::filesystem::path& directory) {
  if (!std::filesystem::is_directory(directory)) {
    throw ConfigError("fixture directory not found: " + directory.string());
  }
  std::map<std::string, std::string> responses;
  for (const auto& entry : std::filesystem::directory_iterator(directory)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".txt") continue;
    std::ifstream in(entry.path(), std::ios::binary);
    std::ostringstream text;
    text << in.rdbuf();
    responses.emplace(entry.path().filename().string(), text.str());
  }
  return MockBackend(std::move(responses));
}

std::string MockBackend::complete(const LlmRequest& request) {
  request.check();
  const auto name = fixture_name(request);
  auto it = responses_.find(name);
  if (it == responses_.end()) throw BackendError("no recorded response for " + name);
  return it->second;
}

RecordingBackend::RecordingBackend(LlmBackend& inner, std::filesystem::path directory)
    : inner_(inner), directory_(std::move(directory)) {
  std::filesystem::create_directories(directory_);
}

std::string RecordingBackend::complete(const LlmRequest& request) {
  auto response = inner_.complete(request);
  std::lock_guard lock(mutex_);
  const auto path = directory_ / fixture_name(request);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw BackendError("cannot write fixture " + path.string());
  out << response;
  return response;
}

HttpBackend::HttpBackend(HttpBackendOptions options) : options_(std::move(options)) {
  const auto& url = options_.endpoint;
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("endpoint must be an absolute URL: " + url);
  const auto scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") throw ConfigError("unsupported endpoint scheme: " + scheme);
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
  if (scheme == "https") throw ConfigError("this build has no TLS support; use an http:// endpoint");
#endif
  const auto path_start = url.find('/', scheme_end + 3);
  base_url_ = url.substr(0, path_start);
  path_ = path_start == std::string::npos ? "/" : url.substr(path_start);
  if (options_.model.empty()) throw ConfigError("HTTP backend requires a model name");
}

std::string HttpBackend::complete(const LlmRequest& request) {
  request.check();
  nlohmann::json body = {
      {"model", options_.model},
      {"messages",
       {{{"role", "system"}, {"content", request.system_prompt}}, {{"role", "user"}, {"content", request.user_prompt}}}},
      {"temperature", request.temperature},
      {"max_tokens", request.max_tokens},
  };

  httplib::Client client(base_url_);
  client.set_connection_timeout(options_.timeout_seconds, 0);
  client.set_read_timeout(options_.timeout_seconds, 0);
  httplib::Headers headers;
  if (!options_.api_key.empty()) headers.emplace("Authorization", "Bearer " + options_.api_key);

  auto result = client.Post(path_, headers, body.dump(), "application/json");
  if (!result) throw BackendError("request to " + options_.endpoint + " failed: " + httplib::to_string(result.error()));
  if (result->status != 200) {
    throw BackendError("backend returned HTTP " + std::to_string(result->status) + ": " + result->body.substr(0, 500));
  }
  try {
    auto reply = nlohmann::json::parse(result->body);
    return reply.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw BackendError(std::string("malformed chat-completion response: ") + e.what());
  }
}

}  // namespace umlforge
