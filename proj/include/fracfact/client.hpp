#pragma once

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "fracfact/errors.hpp"
#include "fracfact/provider.hpp"

namespace fracfact {

struct Completion {
  std::string text;
  std::optional<TokenUsage> usage;
};

struct HttpOptions {
  int max_attempts = 4;
  int backoff_ms = 500;  // doubles per retry
  int read_timeout_s = 300;
};

// Fixture key for the mock dialect; live dialects ignore it.
struct MockKey {
  int n = 0;
  int m = 0;
  int replicate = 0;
};

namespace detail {

inline std::pair<std::string, std::string> split_url(const std::string& url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos)
    throw ConfigError("endpoint is not a URL: " + url);
  auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

inline std::string substitute_model(std::string endpoint,
                                    const std::string& model) {
  auto pos = endpoint.find("{model}");
  if (pos != std::string::npos) endpoint.replace(pos, 7, model);
  return endpoint;
}

inline std::string require_api_key(const ProviderProfile& profile) {
  if (profile.auth_env.empty())
    throw ConfigError("profile \"" + profile.id + "\" has no auth_env");
  const char* key = std::getenv(profile.auth_env.c_str());
  if (!key || !*key)
    throw ConfigError("environment variable " + profile.auth_env +
                      " is not set");
  return key;
}

inline nlohmann::json openai_body(const ProviderProfile& profile,
                                  const std::string& prompt) {
  nlohmann::json body = {
      {"model", profile.model},
      {"messages",
       nlohmann::json::array({{{"role", "user"}, {"content", prompt}}})},
  };
  // Default sampling; only the reasoning setting is overridden.
  for (auto it = profile.reasoning.begin(); it != profile.reasoning.end(); ++it)
    body[it.key()] = it.value();
  return body;
}

inline nlohmann::json gemini_body(const ProviderProfile& profile,
                                  const std::string& prompt) {
  nlohmann::json body = {
      {"contents", nlohmann::json::array(
                       {{{"parts", nlohmann::json::array({{{"text", prompt}}})}}})},
  };
  if (!profile.reasoning.empty())
    body["generationConfig"]["thinkingConfig"] = profile.reasoning;
  return body;
}

inline Completion parse_openai_response(const nlohmann::json& doc) {
  Completion c;
  try {
    c.text = doc.at("choices").at(0).at("message").at("content")
                 .get<std::string>();
  } catch (const nlohmann::json::exception&) {
    throw TransportError("openai-chat: unexpected response shape");
  }
  if (doc.contains("usage")) {
    TokenUsage u;
    u.input = doc["usage"].value("prompt_tokens", 0LL);
    u.output = doc["usage"].value("completion_tokens", 0LL);
    c.usage = u;
  }
  return c;
}

inline Completion parse_gemini_response(const nlohmann::json& doc) {
  Completion c;
  try {
    const auto& parts = doc.at("candidates").at(0).at("content").at("parts");
    for (const auto& part : parts)
      if (part.contains("text")) c.text += part["text"].get<std::string>();
  } catch (const nlohmann::json::exception&) {
    throw TransportError("gemini-generate: unexpected response shape");
  }
  if (doc.contains("usageMetadata")) {
    TokenUsage u;
    u.input = doc["usageMetadata"].value("promptTokenCount", 0LL);
    u.output = doc["usageMetadata"].value("candidatesTokenCount", 0LL);
    c.usage = u;
  }
  return c;
}

inline Completion mock_complete(const ProviderProfile& profile,
                                const std::string& prompt,
                                const MockKey* key) {
  if (profile.fixtures_dir.empty())
    throw ConfigError("mock profile has no fixtures_dir");
  MockKey k;
  if (key) {
    k = *key;
  } else {
    // Recover the task size from the prompt's substitution sites.
    auto grab = [&](const std::string& marker) {
      auto pos = prompt.find(marker);
      if (pos == std::string::npos)
        throw ConfigError("mock: prompt lacks \"" + marker + "\"");
      return std::atoi(prompt.c_str() + pos + marker.size());
    };
    k.m = grab("The number of factors is ");
    k.n = grab("the number of runs is ");
    k.replicate = 1;
  }
  std::string path = profile.fixtures_dir + "/n" + std::to_string(k.n) + "_m" +
                     std::to_string(k.m) + "_rep" + std::to_string(k.replicate) +
                     ".txt";
  std::ifstream in(path, std::ios::binary);
  if (!in) throw TransportError("mock: fixture not found: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  Completion c;
  c.text = buf.str();
  // Deterministic pseudo-usage so the cost path is exercised offline.
  c.usage = TokenUsage{static_cast<long long>((prompt.size() + 3) / 4),
                       static_cast<long long>((c.text.size() + 3) / 4)};
  return c;
}

}  // namespace detail

/// One single-turn chat completion under the profile's wire dialect. The
/// prompt travels as the sole user message; only the reasoning setting is
/// overridden on top of provider defaults. Transient transport failures
/// (connect errors, 429, 5xx) are retried with bounded exponential backoff;
/// a well-formed model reply, refusals included, is never retried.
inline Completion complete(const ProviderProfile& profile,
                           const std::string& prompt,
                           const HttpOptions& options = {},
                           const MockKey* mock_key = nullptr) {
  if (profile.dialect == WireDialect::Mock)
    return detail::mock_complete(profile, prompt, mock_key);

  std::string api_key = detail::require_api_key(profile);
  std::string url = detail::substitute_model(profile.endpoint, profile.model);
  auto [origin, path] = detail::split_url(url);

  nlohmann::json body;
  httplib::Headers headers;
  if (profile.dialect == WireDialect::OpenAiChat) {
    body = detail::openai_body(profile, prompt);
    headers.emplace("Authorization", "Bearer " + api_key);
  } else {
    body = detail::gemini_body(profile, prompt);
    headers.emplace("x-goog-api-key", api_key);
  }

  std::string last_error;
  for (int attempt = 0; attempt < options.max_attempts; ++attempt) {
    if (attempt > 0)
      std::this_thread::sleep_for(
          std::chrono::milliseconds(options.backoff_ms << (attempt - 1)));
    httplib::Client client(origin);
    client.set_connection_timeout(30, 0);
    client.set_read_timeout(options.read_timeout_s, 0);
    auto res = client.Post(path, headers, body.dump(), "application/json");
    if (!res) {
      last_error = "connection failure (" + httplib::to_string(res.error()) + ")";
      continue;
    }
    if (res->status == 429 || res->status >= 500) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200)
      throw TransportError(profile.id + ": HTTP " +
                           std::to_string(res->status) + ": " +
                           res->body.substr(0, 200));
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::exception&) {
      throw TransportError(profile.id + ": response body is not JSON");
    }
    return profile.dialect == WireDialect::OpenAiChat
               ? detail::parse_openai_response(doc)
               : detail::parse_gemini_response(doc);
  }
  throw TransportError(profile.id + ": retries exhausted: " + last_error);
}

}  // namespace fracfact
