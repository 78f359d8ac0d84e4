#pragma once

#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fracfact/errors.hpp"
#include "fracfact/rational.hpp"

namespace fracfact {

enum class WireDialect { OpenAiChat, GeminiGenerate, Mock };

inline const char* to_string(WireDialect d) {
  switch (d) {
    case WireDialect::OpenAiChat: return "openai-chat";
    case WireDialect::GeminiGenerate: return "gemini-generate";
    case WireDialect::Mock: return "mock";
  }
  return "?";
}

inline WireDialect wire_dialect_from_string(const std::string& s) {
  if (s == "openai-chat") return WireDialect::OpenAiChat;
  if (s == "gemini-generate") return WireDialect::GeminiGenerate;
  if (s == "mock") return WireDialect::Mock;
  throw ConfigError("unknown wire dialect \"" + s + "\"");
}

// Provider-reported token counts; never re-tokenized locally.
struct TokenUsage {
  long long input = 0;
  long long output = 0;
};

// One chat-completion endpoint: wire dialect, pricing per 10^6 tokens, and
// the provider-specific reasoning setting sent with every request.
struct ProviderProfile {
  std::string id;
  std::string model;
  std::string endpoint;  // may contain {model}
  std::string auth_env;  // environment variable holding the API key
  WireDialect dialect = WireDialect::Mock;
  Rational price_in;   // currency per 10^6 input tokens
  Rational price_out;  // currency per 10^6 output tokens
  nlohmann::json reasoning;  // e.g. {"reasoning_effort":"medium"}
  int min_interval_ms = 1000;
  std::string fixtures_dir;  // mock dialect only
};

/// Linear tariff on provider-reported tokens; unknown without usage.
inline std::optional<Rational> estimate_cost(
    const std::optional<TokenUsage>& usage, const ProviderProfile& profile) {
  if (!usage) return std::nullopt;
  Rational in_cost = Rational(usage->input) * profile.price_in;
  Rational out_cost = Rational(usage->output) * profile.price_out;
  return (in_cost + out_cost) / Rational(1000000);
}

namespace detail {

// Prices arrive as JSON numbers or strings; route through the shortest
// decimal representation so "0.3" becomes exactly 3/10.
inline Rational price_from_json(const nlohmann::json& v) {
  if (v.is_string()) return Rational::parse(v.get<std::string>());
  if (v.is_number()) return Rational::parse(v.dump());
  throw ConfigError("price must be a number or decimal string");
}

}  // namespace detail

inline std::vector<ProviderProfile> default_profiles() {
  std::vector<ProviderProfile> profiles;
  {
    ProviderProfile gpt;
    gpt.id = "gpt";
    gpt.model = "gpt-5.1-chat-latest";
    gpt.endpoint = "https://api.openai.com/v1/chat/completions";
    gpt.auth_env = "OPENAI_API_KEY";
    gpt.dialect = WireDialect::OpenAiChat;
    gpt.price_in = Rational::parse("1.5");
    gpt.price_out = Rational::parse("10");
    gpt.reasoning = {{"reasoning_effort", "medium"}};
    profiles.push_back(std::move(gpt));
  }
  {
    ProviderProfile gemini;
    gemini.id = "gemini";
    gemini.model = "gemini-2.5-flash";
    gemini.endpoint =
        "https://generativelanguage.googleapis.com/v1beta/models/"
        "{model}:generateContent";
    gemini.auth_env = "GEMINI_API_KEY";
    gemini.dialect = WireDialect::GeminiGenerate;
    gemini.price_in = Rational::parse("0.3");
    gemini.price_out = Rational::parse("2.5");
    gemini.reasoning = {{"thinkingBudget", -1}};
    profiles.push_back(std::move(gemini));
  }
  {
    ProviderProfile mock;
    mock.id = "mock";
    mock.model = "mock";
    mock.dialect = WireDialect::Mock;
    mock.price_in = Rational(0);
    mock.price_out = Rational(0);
    mock.min_interval_ms = 0;
    profiles.push_back(std::move(mock));
  }
  return profiles;
}

inline std::vector<ProviderProfile> parse_provider_config(
    const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("provider config is not valid JSON: ") +
                      e.what());
  }
  if (!doc.contains("providers") || !doc["providers"].is_array())
    throw ConfigError("provider config needs a \"providers\" array");
  std::vector<ProviderProfile> profiles;
  for (const auto& p : doc["providers"]) {
    ProviderProfile profile;
    try {
      profile.id = p.at("id").get<std::string>();
      profile.dialect =
          wire_dialect_from_string(p.at("dialect").get<std::string>());
      profile.model = p.value("model", std::string{});
      profile.endpoint = p.value("endpoint", std::string{});
      profile.auth_env = p.value("auth_env", std::string{});
      if (p.contains("price_in")) profile.price_in = detail::price_from_json(p["price_in"]);
      if (p.contains("price_out"))
        profile.price_out = detail::price_from_json(p["price_out"]);
      if (p.contains("reasoning")) profile.reasoning = p["reasoning"];
      profile.min_interval_ms = p.value("min_interval_ms", 1000);
      profile.fixtures_dir = p.value("fixtures_dir", std::string{});
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("bad provider entry: ") + e.what());
    }
    if (profile.dialect != WireDialect::Mock && profile.auth_env.empty())
      throw ConfigError("provider \"" + profile.id +
                        "\" needs auth_env for a non-mock dialect");
    if (profile.price_in.sign() < 0 || profile.price_out.sign() < 0)
      throw ConfigError("provider \"" + profile.id + "\" has negative prices");
    profiles.push_back(std::move(profile));
  }
  return profiles;
}

inline std::vector<ProviderProfile> load_provider_config(
    const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open provider config: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_provider_config(buf.str());
}

inline const ProviderProfile& find_profile(
    const std::vector<ProviderProfile>& profiles, const std::string& id) {
  for (const auto& p : profiles)
    if (p.id == id) return p;
  throw ConfigError("no provider profile named \"" + id + "\"");
}

}  // namespace fracfact
