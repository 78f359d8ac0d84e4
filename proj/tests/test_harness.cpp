#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>
#include <string>
#include <thread>

#include "fracfact/benchmark.hpp"
#include "fracfact/client.hpp"
#include "fracfact/prompt.hpp"
#include "fracfact/provider.hpp"
#include "fracfact/reference.hpp"
#include "support/test_support.hpp"

using namespace fracfact;

namespace {

ProviderProfile mock_profile(const std::string& fixtures) {
  auto profiles = default_profiles();
  auto profile = find_profile(profiles, "mock");
  profile.fixtures_dir = fixtures;
  return profile;
}

}  // namespace

TEST_CASE("token tariffs are exact") {
  auto profiles = default_profiles();
  const auto& gpt = find_profile(profiles, "gpt");
  const auto& gemini = find_profile(profiles, "gemini");

  TokenUsage million{1000000, 1000000};
  auto gpt_cost = estimate_cost(million, gpt);
  REQUIRE(gpt_cost.has_value());
  CHECK(*gpt_cost == Rational(BigInt(23LL), BigInt(2LL)));  // 11.5
  CHECK(gpt_cost->to_string() == "11.5");

  auto gemini_cost = estimate_cost(million, gemini);
  REQUIRE(gemini_cost.has_value());
  CHECK(*gemini_cost == Rational(BigInt(14LL), BigInt(5LL)));  // 2.8
  CHECK(gemini_cost->to_string() == "2.8");

  CHECK(*estimate_cost(TokenUsage{0, 0}, gpt) == Rational(0));
  CHECK(!estimate_cost(std::nullopt, gpt).has_value());
}

TEST_CASE("provider config parses prices exactly") {
  auto profiles = parse_provider_config(R"({
    "providers": [
      {"id": "x", "dialect": "openai-chat", "model": "m", "auth_env": "K",
       "endpoint": "https://example.com/v1", "price_in": 0.3, "price_out": "2.5"}
    ]})");
  REQUIRE(profiles.size() == 1);
  CHECK(profiles[0].price_in == Rational(BigInt(3LL), BigInt(10LL)));
  CHECK(profiles[0].price_out == Rational(BigInt(5LL), BigInt(2LL)));

  CHECK_THROWS_AS(parse_provider_config("[]"), ConfigError);
  CHECK_THROWS_AS(parse_provider_config(R"({"providers": [
    {"id": "x", "dialect": "openai-chat"}]})"), ConfigError);
}

TEST_CASE("request bodies carry the reasoning settings") {
  auto profiles = default_profiles();
  auto gpt_body = detail::openai_body(find_profile(profiles, "gpt"),
                                      "prompt text");
  CHECK(gpt_body["reasoning_effort"] == "medium");
  CHECK(gpt_body["messages"][0]["role"] == "user");
  CHECK(gpt_body["messages"][0]["content"] == "prompt text");
  CHECK(gpt_body["messages"].size() == 1);  // single-turn, no history

  auto gem_body = detail::gemini_body(find_profile(profiles, "gemini"),
                                      "prompt text");
  CHECK(gem_body["generationConfig"]["thinkingConfig"]["thinkingBudget"] == -1);
  CHECK(gem_body["contents"][0]["parts"][0]["text"] == "prompt text");
}

TEST_CASE("mock completions replay fixtures with deterministic usage") {
  auto dir = testsupport::make_temp_dir("mockfx");
  testsupport::write_mock_fixtures(dir, 2);
  auto profile = mock_profile(dir);

  MockKey key{8, 4, 1};
  auto completion = complete(profile, render_prompt(4, 8), {}, &key);
  CHECK(completion.text.find("Run,A,B,C,D") == 0);
  REQUIRE(completion.usage.has_value());
  CHECK(completion.usage->input > 0);

  // Without an explicit key, the task size is recovered from the prompt.
  auto by_prompt = complete(profile, render_prompt(4, 8));
  CHECK(by_prompt.text == completion.text);

  MockKey missing{8, 4, 99};
  CHECK_THROWS_AS(complete(profile, render_prompt(4, 8), {}, &missing),
                  TransportError);
}

TEST_CASE("benchmark writes one record per replicate and is deterministic") {
  auto dir = testsupport::make_temp_dir("bench");
  testsupport::write_mock_fixtures(dir);
  auto profile = mock_profile(dir);
  auto store = ReferenceStore::builtin();

  auto tasks = filter_grid("8:4-7");
  REQUIRE(tasks.size() == 4);
  for (auto& t : tasks) {
    t.provider_id = profile.id;
    t.replicates = 3;
  }

  std::string log1 = dir + "/run1.jsonl";
  auto summary = run_benchmark(tasks, profile, 42, log1, store);
  CHECK(summary.written == 12);
  CHECK(summary.skipped == 0);
  CHECK(summary.failures == 0);

  std::string log2 = dir + "/run2.jsonl";
  run_benchmark(tasks, profile, 42, log2, store);
  CHECK(testsupport::slurp(log1) == testsupport::slurp(log2));

  // A different seed shuffles the task order.
  std::string log3 = dir + "/run3.jsonl";
  run_benchmark(tasks, profile, 43, log3, store);
  CHECK(testsupport::slurp(log1) != testsupport::slurp(log3));

  auto records = read_run_log(log1);
  REQUIRE(records.size() == 12);
  for (const auto& r : records) {
    CHECK(r.provider_id == "mock");
    REQUIRE(r.compliance.has_value());
    CHECK(r.compliance->cls == ComplianceClass::Compliant);
    CHECK(r.has_metrics);
    CHECK(r.pattern.size() == static_cast<std::size_t>(r.m));
    CHECK(r.cost.has_value());
  }

  // Task 1 replays the optimal half fraction.
  for (const auto& r : records)
    if (r.task_id == 1) {
      CHECK(r.resolution == 4);
      CHECK(r.optimality == Optimality::Optimal);
    }
}

TEST_CASE("interrupted runs resume without duplicating records") {
  auto dir = testsupport::make_temp_dir("resume");
  testsupport::write_mock_fixtures(dir);
  auto profile = mock_profile(dir);
  auto store = ReferenceStore::builtin();

  auto tasks = filter_grid("16:5-8");
  for (auto& t : tasks) {
    t.provider_id = profile.id;
    t.replicates = 4;
  }

  std::string full_log = dir + "/full.jsonl";
  run_benchmark(tasks, profile, 9, full_log, store);
  auto full = testsupport::slurp(full_log);

  // Truncate to the first 5 lines, then resume.
  std::string partial_log = dir + "/partial.jsonl";
  {
    std::istringstream in(full);
    std::ofstream out(partial_log, std::ios::binary);
    std::string line;
    for (int i = 0; i < 5 && std::getline(in, line); ++i) out << line << '\n';
  }
  auto summary = run_benchmark(tasks, profile, 9, partial_log, store);
  CHECK(summary.skipped == 5);
  CHECK(summary.written == 11);

  auto records = read_run_log(partial_log);
  REQUIRE(records.size() == 16);
  std::set<std::pair<int, int>> keys;
  for (const auto& r : records)
    CHECK(keys.emplace(r.task_id, r.replicate).second);

  // Same fixtures, same order: the resumed log matches the uninterrupted one.
  CHECK(testsupport::slurp(partial_log) == full);
}

TEST_CASE("transport failures are recorded, not fatal") {
  auto dir = testsupport::make_temp_dir("failures");
  testsupport::write_mock_fixtures(dir, 2);  // replicate 3 has no fixture
  auto profile = mock_profile(dir);
  auto store = ReferenceStore::builtin();

  auto tasks = filter_grid("8:4");
  for (auto& t : tasks) {
    t.provider_id = profile.id;
    t.replicates = 3;
  }
  std::string log = dir + "/fail.jsonl";
  auto summary = run_benchmark(tasks, profile, 1, log, store);
  CHECK(summary.written == 3);
  CHECK(summary.failures == 1);

  auto records = read_run_log(log);
  int errored = 0;
  for (const auto& r : records)
    if (!r.error.empty()) {
      ++errored;
      CHECK(!r.parse.has_value());
      CHECK(!r.compliance.has_value());
      CHECK(!r.has_metrics);
    }
  CHECK(errored == 1);
}

TEST_CASE("openai dialect round-trips through a local server with retries") {
  httplib::Server server;
  int requests = 0;
  nlohmann::json last_body;
  server.Post("/v1/chat/completions",
              [&](const httplib::Request& req, httplib::Response& res) {
                ++requests;
                last_body = nlohmann::json::parse(req.body);
                if (requests == 1) {
                  res.status = 429;  // rate limited once, then fine
                  return;
                }
                CHECK(req.get_header_value("Authorization") ==
                      "Bearer sk-test-key");
                nlohmann::json reply = {
                    {"choices",
                     {{{"message",
                        {{"role", "assistant"},
                         {"content", "Run,A\\\\\n1,-1\\\\\n2,1\\\\\n"}}}}}},
                    {"usage",
                     {{"prompt_tokens", 42}, {"completion_tokens", 7}}}};
                res.set_content(reply.dump(), "application/json");
              });
  int port = server.bind_to_any_port("127.0.0.1");
  REQUIRE(port > 0);
  std::thread listener([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  setenv("FRACFACT_TEST_KEY", "sk-test-key", 1);
  ProviderProfile profile;
  profile.id = "test";
  profile.model = "test-model";
  profile.endpoint =
      "http://127.0.0.1:" + std::to_string(port) + "/v1/chat/completions";
  profile.auth_env = "FRACFACT_TEST_KEY";
  profile.dialect = WireDialect::OpenAiChat;
  profile.reasoning = {{"reasoning_effort", "medium"}};

  HttpOptions fast;
  fast.backoff_ms = 1;
  auto completion = complete(profile, "prompt body", fast);
  CHECK(requests == 2);  // the 429 was retried
  CHECK(completion.text == "Run,A\\\\\n1,-1\\\\\n2,1\\\\\n");
  REQUIRE(completion.usage.has_value());
  CHECK(completion.usage->input == 42);
  CHECK(completion.usage->output == 7);
  CHECK(last_body["model"] == "test-model");
  CHECK(last_body["reasoning_effort"] == "medium");
  CHECK(last_body["messages"][0]["content"] == "prompt body");

  server.stop();
  listener.join();
}

TEST_CASE("client errors are not retried and missing keys fail fast") {
  httplib::Server server;
  int requests = 0;
  server.Post("/v1/chat/completions",
              [&](const httplib::Request&, httplib::Response& res) {
                ++requests;
                res.status = 400;
                res.set_content("{\"error\":\"bad request\"}",
                                "application/json");
              });
  int port = server.bind_to_any_port("127.0.0.1");
  std::thread listener([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  setenv("FRACFACT_TEST_KEY", "sk-test-key", 1);
  ProviderProfile profile;
  profile.id = "test";
  profile.model = "test-model";
  profile.endpoint =
      "http://127.0.0.1:" + std::to_string(port) + "/v1/chat/completions";
  profile.auth_env = "FRACFACT_TEST_KEY";
  profile.dialect = WireDialect::OpenAiChat;

  HttpOptions fast;
  fast.backoff_ms = 1;
  CHECK_THROWS_AS(complete(profile, "p", fast), TransportError);
  CHECK(requests == 1);  // a well-formed 4xx is never retried

  profile.auth_env = "FRACFACT_UNSET_KEY_VARIABLE";
  CHECK_THROWS_AS(complete(profile, "p", fast), ConfigError);
  CHECK(requests == 1);  // config errors never reach the wire

  // Exhausted retries against a dead endpoint surface as transport errors.
  profile.auth_env = "FRACFACT_TEST_KEY";
  profile.endpoint = "http://127.0.0.1:9/v1/chat/completions";
  HttpOptions two;
  two.max_attempts = 2;
  two.backoff_ms = 1;
  CHECK_THROWS_AS(complete(profile, "p", two), TransportError);

  server.stop();
  listener.join();
}

TEST_CASE("gemini dialect substitutes the model and carries the budget") {
  httplib::Server server;
  nlohmann::json last_body;
  std::string seen_key;
  server.Post("/v1beta/models/gemini-2.5-flash:generateContent",
              [&](const httplib::Request& req, httplib::Response& res) {
                last_body = nlohmann::json::parse(req.body);
                seen_key = req.get_header_value("x-goog-api-key");
                nlohmann::json reply = {
                    {"candidates",
                     {{{"content",
                        {{"parts", {{{"text", "Run,A\\\\\n"}},
                                    {{"text", "1,1\\\\\n"}}}}}}}}},
                    {"usageMetadata",
                     {{"promptTokenCount", 5}, {"candidatesTokenCount", 9}}}};
                res.set_content(reply.dump(), "application/json");
              });
  int port = server.bind_to_any_port("127.0.0.1");
  std::thread listener([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  setenv("FRACFACT_TEST_KEY", "gm-test-key", 1);
  ProviderProfile profile;
  profile.id = "test-gemini";
  profile.model = "gemini-2.5-flash";
  profile.endpoint = "http://127.0.0.1:" + std::to_string(port) +
                     "/v1beta/models/{model}:generateContent";
  profile.auth_env = "FRACFACT_TEST_KEY";
  profile.dialect = WireDialect::GeminiGenerate;
  profile.reasoning = {{"thinkingBudget", -1}};

  auto completion = complete(profile, "prompt body");
  CHECK(completion.text == "Run,A\\\\\n1,1\\\\\n");  // parts concatenated
  REQUIRE(completion.usage.has_value());
  CHECK(completion.usage->input == 5);
  CHECK(completion.usage->output == 9);
  CHECK(seen_key == "gm-test-key");
  CHECK(last_body["contents"][0]["parts"][0]["text"] == "prompt body");
  CHECK(last_body["generationConfig"]["thinkingConfig"]["thinkingBudget"] ==
        -1);

  server.stop();
  listener.join();
}

TEST_CASE("run_benchmark drives a live dialect end to end with rate limiting") {
  httplib::Server server;
  std::string csv =
      emit_design_csv(testsupport::fixture_design(8, 4), true);
  int requests = 0;
  server.Post("/v1/chat/completions",
              [&](const httplib::Request&, httplib::Response& res) {
                ++requests;
                nlohmann::json reply = {
                    {"choices",
                     {{{"message",
                        {{"role", "assistant"}, {"content", csv}}}}}},
                    {"usage",
                     {{"prompt_tokens", 1000000}, {"completion_tokens", 1000000}}}};
                res.set_content(reply.dump(), "application/json");
              });
  int port = server.bind_to_any_port("127.0.0.1");
  std::thread listener([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  setenv("FRACFACT_TEST_KEY", "sk-test-key", 1);
  ProviderProfile profile;
  profile.id = "local";
  profile.model = "test-model";
  profile.endpoint =
      "http://127.0.0.1:" + std::to_string(port) + "/v1/chat/completions";
  profile.auth_env = "FRACFACT_TEST_KEY";
  profile.dialect = WireDialect::OpenAiChat;
  profile.price_in = Rational::parse("1.5");
  profile.price_out = Rational::parse("10");
  profile.min_interval_ms = 40;

  auto tasks = filter_grid("8:4");
  for (auto& t : tasks) {
    t.provider_id = profile.id;
    t.replicates = 3;
  }
  auto dir = testsupport::make_temp_dir("live");
  auto store = ReferenceStore::builtin();
  auto start = std::chrono::steady_clock::now();
  auto summary =
      run_benchmark(tasks, profile, 5, dir + "/live.jsonl", store);
  auto elapsed = std::chrono::steady_clock::now() - start;
  CHECK(summary.written == 3);
  CHECK(requests == 3);
  // Two inter-request gaps at 40 ms minimum each.
  CHECK(std::chrono::duration_cast<std::chrono::milliseconds>(elapsed).count() >=
        80);

  auto records = read_run_log(dir + "/live.jsonl");
  REQUIRE(records.size() == 3);
  for (const auto& r : records) {
    CHECK(r.provider_id == "local");
    REQUIRE(r.compliance.has_value());
    CHECK(r.compliance->cls == ComplianceClass::Compliant);
    CHECK(r.resolution == 4);
    REQUIRE(r.cost.has_value());
    CHECK(*r.cost == Rational(BigInt(23LL), BigInt(2LL)));  // 11.5 exactly
  }

  server.stop();
  listener.join();
}

TEST_CASE("the task grid matches the published numbering") {
  auto grid = benchmark_grid();
  REQUIRE(grid.size() == 36);
  CHECK(grid[0].task_id == 1);
  CHECK(grid[0].n == 8);
  CHECK(grid[0].m == 4);
  // 16-run tasks are numbered by factor count.
  for (const auto& t : grid)
    if (t.n == 16) CHECK(t.task_id == t.m);
  // 32-run task ids are factors + 10 (task 22 has 12 factors).
  for (const auto& t : grid)
    if (t.n == 32) CHECK(t.task_id == t.m + 10);

  CHECK(filter_grid("").size() == 36);
  CHECK(filter_grid("16:5-15").size() == 11);
  CHECK(filter_grid("8").size() == 4);
  CHECK(filter_grid("8,32:6-9").size() == 8);
  CHECK_THROWS_AS(filter_grid("16:99"), SpecError);
  CHECK_THROWS_AS(filter_grid("abc"), SpecError);
}

TEST_CASE("run records survive a json round trip") {
  RunRecord r;
  r.provider_id = "mock";
  r.model_id = "mock";
  r.task_id = 5;
  r.n = 16;
  r.m = 5;
  r.replicate = 2;
  r.timestamp = "1970-01-01T00:00:07Z";
  r.raw_response = "Run,A\\\\\n";
  r.usage = TokenUsage{10, 20};
  r.cost = Rational(0);
  ParseOutcome p;
  p.kind = ParseOutcome::Kind::Table;
  p.table.repair_log = {"row 2: missing '\\\\' row terminator"};
  r.parse = p;
  ComplianceReport c;
  c.cls = ComplianceClass::Compliant;
  c.detail = "complete";
  r.compliance = c;
  r.has_metrics = true;
  r.resolution = 5;
  r.pattern = {Rational::parse("7/3"), Rational::parse("19/3")};
  r.optimality = Optimality::Optimal;

  auto j = record_to_json(r);
  auto back = record_from_json(nlohmann::json::parse(j.dump()));
  CHECK(back.task_id == r.task_id);
  CHECK(back.timestamp == r.timestamp);
  CHECK(back.raw_response == r.raw_response);
  CHECK(back.usage->input == 10);
  CHECK(back.parse->kind == ParseOutcome::Kind::Table);
  CHECK(back.parse->table.repair_log == p.table.repair_log);
  CHECK(back.compliance->cls == ComplianceClass::Compliant);
  CHECK(back.resolution == 5);
  CHECK(back.pattern == r.pattern);
  CHECK(back.optimality == Optimality::Optimal);
  CHECK(record_to_json(back).dump() == j.dump());
}
