#pragma once

#include <algorithm>
#include <chrono>
#include <ctime>
#include <fstream>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "fracfact/client.hpp"
#include "fracfact/criteria.hpp"
#include "fracfact/errors.hpp"
#include "fracfact/prompt.hpp"
#include "fracfact/provider.hpp"
#include "fracfact/reference.hpp"
#include "fracfact/response_parse.hpp"
#include "fracfact/rng.hpp"
#include "fracfact/validate.hpp"

namespace fracfact {

// One benchmark cell: construct an n-run, m-factor design, `replicates`
// times, against one provider.
struct TaskSpec {
  int task_id = 0;
  int n = 0;
  int m = 0;
  int replicates = 10;
  std::string provider_id;
  std::string model_id;
  nlohmann::json reasoning;
  std::uint64_t seed = 0;
};

/// The 36-task grid: 8 runs with 4-7 factors, 16 runs with 5-15, 32 runs
/// with 6-26.
inline std::vector<TaskSpec> benchmark_grid() {
  std::vector<TaskSpec> tasks;
  int id = 1;
  auto add = [&](int n, int m_lo, int m_hi) {
    for (int m = m_lo; m <= m_hi; ++m) {
      TaskSpec t;
      t.task_id = id++;
      t.n = n;
      t.m = m;
      tasks.push_back(t);
    }
  };
  add(8, 4, 7);
  add(16, 5, 15);
  add(32, 6, 26);
  return tasks;
}

/// Grid filter like "16:5-15", "8", "32:6,16:5-8"; returns matching tasks.
inline std::vector<TaskSpec> filter_grid(const std::string& filter) {
  auto grid = benchmark_grid();
  if (filter.empty()) return grid;
  std::vector<TaskSpec> out;
  std::size_t start = 0;
  while (start <= filter.size()) {
    std::size_t end = filter.find(',', start);
    if (end == std::string::npos) end = filter.size();
    std::string item = filter.substr(start, end - start);
    if (!item.empty()) {
      int n = 0, m_lo = 0, m_hi = 1 << 30;
      auto colon = item.find(':');
      try {
        n = std::stoi(item.substr(0, colon));
        if (colon != std::string::npos) {
          std::string span = item.substr(colon + 1);
          auto dash = span.find('-');
          m_lo = std::stoi(span.substr(0, dash));
          m_hi = dash == std::string::npos ? m_lo
                                           : std::stoi(span.substr(dash + 1));
        }
      } catch (const std::exception&) {
        throw SpecError("bad task filter item \"" + item + "\"");
      }
      bool any = false;
      for (const auto& t : grid)
        if (t.n == n && t.m >= m_lo && t.m <= m_hi) {
          any = true;
          bool seen = std::any_of(out.begin(), out.end(), [&](const TaskSpec& s) {
            return s.task_id == t.task_id;
          });
          if (!seen) out.push_back(t);
        }
      if (!any) throw SpecError("task filter matches nothing: \"" + item + "\"");
    }
    if (end == filter.size()) break;
    start = end + 1;
  }
  std::sort(out.begin(), out.end(),
            [](const TaskSpec& a, const TaskSpec& b) { return a.task_id < b.task_id; });
  return out;
}

// Everything observed for one (task, replicate) execution.
struct RunRecord {
  int schema_version = 1;
  std::string provider_id;
  std::string model_id;
  int task_id = 0;
  int n = 0;
  int m = 0;
  int replicate = 0;
  std::string timestamp;
  std::optional<std::string> raw_response;
  std::optional<TokenUsage> usage;
  std::optional<Rational> cost;
  std::optional<ParseOutcome> parse;
  std::optional<ComplianceReport> compliance;
  // Metrics, present iff compliant.
  std::optional<int> resolution;  // nullopt inside a compliant record = ">= m+1"
  std::vector<Rational> pattern;  // full m exact moments
  Optimality optimality = Optimality::Unknown;
  bool has_metrics = false;
  std::string error;  // transport/config failure text
};

namespace detail {

inline std::string iso8601_utc(std::time_t t) {
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace detail

inline nlohmann::ordered_json record_to_json(const RunRecord& r) {
  nlohmann::ordered_json j;
  j["schema"] = r.schema_version;
  j["provider"] = r.provider_id;
  j["model"] = r.model_id;
  j["task"] = r.task_id;
  j["n"] = r.n;
  j["m"] = r.m;
  j["replicate"] = r.replicate;
  j["timestamp"] = r.timestamp;
  j["raw_response"] =
      r.raw_response ? nlohmann::ordered_json(*r.raw_response)
                     : nlohmann::ordered_json(nullptr);
  if (r.usage) {
    j["usage"] = {{"input", r.usage->input}, {"output", r.usage->output}};
  } else {
    j["usage"] = nullptr;
  }
  j["cost"] = r.cost ? nlohmann::ordered_json(r.cost->to_string())
                     : nlohmann::ordered_json(nullptr);
  if (r.parse) {
    nlohmann::ordered_json p;
    p["outcome"] = to_string(r.parse->kind);
    if (r.parse->kind == ParseOutcome::Kind::Refusal)
      p["matched_phrase"] = r.parse->refusal_phrase;
    if (r.parse->kind == ParseOutcome::Kind::Unparseable)
      p["reason"] = r.parse->reason;
    if (r.parse->kind == ParseOutcome::Kind::Table)
      p["repairs"] = r.parse->table.repair_log;
    j["parse"] = std::move(p);
  } else {
    j["parse"] = nullptr;
  }
  if (r.compliance) {
    nlohmann::ordered_json c;
    c["class"] = to_string(r.compliance->cls);
    c["detail"] = r.compliance->detail;
    c["repairs"] = r.compliance->repair_log;
    j["compliance"] = std::move(c);
  } else {
    j["compliance"] = nullptr;
  }
  if (r.has_metrics) {
    nlohmann::ordered_json m;
    m["resolution"] = r.resolution ? nlohmann::ordered_json(*r.resolution)
                                   : nlohmann::ordered_json(nullptr);
    nlohmann::ordered_json pat = nlohmann::ordered_json::array();
    for (const auto& k : r.pattern)
      pat.push_back(k.num().to_string() + "/" + k.den().to_string());
    m["moment_pattern"] = std::move(pat);
    m["optimality"] = to_string(r.optimality);
    j["metrics"] = std::move(m);
  } else {
    j["metrics"] = nullptr;
  }
  j["error"] = r.error.empty() ? nlohmann::ordered_json(nullptr)
                               : nlohmann::ordered_json(r.error);
  return j;
}

inline RunRecord record_from_json(const nlohmann::json& j) {
  RunRecord r;
  r.schema_version = j.value("schema", 1);
  r.provider_id = j.value("provider", std::string{});
  r.model_id = j.value("model", std::string{});
  r.task_id = j.value("task", 0);
  r.n = j.value("n", 0);
  r.m = j.value("m", 0);
  r.replicate = j.value("replicate", 0);
  r.timestamp = j.value("timestamp", std::string{});
  if (j.contains("raw_response") && j["raw_response"].is_string())
    r.raw_response = j["raw_response"].get<std::string>();
  if (j.contains("usage") && j["usage"].is_object())
    r.usage = TokenUsage{j["usage"].value("input", 0LL),
                         j["usage"].value("output", 0LL)};
  if (j.contains("cost") && j["cost"].is_string())
    r.cost = Rational::parse(j["cost"].get<std::string>());
  if (j.contains("parse") && j["parse"].is_object()) {
    ParseOutcome p;
    std::string outcome = j["parse"].value("outcome", std::string{});
    if (outcome == "table") {
      p.kind = ParseOutcome::Kind::Table;
      if (j["parse"].contains("repairs"))
        for (const auto& rep : j["parse"]["repairs"])
          p.table.repair_log.push_back(rep.get<std::string>());
    } else if (outcome == "refusal") {
      p.kind = ParseOutcome::Kind::Refusal;
      p.refusal_phrase = j["parse"].value("matched_phrase", std::string{});
    } else {
      p.kind = ParseOutcome::Kind::Unparseable;
      p.reason = j["parse"].value("reason", std::string{});
    }
    r.parse = std::move(p);
  }
  if (j.contains("compliance") && j["compliance"].is_object()) {
    ComplianceReport c;
    auto cls = compliance_class_from_string(
        j["compliance"].value("class", std::string{}));
    if (!cls) throw DataError("run log: unknown compliance class");
    c.cls = *cls;
    c.detail = j["compliance"].value("detail", std::string{});
    if (j["compliance"].contains("repairs"))
      for (const auto& rep : j["compliance"]["repairs"])
        c.repair_log.push_back(rep.get<std::string>());
    r.compliance = std::move(c);
  }
  if (j.contains("metrics") && j["metrics"].is_object()) {
    r.has_metrics = true;
    if (j["metrics"].contains("resolution") && j["metrics"]["resolution"].is_number())
      r.resolution = j["metrics"]["resolution"].get<int>();
    if (j["metrics"].contains("moment_pattern"))
      for (const auto& k : j["metrics"]["moment_pattern"])
        r.pattern.push_back(Rational::parse(k.get<std::string>()));
    std::string opt = j["metrics"].value("optimality", std::string{"unknown"});
    r.optimality = opt == "optimal" ? Optimality::Optimal
                   : opt == "suboptimal" ? Optimality::Suboptimal
                                         : Optimality::Unknown;
  }
  if (j.contains("error") && j["error"].is_string())
    r.error = j["error"].get<std::string>();
  return r;
}

inline std::vector<RunRecord> read_run_log(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open run log: " + path);
  std::vector<RunRecord> records;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      records.push_back(record_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw DataError("run log line " + std::to_string(line_no) +
                      " is not valid JSON: " + e.what());
    }
  }
  return records;
}

struct BenchmarkSummary {
  int written = 0;
  int skipped = 0;
  int failures = 0;  // transport-level
};

/// Executes tasks (order shuffled by a seeded permutation), `replicates`
/// single-turn calls each; every result is parsed, validated, measured,
/// costed, and appended to the JSONL log before the next call. Resuming
/// skips (task, replicate) pairs already on disk for this provider.
inline BenchmarkSummary run_benchmark(std::vector<TaskSpec> tasks,
                                      const ProviderProfile& profile,
                                      std::uint64_t seed,
                                      const std::string& log_path,
                                      const ReferenceStore& store,
                                      const HttpOptions& http = {},
                                      std::ostream* progress = nullptr) {
  if (tasks.empty()) throw SpecError("benchmark: no tasks");

  std::set<std::pair<int, int>> done;
  {
    std::ifstream existing(log_path, std::ios::binary);
    if (existing) {
      std::string line;
      while (std::getline(existing, line)) {
        if (line.empty()) continue;
        try {
          auto j = nlohmann::json::parse(line);
          if (j.value("provider", std::string{}) == profile.id)
            done.emplace(j.value("task", 0), j.value("replicate", 0));
        } catch (const nlohmann::json::exception&) {
          throw DataError("run log is corrupt; refusing to resume: " + log_path);
        }
      }
    }
  }

  std::ofstream log(log_path, std::ios::binary | std::ios::app);
  if (!log) throw DataError("cannot open run log for append: " + log_path);

  // Seeded uniform permutation of task order.
  SplitMix64 order_rng(mix_seed(seed, 0x7a5c5));
  fisher_yates(tasks, order_rng);

  BenchmarkSummary summary;
  bool mock = profile.dialect == WireDialect::Mock;
  long long mock_clock = 0;
  auto last_call = std::chrono::steady_clock::now() -
                   std::chrono::milliseconds(profile.min_interval_ms);

  for (const auto& task : tasks) {
    for (int rep = 1; rep <= task.replicates; ++rep) {
      if (done.count({task.task_id, rep})) {
        ++summary.skipped;
        ++mock_clock;
        continue;
      }
      RunRecord record;
      record.provider_id = profile.id;
      record.model_id = profile.model;
      record.task_id = task.task_id;
      record.n = task.n;
      record.m = task.m;
      record.replicate = rep;
      // The mock clock makes fixed-seed offline logs byte-identical.
      record.timestamp =
          mock ? detail::iso8601_utc(static_cast<std::time_t>(mock_clock++))
               : detail::iso8601_utc(std::time(nullptr));

      std::string prompt = render_prompt(task.m, task.n);
      if (!mock && profile.min_interval_ms > 0) {
        auto earliest =
            last_call + std::chrono::milliseconds(profile.min_interval_ms);
        std::this_thread::sleep_until(earliest);
      }
      last_call = std::chrono::steady_clock::now();

      try {
        MockKey key{task.n, task.m, rep};
        Completion completion = complete(profile, prompt, http, &key);
        record.raw_response = completion.text;
        record.usage = completion.usage;
        record.cost = estimate_cost(completion.usage, profile);

        ParseOutcome outcome =
            parse_design_response(completion.text, task.m, task.n);
        if (outcome.kind == ParseOutcome::Kind::Table) {
          ValidationResult validation =
              validate_table(outcome.table, task.m, task.n);
          record.compliance = validation.report;
          if (validation.table) {
            record.has_metrics = true;
            record.resolution = resolution(*validation.table);
            record.pattern =
                moment_pattern(*validation.table, task.m).moments;
            record.optimality = store.classify_pattern(
                task.n, task.m, std::span<const Rational>(record.pattern));
          }
        } else if (outcome.kind == ParseOutcome::Kind::Refusal) {
          ComplianceReport report;
          report.cls = ComplianceClass::Refusal;
          report.detail = "matched phrase: " + outcome.refusal_phrase;
          record.compliance = report;
        }
        record.parse = std::move(outcome);
      } catch (const TransportError& e) {
        record.error = e.what();
        ++summary.failures;
      }

      log << record_to_json(record).dump() << '\n';
      log.flush();
      ++summary.written;
      if (progress)
        *progress << "task " << task.task_id << " (" << task.n << " runs, "
                  << task.m << " factors) replicate " << rep << ": "
                  << (record.error.empty()
                          ? (record.compliance
                                 ? to_string(record.compliance->cls)
                                 : "unparseable")
                          : "transport error")
                  << "\n";
    }
  }
  return summary;
}

}  // namespace fracfact
