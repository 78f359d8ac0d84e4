// fracfact: construct, evaluate, search, benchmark, and report on two-level
// fractional factorial designs.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fracfact/fracfact.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitTransport = 3;

std::string render_moments(std::span<const fracfact::Rational> moments,
                           int decimals) {
  std::string out = "(";
  for (std::size_t i = 0; i < moments.size(); ++i) {
    if (i) out += ", ";
    out += moments[i].to_decimal(decimals);
  }
  out += ")";
  return out;
}

std::string render_wlp(const fracfact::WordLengthPattern& wlp) {
  std::string out = "(";
  for (std::size_t i = 0; i < wlp.counts.size(); ++i) {
    if (i) out += ", ";
    out += wlp.counts[i].to_string();
  }
  out += ")";
  return out;
}

void write_or_print(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
  } else {
    fracfact::write_text_file(out_path, text);
  }
}

fracfact::ReferenceStore load_store(const std::string& path) {
  if (path.empty()) return fracfact::ReferenceStore::builtin();
  std::ifstream probe(path);
  if (!probe) return fracfact::ReferenceStore::builtin();
  return fracfact::ReferenceStore::load(path);
}

int run_construct(int runs, const std::string& generators_text, bool plain,
                  const std::string& out_path) {
  int b = 0;
  while ((1 << b) < runs) ++b;
  if ((1 << b) != runs || runs < 2)
    throw fracfact::SpecError("--runs must be a power of two >= 2");
  auto basic_labels = fracfact::default_factor_labels(b);
  auto generators =
      fracfact::parse_generators(generators_text, basic_labels);
  auto design = fracfact::build_design(b, generators, basic_labels);
  write_or_print(fracfact::emit_design_csv(design, !plain), out_path);
  return kExitOk;
}

int run_evaluate(const std::string& file, const std::string& store_path) {
  auto design = fracfact::read_design_file(file);
  auto store = load_store(store_path);
  int m = design.m();

  std::cout << "runs: " << design.n() << "\n";
  std::cout << "factors: " << m << "\n";
  auto res = fracfact::resolution(design);
  std::cout << "resolution: "
            << (res ? std::to_string(*res) : ">=" + std::to_string(m + 1))
            << "\n";
  auto pattern = fracfact::moment_pattern(design, m);
  std::cout << "moment pattern: "
            << render_moments(std::span<const fracfact::Rational>(
                                  pattern.moments),
                              2)
            << "\n";
  if (m <= 16) {
    auto wlp = fracfact::generalized_wlp(design);
    std::cout << "wlp: " << render_wlp(wlp) << "\n";
  }
  std::cout << "optimality: "
            << fracfact::to_string(store.classify_pattern(
                   design.n(), m,
                   std::span<const fracfact::Rational>(pattern.moments)))
            << "\n";
  return kExitOk;
}

int run_search(int runs, int factors, std::uint64_t seed, int restarts,
               std::uint64_t budget, int depth, bool publish,
               const std::string& store_path, const std::string& out_path) {
  fracfact::SearchConfig config;
  config.seed = seed;
  config.restarts = restarts;
  config.exhaustive_budget = budget;
  config.objective_depth = depth;
  auto result = fracfact::search_min_aberration(runs, factors, config);
  auto store = load_store(store_path);

  std::cout << "runs: " << runs << "\n";
  std::cout << "factors: " << factors << "\n";
  std::cout << "mode: " << fracfact::to_string(result.mode) << "\n";
  std::cout << "evaluations: " << result.evaluations << "\n";
  std::cout << "columns:";
  for (auto mask : result.column_masks) std::cout << ' ' << mask;
  std::cout << "\n";
  auto res = fracfact::resolution(result.design);
  std::cout << "resolution: "
            << (res ? std::to_string(*res) : ">=" + std::to_string(factors + 1))
            << "\n";
  int prefix = fracfact::display_prefix_length(runs, factors);
  std::cout << "moment pattern: "
            << render_moments(
                   std::span<const fracfact::Rational>(result.pattern.moments)
                       .subspan(0, static_cast<std::size_t>(prefix)),
                   1)
            << "\n";
  if (result.wlp) std::cout << "wlp: " << render_wlp(*result.wlp) << "\n";
  std::cout << "optimality: "
            << fracfact::to_string(store.classify_pattern(
                   runs, factors,
                   std::span<const fracfact::Rational>(result.pattern.moments)))
            << "\n";

  if (publish) {
    if (store_path.empty())
      throw fracfact::ConfigError("--publish needs --reference-store FILE");
    auto status = result.mode == fracfact::SearchMode::Exhaustive
                      ? fracfact::PatternStatus::Confirmed
                      : fracfact::PatternStatus::BestFound;
    std::string provenance =
        result.mode == fracfact::SearchMode::Exhaustive
            ? "exhaustive"
            : "local-search-seed" + std::to_string(seed);
    store.publish(runs, factors,
                  std::span<const fracfact::Rational>(result.pattern.moments),
                  status, provenance);
    store.save(store_path);
    std::cout << "published: " << store_path << "\n";
  }
  if (!out_path.empty())
    fracfact::write_text_file(out_path,
                              fracfact::emit_design_csv(result.design));
  return kExitOk;
}

int run_benchmark_cmd(const std::string& provider_id, bool offline,
                      const std::string& config_path,
                      const std::string& fixtures, std::uint64_t seed,
                      int replicates, const std::string& tasks_filter,
                      const std::string& log_path,
                      const std::string& store_path) {
  auto profiles = config_path.empty()
                      ? fracfact::default_profiles()
                      : fracfact::load_provider_config(config_path);
  std::string id = offline ? std::string("mock") : provider_id;
  if (id.empty())
    throw fracfact::ConfigError("choose --provider ID or --offline");
  fracfact::ProviderProfile profile = fracfact::find_profile(profiles, id);
  if (profile.dialect == fracfact::WireDialect::Mock && !fixtures.empty())
    profile.fixtures_dir = fixtures;

  auto tasks = fracfact::filter_grid(tasks_filter);
  for (auto& task : tasks) {
    task.provider_id = profile.id;
    task.model_id = profile.model;
    task.reasoning = profile.reasoning;
    task.seed = seed;
    if (replicates > 0) task.replicates = replicates;
  }

  auto store = load_store(store_path);
  auto summary = fracfact::run_benchmark(tasks, profile, seed, log_path, store,
                                         {}, &std::cerr);
  std::cout << "records written: " << summary.written << "\n";
  std::cout << "records skipped (already on disk): " << summary.skipped << "\n";
  std::cout << "transport failures: " << summary.failures << "\n";
  std::cout << "log: " << log_path << "\n";
  return kExitOk;
}

int run_report(const std::string& log_path, const std::string& format,
               const std::string& provider_filter,
               const std::string& store_path, const std::string& out_path) {
  auto records = fracfact::read_run_log(log_path);
  if (!provider_filter.empty()) {
    std::vector<fracfact::RunRecord> filtered;
    for (auto& r : records)
      if (r.provider_id == provider_filter) filtered.push_back(std::move(r));
    records = std::move(filtered);
  }
  auto store = load_store(store_path);
  auto rows = fracfact::aggregate(
      std::span<const fracfact::RunRecord>(records), store);
  auto fmt = format == "csv" ? fracfact::ReportFormat::Csv
                             : fracfact::ReportFormat::Markdown;
  write_or_print(fracfact::emit_report(
                     std::span<const fracfact::ReportRow>(rows), fmt),
                 out_path);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-level fractional factorial designs: construction, "
               "evaluation, minimum-aberration search, and a replicated LLM "
               "benchmark"};
  app.require_subcommand(1);

  // construct
  auto* construct = app.add_subcommand(
      "construct", "Build a regular design from basic factors and generators");
  int c_runs = 8;
  std::string c_generators, c_out;
  bool c_plain = false;
  construct->add_option("--runs", c_runs, "Run count (power of two)")
      ->required();
  construct->add_option("--generators", c_generators,
                        "Comma-separated generators, e.g. \"E=ABC,F=ABD\"");
  construct->add_flag("--plain", c_plain, "Plain CSV without row terminators");
  construct->add_option("-o,--output", c_out, "Write CSV here instead of stdout");

  // evaluate
  auto* evaluate = app.add_subcommand(
      "evaluate", "Resolution, moment pattern, WLP, optimality of a design file");
  std::string e_file, e_store;
  evaluate->add_option("file", e_file, "Design CSV file")->required();
  evaluate->add_option("--reference-store", e_store,
                       "Reference pattern store file");

  // search
  auto* search = app.add_subcommand(
      "search", "Find a minimum-aberration design of the given size");
  int s_runs = 16, s_factors = 5, s_restarts = 200, s_depth = 0;
  std::uint64_t s_seed = 0, s_budget = 1'000'000;
  bool s_publish = false;
  std::string s_store, s_out;
  search->add_option("--runs", s_runs, "Run count: 8, 16, or 32")->required();
  search->add_option("--factors", s_factors, "Factor count")->required();
  search->add_option("--seed", s_seed, "Search seed");
  search->add_option("--restarts", s_restarts, "Local-search restarts");
  search->add_option("--exhaustive-budget", s_budget,
                     "Max subset count for exhaustive enumeration");
  search->add_option("--depth", s_depth,
                     "Moments compared lexicographically (default: all m)");
  search->add_flag("--publish", s_publish,
                   "Record the found pattern in the reference store");
  search->add_option("--reference-store", s_store, "Reference store file");
  search->add_option("-o,--output", s_out, "Write the winning design CSV here");

  // benchmark
  auto* benchmark = app.add_subcommand(
      "benchmark", "Prompt a chat-completion provider across the task grid");
  std::string b_provider, b_config, b_fixtures, b_tasks, b_store;
  std::string b_log = "run.jsonl";
  std::uint64_t b_seed = 0;
  int b_replicates = 0;
  bool b_offline = false;
  benchmark->add_option("--provider", b_provider, "Provider profile id");
  benchmark->add_flag("--offline", b_offline, "Use the mock provider");
  benchmark->add_option("--config", b_config, "Provider config JSON");
  benchmark->add_option("--fixtures", b_fixtures,
                        "Fixture directory for the mock provider");
  benchmark->add_option("--seed", b_seed, "Task-order shuffle seed");
  benchmark->add_option("--replicates", b_replicates,
                        "Replicates per task (default 10)");
  benchmark->add_option("--tasks", b_tasks,
                        "Grid filter, e.g. \"16:5-15\" or \"8,32:6-9\"");
  benchmark->add_option("--log", b_log, "Append-only JSONL record log");
  benchmark->add_option("--reference-store", b_store, "Reference store file");

  // report
  auto* report = app.add_subcommand(
      "report", "Aggregate a record log into the benchmark tables");
  std::string r_log, r_format = "markdown", r_provider, r_store, r_out;
  report->add_option("log", r_log, "JSONL record log")->required();
  report->add_option("--format", r_format, "markdown or csv")
      ->check(CLI::IsMember({"markdown", "csv"}));
  report->add_option("--provider", r_provider, "Only this provider's records");
  report->add_option("--reference-store", r_store, "Reference store file");
  report->add_option("-o,--output", r_out, "Write report here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (construct->parsed())
      return run_construct(c_runs, c_generators, c_plain, c_out);
    if (evaluate->parsed()) return run_evaluate(e_file, e_store);
    if (search->parsed())
      return run_search(s_runs, s_factors, s_seed, s_restarts, s_budget,
                        s_depth, s_publish, s_store, s_out);
    if (benchmark->parsed())
      return run_benchmark_cmd(b_provider, b_offline, b_config, b_fixtures,
                               b_seed, b_replicates, b_tasks, b_log, b_store);
    if (report->parsed())
      return run_report(r_log, r_format, r_provider, r_store, r_out);
  } catch (const fracfact::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitTransport;
  } catch (const fracfact::TransportError& e) {
    std::cerr << "transport error: " << e.what() << "\n";
    return kExitTransport;
  } catch (const fracfact::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}
