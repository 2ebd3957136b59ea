// Command-line front end: generate markets, run the match, inject errors,
// apply mitigation strategies, run sweep experiments, print expectations.

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "matchmend/experiment.hpp"
#include "matchmend/io.hpp"

namespace {

using namespace matchmend;

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 1;
constexpr int kExitRunFailure = 2;

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read " + path);
  try {
    json j;
    in >> j;
    return j;
  } catch (const json::exception& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << "\n";
}

struct SchoolChoice {
  SchoolSelector selector = SchoolSelector::kMostPopular;
  SchoolId explicit_school = -1;
};

SchoolChoice parse_school(const std::string& text) {
  SchoolChoice choice;
  if (text == "most-popular") choice.selector = SchoolSelector::kMostPopular;
  else if (text == "median") choice.selector = SchoolSelector::kMedian;
  else if (text == "least-popular") choice.selector = SchoolSelector::kLeastPopular;
  else {
    choice.selector = SchoolSelector::kExplicit;
    try {
      choice.explicit_school = std::stoi(text);
    } catch (...) {
      throw std::invalid_argument("school must be most-popular, median, least-popular or an id");
    }
  }
  return choice;
}

SchoolId resolve_school(const json& market_json, const MarketInstance& m,
                        const SchoolChoice& choice) {
  if (choice.selector == SchoolSelector::kExplicit) {
    if (choice.explicit_school < 0 || choice.explicit_school >= m.num_schools())
      throw std::invalid_argument("school id out of range");
    return choice.explicit_school;
  }
  const auto popularity = school_popularity_from_json(market_json);
  if (!popularity)
    throw std::invalid_argument(
        "market file has no school_popularity scores; name the school by id instead");
  return select_error_school(*popularity, choice.selector);
}

int cmd_generate(const GenParams& params, const std::string& out_path) {
  const GeneratedMarket market = generate_market(params);
  write_json_file(out_path, market_to_json(market));
  std::cout << "wrote " << out_path << " (" << params.n_students << " students, "
            << params.n_schools << " schools)\n";
  return kExitOk;
}

int cmd_match(const std::string& market_path, const std::string& out_path,
              const std::string& log_path) {
  const MarketInstance m = market_from_json(read_json_file(market_path));
  const auto violations = validate(m);
  if (!violations.empty()) {
    for (const auto& v : violations) std::cerr << "invalid market: " << v << "\n";
    return kExitConfigError;
  }
  const DaResult result = run_da(m);
  write_json_file(out_path, matching_to_json(result.matching));
  if (!log_path.empty()) write_json_file(log_path, log_to_json(result.log));
  int unmatched = 0;
  for (const SchoolId s : result.matching.assignment) unmatched += s == kUnmatched;
  std::cout << "matched " << m.num_students() - unmatched << "/" << m.num_students()
            << " students; wrote " << out_path << "\n";
  return kExitOk;
}

int cmd_inject(const std::string& market_path, const std::string& kind_name,
               const std::string& school, double p, int n_boosted, std::uint64_t seed,
               const std::string& out_path) {
  const json market_json = read_json_file(market_path);
  const MarketInstance m = market_from_json(market_json);
  const SchoolId s_e = resolve_school(market_json, m, parse_school(school));
  const ErrorKind kind = error_kind_from_string(kind_name);

  ErrorScenario sc;
  switch (kind) {
    case ErrorKind::kResourceReduction:
      sc = inject_resource_reduction(m, run_da(m).matching, s_e);
      break;
    case ErrorKind::kSubtractive:
      sc = inject_subtractive(m, s_e, p, seed);
      break;
    case ErrorKind::kAdditive:
      sc = inject_additive(m, s_e, n_boosted, seed);
      break;
  }
  write_json_file(out_path, scenario_to_json(sc));

  const auto error_free = run_da(m);
  const ImpactReport impact = classify_scenario(sc, m, error_free.matching);
  std::cout << to_string(kind) << " error at school " << s_e << ": " << sc.affected.size()
            << " affected, " << impact.directly_harmed.size() << " directly harmed, "
            << impact.envious.size() << " envious; wrote " << out_path << "\n";
  return kExitOk;
}

int cmd_impact(const std::string& market_path, const std::string& scenario_path,
               const std::string& out_path) {
  const MarketInstance m = market_from_json(read_json_file(market_path));
  const ErrorScenario sc = scenario_from_json(m, read_json_file(scenario_path));
  const auto error_free = run_da(m);
  ImpactReport impact = classify_scenario(sc, m, error_free.matching);
  switch (sc.kind) {
    case ErrorKind::kResourceReduction:
      impact.expectations = expected_group_sizes(sc.kind, m.capacity(sc.error_school));
      break;
    case ErrorKind::kSubtractive:
      if (sc.removal_prob < 1.0)
        impact.expectations =
            expected_group_sizes(sc.kind, m.capacity(sc.error_school), sc.removal_prob);
      break;
    case ErrorKind::kAdditive: {
      const int pool = static_cast<int>(
          applicant_pool(error_free.log, m.num_students(), sc.error_school).size());
      const int admitted = error_free.matching.roster_size(sc.error_school);
      if (pool >= admitted + sc.boosted_count)
        impact.expectations =
            expected_group_sizes(sc.kind, admitted, 0.0, pool, sc.boosted_count);
      break;
    }
  }
  const json j = impact_to_json(impact);
  if (out_path.empty())
    std::cout << j.dump(2) << "\n";
  else
    write_json_file(out_path, j);
  return kExitOk;
}

int cmd_mitigate(const std::string& market_path, const std::string& scenario_path,
                 const std::string& strategy_name, const std::string& affected_name,
                 double refusal_prob, std::uint64_t seed, const std::string& out_path) {
  const MarketInstance m = market_from_json(read_json_file(market_path));
  const ErrorScenario sc = scenario_from_json(m, read_json_file(scenario_path));
  const DaResult error_free = run_da(m);
  const CounterfactualPair pair{error_free.matching, sc.errored_matching};
  const Strategy strategy = strategy_from_string(strategy_name);
  MitigationOptions options;
  options.refusal_prob = refusal_prob;
  options.seed = seed;

  MitigationResult result;
  switch (strategy) {
    case Strategy::kStableExpansion:
      result = stable_expansion(sc, m, error_free.log);
      break;
    case Strategy::kDirectOnly:
      result = direct_only(sc, m, pair, options);
      break;
    case Strategy::kStabilityRestoration:
      result = stability_restoration(sc, m, pair, options);
      break;
    case Strategy::kBestOfBoth:
      result = best_of_both(sc, m, pair, options);
      break;
    case Strategy::kNearStableExpansion: {
      AffectedChoice choice;
      if (affected_name == "direct-plus-indirect" || affected_name == "direct_plus_indirect")
        choice = AffectedChoice::kDirectPlusIndirect;
      else if (affected_name == "direct")
        choice = AffectedChoice::kDirectOnly;
      else
        throw std::invalid_argument("--affected must be direct or direct-plus-indirect");
      const RejectionLog errored_log = run_da(sc.errored_instance).log;
      result = near_stable_expansion(sc, m, errored_log, choice);
      break;
    }
  }
  write_json_file(out_path, mitigation_to_json(result));
  int expansion = 0;
  for (const int e : result.expansion_by_school) expansion += e;
  std::cout << strategy_name << ": " << result.moved.size() << " students moved, " << expansion
            << " seats added; wrote " << out_path << "\n";
  return kExitOk;
}

int cmd_expect(const std::string& kind_name, int capacity, double p, int pool, int n_boosted) {
  const ErrorKind kind = error_kind_from_string(kind_name);
  const ExpectationRow row = expected_group_sizes(kind, capacity, p, pool, n_boosted);
  std::cout << "directly harmed: " << row.directly_harmed << "\n"
            << "directly helped: " << row.directly_helped << "\n"
            << "envious: " << (row.envious_is_upper_bound ? "<= " : "") << row.envious << "\n";
  if (row.assumes_competitive_school)
    std::cout << "(assumes the error school still fills to capacity)\n";
  return kExitOk;
}

int cmd_experiment(const std::string& config_path, const std::string& out_dir,
                   const std::optional<int>& runs, const std::optional<std::uint64_t>& seed,
                   const std::vector<double>& p_values, const std::vector<int>& n_values,
                   const std::string& school, const std::optional<int>& threads,
                   const std::string& format_name) {
  ExperimentConfig config = config_from_json(read_json_file(config_path));
  if (runs) config.runs = *runs;
  if (seed) config.master_seed = *seed;
  if (threads) config.threads = *threads;
  if (!p_values.empty()) config.error.sweep = p_values;
  if (!n_values.empty()) {
    config.error.sweep.clear();
    for (const int n : n_values) config.error.sweep.push_back(n);
  }
  if (!school.empty()) {
    const SchoolChoice choice = parse_school(school);
    config.error.selector = choice.selector;
    config.error.explicit_school = choice.explicit_school;
  }
  validate_config(config);

  ReportFormat format = ReportFormat::kAll;
  if (format_name == "json") format = ReportFormat::kJson;
  else if (format_name == "csv") format = ReportFormat::kCsv;
  else if (format_name != "all") throw std::invalid_argument("format must be json, csv or all");

  const AggregateReport report = run_experiment(config);
  const auto written = emit_report(report, out_dir, format);
  for (const auto& path : written) std::cout << "wrote " << path.string() << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"deferred-acceptance school matching with error injection and repair"};
  app.require_subcommand(1);

  // generate
  auto* generate = app.add_subcommand("generate", "emit a random market file");
  GenParams gen;
  std::string gen_out = "market.json";
  generate->add_option("--students", gen.n_students, "number of students");
  generate->add_option("--schools", gen.n_schools, "number of schools");
  generate->add_option("--seats", gen.seats_per_school, "seats per school");
  generate->add_option("--weight", gen.popularity_weight, "weight on the shared popularity score");
  generate->add_option("--list-mean", gen.list_length_mean, "mean student list length");
  generate->add_option("--list-std", gen.list_length_std, "std of student list length");
  generate->add_option("--seed", gen.seed, "generator seed");
  generate->add_option("-o,--out", gen_out, "output path");

  // match
  auto* match = app.add_subcommand("match", "run deferred acceptance on a market file");
  std::string match_market, match_out = "matching.json", match_log;
  match->add_option("-i,--market", match_market, "market file")->required();
  match->add_option("-o,--out", match_out, "matching output path");
  match->add_option("--log", match_log, "also dump the proposal/rejection trace");

  // inject
  auto* inject = app.add_subcommand("inject", "apply an error to a market and save the scenario");
  std::string inj_market, inj_kind, inj_school = "most-popular", inj_out = "scenario.json";
  double inj_p = 0.0;
  int inj_n = 0;
  std::uint64_t inj_seed = 0;
  inject->add_option("-i,--market", inj_market, "market file")->required();
  inject->add_option("--kind", inj_kind, "resource_reduction | subtractive | additive")->required();
  inject->add_option("--school", inj_school, "most-popular | median | least-popular | id");
  inject->add_option("--p", inj_p, "removal probability (subtractive)");
  inject->add_option("--n", inj_n, "boosted count (additive)");
  inject->add_option("--seed", inj_seed, "realization seed");
  inject->add_option("-o,--out", inj_out, "scenario output path");

  // impact
  auto* impact = app.add_subcommand("impact", "classify harmed/helped/envious for a scenario");
  std::string imp_market, imp_scenario, imp_out;
  impact->add_option("-i,--market", imp_market, "market file")->required();
  impact->add_option("--scenario", imp_scenario, "scenario file")->required();
  impact->add_option("-o,--out", imp_out, "report path (stdout when omitted)");

  // mitigate
  auto* mitigate = app.add_subcommand("mitigate", "apply a repair strategy to a scenario");
  std::string mit_market, mit_scenario, mit_strategy, mit_out = "mitigation.json";
  std::string mit_affected = "direct";
  double mit_refusal = 0.0;
  std::uint64_t mit_seed = 0;
  mitigate->add_option("-i,--market", mit_market, "market file")->required();
  mitigate->add_option("--scenario", mit_scenario, "scenario file")->required();
  mitigate
      ->add_option("--strategy", mit_strategy,
                   "stable_expansion | direct_only | stability_restoration | best_of_both | "
                   "near_stable_expansion")
      ->required();
  mitigate->add_option("--affected", mit_affected,
                       "near_stable_expansion walk set: direct | direct-plus-indirect");
  mitigate->add_option("--refusal-prob", mit_refusal, "chance a preferred offer is refused");
  mitigate->add_option("--seed", mit_seed, "refusal draw seed");
  mitigate->add_option("-o,--out", mit_out, "result output path");

  // expect
  auto* expect = app.add_subcommand("expect", "print analytic expected group sizes");
  std::string exp_kind;
  int exp_capacity = 100, exp_pool = 0, exp_n = 0;
  double exp_p = 0.0;
  expect->add_option("--kind", exp_kind, "resource_reduction | subtractive | additive")->required();
  expect->add_option("--capacity", exp_capacity, "error school capacity");
  expect->add_option("--p", exp_p, "removal probability (subtractive)");
  expect->add_option("--pool", exp_pool, "applicant pool size (additive)");
  expect->add_option("--n", exp_n, "boosted count (additive)");

  // experiment
  auto* experiment = app.add_subcommand("experiment", "run a config-driven sweep");
  std::string cfg_path, cfg_out = "out", cfg_school, cfg_format = "all";
  std::optional<int> cfg_runs, cfg_threads;
  std::optional<std::uint64_t> cfg_seed;
  std::vector<double> cfg_p;
  std::vector<int> cfg_n;
  experiment->add_option("-c,--config", cfg_path, "experiment config file")->required();
  experiment->add_option("-o,--out", cfg_out, "output directory");
  experiment->add_option("--runs", cfg_runs, "override run count");
  experiment->add_option("--seed", cfg_seed, "override master seed");
  experiment->add_option("--p", cfg_p, "override subtractive sweep values");
  experiment->add_option("--n", cfg_n, "override additive sweep values");
  experiment->add_option("--school", cfg_school, "override error-school selector");
  experiment->add_option("--threads", cfg_threads, "override worker thread count");
  experiment->add_option("--format", cfg_format, "json | csv | all");

  CLI11_PARSE(app, argc, argv);

  try {
    if (generate->parsed()) return cmd_generate(gen, gen_out);
    if (match->parsed()) return cmd_match(match_market, match_out, match_log);
    if (inject->parsed())
      return cmd_inject(inj_market, inj_kind, inj_school, inj_p, inj_n, inj_seed, inj_out);
    if (impact->parsed()) return cmd_impact(imp_market, imp_scenario, imp_out);
    if (mitigate->parsed())
      return cmd_mitigate(mit_market, mit_scenario, mit_strategy, mit_affected, mit_refusal,
                          mit_seed, mit_out);
    if (expect->parsed()) return cmd_expect(exp_kind, exp_capacity, exp_p, exp_pool, exp_n);
    if (experiment->parsed())
      return cmd_experiment(cfg_path, cfg_out, cfg_runs, cfg_seed, cfg_p, cfg_n, cfg_school,
                            cfg_threads, cfg_format);
  } catch (const matchmend::RunFailure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRunFailure;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const json::exception& e) {  // missing or mistyped fields in input files
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRunFailure;
  }
  return kExitConfigError;
}
