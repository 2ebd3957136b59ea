#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "matchmend/da.hpp"
#include "matchmend/errors.hpp"
#include "matchmend/generator.hpp"
#include "matchmend/impact.hpp"
#include "matchmend/io.hpp"
#include "matchmend/market.hpp"
#include "matchmend/mitigation.hpp"
#include "matchmend/rng.hpp"

namespace matchmend {

enum class SchoolSelector { kMostPopular, kMedian, kLeastPopular, kExplicit };
enum class Strategy {
  kStableExpansion,
  kDirectOnly,
  kStabilityRestoration,
  kBestOfBoth,
  kNearStableExpansion,
};

inline const char* to_string(Strategy s) {
  switch (s) {
    case Strategy::kStableExpansion: return "stable_expansion";
    case Strategy::kDirectOnly: return "direct_only";
    case Strategy::kStabilityRestoration: return "stability_restoration";
    case Strategy::kBestOfBoth: return "best_of_both";
    case Strategy::kNearStableExpansion: return "near_stable_expansion";
  }
  return "?";
}

inline Strategy strategy_from_string(const std::string& s) {
  if (s == "stable_expansion") return Strategy::kStableExpansion;
  if (s == "direct_only") return Strategy::kDirectOnly;
  if (s == "stability_restoration") return Strategy::kStabilityRestoration;
  if (s == "best_of_both") return Strategy::kBestOfBoth;
  if (s == "near_stable_expansion") return Strategy::kNearStableExpansion;
  throw std::invalid_argument("unknown strategy: " + s);
}

struct ErrorSpec {
  ErrorKind kind = ErrorKind::kResourceReduction;
  SchoolSelector selector = SchoolSelector::kMostPopular;
  SchoolId explicit_school = -1;
  std::vector<double> sweep = {0.0};  // p values (subtractive) or N values (additive)

  bool operator==(const ErrorSpec&) const = default;
};

struct ExperimentConfig {
  GenParams gen;
  ErrorSpec error;
  std::vector<Strategy> strategies;
  AffectedChoice near_stable_affected = AffectedChoice::kDirectOnly;
  int runs = 100;
  std::uint64_t master_seed = 0;
  int threads = 1;

  bool operator==(const ExperimentConfig&) const = default;
};

// Seed scheme: every run is replayable from the master seed and its index.
inline std::uint64_t run_seed(std::uint64_t master_seed, int run_index) {
  return master_seed ^ splitmix64(static_cast<std::uint64_t>(run_index));
}
inline std::uint64_t injection_seed(std::uint64_t run_seed_value) {
  return splitmix64(run_seed_value);
}

/// Popularity rank = descending shared school score; most popular is rank 0,
/// median is rank floor(n/2), least popular is rank n-1.
inline SchoolId select_error_school(const std::vector<double>& school_popularity,
                                    SchoolSelector selector, SchoolId explicit_school = -1) {
  const int n = static_cast<int>(school_popularity.size());
  if (n == 0) throw std::invalid_argument("market has no schools");
  if (selector == SchoolSelector::kExplicit) {
    if (explicit_school < 0 || explicit_school >= n)
      throw std::invalid_argument("explicit error school " + std::to_string(explicit_school) +
                                  " not in market");
    return explicit_school;
  }
  std::vector<SchoolId> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](SchoolId a, SchoolId b) {
    return school_popularity[a] != school_popularity[b] ? school_popularity[a] > school_popularity[b]
                                                        : a < b;
  });
  switch (selector) {
    case SchoolSelector::kMostPopular: return order.front();
    case SchoolSelector::kMedian: return order[n / 2];
    case SchoolSelector::kLeastPopular: return order.back();
    default: return explicit_school;
  }
}

inline SchoolId select_error_school(const GeneratedMarket& g, SchoolSelector selector,
                                    SchoolId explicit_school = -1) {
  return select_error_school(g.school_popularity, selector, explicit_school);
}

/// A run aborted; the seed replays it.
struct RunFailure : std::runtime_error {
  std::uint64_t seed;
  RunFailure(std::uint64_t seed_, const std::string& what)
      : std::runtime_error("run with seed " + std::to_string(seed_) + " failed: " + what),
        seed(seed_) {}
};

// ---- per-run measurements ----------------------------------------------------

struct StrategyRunMetrics {
  double moved = 0;        // diff against the error-free DA match
  double moved_up = 0;
  double moved_down = 0;
  double offers = 0;
  double accepted = 0;
  double expansion_total = 0;
  double expansion_max = 0;
  double vacated_total = 0;
  std::vector<double> hist;  // rank histogram of the repaired matching
};

struct RunMetrics {
  double directly_harmed = 0;
  double directly_helped = 0;
  double indirectly_harmed = 0;
  double indirectly_helped = 0;
  double envious = 0;
  std::optional<ExpectationRow> expected;
  std::vector<double> hist_error_free;
  std::vector<double> hist_errored;
  std::map<Strategy, StrategyRunMetrics> strategies;
};

namespace detail {

// Histogram over list positions of each student's assignment on their
// original list; the last bucket counts unmatched students.
inline std::vector<double> rank_histogram(const MarketInstance& original, const Matching& m) {
  std::vector<double> hist(original.num_schools() + 1, 0.0);
  for (StudentId t = 0; t < original.num_students(); ++t) {
    const SchoolId s = m.assignment[t];
    if (s == kUnmatched)
      hist.back() += 1;
    else
      hist[original.student_rank(t, s)] += 1;
  }
  return hist;
}

inline StrategyRunMetrics measure_strategy(const MarketInstance& original,
                                           const Matching& error_free,
                                           const MitigationResult& result) {
  StrategyRunMetrics out;
  for (StudentId t = 0; t < original.num_students(); ++t) {
    const SchoolId was = error_free.assignment[t];
    const SchoolId now = result.repaired.assignment[t];
    if (was == now) continue;
    out.moved += 1;
    if (original.prefers(t, now, was))
      out.moved_up += 1;
    else
      out.moved_down += 1;
  }
  out.offers = static_cast<double>(result.offers.size());
  for (const Offer& o : result.offers) out.accepted += o.accepted ? 1 : 0;
  for (const int e : result.expansion_by_school) {
    out.expansion_total += e;
    out.expansion_max = std::max(out.expansion_max, static_cast<double>(e));
  }
  for (const int v : result.vacated_by_school) out.vacated_total += v;
  out.hist = rank_histogram(original, result.repaired);
  return out;
}

inline void check_strategies(const ExperimentConfig& config) {
  for (const Strategy st : config.strategies) {
    const bool ok = (st == Strategy::kStableExpansion &&
                     config.error.kind == ErrorKind::kResourceReduction) ||
                    (st == Strategy::kDirectOnly && config.error.kind != ErrorKind::kResourceReduction) ||
                    (st == Strategy::kStabilityRestoration &&
                     config.error.kind == ErrorKind::kSubtractive) ||
                    (st == Strategy::kBestOfBoth && config.error.kind != ErrorKind::kResourceReduction) ||
                    (st == Strategy::kNearStableExpansion && config.error.kind == ErrorKind::kAdditive);
    if (!ok)
      throw std::invalid_argument(std::string("strategy ") + to_string(st) +
                                  " does not apply to " + to_string(config.error.kind) + " errors");
  }
}

}  // namespace detail

inline void validate_config(const ExperimentConfig& config) {
  validate_params(config.gen);
  if (config.runs < 1) throw std::invalid_argument("runs must be >= 1");
  if (config.threads < 1) throw std::invalid_argument("threads must be >= 1");
  if (config.error.sweep.empty()) throw std::invalid_argument("sweep must not be empty");
  for (const double v : config.error.sweep) {
    if (config.error.kind == ErrorKind::kSubtractive && !(v >= 0.0 && v <= 1.0))
      throw std::invalid_argument("subtractive sweep values must be probabilities in [0,1]");
    if (config.error.kind == ErrorKind::kAdditive &&
        (v < 0.0 || v != std::floor(v)))
      throw std::invalid_argument("additive sweep values must be non-negative integers");
  }
  detail::check_strategies(config);
}

/// One full simulated run: generate, match, inject, classify, mitigate.
inline RunMetrics execute_run(const ExperimentConfig& config, double sweep_value, int run_index) {
  const std::uint64_t seed = run_seed(config.master_seed, run_index);
  try {
    GenParams gp = config.gen;
    gp.seed = seed;
    const GeneratedMarket market = generate_market(gp);
    const MarketInstance& inst = market.instance;
    const DaResult error_free = run_da(inst);
    const SchoolId s_e =
        select_error_school(market, config.error.selector, config.error.explicit_school);

    ErrorScenario scenario;
    switch (config.error.kind) {
      case ErrorKind::kResourceReduction:
        scenario = inject_resource_reduction(inst, error_free.matching, s_e);
        break;
      case ErrorKind::kSubtractive:
        scenario = inject_subtractive(inst, error_free, s_e, sweep_value, injection_seed(seed));
        break;
      case ErrorKind::kAdditive:
        scenario = inject_additive(inst, error_free, s_e, static_cast<int>(sweep_value),
                                   injection_seed(seed));
        break;
    }

    const ImpactReport impact = classify_scenario(scenario, inst, error_free.matching);
    RunMetrics out;
    out.directly_harmed = static_cast<double>(impact.directly_harmed.size());
    out.directly_helped = static_cast<double>(impact.directly_helped.size());
    out.indirectly_harmed = static_cast<double>(impact.indirectly_harmed.size());
    out.indirectly_helped = static_cast<double>(impact.indirectly_helped.size());
    out.envious = static_cast<double>(impact.envious.size());

    switch (config.error.kind) {
      case ErrorKind::kResourceReduction:
        out.expected = expected_group_sizes(config.error.kind, inst.capacity(s_e));
        break;
      case ErrorKind::kSubtractive:
        if (sweep_value < 1.0)
          out.expected = expected_group_sizes(config.error.kind, inst.capacity(s_e), sweep_value);
        break;
      case ErrorKind::kAdditive: {
        const int pool =
            static_cast<int>(applicant_pool(error_free.log, inst.num_students(), s_e).size());
        const int admitted = error_free.matching.roster_size(s_e);
        if (pool >= admitted + static_cast<int>(sweep_value))
          out.expected = expected_group_sizes(config.error.kind, admitted, 0.0, pool,
                                              static_cast<int>(sweep_value));
        break;
      }
    }

    out.hist_error_free = detail::rank_histogram(inst, error_free.matching);
    out.hist_errored = detail::rank_histogram(inst, scenario.errored_matching);

    const CounterfactualPair pair{error_free.matching, scenario.errored_matching};
    for (const Strategy st : config.strategies) {
      MitigationResult result;
      switch (st) {
        case Strategy::kStableExpansion:
          result = stable_expansion(scenario, inst, error_free.log);
          break;
        case Strategy::kDirectOnly:
          result = direct_only(scenario, inst, pair);
          break;
        case Strategy::kStabilityRestoration:
          result = stability_restoration(scenario, inst, pair);
          break;
        case Strategy::kBestOfBoth:
          result = best_of_both(scenario, inst, pair);
          break;
        case Strategy::kNearStableExpansion: {
          const RejectionLog errored_log = run_da(scenario.errored_instance).log;
          result = near_stable_expansion(scenario, inst, errored_log, config.near_stable_affected);
          break;
        }
      }
      out.strategies[st] = detail::measure_strategy(inst, error_free.matching, result);
    }
    return out;
  } catch (const RunFailure&) {
    throw;
  } catch (const std::exception& e) {
    throw RunFailure(seed, e.what());
  }
}

// ---- aggregation ---------------------------------------------------------------

struct MetricStat {
  double mean = 0;
  double stddev = 0;
  bool operator==(const MetricStat&) const = default;
};

struct GroupStat {
  MetricStat stat;
  std::optional<double> expected;
  bool expected_is_bound = false;
  bool operator==(const GroupStat&) const = default;
};

struct StrategyAggregate {
  MetricStat moved, moved_up, moved_down, offers, accepted, expansion_total, expansion_max,
      vacated_total;
  std::vector<double> hist;  // mean count per rank bucket
  bool operator==(const StrategyAggregate&) const = default;
};

struct SweepPointReport {
  double value = 0;
  GroupStat directly_harmed, directly_helped, indirectly_harmed, indirectly_helped, envious;
  std::vector<double> hist_error_free;
  std::vector<double> hist_errored;
  std::map<std::string, StrategyAggregate> strategies;
  bool operator==(const SweepPointReport&) const = default;
};

struct AggregateReport {
  ExperimentConfig config;
  std::vector<SweepPointReport> points;
  bool operator==(const AggregateReport&) const = default;
};

namespace detail {

inline MetricStat stat_of(const std::vector<double>& xs) {
  MetricStat s;
  if (xs.empty()) return s;
  double sum = 0;
  for (const double x : xs) sum += x;
  s.mean = sum / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double sq = 0;
    for (const double x : xs) sq += (x - s.mean) * (x - s.mean);
    s.stddev = std::sqrt(sq / static_cast<double>(xs.size() - 1));
  }
  return s;
}

inline std::vector<double> mean_hist(const std::vector<std::vector<double>>& hists) {
  std::vector<double> out;
  if (hists.empty()) return out;
  out.assign(hists.front().size(), 0.0);
  for (const auto& h : hists)
    for (std::size_t i = 0; i < h.size(); ++i) out[i] += h[i];
  for (double& x : out) x /= static_cast<double>(hists.size());
  return out;
}

inline SweepPointReport aggregate_point(const ExperimentConfig& config, double value,
                                        const std::vector<RunMetrics>& runs) {
  SweepPointReport point;
  point.value = value;

  auto collect = [&](auto getter) {
    std::vector<double> xs;
    xs.reserve(runs.size());
    for (const auto& r : runs) xs.push_back(getter(r));
    return xs;
  };
  auto group = [&](auto getter, auto expected_getter) {
    GroupStat g;
    g.stat = stat_of(collect(getter));
    std::vector<double> exp;
    for (const auto& r : runs)
      if (r.expected) {
        exp.push_back(expected_getter(*r.expected));
        g.expected_is_bound = g.expected_is_bound || r.expected->envious_is_upper_bound;
      }
    if (!exp.empty()) g.expected = stat_of(exp).mean;
    return g;
  };
  point.directly_harmed = group([](const RunMetrics& r) { return r.directly_harmed; },
                                [](const ExpectationRow& e) { return e.directly_harmed; });
  point.directly_helped = group([](const RunMetrics& r) { return r.directly_helped; },
                                [](const ExpectationRow& e) { return e.directly_helped; });
  point.indirectly_harmed =
      group([](const RunMetrics& r) { return r.indirectly_harmed; }, [](const ExpectationRow&) { return 0.0; });
  point.indirectly_harmed.expected.reset();
  point.indirectly_helped =
      group([](const RunMetrics& r) { return r.indirectly_helped; }, [](const ExpectationRow&) { return 0.0; });
  point.indirectly_helped.expected.reset();
  point.envious = group([](const RunMetrics& r) { return r.envious; },
                        [](const ExpectationRow& e) { return e.envious; });
  // only the envious column carries the resource-reduction upper-bound flag
  point.directly_harmed.expected_is_bound = false;
  point.directly_helped.expected_is_bound = false;
  point.indirectly_harmed.expected_is_bound = false;
  point.indirectly_helped.expected_is_bound = false;

  std::vector<std::vector<double>> hist_free, hist_err;
  for (const auto& r : runs) {
    hist_free.push_back(r.hist_error_free);
    hist_err.push_back(r.hist_errored);
  }
  point.hist_error_free = mean_hist(hist_free);
  point.hist_errored = mean_hist(hist_err);

  for (const Strategy st : config.strategies) {
    StrategyAggregate agg;
    auto stat_field = [&](auto getter) {
      std::vector<double> xs;
      for (const auto& r : runs) xs.push_back(getter(r.strategies.at(st)));
      return stat_of(xs);
    };
    agg.moved = stat_field([](const StrategyRunMetrics& m) { return m.moved; });
    agg.moved_up = stat_field([](const StrategyRunMetrics& m) { return m.moved_up; });
    agg.moved_down = stat_field([](const StrategyRunMetrics& m) { return m.moved_down; });
    agg.offers = stat_field([](const StrategyRunMetrics& m) { return m.offers; });
    agg.accepted = stat_field([](const StrategyRunMetrics& m) { return m.accepted; });
    agg.expansion_total = stat_field([](const StrategyRunMetrics& m) { return m.expansion_total; });
    agg.expansion_max = stat_field([](const StrategyRunMetrics& m) { return m.expansion_max; });
    agg.vacated_total = stat_field([](const StrategyRunMetrics& m) { return m.vacated_total; });
    std::vector<std::vector<double>> hists;
    for (const auto& r : runs) hists.push_back(r.strategies.at(st).hist);
    agg.hist = mean_hist(hists);
    point.strategies[to_string(st)] = std::move(agg);
  }
  return point;
}

// Runs indices [0, n) across a small thread pool; results land in index
// order so aggregation is identical however many threads execute.
template <class Fn>
inline void run_indexed(int n, int threads, Fn&& fn) {
  if (threads <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  for (int k = 0; k < std::min(threads, n); ++k) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace detail

/// Runs the full sweep: `runs` independent seeded runs per sweep value,
/// aggregated into means and standard deviations next to the analytic
/// expectations. Per-run seeds are fixed up front, so serial and parallel
/// execution produce identical reports.
inline AggregateReport run_experiment(const ExperimentConfig& config) {
  validate_config(config);
  AggregateReport report;
  report.config = config;
  for (const double value : config.error.sweep) {
    std::vector<RunMetrics> runs(config.runs);
    detail::run_indexed(config.runs, config.threads,
                        [&](int i) { runs[i] = execute_run(config, value, i); });
    report.points.push_back(detail::aggregate_point(config, value, runs));
  }
  return report;
}

// ---- config / report serialization ----------------------------------------------

inline const char* to_string(SchoolSelector s) {
  switch (s) {
    case SchoolSelector::kMostPopular: return "most-popular";
    case SchoolSelector::kMedian: return "median";
    case SchoolSelector::kLeastPopular: return "least-popular";
    case SchoolSelector::kExplicit: return "explicit";
  }
  return "?";
}

inline json config_to_json(const ExperimentConfig& c) {
  json error{{"kind", to_string(c.error.kind)}, {"sweep", c.error.sweep}};
  if (c.error.selector == SchoolSelector::kExplicit)
    error["school"] = c.error.explicit_school;
  else
    error["school"] = to_string(c.error.selector);
  json strategies = json::array();
  for (const Strategy st : c.strategies) strategies.push_back(to_string(st));
  return json{{"gen", gen_params_to_json(c.gen)},
              {"error", std::move(error)},
              {"strategies", std::move(strategies)},
              {"near_stable_affected",
               c.near_stable_affected == AffectedChoice::kDirectOnly ? "direct" : "direct_plus_indirect"},
              {"runs", c.runs},
              {"master_seed", c.master_seed},
              {"threads", c.threads}};
}

inline ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig c;
  if (j.contains("gen")) c.gen = gen_params_from_json(j.at("gen"));
  const json& error = j.at("error");
  c.error.kind = error_kind_from_string(error.at("kind").get<std::string>());
  if (error.contains("school")) {
    const json& school = error.at("school");
    if (school.is_number()) {
      c.error.selector = SchoolSelector::kExplicit;
      c.error.explicit_school = school.get<SchoolId>();
    } else {
      const std::string name = school.get<std::string>();
      if (name == "most-popular") c.error.selector = SchoolSelector::kMostPopular;
      else if (name == "median") c.error.selector = SchoolSelector::kMedian;
      else if (name == "least-popular") c.error.selector = SchoolSelector::kLeastPopular;
      else throw std::invalid_argument("unknown error-school selector: " + name);
    }
  }
  if (error.contains("sweep")) c.error.sweep = error.at("sweep").get<std::vector<double>>();
  if (j.contains("strategies"))
    for (const auto& name : j.at("strategies"))
      c.strategies.push_back(strategy_from_string(name.get<std::string>()));
  if (j.contains("near_stable_affected")) {
    const std::string name = j.at("near_stable_affected").get<std::string>();
    if (name == "direct") c.near_stable_affected = AffectedChoice::kDirectOnly;
    else if (name == "direct_plus_indirect") c.near_stable_affected = AffectedChoice::kDirectPlusIndirect;
    else throw std::invalid_argument("unknown near_stable_affected: " + name);
  }
  c.runs = j.value("runs", c.runs);
  c.master_seed = j.value("master_seed", c.master_seed);
  c.threads = j.value("threads", c.threads);
  return c;
}

namespace detail {

inline json stat_to_json(const MetricStat& s) {
  return json{{"mean", s.mean}, {"std", s.stddev}};
}
inline MetricStat stat_from_json(const json& j) {
  return MetricStat{j.at("mean").get<double>(), j.at("std").get<double>()};
}

inline json group_to_json(const GroupStat& g) {
  json j = stat_to_json(g.stat);
  if (g.expected) j["expected"] = *g.expected;
  if (g.expected_is_bound) j["expected_is_bound"] = true;
  return j;
}
inline GroupStat group_from_json(const json& j) {
  GroupStat g;
  g.stat = stat_from_json(j);
  if (j.contains("expected")) g.expected = j.at("expected").get<double>();
  g.expected_is_bound = j.value("expected_is_bound", false);
  return g;
}

inline json strategy_agg_to_json(const StrategyAggregate& a) {
  return json{{"moved", stat_to_json(a.moved)},
              {"moved_up", stat_to_json(a.moved_up)},
              {"moved_down", stat_to_json(a.moved_down)},
              {"offers", stat_to_json(a.offers)},
              {"accepted", stat_to_json(a.accepted)},
              {"expansion_total", stat_to_json(a.expansion_total)},
              {"expansion_max", stat_to_json(a.expansion_max)},
              {"vacated_total", stat_to_json(a.vacated_total)},
              {"rank_histogram", a.hist}};
}
inline StrategyAggregate strategy_agg_from_json(const json& j) {
  StrategyAggregate a;
  a.moved = stat_from_json(j.at("moved"));
  a.moved_up = stat_from_json(j.at("moved_up"));
  a.moved_down = stat_from_json(j.at("moved_down"));
  a.offers = stat_from_json(j.at("offers"));
  a.accepted = stat_from_json(j.at("accepted"));
  a.expansion_total = stat_from_json(j.at("expansion_total"));
  a.expansion_max = stat_from_json(j.at("expansion_max"));
  a.vacated_total = stat_from_json(j.at("vacated_total"));
  a.hist = j.at("rank_histogram").get<std::vector<double>>();
  return a;
}

}  // namespace detail

inline json report_to_json(const AggregateReport& report) {
  json points = json::array();
  for (const auto& p : report.points) {
    json groups{{"directly_harmed", detail::group_to_json(p.directly_harmed)},
                {"directly_helped", detail::group_to_json(p.directly_helped)},
                {"indirectly_harmed", detail::group_to_json(p.indirectly_harmed)},
                {"indirectly_helped", detail::group_to_json(p.indirectly_helped)},
                {"envious", detail::group_to_json(p.envious)}};
    json strategies = json::object();
    for (const auto& [name, agg] : p.strategies)
      strategies[name] = detail::strategy_agg_to_json(agg);
    points.push_back({{"sweep_value", p.value},
                      {"groups", std::move(groups)},
                      {"strategies", std::move(strategies)},
                      {"rank_histograms",
                       {{"error_free", p.hist_error_free}, {"errored", p.hist_errored}}}});
  }
  return json{{"config", config_to_json(report.config)},
              {"seed_scheme",
               "run_seed = master_seed XOR splitmix64(run_index); "
               "injection_seed = splitmix64(run_seed)"},
              {"points", std::move(points)}};
}

inline AggregateReport report_from_json(const json& j) {
  AggregateReport report;
  report.config = config_from_json(j.at("config"));
  for (const auto& p : j.at("points")) {
    SweepPointReport point;
    point.value = p.at("sweep_value").get<double>();
    const json& groups = p.at("groups");
    point.directly_harmed = detail::group_from_json(groups.at("directly_harmed"));
    point.directly_helped = detail::group_from_json(groups.at("directly_helped"));
    point.indirectly_harmed = detail::group_from_json(groups.at("indirectly_harmed"));
    point.indirectly_helped = detail::group_from_json(groups.at("indirectly_helped"));
    point.envious = detail::group_from_json(groups.at("envious"));
    point.hist_error_free = p.at("rank_histograms").at("error_free").get<std::vector<double>>();
    point.hist_errored = p.at("rank_histograms").at("errored").get<std::vector<double>>();
    for (const auto& [name, agg] : p.at("strategies").items())
      point.strategies[name] = detail::strategy_agg_from_json(agg);
    report.points.push_back(std::move(point));
  }
  return report;
}

// ---- file emission -----------------------------------------------------------------

enum class ReportFormat { kJson, kCsv, kAll };

namespace detail {

// Shortest round-trip representation, same as the JSON emitter uses.
inline std::string num(double x) { return json(x).dump(); }

inline void write_file(const std::filesystem::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << body;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

inline void append_hist_csv(std::string& body, const std::vector<double>& hist,
                            const std::string& condition) {
  // bucket layout: positions 0..n-1 are 1-based choice ranks, last bucket is
  // unmatched and reported as rank 0
  body += "0," + num(hist.back()) + "," + condition + "\n";
  for (std::size_t i = 0; i + 1 < hist.size(); ++i)
    body += std::to_string(i + 1) + "," + num(hist[i]) + "," + condition + "\n";
}

}  // namespace detail

/// Writes report.json and report.csv into `dir`; when the sweep has a single
/// point, also writes one plot-ready hist_<condition>.csv per condition.
inline std::vector<std::filesystem::path> emit_report(const AggregateReport& report,
                                                      const std::filesystem::path& dir,
                                                      ReportFormat format = ReportFormat::kAll) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + dir.string());
  std::vector<std::filesystem::path> written;

  if (format != ReportFormat::kCsv) {
    const auto path = dir / "report.json";
    detail::write_file(path, report_to_json(report).dump(2) + "\n");
    written.push_back(path);
  }
  if (format == ReportFormat::kJson) return written;

  std::string csv = "sweep_value,group,mean,std,expected\n";
  auto row = [&](double value, const std::string& name, const MetricStat& stat,
                 const std::optional<double>& expected) {
    csv += detail::num(value) + "," + name + "," + detail::num(stat.mean) + "," +
           detail::num(stat.stddev) + "," + (expected ? detail::num(*expected) : "") + "\n";
  };
  for (const auto& p : report.points) {
    row(p.value, "directly_harmed", p.directly_harmed.stat, p.directly_harmed.expected);
    row(p.value, "directly_helped", p.directly_helped.stat, p.directly_helped.expected);
    row(p.value, "indirectly_harmed", p.indirectly_harmed.stat, p.indirectly_harmed.expected);
    row(p.value, "indirectly_helped", p.indirectly_helped.stat, p.indirectly_helped.expected);
    row(p.value, "envious", p.envious.stat, p.envious.expected);
    for (const auto& [name, agg] : p.strategies) {
      row(p.value, name + ".moved", agg.moved, std::nullopt);
      row(p.value, name + ".moved_up", agg.moved_up, std::nullopt);
      row(p.value, name + ".moved_down", agg.moved_down, std::nullopt);
      row(p.value, name + ".offers", agg.offers, std::nullopt);
      row(p.value, name + ".accepted", agg.accepted, std::nullopt);
      row(p.value, name + ".expansion_total", agg.expansion_total, std::nullopt);
      row(p.value, name + ".expansion_max", agg.expansion_max, std::nullopt);
      row(p.value, name + ".vacated_total", agg.vacated_total, std::nullopt);
    }
  }
  const auto csv_path = dir / "report.csv";
  detail::write_file(csv_path, csv);
  written.push_back(csv_path);

  if (report.points.size() == 1) {
    const auto& p = report.points.front();
    auto hist_file = [&](const std::string& condition, const std::vector<double>& hist) {
      std::string body = "rank,count,condition\n";
      detail::append_hist_csv(body, hist, condition);
      const auto path = dir / ("hist_" + condition + ".csv");
      detail::write_file(path, body);
      written.push_back(path);
    };
    hist_file("error_free", p.hist_error_free);
    hist_file("errored", p.hist_errored);
    for (const auto& [name, agg] : p.strategies) hist_file(name, agg.hist);
  }
  return written;
}

}  // namespace matchmend
