#pragma once

#include <json.hpp>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "matchmend/da.hpp"
#include "matchmend/errors.hpp"
#include "matchmend/generator.hpp"
#include "matchmend/impact.hpp"
#include "matchmend/market.hpp"
#include "matchmend/mitigation.hpp"

namespace matchmend {

using nlohmann::json;

// ---- market interchange ----------------------------------------------------
// {"students": [[school ids]...], "schools": [[student ids]...],
//  "capacities": [ints], optional "school_popularity": [doubles]}

inline json market_to_json(const MarketInstance& m) {
  return json{{"students", m.student_lists()},
              {"schools", m.school_lists()},
              {"capacities", m.capacities()}};
}

inline json market_to_json(const GeneratedMarket& g) {
  json j = market_to_json(g.instance);
  j["school_popularity"] = g.school_popularity;
  return j;
}

inline MarketInstance market_from_json(const json& j) {
  return MarketInstance(j.at("students").get<std::vector<std::vector<SchoolId>>>(),
                        j.at("schools").get<std::vector<std::vector<StudentId>>>(),
                        j.at("capacities").get<std::vector<int>>());
}

inline std::optional<std::vector<double>> school_popularity_from_json(const json& j) {
  if (!j.contains("school_popularity")) return std::nullopt;
  return j.at("school_popularity").get<std::vector<double>>();
}

// ---- matchings ---------------------------------------------------------------
// {"assignment": [school id or -1], "extra_seats": [ints]}

inline json matching_to_json(const Matching& m) {
  return json{{"assignment", m.assignment}, {"extra_seats", m.extra_seats}};
}

inline Matching matching_from_json(const json& j) {
  Matching m = Matching::from_assignment(j.at("assignment").get<std::vector<SchoolId>>(),
                                         static_cast<int>(j.at("extra_seats").size()));
  m.extra_seats = j.at("extra_seats").get<std::vector<int>>();
  return m;
}

// ---- rejection log (debug dump) ---------------------------------------------

inline const char* to_string(ProposalOutcome o) {
  switch (o) {
    case ProposalOutcome::kAccepted: return "accepted";
    case ProposalOutcome::kRejected: return "rejected";
    case ProposalOutcome::kDisplaced: return "displaced";
  }
  return "?";
}

inline json log_to_json(const RejectionLog& log) {
  json events = json::array();
  for (const auto& ev : log.events)
    events.push_back({{"student", ev.student}, {"school", ev.school}, {"outcome", to_string(ev.outcome)}});
  return json{{"events", std::move(events)}, {"best_rejected", log.best_rejected}};
}

// ---- error scenarios ----------------------------------------------------------

inline ErrorKind error_kind_from_string(const std::string& s) {
  if (s == "resource_reduction") return ErrorKind::kResourceReduction;
  if (s == "subtractive") return ErrorKind::kSubtractive;
  if (s == "additive") return ErrorKind::kAdditive;
  throw std::invalid_argument("unknown error kind: " + s);
}

inline json scenario_to_json(const ErrorScenario& sc) {
  json j{{"kind", to_string(sc.kind)},
         {"error_school", sc.error_school},
         {"seed", sc.seed},
         {"affected", sc.affected},
         {"errored_matching", matching_to_json(sc.errored_matching)}};
  if (sc.kind == ErrorKind::kSubtractive) {
    j["p"] = sc.removal_prob;
    j["removed_students"] = sc.removed_students;
  }
  if (sc.kind == ErrorKind::kAdditive) {
    j["n_boosted"] = sc.boosted_count;
    j["boosted_students"] = sc.boosted_students;
  }
  return j;
}

/// Rebuilds a scenario from its realization against the original market; the
/// errored instance and matching are recomputed, so a stored scenario replays
/// exactly without trusting the stored matching.
inline ErrorScenario scenario_from_json(const MarketInstance& original, const json& j) {
  const ErrorKind kind = error_kind_from_string(j.at("kind").get<std::string>());
  const SchoolId s_e = j.at("error_school").get<SchoolId>();
  switch (kind) {
    case ErrorKind::kResourceReduction:
      return inject_resource_reduction(original, run_da(original).matching, s_e);
    case ErrorKind::kSubtractive: {
      ErrorScenario sc = inject_subtractive(original, s_e, j.at("p").get<double>(),
                                            j.at("seed").get<std::uint64_t>());
      if (j.contains("removed_students") &&
          sc.removed_students != j.at("removed_students").get<std::vector<StudentId>>())
        throw std::runtime_error("scenario file does not replay: removals differ");
      return sc;
    }
    case ErrorKind::kAdditive: {
      ErrorScenario sc = inject_additive(original, s_e, j.at("n_boosted").get<int>(),
                                         j.at("seed").get<std::uint64_t>());
      if (j.contains("boosted_students") &&
          sc.boosted_students != j.at("boosted_students").get<std::vector<StudentId>>())
        throw std::runtime_error("scenario file does not replay: boosts differ");
      return sc;
    }
  }
  throw std::invalid_argument("unknown error kind");
}

// ---- impact reports ------------------------------------------------------------

inline json expectation_to_json(const ExpectationRow& row) {
  return json{{"directly_harmed", row.directly_harmed},
              {"directly_helped", row.directly_helped},
              {"envious", row.envious},
              {"envious_is_upper_bound", row.envious_is_upper_bound},
              {"assumes_competitive_school", row.assumes_competitive_school}};
}

inline json impact_to_json(const ImpactReport& r) {
  json j{{"directly_harmed", r.directly_harmed},
         {"directly_helped", r.directly_helped},
         {"indirectly_harmed", r.indirectly_harmed},
         {"indirectly_helped", r.indirectly_helped},
         {"envious", r.envious},
         {"counts",
          {{"directly_harmed", r.directly_harmed.size()},
           {"directly_helped", r.directly_helped.size()},
           {"indirectly_harmed", r.indirectly_harmed.size()},
           {"indirectly_helped", r.indirectly_helped.size()},
           {"envious", r.envious.size()}}}};
  if (r.expectations) j["expectations"] = expectation_to_json(*r.expectations);
  return j;
}

// ---- mitigation results ----------------------------------------------------------

inline json mitigation_to_json(const MitigationResult& r) {
  json offers = json::array();
  for (const auto& o : r.offers)
    offers.push_back({{"student", o.student}, {"school", o.school}, {"accepted", o.accepted}});
  return json{{"repaired", matching_to_json(r.repaired)},
              {"moved", r.moved},
              {"offers", std::move(offers)},
              {"expansion_by_school", r.expansion_by_school},
              {"vacated_by_school", r.vacated_by_school}};
}

// ---- generator params ---------------------------------------------------------------

inline json gen_params_to_json(const GenParams& p) {
  json j{{"n_students", p.n_students},
         {"n_schools", p.n_schools},
         {"popularity_weight", p.popularity_weight},
         {"list_length_mean", p.list_length_mean},
         {"list_length_std", p.list_length_std},
         {"seed", p.seed}};
  if (p.capacities.empty())
    j["seats_per_school"] = p.seats_per_school;
  else
    j["seats_per_school"] = p.capacities;
  return j;
}

inline GenParams gen_params_from_json(const json& j) {
  GenParams p;
  p.n_students = j.value("n_students", p.n_students);
  p.n_schools = j.value("n_schools", p.n_schools);
  if (j.contains("seats_per_school")) {
    if (j.at("seats_per_school").is_array())
      p.capacities = j.at("seats_per_school").get<std::vector<int>>();
    else
      p.seats_per_school = j.at("seats_per_school").get<int>();
  }
  p.popularity_weight = j.value("popularity_weight", p.popularity_weight);
  p.list_length_mean = j.value("list_length_mean", p.list_length_mean);
  p.list_length_std = j.value("list_length_std", p.list_length_std);
  p.seed = j.value("seed", p.seed);
  return p;
}

}  // namespace matchmend
