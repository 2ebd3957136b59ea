#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "matchmend/da.hpp"
#include "matchmend/market.hpp"
#include "matchmend/rng.hpp"

namespace matchmend {

enum class ErrorKind { kResourceReduction, kSubtractive, kAdditive };

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kResourceReduction: return "resource_reduction";
    case ErrorKind::kSubtractive: return "subtractive";
    case ErrorKind::kAdditive: return "additive";
  }
  return "?";
}

/// One realized error at a single school: what was done to the market, the
/// matching that results, and the affected set D whose membership drives the
/// harmed/helped split.
struct ErrorScenario {
  ErrorKind kind = ErrorKind::kResourceReduction;
  SchoolId error_school = -1;
  double removal_prob = 0.0;                 // subtractive only
  int boosted_count = 0;                     // additive only
  std::vector<StudentId> removed_students;   // subtractive: realized removals, list order
  std::vector<StudentId> boosted_students;   // additive: sampled order = new list head
  std::vector<StudentId> affected;           // D, ascending
  std::uint64_t seed = 0;
  MarketInstance errored_instance;
  Matching errored_matching;
};

struct CounterfactualPair {
  Matching error_free;
  Matching errored;
};

namespace detail {

// The closed school keeps its id but becomes inert: empty list, zero seats,
// erased from every student list. Downstream comparisons of the two runs
// then share one id space.
inline MarketInstance neutralize_school(const MarketInstance& m, SchoolId s_e) {
  auto student_lists = m.student_lists();
  for (auto& list : student_lists)
    list.erase(std::remove(list.begin(), list.end(), s_e), list.end());
  auto school_lists = m.school_lists();
  school_lists[s_e].clear();
  auto capacities = m.capacities();
  capacities[s_e] = 0;
  return MarketInstance(std::move(student_lists), std::move(school_lists), std::move(capacities));
}

inline void require_school(const MarketInstance& m, SchoolId s_e) {
  if (s_e < 0 || s_e >= m.num_schools())
    throw std::invalid_argument("unknown error school " + std::to_string(s_e));
}

}  // namespace detail

/// Post-match closure of s_e: its roster becomes unmatched, everything else
/// stays as the error-free run assigned it. D = the lost roster.
inline ErrorScenario inject_resource_reduction(const MarketInstance& m, const Matching& error_free,
                                               SchoolId s_e) {
  detail::require_school(m, s_e);
  ErrorScenario sc;
  sc.kind = ErrorKind::kResourceReduction;
  sc.error_school = s_e;
  sc.errored_instance = detail::neutralize_school(m, s_e);
  sc.affected = error_free.rosters[s_e];
  sc.errored_matching = error_free;
  for (const StudentId t : sc.affected) sc.errored_matching.reassign(t, kUnmatched);
  return sc;
}

/// Each student on s_e's list is dropped independently with probability p
/// (one uniform draw per listed student, so a larger p with the same seed
/// removes a superset). The match is re-run on the shortened list; D is the
/// set of removed students the error-free run had admitted to s_e.
inline ErrorScenario inject_subtractive(const MarketInstance& m, const DaResult& error_free,
                                        SchoolId s_e, double p, std::uint64_t seed) {
  detail::require_school(m, s_e);
  if (!(p >= 0.0 && p <= 1.0))
    throw std::invalid_argument("removal probability must be in [0,1]");
  ErrorScenario sc;
  sc.kind = ErrorKind::kSubtractive;
  sc.error_school = s_e;
  sc.removal_prob = p;
  sc.seed = seed;

  std::mt19937_64 rng(seed);
  std::vector<char> removed(m.num_students(), 0);
  for (const StudentId t : m.school_list(s_e)) {
    if (canonical_unit(rng) < p) {
      removed[t] = 1;
      sc.removed_students.push_back(t);
    }
  }
  std::sort(sc.removed_students.begin(), sc.removed_students.end());

  auto school_lists = m.school_lists();
  auto& list = school_lists[s_e];
  list.erase(std::remove_if(list.begin(), list.end(), [&](StudentId t) { return removed[t]; }),
             list.end());
  sc.errored_instance = MarketInstance(m.student_lists(), std::move(school_lists), m.capacities());
  sc.errored_matching = run_da(sc.errored_instance).matching;

  for (const StudentId t : error_free.matching.rosters[s_e])
    if (removed[t]) sc.affected.push_back(t);
  return sc;
}

inline ErrorScenario inject_subtractive(const MarketInstance& m, SchoolId s_e, double p,
                                        std::uint64_t seed) {
  return inject_subtractive(m, run_da(m), s_e, p, seed);
}

/// Students with at least one proposal to a school in the given log.
inline std::vector<StudentId> applicant_pool(const RejectionLog& log, int num_students, SchoolId s) {
  std::vector<char> seen(num_students, 0);
  std::vector<StudentId> pool;
  for (const auto& ev : log.events) {
    if (ev.school != s || ev.outcome == ProposalOutcome::kDisplaced) continue;
    if (!seen[ev.student]) {
      seen[ev.student] = 1;
      pool.push_back(ev.student);
    }
  }
  std::sort(pool.begin(), pool.end());
  return pool;
}

/// N students drawn uniformly from the error-free applicants s_e rejected
/// are moved to the head of its list; the match is re-run. D = the boosted.
inline ErrorScenario inject_additive(const MarketInstance& m, const DaResult& error_free,
                                     SchoolId s_e, int n_boosted, std::uint64_t seed) {
  detail::require_school(m, s_e);
  if (n_boosted < 0) throw std::invalid_argument("boost count must be non-negative");
  if (n_boosted > m.capacity(s_e))
    throw std::invalid_argument("boost count " + std::to_string(n_boosted) +
                                " exceeds capacity " + std::to_string(m.capacity(s_e)) +
                                " of school " + std::to_string(s_e));

  const auto pool_all = applicant_pool(error_free.log, m.num_students(), s_e);
  const auto& admitted = error_free.matching.rosters[s_e];
  std::vector<StudentId> pool;
  for (const StudentId t : pool_all)
    if (!std::binary_search(admitted.begin(), admitted.end(), t)) pool.push_back(t);
  if (n_boosted > static_cast<int>(pool.size()))
    throw std::invalid_argument("boost count " + std::to_string(n_boosted) +
                                " exceeds rejected applicant pool of " +
                                std::to_string(pool.size()) + " at school " + std::to_string(s_e));

  ErrorScenario sc;
  sc.kind = ErrorKind::kAdditive;
  sc.error_school = s_e;
  sc.boosted_count = n_boosted;
  sc.seed = seed;

  std::mt19937_64 rng(seed);
  for (int i = 0; i < n_boosted; ++i) {  // partial Fisher-Yates, sampled order kept
    const int j = i + uniform_below(rng, static_cast<int>(pool.size()) - i);
    std::swap(pool[i], pool[j]);
    sc.boosted_students.push_back(pool[i]);
  }

  std::vector<char> boosted(m.num_students(), 0);
  for (const StudentId t : sc.boosted_students) boosted[t] = 1;
  auto school_lists = m.school_lists();
  std::vector<StudentId> newlist = sc.boosted_students;
  for (const StudentId t : school_lists[s_e])
    if (!boosted[t]) newlist.push_back(t);
  school_lists[s_e] = std::move(newlist);

  sc.errored_instance = MarketInstance(m.student_lists(), std::move(school_lists), m.capacities());
  sc.errored_matching = run_da(sc.errored_instance).matching;
  sc.affected = sc.boosted_students;
  std::sort(sc.affected.begin(), sc.affected.end());
  return sc;
}

inline ErrorScenario inject_additive(const MarketInstance& m, SchoolId s_e, int n_boosted,
                                     std::uint64_t seed) {
  return inject_additive(m, run_da(m), s_e, n_boosted, seed);
}

}  // namespace matchmend
