#pragma once

// Exhaustive-enumeration oracles, independent of the deferred-acceptance
// implementation they check. Only usable on tiny instances.

#include <functional>
#include <vector>

#include "matchmend/da.hpp"
#include "matchmend/market.hpp"

namespace matchmend::testing {

// Every capacity-respecting, mutually-acceptable assignment (a matched
// student lists the school and the school ranks the student).
inline void for_each_assignment(const MarketInstance& m,
                                const std::function<void(const std::vector<SchoolId>&)>& visit) {
  const int n_students = m.num_students();
  std::vector<SchoolId> assignment(n_students, kUnmatched);
  std::vector<int> load(m.num_schools(), 0);
  std::function<void(int)> rec = [&](int t) {
    if (t == n_students) {
      visit(assignment);
      return;
    }
    rec(t + 1);  // t unmatched
    for (const SchoolId s : m.student_list(t)) {
      if (!m.ranks(s, t) || load[s] >= m.capacity(s)) continue;
      assignment[t] = s;
      ++load[s];
      rec(t + 1);
      --load[s];
      assignment[t] = kUnmatched;
    }
  };
  rec(0);
}

inline bool is_stable(const MarketInstance& m, const Matching& match) {
  return find_blocking_pairs(m, match).empty();
}

// Per-student best school over all stable matchings (the student-optimal
// stable matching assigns exactly these).
inline std::vector<SchoolId> student_optimal_stable(const MarketInstance& m, bool* found_any) {
  std::vector<SchoolId> best(m.num_students(), kUnmatched);
  bool any = false;
  for_each_assignment(m, [&](const std::vector<SchoolId>& assignment) {
    const Matching match = Matching::from_assignment(assignment, m.num_schools());
    if (!is_stable(m, match)) return;
    if (!any) {
      best = assignment;
      any = true;
      return;
    }
    for (StudentId t = 0; t < m.num_students(); ++t)
      if (m.prefers(t, assignment[t], best[t])) best[t] = assignment[t];
  });
  if (found_any) *found_any = any;
  return best;
}

// Repairs of a school closure: the given students may be placed anywhere on
// their (already closure-free) lists with unlimited expansion, everyone else
// stays put. Returns the per-student best over all stable repairs.
inline std::vector<SchoolId> student_optimal_stable_repair(const MarketInstance& errored,
                                                           const Matching& errored_matching,
                                                           const std::vector<StudentId>& displaced,
                                                           bool* found_any) {
  std::vector<SchoolId> best(displaced.size(), kUnmatched);
  bool any = false;
  std::vector<SchoolId> assignment = errored_matching.assignment;
  const int k = static_cast<int>(displaced.size());
  std::function<void(int)> rec = [&](int i) {
    if (i == k) {
      Matching match = Matching::from_assignment(assignment, errored.num_schools());
      for (SchoolId s = 0; s < errored.num_schools(); ++s)
        match.extra_seats[s] = std::max(0, match.roster_size(s) - errored.capacity(s));
      if (!is_stable(errored, match)) return;
      if (!any) {
        for (int d = 0; d < k; ++d) best[d] = assignment[displaced[d]];
        any = true;
        return;
      }
      for (int d = 0; d < k; ++d)
        if (errored.prefers(displaced[d], assignment[displaced[d]], best[d]))
          best[d] = assignment[displaced[d]];
      return;
    }
    const StudentId t = displaced[i];
    assignment[t] = kUnmatched;
    rec(i + 1);
    for (const SchoolId s : errored.student_list(t)) {
      if (!errored.ranks(s, t)) continue;
      assignment[t] = s;
      rec(i + 1);
      assignment[t] = kUnmatched;
    }
  };
  rec(0);
  if (found_any) *found_any = any;
  return best;
}

}  // namespace matchmend::testing
