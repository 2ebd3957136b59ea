#pragma once

#include <algorithm>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

#include "matchmend/market.hpp"

namespace matchmend {

enum class ProposalOutcome { kAccepted, kRejected, kDisplaced };

struct ProposalEvent {
  StudentId student;
  SchoolId school;
  ProposalOutcome outcome;
  bool operator==(const ProposalEvent&) const = default;
};

/// Full trace of one deferred-acceptance run. `rejected_by_school` holds, per
/// school and in event order, every ranked student the school turned away
/// (rejections of unranked students appear in `events` only, since they carry
/// no rank to compare against). `best_rejected[s]` is the school's favourite
/// among those, or kNoStudent if it rejected no ranked student.
struct RejectionLog {
  std::vector<ProposalEvent> events;
  std::vector<std::vector<StudentId>> rejected_by_school;
  std::vector<StudentId> best_rejected;
  bool operator==(const RejectionLog&) const = default;
};

struct DaResult {
  Matching matching;
  RejectionLog log;
};

/// Student-proposing deferred acceptance. One proposal per step, always from
/// the lowest-id student still proposing, so the event log is deterministic;
/// the matching itself is proposal-order independent.
inline DaResult run_da(const MarketInstance& m) {
  {
    auto violations = validate(m);
    if (!violations.empty())
      throw std::invalid_argument("invalid market: " + violations.front());
  }
  const int n_students = m.num_students();
  const int n_schools = m.num_schools();

  DaResult result;
  result.log.rejected_by_school.assign(n_schools, {});
  result.log.best_rejected.assign(n_schools, kNoStudent);

  std::vector<int> next_choice(n_students, 0);
  std::vector<SchoolId> held(n_students, kUnmatched);
  // Tentative roster per school as a max-heap on school rank: worst on top.
  std::vector<std::vector<std::pair<int, StudentId>>> heap(n_schools);

  std::set<StudentId> active;
  for (StudentId t = 0; t < n_students; ++t)
    if (!m.student_list(t).empty()) active.insert(t);

  auto log_turndown = [&](StudentId t, SchoolId s, ProposalOutcome outcome, int rank) {
    result.log.events.push_back({t, s, outcome});
    if (rank == kNoRank) return;
    result.log.rejected_by_school[s].push_back(t);
    if (result.log.best_rejected[s] == kNoStudent ||
        rank < m.school_rank(s, result.log.best_rejected[s]))
      result.log.best_rejected[s] = t;
  };

  while (!active.empty()) {
    const StudentId t = *active.begin();
    const auto& list = m.student_list(t);
    const SchoolId s = list[next_choice[t]++];
    const bool exhausted = next_choice[t] >= static_cast<int>(list.size());
    const int rank = m.school_rank(s, t);
    auto& seats = heap[s];

    if (rank == kNoRank || m.capacity(s) == 0) {
      log_turndown(t, s, ProposalOutcome::kRejected, rank);
      if (exhausted) active.erase(active.begin());
      continue;
    }
    if (static_cast<int>(seats.size()) < m.capacity(s)) {
      seats.emplace_back(rank, t);
      std::push_heap(seats.begin(), seats.end());
      held[t] = s;
      result.log.events.push_back({t, s, ProposalOutcome::kAccepted});
      active.erase(active.begin());
      continue;
    }
    const auto [worst_rank, worst] = seats.front();
    if (rank < worst_rank) {
      std::pop_heap(seats.begin(), seats.end());
      seats.back() = {rank, t};
      std::push_heap(seats.begin(), seats.end());
      held[worst] = kUnmatched;
      held[t] = s;
      log_turndown(worst, s, ProposalOutcome::kDisplaced, worst_rank);
      result.log.events.push_back({t, s, ProposalOutcome::kAccepted});
      active.erase(active.begin());
      if (next_choice[worst] < static_cast<int>(m.student_list(worst).size()))
        active.insert(worst);
    } else {
      log_turndown(t, s, ProposalOutcome::kRejected, rank);
      if (exhausted) active.erase(active.begin());
    }
  }

  result.matching = Matching::from_assignment(std::move(held), n_schools);
  return result;
}

namespace detail {

// Per-school state for blocking-pair scans: whether a seat is free (counting
// extra seats) and the worst rank the school currently holds.
struct SeatState {
  std::vector<char> open;
  std::vector<int> worst_rank;  // -1 when the roster is empty

  SeatState(const MarketInstance& m, const Matching& match, bool include_open_seats) {
    const int n_schools = m.num_schools();
    open.assign(n_schools, 0);
    worst_rank.assign(n_schools, -1);
    for (SchoolId s = 0; s < n_schools; ++s) {
      if (include_open_seats)
        open[s] = match.roster_size(s) < m.capacity(s) + match.extra_seats[s];
      for (const StudentId t : match.rosters[s])
        worst_rank[s] = std::max(worst_rank[s], m.school_rank(s, t));
    }
  }
};

}  // namespace detail

/// All pairs (t, s) where t prefers s to their assignment, s ranks t, and s
/// either has a free seat or holds someone it ranks below t. Empty result is
/// the stability certificate. `include_open_seats` narrows the check to
/// occupant-directed envy, the justified-envy reading used once one-round
/// mitigation has opened transient vacancies.
inline std::vector<std::pair<StudentId, SchoolId>> find_blocking_pairs(
    const MarketInstance& m, const Matching& match, bool include_open_seats = true) {
  detail::SeatState seats(m, match, include_open_seats);
  std::vector<std::pair<StudentId, SchoolId>> pairs;
  for (StudentId t = 0; t < m.num_students(); ++t) {
    const int own_rank = m.student_rank(t, match.assignment[t]);
    const auto& list = m.student_list(t);
    for (int i = 0; i < own_rank; ++i) {
      const SchoolId s = list[i];
      const int rank = m.school_rank(s, t);
      if (rank == kNoRank) continue;
      if (seats.open[s] || rank < seats.worst_rank[s]) pairs.emplace_back(t, s);
    }
  }
  return pairs;
}

/// Students appearing in at least one blocking pair, ascending.
inline std::vector<StudentId> envious_students(const MarketInstance& m, const Matching& match,
                                               bool include_open_seats = true) {
  detail::SeatState seats(m, match, include_open_seats);
  std::vector<StudentId> out;
  for (StudentId t = 0; t < m.num_students(); ++t) {
    const int own_rank = m.student_rank(t, match.assignment[t]);
    const auto& list = m.student_list(t);
    for (int i = 0; i < own_rank; ++i) {
      const SchoolId s = list[i];
      const int rank = m.school_rank(s, t);
      if (rank == kNoRank) continue;
      if (seats.open[s] || rank < seats.worst_rank[s]) {
        out.push_back(t);
        break;
      }
    }
  }
  return out;
}

}  // namespace matchmend
