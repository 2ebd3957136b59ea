#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "matchmend/da.hpp"
#include "matchmend/errors.hpp"
#include "matchmend/market.hpp"
#include "matchmend/rng.hpp"

namespace matchmend {

struct Offer {
  StudentId student;
  SchoolId school;
  bool accepted;
  bool operator==(const Offer&) const = default;
};

/// Students accept an offer iff it strictly beats their current assignment on
/// their original list; refusal_prob (default 0) lets a preferred offer be
/// turned down anyway, as happens with real late-breaking reassignments.
struct MitigationOptions {
  double refusal_prob = 0.0;
  std::uint64_t seed = 0;
};

struct MitigationResult {
  Matching repaired;
  std::vector<StudentId> moved;          // ascending; assignment differs from the errored matching
  std::vector<Offer> offers;             // processing order; at most one per student
  std::vector<int> expansion_by_school;  // seats added beyond base capacity
  std::vector<int> vacated_by_school;    // seats opened by leavers and not refilled this round
};

enum class AffectedChoice { kDirectOnly, kDirectPlusIndirect };

namespace detail {

class OfferDesk {
 public:
  OfferDesk(const MarketInstance& prefs, const MitigationOptions& options)
      : prefs_(prefs), refusal_prob_(options.refusal_prob), rng_(options.seed) {}

  bool accepts(StudentId t, SchoolId offered, SchoolId current) {
    if (!prefs_.prefers(t, offered, current)) return false;
    if (refusal_prob_ > 0.0 && canonical_unit(rng_) < refusal_prob_) return false;
    return true;
  }

 private:
  const MarketInstance& prefs_;
  double refusal_prob_;
  std::mt19937_64 rng_;
};

// Applies the collected moves at once and settles the bookkeeping. Seats are
// added wherever the final roster exceeds base capacity; vacancies report
// capacity the leavers opened and nobody refilled.
inline MitigationResult settle(const MarketInstance& m, const Matching& errored,
                               std::vector<Offer> offers) {
  MitigationResult result;
  result.repaired = errored;
  result.offers = std::move(offers);
  for (const Offer& offer : result.offers) {
    if (!offer.accepted) continue;
    result.repaired.reassign(offer.student, offer.school);
    result.moved.push_back(offer.student);
  }
  std::sort(result.moved.begin(), result.moved.end());

  const int n_schools = m.num_schools();
  result.expansion_by_school.assign(n_schools, 0);
  result.vacated_by_school.assign(n_schools, 0);
  for (SchoolId s = 0; s < n_schools; ++s) {
    const int cap = m.capacity(s);
    result.expansion_by_school[s] = std::max(0, result.repaired.roster_size(s) - cap);
    result.repaired.extra_seats[s] = result.expansion_by_school[s];
    result.vacated_by_school[s] =
        std::max(0, std::min(cap, errored.roster_size(s)) - result.repaired.roster_size(s));
  }
  return result;
}

inline void require_kind(const ErrorScenario& sc, std::initializer_list<ErrorKind> allowed,
                         const char* strategy) {
  for (const ErrorKind k : allowed)
    if (sc.kind == k) return;
  throw std::invalid_argument(std::string(strategy) + " does not apply to a " +
                              to_string(sc.kind) + " scenario");
}

// Best rejected student per school, as a rank threshold: the lowest rank
// value among the log's ranked rejectees not in `excluded`. kNoRank when no
// eligible rejectee exists, which any ranked student beats.
inline std::vector<int> best_rejected_ranks(const MarketInstance& ranks, const RejectionLog& log,
                                            const std::vector<char>& excluded) {
  std::vector<int> br(ranks.num_schools(), kNoRank);
  for (SchoolId s = 0; s < ranks.num_schools(); ++s) {
    for (const StudentId t : log.rejected_by_school[s]) {
      if (excluded[t]) continue;
      const int r = ranks.school_rank(s, t);
      if (r < br[s]) br[s] = r;
    }
  }
  return br;
}

// Students the error-free run admitted to s_e that the errored run did not.
inline std::vector<StudentId> displaced_from_error_school(const ErrorScenario& sc,
                                                          const Matching& error_free) {
  const auto& before = error_free.rosters[sc.error_school];
  const auto& after = sc.errored_matching.rosters[sc.error_school];
  std::vector<StudentId> out;
  std::set_difference(before.begin(), before.end(), after.begin(), after.end(),
                      std::back_inserter(out));
  return out;
}

inline std::vector<StudentId> harmed_students(const MarketInstance& m,
                                              const CounterfactualPair& pair) {
  std::vector<StudentId> out;
  for (StudentId t = 0; t < m.num_students(); ++t)
    if (m.prefers(t, pair.error_free.assignment[t], pair.errored.assignment[t])) out.push_back(t);
  return out;
}

}  // namespace detail

/// Repairs a school closure: each displaced student, in ascending id order,
/// walks their list (the closed school is gone from it) and takes a seat at
/// the first school whose best rejected outsider they outrank, capacity
/// ignored. Produces the student-optimal stable match among repairs that
/// leave everyone else in place.
inline MitigationResult stable_expansion(const ErrorScenario& sc, const MarketInstance& original,
                                         const RejectionLog& error_free_log) {
  detail::require_kind(sc, {ErrorKind::kResourceReduction}, "stable_expansion");
  std::vector<char> excluded(original.num_students(), 0);
  for (const StudentId t : sc.affected) excluded[t] = 1;
  const auto br = detail::best_rejected_ranks(original, error_free_log, excluded);

  std::vector<Offer> offers;
  for (const StudentId t : sc.affected) {
    for (const SchoolId s : sc.errored_instance.student_list(t)) {
      const int rank = original.school_rank(s, t);
      if (rank == kNoRank) continue;
      if (rank < br[s]) {
        offers.push_back({t, s, true});
        break;
      }
    }
  }
  return detail::settle(original, sc.errored_matching, std::move(offers));
}

/// Offers the error school to the students it wronged directly: the directly
/// harmed for a subtractive error, the students its boosted intake pushed out
/// for an additive one. Nobody else moves.
inline MitigationResult direct_only(const ErrorScenario& sc, const MarketInstance& original,
                                    const CounterfactualPair& pair,
                                    const MitigationOptions& options = {}) {
  detail::require_kind(sc, {ErrorKind::kSubtractive, ErrorKind::kAdditive}, "direct_only");
  std::vector<StudentId> targets;
  if (sc.kind == ErrorKind::kSubtractive) {
    for (const StudentId t : sc.affected)
      if (original.prefers(t, pair.error_free.assignment[t], pair.errored.assignment[t]))
        targets.push_back(t);
  } else {
    targets = detail::displaced_from_error_school(sc, pair.error_free);
  }

  detail::OfferDesk desk(original, options);
  std::vector<Offer> offers;
  for (const StudentId t : targets)
    offers.push_back({t, sc.error_school, desk.accepts(t, sc.error_school, pair.errored.assignment[t])});
  return detail::settle(original, sc.errored_matching, std::move(offers));
}

/// Honors the admission threshold the error created: every student the error
/// school truly ranks above its lowest admitted student is offered a seat
/// there. Afterwards nobody holds justified envy toward the error school.
inline MitigationResult stability_restoration(const ErrorScenario& sc,
                                              const MarketInstance& original,
                                              const CounterfactualPair& pair,
                                              const MitigationOptions& options = {}) {
  detail::require_kind(sc, {ErrorKind::kSubtractive}, "stability_restoration");
  const SchoolId s_e = sc.error_school;
  const auto& roster = sc.errored_matching.rosters[s_e];
  if (original.capacity(s_e) == 0 || static_cast<int>(roster.size()) < original.capacity(s_e))
    throw std::invalid_argument(
        "stability_restoration needs the error school filled to capacity; "
        "with spare seats the trivial remedy (admit the affected) applies");

  int threshold_rank = -1;
  for (const StudentId t : roster)
    threshold_rank = std::max(threshold_rank, original.school_rank(s_e, t));

  std::vector<char> enrolled(original.num_students(), 0);
  for (const StudentId t : roster) enrolled[t] = 1;
  std::vector<StudentId> targets;
  for (const StudentId t : original.school_list(s_e)) {
    if (original.school_rank(s_e, t) >= threshold_rank) continue;
    if (!enrolled[t]) targets.push_back(t);
  }
  std::sort(targets.begin(), targets.end());

  detail::OfferDesk desk(original, options);
  std::vector<Offer> offers;
  for (const StudentId t : targets)
    offers.push_back({t, s_e, desk.accepts(t, s_e, pair.errored.assignment[t])});
  return detail::settle(original, sc.errored_matching, std::move(offers));
}

/// Offers every harmed student the better of their two outcomes, i.e. their
/// error-free school. Never increases the number of students with justified
/// envy, at the price of expansion landing on schools that did nothing wrong.
inline MitigationResult best_of_both(const ErrorScenario& sc, const MarketInstance& original,
                                     const CounterfactualPair& pair,
                                     const MitigationOptions& options = {}) {
  detail::require_kind(sc, {ErrorKind::kSubtractive, ErrorKind::kAdditive}, "best_of_both");
  detail::OfferDesk desk(original, options);
  std::vector<Offer> offers;
  for (const StudentId t : detail::harmed_students(original, pair)) {
    const SchoolId target = pair.error_free.assignment[t];
    offers.push_back({t, target, desk.accepts(t, target, pair.errored.assignment[t])});
  }
  return detail::settle(original, sc.errored_matching, std::move(offers));
}

/// Stable-expansion walk adapted to an additive error: thresholds come from
/// the errored run's rejections, with the boosted students and the chosen
/// affected set ignored when picking each school's best rejected outsider.
/// Residual blocking pairs afterwards involve only boosted seat-holders.
inline MitigationResult near_stable_expansion(const ErrorScenario& sc,
                                              const MarketInstance& original,
                                              const RejectionLog& errored_log,
                                              AffectedChoice choice) {
  detail::require_kind(sc, {ErrorKind::kAdditive}, "near_stable_expansion");
  const Matching error_free = run_da(original).matching;
  const CounterfactualPair pair{error_free, sc.errored_matching};

  std::vector<StudentId> walkers = choice == AffectedChoice::kDirectOnly
                                       ? detail::displaced_from_error_school(sc, error_free)
                                       : detail::harmed_students(original, pair);

  std::vector<char> excluded(original.num_students(), 0);
  for (const StudentId t : sc.boosted_students) excluded[t] = 1;
  for (const StudentId t : walkers) excluded[t] = 1;
  const auto br = detail::best_rejected_ranks(original, errored_log, excluded);

  std::vector<Offer> offers;
  for (const StudentId t : walkers) {
    const SchoolId current = sc.errored_matching.assignment[t];
    for (const SchoolId s : original.student_list(t)) {
      const int rank = original.school_rank(s, t);
      if (rank == kNoRank) continue;
      if (rank < br[s]) {
        if (s != current) offers.push_back({t, s, original.prefers(t, s, current)});
        break;
      }
    }
  }
  return detail::settle(original, sc.errored_matching, std::move(offers));
}

struct NearStabilityViolation {
  StudentId envier;
  SchoolId school;
  StudentId occupant;
};

/// Blocking pairs of `match` (under the true lists) that break near-stability.
/// Boosted students are left out of the evaluation on both sides: pairs whose
/// beaten occupant was boosted are the tolerated residue, and a boosted
/// student's own envy does not count. Open-seat pairs are not counted either:
/// with one round of negotiation, vacancies left by movers are conceded
/// instability.
inline std::vector<NearStabilityViolation> near_stability_violations(
    const MarketInstance& truth, const Matching& match,
    const std::vector<StudentId>& boosted_students) {
  std::vector<char> boosted(truth.num_students(), 0);
  for (const StudentId t : boosted_students) boosted[t] = 1;

  const int n_schools = truth.num_schools();
  std::vector<int> worst_rank(n_schools, -1);
  std::vector<StudentId> worst_occupant(n_schools, kNoStudent);
  for (SchoolId s = 0; s < n_schools; ++s) {
    for (const StudentId t : match.rosters[s]) {
      if (boosted[t]) continue;
      const int r = truth.school_rank(s, t);
      if (r > worst_rank[s]) {
        worst_rank[s] = r;
        worst_occupant[s] = t;
      }
    }
  }

  std::vector<NearStabilityViolation> out;
  for (StudentId t = 0; t < truth.num_students(); ++t) {
    if (boosted[t]) continue;
    const int own_rank = truth.student_rank(t, match.assignment[t]);
    const auto& list = truth.student_list(t);
    for (int i = 0; i < own_rank; ++i) {
      const SchoolId s = list[i];
      const int rank = truth.school_rank(s, t);
      if (rank == kNoRank || worst_occupant[s] == kNoStudent) continue;
      if (rank < worst_rank[s]) out.push_back({t, s, worst_occupant[s]});
    }
  }
  return out;
}

}  // namespace matchmend
