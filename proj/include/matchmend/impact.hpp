#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "matchmend/da.hpp"
#include "matchmend/errors.hpp"
#include "matchmend/market.hpp"

namespace matchmend {

/// Analytic expected group sizes for one error setting. `envious` is an
/// upper bound (not a point estimate) for resource reduction; for the other
/// kinds it assumes the error school still fills to capacity, which callers
/// must ensure themselves.
struct ExpectationRow {
  double directly_harmed = 0.0;
  double directly_helped = 0.0;
  double envious = 0.0;
  bool envious_is_upper_bound = false;
  bool assumes_competitive_school = false;
  bool operator==(const ExpectationRow&) const = default;
};

/// The five student groups for one counterfactual pair, each ascending.
struct ImpactReport {
  std::vector<StudentId> directly_harmed;
  std::vector<StudentId> directly_helped;
  std::vector<StudentId> indirectly_harmed;
  std::vector<StudentId> indirectly_helped;
  std::vector<StudentId> envious;
  std::optional<ExpectationRow> expectations;

  bool operator==(const ImpactReport&) const = default;
};

/// Splits every student by comparing their errored school against their
/// error-free school on their own original list, crossed with membership in
/// the affected set. Envy (justified, including open seats) is judged on the
/// errored matching against `envy_market`: the original market for list
/// errors, the market without the school for a closure, where the vanished
/// school can no longer be envied.
inline ImpactReport classify_impact(const CounterfactualPair& pair,
                                    const std::vector<StudentId>& affected,
                                    const MarketInstance& original,
                                    const MarketInstance& envy_market) {
  const int n_students = static_cast<int>(pair.error_free.assignment.size());
  ImpactReport report;
  std::vector<char> in_d(n_students, 0);
  for (const StudentId t : affected) in_d[t] = 1;
  for (StudentId t = 0; t < n_students; ++t) {
    const SchoolId error_free = pair.error_free.assignment[t];
    const SchoolId errored = pair.errored.assignment[t];
    if (original.prefers(t, error_free, errored))
      (in_d[t] ? report.directly_harmed : report.indirectly_harmed).push_back(t);
    else if (original.prefers(t, errored, error_free))
      (in_d[t] ? report.directly_helped : report.indirectly_helped).push_back(t);
  }
  report.envious = envious_students(envy_market, pair.errored);
  return report;
}

inline ImpactReport classify_impact(const CounterfactualPair& pair,
                                    const std::vector<StudentId>& affected,
                                    const MarketInstance& original) {
  return classify_impact(pair, affected, original, original);
}

/// Picks the right envy market for the scenario kind and classifies.
inline ImpactReport classify_scenario(const ErrorScenario& sc, const MarketInstance& original,
                                      const Matching& error_free) {
  const MarketInstance& envy_market =
      sc.kind == ErrorKind::kResourceReduction ? sc.errored_instance : original;
  return classify_impact({error_free, sc.errored_matching}, sc.affected, original, envy_market);
}

/// Expected directly-harmed / directly-helped / envious counts:
///   resource reduction -> (C, 0, <= C)
///   subtractive        -> (C p, 0, C p / (1 - p))
///   additive           -> (0, N, N + (A - C - N) N / (N + 1))
/// where C is the error school's seat count, p the removal probability, A
/// the applicant-pool size and N the boost count.
inline ExpectationRow expected_group_sizes(ErrorKind kind, int capacity, double removal_prob = 0.0,
                                           int applicant_pool = 0, int boosted_count = 0) {
  if (capacity < 0) throw std::invalid_argument("capacity must be non-negative");
  ExpectationRow row;
  switch (kind) {
    case ErrorKind::kResourceReduction:
      row.directly_harmed = capacity;
      row.envious = capacity;
      row.envious_is_upper_bound = true;
      return row;
    case ErrorKind::kSubtractive:
      if (!(removal_prob >= 0.0 && removal_prob < 1.0))
        throw std::invalid_argument("subtractive expectation needs 0 <= p < 1");
      row.directly_harmed = capacity * removal_prob;
      row.envious = capacity * removal_prob / (1.0 - removal_prob);
      row.assumes_competitive_school = true;
      return row;
    case ErrorKind::kAdditive: {
      if (boosted_count < 0) throw std::invalid_argument("boost count must be non-negative");
      if (applicant_pool < capacity + boosted_count)
        throw std::invalid_argument("additive expectation needs applicant pool >= capacity + boosts");
      const double n = boosted_count;
      row.directly_helped = n;
      row.envious = n + (applicant_pool - capacity - boosted_count) * n / (n + 1.0);
      row.assumes_competitive_school = true;
      return row;
    }
  }
  throw std::invalid_argument("unknown error kind");
}

namespace detail {

inline boost::multiprecision::cpp_int binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  boost::multiprecision::cpp_int result = 1;
  for (int i = 1; i <= k; ++i) {
    result *= n - k + i;
    result /= i;
  }
  return result;
}

}  // namespace detail

/// Probability that exactly `jealous` of the `eligible` rejected applicants
/// end up with justified envy when `boosted` of them are promoted at random:
/// C(j + N - 1, N - 1) / C(B, N), evaluated exactly.
inline double jealousy_pmf(int eligible, int boosted, int jealous) {
  if (boosted < 0 || boosted > eligible)
    throw std::invalid_argument("boosted count out of range [0, eligible]");
  if (jealous < 0 || jealous > eligible - boosted)
    throw std::invalid_argument("jealous count out of range [0, eligible - boosted]");
  if (boosted == 0) return jealous == 0 ? 1.0 : 0.0;
  using boost::multiprecision::cpp_int;
  const cpp_int numer = detail::binomial(jealous + boosted - 1, boosted - 1);
  const cpp_int denom = detail::binomial(eligible, boosted);
  return boost::multiprecision::cpp_rational(numer, denom).convert_to<double>();
}

}  // namespace matchmend
