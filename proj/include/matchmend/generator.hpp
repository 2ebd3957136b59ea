#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

#include "matchmend/market.hpp"
#include "matchmend/rng.hpp"

namespace matchmend {

/// Correlated random market: every agent's view of the other side blends a
/// shared popularity score with an idiosyncratic per-pair score, both
/// standard normal. popularity_weight = 1 makes all rankings identical,
/// 0 makes them independent. Students rank a random subset of schools whose
/// size is drawn from Normal(list_length_mean, list_length_std) and clamped
/// to [1, n_schools]; schools rank every student.
struct GenParams {
  int n_students = 900;
  int n_schools = 10;
  int seats_per_school = 100;
  std::vector<int> capacities;  // optional per-school override
  double popularity_weight = 0.5;
  double list_length_mean = 8.0;
  double list_length_std = 2.0;
  std::uint64_t seed = 0;

  bool operator==(const GenParams&) const = default;
};

struct GeneratedMarket {
  MarketInstance instance;
  std::vector<double> school_popularity;  // the shared school score v_s
};

inline void validate_params(const GenParams& p) {
  if (p.n_students <= 0 || p.n_schools <= 0)
    throw std::invalid_argument("market needs at least one student and one school");
  if (p.capacities.empty() ? p.seats_per_school < 0
                           : static_cast<int>(p.capacities.size()) != p.n_schools)
    throw std::invalid_argument("bad capacity specification");
  for (const int c : p.capacities)
    if (c < 0) throw std::invalid_argument("negative capacity");
  if (!(p.popularity_weight >= 0.0 && p.popularity_weight <= 1.0))
    throw std::invalid_argument("popularity weight must be in [0,1]");
  if (p.list_length_std < 0.0) throw std::invalid_argument("negative list length std");
}

inline GeneratedMarket generate_market(const GenParams& params) {
  validate_params(params);
  const int n_students = params.n_students;
  const int n_schools = params.n_schools;
  const double w = params.popularity_weight;

  std::mt19937_64 rng(params.seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  std::vector<double> student_pop(n_students);
  for (double& u : student_pop) u = normal(rng);
  std::vector<double> school_pop(n_schools);
  for (double& v : school_pop) v = normal(rng);

  // Schools rank all students by w*u_t + (1-w)*e_ts, ties broken by id.
  std::vector<std::vector<StudentId>> school_lists(n_schools);
  std::vector<double> score(n_students);
  for (SchoolId s = 0; s < n_schools; ++s) {
    for (StudentId t = 0; t < n_students; ++t)
      score[t] = w * student_pop[t] + (1.0 - w) * normal(rng);
    auto& list = school_lists[s];
    list.resize(n_students);
    std::iota(list.begin(), list.end(), 0);
    std::sort(list.begin(), list.end(), [&](StudentId a, StudentId b) {
      return score[a] != score[b] ? score[a] > score[b] : a < b;
    });
  }

  // Students score schools the same way, then rank a uniform random subset.
  std::vector<std::vector<SchoolId>> student_lists(n_students);
  std::vector<double> school_score(n_schools);
  std::vector<SchoolId> pick(n_schools);
  for (StudentId t = 0; t < n_students; ++t) {
    for (SchoolId s = 0; s < n_schools; ++s)
      school_score[s] = w * school_pop[s] + (1.0 - w) * normal(rng);
    const double raw = params.list_length_mean + params.list_length_std * normal(rng);
    const int length = std::clamp(static_cast<int>(std::lround(raw)), 1, n_schools);
    std::iota(pick.begin(), pick.end(), 0);
    for (int i = 0; i < length; ++i)
      std::swap(pick[i], pick[i + uniform_below(rng, n_schools - i)]);
    auto& list = student_lists[t];
    list.assign(pick.begin(), pick.begin() + length);
    std::sort(list.begin(), list.end(), [&](SchoolId a, SchoolId b) {
      return school_score[a] != school_score[b] ? school_score[a] > school_score[b] : a < b;
    });
  }

  std::vector<int> capacities =
      params.capacities.empty() ? std::vector<int>(n_schools, params.seats_per_school)
                                : params.capacities;

  GeneratedMarket out;
  out.instance =
      MarketInstance(std::move(student_lists), std::move(school_lists), std::move(capacities));
  out.school_popularity = std::move(school_pop);
  return out;
}

}  // namespace matchmend
