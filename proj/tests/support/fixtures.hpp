#pragma once

#include <random>
#include <vector>

#include "matchmend/market.hpp"
#include "matchmend/rng.hpp"

namespace matchmend::testing {

// Three students, two schools with one seat each. Students 0 and 1 both want
// school 0 then school 1; student 2 lists only school 1. Both schools rank
// 0 > 1 > 2. DA gives {0 -> 0, 1 -> 1, 2 -> unmatched}.
inline MarketInstance m1() {
  return MarketInstance({{0, 1}, {0, 1}, {1}}, {{0, 1, 2}, {0, 1, 2}}, {1, 1});
}

// Small random instance with partial lists on both sides, for oracle tests.
inline MarketInstance random_small_instance(std::mt19937_64& rng, int max_students = 6,
                                            int max_schools = 4) {
  const int n_students = 1 + uniform_below(rng, max_students);
  const int n_schools = 1 + uniform_below(rng, max_schools);

  auto random_subset = [&](int universe, int min_size) {
    std::vector<int> ids(universe);
    for (int i = 0; i < universe; ++i) ids[i] = i;
    const int size = min_size + uniform_below(rng, universe - min_size + 1);
    for (int i = 0; i < size; ++i) std::swap(ids[i], ids[i + uniform_below(rng, universe - i)]);
    ids.resize(size);
    return ids;
  };

  std::vector<std::vector<SchoolId>> students(n_students);
  for (auto& list : students) list = random_subset(n_schools, 1);
  std::vector<std::vector<StudentId>> schools(n_schools);
  for (auto& list : schools) list = random_subset(n_students, 0);
  std::vector<int> caps(n_schools);
  for (auto& c : caps) c = uniform_below(rng, 4);
  return MarketInstance(std::move(students), std::move(schools), std::move(caps));
}

}  // namespace matchmend::testing
