#include "matchmend/impact.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

#include "matchmend/errors.hpp"
#include "support/fixtures.hpp"

namespace matchmend {
namespace {

class M1Impact : public ::testing::Test {
 protected:
  MarketInstance market = testing::m1();
  DaResult error_free = run_da(market);
};

TEST_F(M1Impact, SubtractiveScenarioClassification) {
  // student 1 removed from school 1's list: 1 lands unmatched, 2 slides up
  const Matching errored = Matching::from_assignment({0, kUnmatched, 1}, 2);
  const auto report = classify_impact({error_free.matching, errored}, {1}, market);
  EXPECT_EQ(report.directly_harmed, std::vector<StudentId>{1});
  EXPECT_EQ(report.indirectly_helped, std::vector<StudentId>{2});
  EXPECT_EQ(report.envious, std::vector<StudentId>{1});
  EXPECT_TRUE(report.directly_helped.empty());
  EXPECT_TRUE(report.indirectly_harmed.empty());
}

TEST_F(M1Impact, AdditiveScenarioClassification) {
  // student 1 boosted to the top of school 0's list
  const Matching errored = Matching::from_assignment({1, 0, kUnmatched}, 2);
  const auto report = classify_impact({error_free.matching, errored}, {1}, market);
  EXPECT_EQ(report.directly_helped, std::vector<StudentId>{1});
  EXPECT_EQ(report.indirectly_harmed, std::vector<StudentId>{0});
  EXPECT_EQ(report.envious, std::vector<StudentId>{0});
  EXPECT_TRUE(report.directly_harmed.empty());
  EXPECT_TRUE(report.indirectly_helped.empty());
}

TEST_F(M1Impact, ErrorFreePairYieldsEmptyReport) {
  const auto report =
      classify_impact({error_free.matching, error_free.matching}, {0, 1, 2}, market);
  EXPECT_TRUE(report.directly_harmed.empty());
  EXPECT_TRUE(report.directly_helped.empty());
  EXPECT_TRUE(report.indirectly_harmed.empty());
  EXPECT_TRUE(report.indirectly_helped.empty());
  EXPECT_TRUE(report.envious.empty());
}

TEST_F(M1Impact, ClassifyScenarioUsesErroredInstanceForClosure) {
  // after school 0 closes, student 0 is unmatched but must not envy the
  // closed school itself
  const auto sc = inject_resource_reduction(market, error_free.matching, 0);
  const auto report = classify_scenario(sc, market, error_free.matching);
  EXPECT_EQ(report.directly_harmed, std::vector<StudentId>{0});
  EXPECT_TRUE(report.indirectly_harmed.empty());
  EXPECT_TRUE(report.indirectly_helped.empty());
  // student 0 outranks student 1 at school 1 on the surviving true list
  EXPECT_EQ(report.envious, std::vector<StudentId>{0});
}

// Harmed/helped buckets partition the students whose outcome changed.
TEST(ImpactPartition, EveryChangedStudentLandsInExactlyOneBucket) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 150; ++trial) {
    const auto m = testing::random_small_instance(rng);
    const auto free = run_da(m);
    const SchoolId s_e = uniform_below(rng, m.num_schools());
    const auto sc = inject_subtractive(m, free, s_e, 0.5, rng());
    const auto report = classify_scenario(sc, m, free.matching);

    std::vector<int> bucket_count(m.num_students(), 0);
    for (const auto* sets : {&report.directly_harmed, &report.directly_helped,
                             &report.indirectly_harmed, &report.indirectly_helped})
      for (const StudentId t : *sets) ++bucket_count[t];
    for (StudentId t = 0; t < m.num_students(); ++t) {
      const bool changed = free.matching.assignment[t] != sc.errored_matching.assignment[t];
      EXPECT_EQ(bucket_count[t], changed ? 1 : 0);
    }
    // direct sets inside D, indirect sets outside
    for (const StudentId t : report.directly_harmed)
      EXPECT_TRUE(std::binary_search(sc.affected.begin(), sc.affected.end(), t));
    for (const StudentId t : report.indirectly_harmed)
      EXPECT_FALSE(std::binary_search(sc.affected.begin(), sc.affected.end(), t));
  }
}

// A school closure affects nobody beyond its own roster: no rejection chains
// run, so the indirect buckets stay empty and every roster member is harmed.
TEST(ImpactPartition, ClosureHarmsExactlyTheRoster) {
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 100; ++trial) {
    const auto m = testing::random_small_instance(rng);
    const auto free = run_da(m);
    const SchoolId s_e = uniform_below(rng, m.num_schools());
    const auto sc = inject_resource_reduction(m, free.matching, s_e);
    const auto report = classify_scenario(sc, m, free.matching);
    EXPECT_TRUE(report.indirectly_harmed.empty());
    EXPECT_TRUE(report.indirectly_helped.empty());
    EXPECT_TRUE(report.directly_helped.empty());
    EXPECT_EQ(report.directly_harmed, free.matching.rosters[s_e]);
  }
}

// Every boosted student lands strictly above their error-free school, so the
// directly-helped set is exactly the boost and nobody is directly harmed.
TEST(ImpactPartition, AdditiveBoostHelpsExactlyTheBoosted) {
  std::mt19937_64 rng(23);
  int checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto m = testing::random_small_instance(rng);
    const auto free = run_da(m);
    const SchoolId s_e = uniform_below(rng, m.num_schools());
    const auto pool = applicant_pool(free.log, m.num_students(), s_e);
    const int rejected = static_cast<int>(pool.size()) - free.matching.roster_size(s_e);
    const int n_max = std::min(rejected, m.capacity(s_e));
    if (n_max < 1) continue;
    const auto sc = inject_additive(m, free, s_e, 1 + uniform_below(rng, n_max), rng());
    const auto report = classify_scenario(sc, m, free.matching);
    EXPECT_EQ(report.directly_helped, sc.affected);
    EXPECT_TRUE(report.directly_harmed.empty());
    ++checked;
  }
  EXPECT_GT(checked, 60);
}

TEST(ExpectedGroupSizes, SubtractiveRow) {
  const auto row = expected_group_sizes(ErrorKind::kSubtractive, 100, 0.2);
  EXPECT_DOUBLE_EQ(row.directly_harmed, 20.0);
  EXPECT_DOUBLE_EQ(row.directly_helped, 0.0);
  EXPECT_DOUBLE_EQ(row.envious, 25.0);
  EXPECT_FALSE(row.envious_is_upper_bound);
  EXPECT_TRUE(row.assumes_competitive_school);
}

TEST(ExpectedGroupSizes, SubtractiveRejectsCertainRemoval) {
  EXPECT_THROW(expected_group_sizes(ErrorKind::kSubtractive, 100, 1.0), std::invalid_argument);
}

TEST(ExpectedGroupSizes, ResourceReductionRowIsBound) {
  const auto row = expected_group_sizes(ErrorKind::kResourceReduction, 100);
  EXPECT_DOUBLE_EQ(row.directly_harmed, 100.0);
  EXPECT_DOUBLE_EQ(row.envious, 100.0);
  EXPECT_TRUE(row.envious_is_upper_bound);
}

TEST(ExpectedGroupSizes, AdditiveRow) {
  // with four boosts, four fifths of the remaining pool ends up envious
  const auto row = expected_group_sizes(ErrorKind::kAdditive, 100, 0.0, 320, 4);
  EXPECT_DOUBLE_EQ(row.directly_helped, 4.0);
  EXPECT_DOUBLE_EQ(row.directly_harmed, 0.0);
  EXPECT_DOUBLE_EQ(row.envious, 4.0 + 0.8 * (320 - 100 - 4));
}

TEST(ExpectedGroupSizes, AdditiveZeroBoosts) {
  const auto row = expected_group_sizes(ErrorKind::kAdditive, 100, 0.0, 320, 0);
  EXPECT_DOUBLE_EQ(row.directly_helped, 0.0);
  EXPECT_DOUBLE_EQ(row.envious, 0.0);
}

TEST(ExpectedGroupSizes, AdditiveRejectsThinPool) {
  EXPECT_THROW(expected_group_sizes(ErrorKind::kAdditive, 100, 0.0, 103, 4),
               std::invalid_argument);
}

TEST(JealousyPmf, TwoEligibleOneBoost) {
  EXPECT_DOUBLE_EQ(jealousy_pmf(2, 1, 0), 0.5);
  EXPECT_DOUBLE_EQ(jealousy_pmf(2, 1, 1), 0.5);
}

TEST(JealousyPmf, BoostingEveryoneLeavesNobodyJealous) {
  EXPECT_DOUBLE_EQ(jealousy_pmf(7, 7, 0), 1.0);
  EXPECT_DOUBLE_EQ(jealousy_pmf(5, 0, 0), 1.0);
}

TEST(JealousyPmf, SumsToOne) {
  double sum = 0;
  for (int j = 0; j <= 7; ++j) sum += jealousy_pmf(10, 3, j);
  EXPECT_NEAR(sum, 1.0, 1e-15);
}

TEST(JealousyPmf, RejectsOutOfRangeArguments) {
  EXPECT_THROW(jealousy_pmf(5, 6, 0), std::invalid_argument);
  EXPECT_THROW(jealousy_pmf(5, -1, 0), std::invalid_argument);
  EXPECT_THROW(jealousy_pmf(5, 2, 4), std::invalid_argument);
  EXPECT_THROW(jealousy_pmf(5, 2, -1), std::invalid_argument);
}

// Enumerating all C(B, N) boost choices and counting how many rejected
// applicants outrank the worst boosted student reproduces the pmf.
TEST(JealousyPmf, MatchesExhaustiveEnumeration) {
  for (const auto [eligible, boosted] : {std::pair{2, 1}, {5, 2}, {7, 3}, {8, 1}, {6, 6}}) {
    std::vector<double> histogram(eligible - boosted + 1, 0.0);
    std::vector<int> chosen(boosted);
    double total = 0;
    std::function<void(int, int)> rec = [&](int from, int k) {
      if (k == boosted) {
        const int worst = chosen.empty() ? 0 : chosen.back() + 1;  // 1-based rank
        histogram[worst - boosted] += 1;
        total += 1;
        return;
      }
      for (int i = from; i < eligible; ++i) {
        chosen[k] = i;
        rec(i + 1, k + 1);
      }
    };
    rec(0, 0);
    for (int j = 0; j <= eligible - boosted; ++j)
      EXPECT_NEAR(jealousy_pmf(eligible, boosted, j), histogram[j] / total, 1e-12)
          << "B=" << eligible << " N=" << boosted << " j=" << j;
  }
}

TEST(JealousyPmf, MeanMatchesClosedFormAtScale) {
  // the closed form the pmf must reproduce: (B - N) * N / (N + 1)
  for (const int eligible : {60, 200, 1000}) {
    for (const int boosted : {1, 3, eligible / 2, eligible}) {
      double mean = 0;
      for (int j = 0; j <= eligible - boosted; ++j)
        mean += j * jealousy_pmf(eligible, boosted, j);
      const double closed = static_cast<double>(eligible - boosted) * boosted / (boosted + 1.0);
      EXPECT_NEAR(mean, closed, 1e-9 * std::max(1.0, closed));
    }
  }
}

}  // namespace
}  // namespace matchmend
