#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace matchmend {

using StudentId = int;
using SchoolId = int;

// Sentinel assignment for a student no school holds. It sits implicitly at
// the end of every student list and never appears on a school list.
inline constexpr SchoolId kUnmatched = -1;
inline constexpr StudentId kNoStudent = -1;

// Rank given to a student a school does not list. Larger rank = worse.
inline constexpr int kNoRank = std::numeric_limits<int>::max();

/// A two-sided market: ordered student lists over schools, ordered school
/// lists over students (possibly partial on both sides), and per-school
/// seat counts. Immutable after construction; rank tables are built once
/// so comparisons are O(1).
class MarketInstance {
 public:
  MarketInstance() = default;

  MarketInstance(std::vector<std::vector<SchoolId>> student_lists,
                 std::vector<std::vector<StudentId>> school_lists,
                 std::vector<int> capacities)
      : student_lists_(std::move(student_lists)),
        school_lists_(std::move(school_lists)),
        capacities_(std::move(capacities)) {
    build_rank_tables();
  }

  int num_students() const { return static_cast<int>(student_lists_.size()); }
  int num_schools() const { return static_cast<int>(school_lists_.size()); }

  const std::vector<std::vector<SchoolId>>& student_lists() const { return student_lists_; }
  const std::vector<std::vector<StudentId>>& school_lists() const { return school_lists_; }
  const std::vector<int>& capacities() const { return capacities_; }

  const std::vector<SchoolId>& student_list(StudentId t) const { return student_lists_[t]; }
  const std::vector<StudentId>& school_list(SchoolId s) const { return school_lists_[s]; }
  int capacity(SchoolId s) const { return capacities_[s]; }

  // Position of s on t's list; unlisted schools and kUnmatched both rank at
  // the list length, i.e. worse than everything listed.
  int student_rank(StudentId t, SchoolId s) const {
    if (s == kUnmatched || s < 0 || s >= num_schools())
      return static_cast<int>(student_lists_[t].size());
    return student_rank_[t][s];
  }

  // Position of t on s's list, or kNoRank when the school does not rank t.
  int school_rank(SchoolId s, StudentId t) const {
    if (t < 0 || t >= num_students()) return kNoRank;
    return school_rank_[s][t];
  }

  bool lists(StudentId t, SchoolId s) const {
    return s != kUnmatched && s >= 0 && s < num_schools() &&
           student_rank_[t][s] < static_cast<int>(student_lists_[t].size());
  }

  bool ranks(SchoolId s, StudentId t) const { return school_rank(s, t) != kNoRank; }

  // True iff t strictly prefers a to b. Unlisted schools are equivalent to
  // kUnmatched, so every listed school beats both.
  bool prefers(StudentId t, SchoolId a, SchoolId b) const {
    return student_rank(t, a) < student_rank(t, b);
  }

  // School-side comparator, same convention: unranked students tie for last.
  bool school_prefers(SchoolId s, StudentId a, StudentId b) const {
    return school_rank(s, a) < school_rank(s, b);
  }

  bool operator==(const MarketInstance& other) const {
    return student_lists_ == other.student_lists_ &&
           school_lists_ == other.school_lists_ &&
           capacities_ == other.capacities_;
  }

 private:
  void build_rank_tables() {
    const int n_students = num_students();
    const int n_schools = num_schools();
    student_rank_.assign(n_students, std::vector<int>(n_schools, 0));
    for (StudentId t = 0; t < n_students; ++t) {
      auto& row = student_rank_[t];
      std::fill(row.begin(), row.end(), static_cast<int>(student_lists_[t].size()));
      for (int i = 0; i < static_cast<int>(student_lists_[t].size()); ++i) {
        const SchoolId s = student_lists_[t][i];
        if (s >= 0 && s < n_schools && row[s] == static_cast<int>(student_lists_[t].size()))
          row[s] = i;
      }
    }
    school_rank_.assign(n_schools, std::vector<int>(n_students, kNoRank));
    for (SchoolId s = 0; s < n_schools; ++s) {
      auto& row = school_rank_[s];
      for (int i = 0; i < static_cast<int>(school_lists_[s].size()); ++i) {
        const StudentId t = school_lists_[s][i];
        if (t >= 0 && t < n_students && row[t] == kNoRank) row[t] = i;
      }
    }
  }

  std::vector<std::vector<SchoolId>> student_lists_;
  std::vector<std::vector<StudentId>> school_lists_;
  std::vector<int> capacities_;
  std::vector<std::vector<int>> student_rank_;  // [t][s]
  std::vector<std::vector<int>> school_rank_;   // [s][t]
};

/// Student -> school assignment plus per-school rosters and any seats added
/// beyond the base capacities. Rosters are kept sorted by student id.
struct Matching {
  std::vector<SchoolId> assignment;
  std::vector<std::vector<StudentId>> rosters;
  std::vector<int> extra_seats;

  static Matching from_assignment(std::vector<SchoolId> assignment, int num_schools) {
    Matching m;
    m.assignment = std::move(assignment);
    m.rosters.assign(num_schools, {});
    m.extra_seats.assign(num_schools, 0);
    for (StudentId t = 0; t < static_cast<int>(m.assignment.size()); ++t) {
      const SchoolId s = m.assignment[t];
      if (s != kUnmatched) m.rosters[s].push_back(t);
    }
    return m;  // rosters sorted: students appended in id order
  }

  int roster_size(SchoolId s) const { return static_cast<int>(rosters[s].size()); }

  // Moves t to `to` (kUnmatched allowed), keeping rosters consistent.
  void reassign(StudentId t, SchoolId to) {
    const SchoolId from = assignment[t];
    if (from == to) return;
    if (from != kUnmatched) {
      auto& r = rosters[from];
      r.erase(std::find(r.begin(), r.end(), t));
    }
    if (to != kUnmatched) {
      auto& r = rosters[to];
      r.insert(std::upper_bound(r.begin(), r.end(), t), t);
    }
    assignment[t] = to;
  }

  bool operator==(const Matching&) const = default;
};

/// Structural checks on a market. Empty result means the instance is sound;
/// otherwise one message per violation.
inline std::vector<std::string> validate(const MarketInstance& m) {
  std::vector<std::string> out;
  const int n_students = m.num_students();
  const int n_schools = m.num_schools();
  if (static_cast<int>(m.capacities().size()) != n_schools)
    out.push_back("capacities size " + std::to_string(m.capacities().size()) +
                  " does not match school count " + std::to_string(n_schools));
  for (SchoolId s = 0; s < static_cast<int>(m.capacities().size()); ++s) {
    if (m.capacities()[s] < 0)
      out.push_back("negative capacity for school " + std::to_string(s));
  }
  std::vector<char> seen_school(n_schools, 0);
  for (StudentId t = 0; t < n_students; ++t) {
    std::fill(seen_school.begin(), seen_school.end(), 0);
    for (const SchoolId s : m.student_list(t)) {
      if (s < 0 || s >= n_schools) {
        out.push_back("student " + std::to_string(t) + " lists unknown school " + std::to_string(s));
      } else if (seen_school[s]++) {
        out.push_back("duplicate school " + std::to_string(s) + " in student " + std::to_string(t) + " list");
      }
    }
  }
  std::vector<char> seen_student(n_students, 0);
  for (SchoolId s = 0; s < n_schools; ++s) {
    std::fill(seen_student.begin(), seen_student.end(), 0);
    for (const StudentId t : m.school_list(s)) {
      if (t < 0 || t >= n_students) {
        out.push_back("school " + std::to_string(s) + " lists unknown student " + std::to_string(t));
      } else if (seen_student[t]++) {
        out.push_back("duplicate student " + std::to_string(t) + " in school " + std::to_string(s) + " list");
      }
    }
  }
  return out;
}

/// Consistency checks for a matching against its market.
inline std::vector<std::string> validate_matching(const MarketInstance& m, const Matching& match) {
  std::vector<std::string> out;
  const int n_students = m.num_students();
  const int n_schools = m.num_schools();
  if (static_cast<int>(match.assignment.size()) != n_students)
    out.push_back("assignment size does not match student count");
  if (static_cast<int>(match.rosters.size()) != n_schools ||
      static_cast<int>(match.extra_seats.size()) != n_schools) {
    out.push_back("roster/extra_seats size does not match school count");
    return out;
  }
  for (StudentId t = 0; t < static_cast<int>(match.assignment.size()); ++t) {
    const SchoolId s = match.assignment[t];
    if (s == kUnmatched) continue;
    if (s < 0 || s >= n_schools) {
      out.push_back("student " + std::to_string(t) + " assigned to unknown school");
      continue;
    }
    if (!m.lists(t, s))
      out.push_back("student " + std::to_string(t) + " assigned to unlisted school " + std::to_string(s));
    if (!std::binary_search(match.rosters[s].begin(), match.rosters[s].end(), t))
      out.push_back("student " + std::to_string(t) + " missing from roster of school " + std::to_string(s));
  }
  for (SchoolId s = 0; s < n_schools; ++s) {
    if (match.extra_seats[s] < 0) out.push_back("negative extra seats at school " + std::to_string(s));
    if (match.roster_size(s) > m.capacity(s) + match.extra_seats[s])
      out.push_back("school " + std::to_string(s) + " roster exceeds capacity plus extra seats");
    for (const StudentId t : match.rosters[s]) {
      if (t < 0 || t >= n_students || match.assignment[t] != s) {
        out.push_back("roster of school " + std::to_string(s) + " inconsistent with assignment");
        break;
      }
    }
  }
  return out;
}

}  // namespace matchmend
