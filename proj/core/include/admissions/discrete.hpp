#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "admissions/market.hpp"

namespace admissions {

/// A school index in matching outputs; kUnassigned marks students matched
/// nowhere.
inline constexpr int kUnassigned = -1;

/// Finite roster of students drawn from the market's type distribution:
/// one shared score per student, one complete preference list per student.
struct StudentSample {
  std::vector<double> scores;  ///< pairwise distinct, in [0,1)
  std::vector<std::vector<std::uint32_t>> pref_lists;  ///< most-preferred first
  std::uint64_t seed = 0;

  std::size_t n_students() const { return scores.size(); }
  std::size_t n_schools() const {
    return pref_lists.empty() ? 0 : pref_lists.front().size();
  }
};

/// Draws n students: scores i.i.d. uniform (redrawn on the measure-zero
/// event of a collision), preference lists by descending log-weight plus
/// independent Gumbel noise. The Gumbel-max ordering is distributed exactly
/// as sequential MNL sampling without replacement. Deterministic per seed.
StudentSample sample_students(const MarketParams& params, std::size_t n,
                              std::uint64_t seed);

/// Integer seats per school for a roster of n: floor(capacity * n).
/// Leftover students may end up unassigned.
std::vector<long> scaled_capacities(const MarketParams& params, std::size_t n);

/// A matching of the sample plus its summary statistics. implied_cutoffs
/// holds the minimum admitted score per school, or 1 for an empty school.
struct MatchingResult {
  std::vector<int> assignment;          ///< per student
  std::vector<double> implied_cutoffs;  ///< per school
  std::vector<long> fill_counts;        ///< per school
};

/// Student-proposing deferred acceptance. Stable; students get their best
/// stable school.
MatchingResult student_proposing_da(const StudentSample& sample,
                                    std::span<const long> capacities);

/// School-proposing deferred acceptance: schools offer seats down the
/// common score order, students keep their favorite offer. Stable.
MatchingResult school_proposing_da(const StudentSample& sample,
                                   std::span<const long> capacities);

/// Decentralized choice under posted cutoffs: each student takes her
/// favorite school among those whose cutoff she meets. Fill counts are not
/// capacity-constrained.
MatchingResult decentralized_choice(const StudentSample& sample,
                                    std::span<const double> p);

/// Exhaustive audit: number of student-school pairs (s, c) where s prefers
/// c to her assignment and c either has an empty seat or admitted a student
/// scoring below s. Zero for every stable matching.
std::size_t count_blocking_pairs(const StudentSample& sample,
                                 std::span<const long> capacities,
                                 std::span<const int> assignment);

}  // namespace admissions
