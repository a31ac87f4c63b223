#include "admissions/discrete.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <stdexcept>
#include <unordered_set>
#include <vector>

#include "admissions/random.hpp"

namespace admissions {

namespace {

MatchingResult summarize(const StudentSample& sample,
                         std::vector<int> assignment) {
  const std::size_t n_schools = sample.n_schools();
  MatchingResult result;
  result.fill_counts.assign(n_schools, 0);
  result.implied_cutoffs.assign(n_schools, 1.0);
  std::vector<double> min_score(n_schools,
                                std::numeric_limits<double>::infinity());
  for (std::size_t s = 0; s < assignment.size(); ++s) {
    const int c = assignment[s];
    if (c == kUnassigned) continue;
    ++result.fill_counts[static_cast<std::size_t>(c)];
    min_score[static_cast<std::size_t>(c)] =
        std::min(min_score[static_cast<std::size_t>(c)], sample.scores[s]);
  }
  for (std::size_t c = 0; c < n_schools; ++c) {
    if (result.fill_counts[c] > 0) result.implied_cutoffs[c] = min_score[c];
  }
  result.assignment = std::move(assignment);
  return result;
}

void check_capacities(const StudentSample& sample,
                      std::span<const long> capacities) {
  if (capacities.size() != sample.n_schools()) {
    throw std::invalid_argument("capacity vector does not match the sample");
  }
  for (long cap : capacities) {
    if (cap < 0) throw std::invalid_argument("capacities must be nonnegative");
  }
}

}  // namespace

StudentSample sample_students(const MarketParams& params, std::size_t n,
                              std::uint64_t seed) {
  params.validate();
  if (n == 0) throw std::invalid_argument("sample needs at least one student");
  const std::size_t n_schools = params.size();

  StudentSample sample;
  sample.seed = seed;
  Rng rng(seed);

  sample.scores.reserve(n);
  std::unordered_set<double> seen;
  seen.reserve(n * 2);
  while (sample.scores.size() < n) {
    const double score = rng.uniform();
    if (seen.insert(score).second) sample.scores.push_back(score);
  }

  std::vector<double> log_weight(n_schools);
  for (std::size_t c = 0; c < n_schools; ++c) {
    log_weight[c] = std::log(params.gamma[c]);
  }

  sample.pref_lists.resize(n);
  std::vector<double> util(n_schools);
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t c = 0; c < n_schools; ++c) {
      util[c] = log_weight[c] + rng.gumbel();
    }
    auto& list = sample.pref_lists[s];
    list.resize(n_schools);
    std::iota(list.begin(), list.end(), 0u);
    std::stable_sort(list.begin(), list.end(),
                     [&](std::uint32_t a, std::uint32_t b) {
                       return util[a] > util[b];
                     });
  }
  return sample;
}

std::vector<long> scaled_capacities(const MarketParams& params,
                                    std::size_t n) {
  std::vector<long> caps(params.size());
  for (std::size_t c = 0; c < params.size(); ++c) {
    caps[c] = static_cast<long>(
        std::floor(params.capacity[c] * static_cast<double>(n)));
  }
  return caps;
}

MatchingResult student_proposing_da(const StudentSample& sample,
                                    std::span<const long> capacities) {
  check_capacities(sample, capacities);
  const std::size_t n = sample.n_students();
  const std::size_t n_schools = sample.n_schools();

  // Each school keeps its tentative admits in a min-heap by score; the
  // displaced student resumes proposing from where she left off.
  using Held = std::pair<double, std::size_t>;  // (score, student)
  std::vector<std::priority_queue<Held, std::vector<Held>, std::greater<>>>
      held(n_schools);
  std::vector<std::size_t> next_choice(n, 0);
  std::vector<std::size_t> free_students(n);
  std::iota(free_students.begin(), free_students.end(), std::size_t{0});

  while (!free_students.empty()) {
    const std::size_t s = free_students.back();
    free_students.pop_back();
    bool placed = false;
    while (next_choice[s] < n_schools) {
      const auto c = sample.pref_lists[s][next_choice[s]++];
      const auto cap = static_cast<std::size_t>(capacities[c]);
      if (cap == 0) continue;
      if (held[c].size() < cap) {
        held[c].emplace(sample.scores[s], s);
        placed = true;
        break;
      }
      if (held[c].top().first < sample.scores[s]) {
        free_students.push_back(held[c].top().second);
        held[c].pop();
        held[c].emplace(sample.scores[s], s);
        placed = true;
        break;
      }
    }
    (void)placed;  // students with exhausted lists stay unassigned
  }

  std::vector<int> assignment(n, kUnassigned);
  for (std::size_t c = 0; c < n_schools; ++c) {
    while (!held[c].empty()) {
      assignment[held[c].top().second] = static_cast<int>(c);
      held[c].pop();
    }
  }
  return summarize(sample, std::move(assignment));
}

MatchingResult school_proposing_da(const StudentSample& sample,
                                   std::span<const long> capacities) {
  check_capacities(sample, capacities);
  const std::size_t n = sample.n_students();
  const std::size_t n_schools = sample.n_schools();

  // All schools share the score ranking, so each walks the same descending
  // order, offering each seat at most once per student. Students hold their
  // favorite offer so far; a displaced school resumes offering.
  std::vector<std::size_t> by_score(n);
  std::iota(by_score.begin(), by_score.end(), std::size_t{0});
  std::sort(by_score.begin(), by_score.end(), [&](std::size_t a, std::size_t b) {
    return sample.scores[a] > sample.scores[b];
  });

  std::vector<std::vector<std::uint32_t>> rank(n);
  for (std::size_t s = 0; s < n; ++s) {
    rank[s].resize(n_schools);
    for (std::uint32_t r = 0; r < n_schools; ++r) {
      rank[s][sample.pref_lists[s][r]] = r;
    }
  }

  std::vector<std::size_t> offer_pos(n_schools, 0);
  std::vector<long> holding(n_schools, 0);
  std::vector<int> held_school(n, kUnassigned);
  std::vector<std::size_t> active;
  for (std::size_t c = 0; c < n_schools; ++c) {
    if (capacities[c] > 0) active.push_back(c);
  }

  while (!active.empty()) {
    const std::size_t c = active.back();
    active.pop_back();
    while (holding[c] < capacities[c] && offer_pos[c] < n) {
      const std::size_t s = by_score[offer_pos[c]++];
      const int current = held_school[s];
      if (current == kUnassigned) {
        held_school[s] = static_cast<int>(c);
        ++holding[c];
      } else if (rank[s][c] < rank[s][static_cast<std::size_t>(current)]) {
        held_school[s] = static_cast<int>(c);
        ++holding[c];
        --holding[static_cast<std::size_t>(current)];
        active.push_back(static_cast<std::size_t>(current));
      }
      // else: the student prefers what she holds; offer spent
    }
  }
  return summarize(sample, std::move(held_school));
}

MatchingResult decentralized_choice(const StudentSample& sample,
                                    std::span<const double> p) {
  if (p.size() != sample.n_schools()) {
    throw std::invalid_argument("cutoff vector does not match the sample");
  }
  const std::size_t n = sample.n_students();
  std::vector<int> assignment(n, kUnassigned);
  for (std::size_t s = 0; s < n; ++s) {
    for (const auto c : sample.pref_lists[s]) {
      if (sample.scores[s] >= p[c]) {
        assignment[s] = static_cast<int>(c);
        break;
      }
    }
  }
  return summarize(sample, std::move(assignment));
}

std::size_t count_blocking_pairs(const StudentSample& sample,
                                 std::span<const long> capacities,
                                 std::span<const int> assignment) {
  check_capacities(sample, capacities);
  if (assignment.size() != sample.n_students()) {
    throw std::invalid_argument("assignment does not match the sample");
  }
  const std::size_t n_schools = sample.n_schools();

  std::vector<long> fill(n_schools, 0);
  std::vector<double> min_score(n_schools,
                                std::numeric_limits<double>::infinity());
  for (std::size_t s = 0; s < assignment.size(); ++s) {
    const int c = assignment[s];
    if (c == kUnassigned) continue;
    ++fill[static_cast<std::size_t>(c)];
    min_score[static_cast<std::size_t>(c)] =
        std::min(min_score[static_cast<std::size_t>(c)], sample.scores[s]);
  }

  std::size_t blocking = 0;
  for (std::size_t s = 0; s < assignment.size(); ++s) {
    for (const auto c : sample.pref_lists[s]) {
      if (assignment[s] != kUnassigned &&
          static_cast<int>(c) == assignment[s]) {
        break;  // remaining schools are dispreferred
      }
      const bool empty_seat = fill[c] < capacities[c];
      const bool outscored_admit = min_score[c] < sample.scores[s];
      if (empty_seat || outscored_admit) ++blocking;
    }
  }
  return blocking;
}

}  // namespace admissions
