#include "admissions/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "admissions/errors.hpp"

namespace admissions {

namespace {

// Unclipped cutoffs in sorted coordinates. Back-substitution of the
// triangular system collapses to one pass over suffix capacity sums:
//   pre[c] = 1 - sum_{j>c} q_j - q_c * prefix_gamma_c / gamma_c
std::vector<double> pre_image_sorted(const MarketParams& params,
                                     std::span<const std::size_t> order) {
  const std::size_t n = params.size();
  std::vector<double> pre(n);
  double suffix_q = 0.0;
  for (std::size_t k = n; k-- > 0;) {
    pre[k] = suffix_q;  // stash sum_{j>k} q_j
    suffix_q += params.capacity[order[k]];
  }
  double prefix_g = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double g = params.gamma[order[k]];
    const double q = params.capacity[order[k]];
    prefix_g += g;
    pre[k] = 1.0 - pre[k] - q * prefix_g / g;
  }
  return pre;
}

}  // namespace

EquilibriumSolution solve(const MarketParams& params) {
  params.validate();
  const std::size_t n = params.size();

  EquilibriumSolution solution;
  solution.cutoffs.perm = sort_by_competitiveness(params);
  solution.pre_image = pre_image_sorted(params, solution.cutoffs.perm);

  solution.b_index = n + 1;
  for (std::size_t k = 0; k < n; ++k) {
    if (solution.pre_image[k] > 0.0) {
      solution.b_index = k + 1;
      break;
    }
  }

  solution.cutoffs.p.assign(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    solution.cutoffs.p[solution.cutoffs.perm[k]] =
        std::max(0.0, solution.pre_image[k]);
  }
  solution.demand_at_solution = demand(params, solution.cutoffs.p);
  return solution;
}

std::vector<double> equilibrium_demand(const MarketParams& params,
                                       const EquilibriumSolution& solution) {
  const std::size_t n = params.size();
  const std::size_t b = solution.b_index;  // 1-based
  const double total = params.gamma_total();

  double below_weight = 0.0;
  for (std::size_t k = 0; k + 1 < b; ++k) {
    below_weight += params.gamma[solution.cutoffs.perm[k]];
  }
  double spare = 0.0;  // sum over clearing schools of q_j - gamma_j / Gamma
  for (std::size_t k = b - 1; k < n; ++k) {
    const std::size_t c = solution.cutoffs.perm[k];
    spare += params.capacity[c] - params.gamma[c] / total;
  }

  std::vector<double> result(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t c = solution.cutoffs.perm[k];
    if (k + 1 >= b) {
      result[c] = params.capacity[c];
    } else {
      result[c] =
          -params.gamma[c] / below_weight * spare + params.gamma[c] / total;
    }
  }
  return result;
}

double adjacent_gap(const MarketParams& params, std::size_t rank) {
  params.validate();
  if (rank + 1 >= params.size()) {
    throw std::invalid_argument("rank must address two adjacent sorted schools");
  }
  const auto order = sort_by_competitiveness(params);
  double prefix = 0.0;
  for (std::size_t k = 0; k <= rank; ++k) prefix += params.gamma[order[k]];
  const std::size_t lo = order[rank];
  const std::size_t hi = order[rank + 1];
  const double gap = prefix * (params.capacity[lo] / params.gamma[lo] -
                               params.capacity[hi] / params.gamma[hi]);

  const auto pre = pre_image_sorted(params, order);
  const double direct = pre[rank + 1] - pre[rank];
  const double scale =
      std::max({1.0, std::abs(pre[rank]), std::abs(pre[rank + 1])});
  if (std::abs(gap - direct) > 1e-12 * scale) {
    throw NumericError("adjacent gap routes disagree at rank " +
                       std::to_string(rank));
  }
  return gap;
}

}  // namespace admissions
