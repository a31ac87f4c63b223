#pragma once

#include <cstddef>
#include <vector>

#include "admissions/demand.hpp"
#include "admissions/market.hpp"

namespace admissions {

/// The unique market equilibrium.
///
/// `cutoffs.p` is in original school order; `cutoffs.perm` sorts the
/// competitiveness ratios (and therefore the cutoffs) ascending.
/// `pre_image` holds the unclipped solution of the triangular system in
/// sorted coordinates; the equilibrium cutoffs are its positive parts.
struct EquilibriumSolution {
  CutoffVector cutoffs;
  std::vector<double> pre_image;  ///< sorted coordinates, may be negative
  std::size_t b_index = 1;        ///< 1-based rank of first positive cutoff;
                                  ///< n+1 when every cutoff is zero
  DemandResult demand_at_solution;
};

/// Closed-form equilibrium via back-substitution with prefix sums; O(n)
/// after the competitiveness sort. Every market has exactly one.
EquilibriumSolution solve(const MarketParams& params);

/// Equilibrium demand from the block closed form: capacity for schools with
/// positive cutoffs, a common split of the leftover mass for the rest.
/// Agrees with demand(params, cutoffs) to rounding error.
std::vector<double> equilibrium_demand(const MarketParams& params,
                                       const EquilibriumSolution& solution);

/// Gap pre_image[rank+1] - pre_image[rank] between adjacent sorted schools,
/// via the product formula prefix_gamma * (q/gamma ratio difference).
/// Exposed for property suites; throws NumericError if the two routes
/// disagree beyond rounding. `rank` is 0-based in sorted order, < n-1.
double adjacent_gap(const MarketParams& params, std::size_t rank);

}  // namespace admissions
