#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "admissions/market.hpp"

namespace admissions {

/// Observed market state: one cutoff and one demand share per school.
/// Yields are optional display-only data carried through to reports.
struct MarketObservation {
  std::vector<double> cutoffs;   ///< in [0, 1)
  std::vector<double> demands;   ///< in (0, 1], summing to at most 1
  std::vector<std::string> labels;
  std::vector<std::optional<double>> yields;  ///< reported yield, may be empty

  std::size_t size() const { return cutoffs.size(); }

  /// Throws DataError when the data cannot come from any cutoff market:
  /// demand above the qualified mass 1 - p_c, total demand above 1, or a
  /// cutoff at/above 1 (slack 1e-9 on each check).
  void validate() const;
};

enum class InversionMethod { kRecursion, kRootFinder };

/// Recovered preferability weights, normalized to sum to 1.
struct PreferabilityEstimate {
  std::vector<double> gamma;
  InversionMethod method = InversionMethod::kRecursion;
  double residual = 0.0;  ///< max |demand(gamma, p_obs) - D_obs|
  std::vector<double> true_yield;  ///< D_c / (1 - p_c)
  bool converged = true;       ///< false: best effort after iteration cap
  bool ties_perturbed = false; ///< tied observed cutoffs were spread by 1e-12
};

/// Closed-form recovery: the most selective school's weight is pinned by
/// its own band, and the rest follow in descending cutoff order. Suffix
/// sums are accumulated with compensated summation since the recursion
/// divides by progressively smaller remainders. Throws DegeneracyError
/// (naming the school) when a weight comes out nonpositive or a remainder
/// falls below 1e-12.
PreferabilityEstimate invert_recursion(const MarketObservation& obs);

/// Damped Newton on the demand system over the weight simplex, started
/// from the recursion output (or uniform weights if the recursion is
/// degenerate). More accurate than the recursion when cutoffs cluster.
/// Non-convergence yields converged = false with the best residual found.
PreferabilityEstimate invert_rootfind(const MarketObservation& obs);

/// Demand at school `school` for each cutoff value in `grid`, holding all
/// other cutoffs fixed. The curve is piecewise linear and convex, and
/// passes through (1, 0).
std::vector<std::pair<double, double>> demand_curve(
    std::span<const double> gamma, std::span<const double> p,
    std::size_t school, std::span<const double> grid);

/// Cutoff at which the school's demand equals `target`, others fixed.
/// Exact piecewise-linear inverse. Throws InfeasibleTargetError (with the
/// achievable bound) when the target exceeds the demand at cutoff zero, and
/// std::invalid_argument when target is not positive.
double target_cutoff(std::span<const double> gamma, std::span<const double> p,
                     std::size_t school, double target);

/// D_c / (1 - p_c): the share of qualified students who enroll, whether or
/// not they applied.
std::vector<double> true_yields(const MarketObservation& obs);

}  // namespace admissions
