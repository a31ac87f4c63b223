#pragma once

#include <optional>
#include <span>
#include <vector>

#include "admissions/market.hpp"

namespace admissions {

/// Enrollment mass and appeal per school at a given cutoff vector.
struct DemandResult {
  std::vector<double> enrollment;  ///< mass choosing each school, in [0,1]
  std::vector<double> appeal;      ///< integral of scores over each school's
                                   ///< admits; 0 <= appeal_c <= enrollment_c
  double unassigned_mass = 0.0;    ///< mass below every cutoff
};

/// Demand and appeal of the single-score MNL market at cutoffs p in [0,1]^n.
///
/// Evaluated by sorting the cutoffs, forming the n+1 consideration bands
/// (the band past the largest cutoff ends at 1), and accumulating each
/// school's share of every band it belongs to. Runs in O(n log n).
/// Tied cutoffs are grouped and their weights summed in a canonical order,
/// so the result is bit-identical under any relabeling of tied schools.
///
/// Throws std::domain_error if any cutoff lies outside [0,1].
DemandResult demand(std::span<const double> gamma, std::span<const double> p);
DemandResult demand(const MarketParams& params, std::span<const double> p);

/// Certificate of how far (gamma, capacity, p) is from market equilibrium.
/// All fields are nonnegative; the caller judges them against a tolerance.
struct EquilibriumCertificate {
  double max_capacity_violation = 0.0;   ///< max(0, max_c D_c - q_c)
  double max_stability_violation = 0.0;  ///< max |D_c - q_c| over schools
                                         ///< with p_c > 0
  double ncp_residual = 0.0;             ///< |(q - D)^T p|
  double clearing_gap = 0.0;             ///< |sum D - min(1, sum q)|

  bool within(double tol) const {
    return max_capacity_violation <= tol && max_stability_violation <= tol &&
           ncp_residual <= tol;
  }
};

/// Evaluates the equilibrium conditions at p. `tol` only marks whether the
/// market-clearing identity was checked under an (approximately) clearing
/// cutoff vector; the violation fields are reported unconditionally.
EquilibriumCertificate verify_equilibrium(const MarketParams& params,
                                          std::span<const double> p,
                                          double tol);

/// Exact root of the piecewise-linear map x -> demand at school `school`
/// when its own cutoff is x and the others stay fixed. The demand is
/// strictly decreasing in x, so the root is unique when it exists; returns
/// nullopt when even x = 0 cannot reach `target`.
std::optional<double> cutoff_clearing_demand(std::span<const double> gamma,
                                             std::span<const double> p,
                                             std::size_t school,
                                             double target);

}  // namespace admissions
