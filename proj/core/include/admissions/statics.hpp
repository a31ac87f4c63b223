#pragma once

#include <Eigen/Dense>
#include <span>

#include "admissions/market.hpp"

namespace admissions {

/// Sensitivities of demand and appeal when every school controls its own
/// cutoff (no capacity coupling). All matrices are n x n in original school
/// order; entry (c, k) is the derivative of school c's quantity with
/// respect to school k's variable.
struct UnconstrainedJacobians {
  Eigen::MatrixXd demand_by_cutoff;  ///< equals the A matrix of the piece
  Eigen::MatrixXd appeal_by_cutoff;  ///< A * diag(p)
  Eigen::MatrixXd demand_by_weight;
  Eigen::MatrixXd appeal_by_weight;
  bool tie_detected = false;  ///< cutoffs within tie_tol of each other: the
                              ///< true derivative set is the hull of the
                              ///< adjacent pieces; values reported are for
                              ///< the stable-sort piece
};

/// Closed-form derivatives at a fixed cutoff vector. When two cutoffs are
/// within `tie_tol` the result is flagged rather than rejected.
UnconstrainedJacobians unconstrained_jacobians(const MarketParams& params,
                                               std::span<const double> p,
                                               double tie_tol = 1e-9);

/// Sensitivities of the equilibrium cutoffs and equilibrium demand to the
/// market parameters, n x n in original school order.
///
/// Rows split by regime: a school whose unclipped cutoff is negative gains
/// demand (never cutoff) from extra weight, while a school with a positive
/// cutoff gains cutoff (never demand). Weight changes at overdemanded
/// schools leave underdemanded schools' demand unchanged: the leftover mass
/// they split depends only on the capacities above the threshold.
struct EquilibriumJacobians {
  Eigen::MatrixXd cutoff_by_weight;
  Eigen::MatrixXd demand_by_weight;
  Eigen::MatrixXd cutoff_by_capacity;
  Eigen::MatrixXd demand_by_capacity;  ///< block [0 T; 0 I] in sorted coords
};

/// Closed-form equilibrium derivatives. Throws KnifeEdgeError (naming the
/// school) if any unclipped cutoff lies within `knife_tol` of zero, where
/// the one-sided derivatives disagree.
EquilibriumJacobians equilibrium_jacobians(const MarketParams& params,
                                           double knife_tol = 1e-9);

}  // namespace admissions
