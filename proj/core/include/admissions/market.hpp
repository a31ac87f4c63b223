#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <span>
#include <vector>

namespace admissions {

/// Exogenous description of a market: one preferability weight and one
/// capacity per school. Weights may be on any positive scale; demand and
/// equilibrium cutoffs are invariant to rescaling the whole weight vector.
/// Immutable by convention once constructed; all operations take it const.
struct MarketParams {
  std::vector<double> gamma;     ///< preferability weight per school, > 0
  std::vector<double> capacity;  ///< target class size as a fraction of the
                                 ///< unit student mass, > 0 (may exceed 1)

  std::size_t size() const { return gamma.size(); }

  /// Sum of all preferability weights.
  double gamma_total() const;

  /// Throws std::invalid_argument unless all weights and capacities are
  /// strictly positive, finite, and the vectors have equal nonzero length.
  void validate() const;
};

/// Builds params from log-preferabilities (weight = exp of each entry).
MarketParams market_from_log_weights(std::span<const double> log_weights,
                                     std::span<const double> capacity);

/// Per-school admission thresholds in [0,1] together with the permutation
/// that sorts an associated key ascending (the cutoffs themselves, or the
/// competitiveness ratios gamma/capacity, depending on provenance).
struct CutoffVector {
  std::vector<double> p;             ///< original school order
  std::vector<std::size_t> perm;     ///< perm[k] = school at sorted rank k

  std::size_t size() const { return p.size(); }
};

/// Stable argsort of the cutoff values; ties keep original school order.
CutoffVector make_cutoff_vector(std::vector<double> p);

/// Permutation of school indices sorting gamma/capacity ascending, ties
/// broken by original index. At equilibrium the cutoffs are nondecreasing
/// in this order.
std::vector<std::size_t> sort_by_competitiveness(const MarketParams& params);

/// Structural matrices of the demand system in sorted coordinates.
///
/// A is upper triangular with strictly negative diagonal; the demand at a
/// sorted cutoff vector p is A*p + gamma/Gamma. A_inv is its closed-form
/// inverse (diagonal -prefix_sum/gamma, -1 above, zero below). T is the
/// (b-1) x (n-b+1) block coupling underdemanded schools to overdemanded
/// capacities; empty when b_index == 1.
struct StructMatrices {
  Eigen::MatrixXd A;
  Eigen::MatrixXd A_inv;
  std::size_t b_index = 1;  ///< 1-based rank of first school with a positive
                            ///< equilibrium cutoff; n+1 if none
  Eigen::MatrixXd T;
};

/// Demand coefficient matrix in the coordinates given by `order`.
/// Entries come from prefix sums of the permuted weights, never from a
/// generic inversion.
Eigen::MatrixXd build_A(const MarketParams& params,
                        std::span<const std::size_t> order);

/// Closed-form inverse of build_A for the same ordering.
Eigen::MatrixXd build_A_inverse(const MarketParams& params,
                                std::span<const std::size_t> order);

/// T block for a given first-positive-cutoff rank (1-based, in [1, n+1]).
/// All columns are identical; every entry is strictly negative.
Eigen::MatrixXd build_T(const MarketParams& params,
                        std::span<const std::size_t> order,
                        std::size_t b_index);

/// Convenience aggregate of the three builders.
StructMatrices build_struct_matrices(const MarketParams& params,
                                     std::span<const std::size_t> order,
                                     std::size_t b_index);

}  // namespace admissions
