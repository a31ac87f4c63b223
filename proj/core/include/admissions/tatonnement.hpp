#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "admissions/market.hpp"

namespace admissions {

/// Step schedule and termination settings for the simultaneous process.
struct TatonnementConfig {
  double alpha = 0.2;     ///< step scale, > 0
  double beta = 0.0;      ///< decay exponent, in [0, 1)
  double epsilon = 1e-10; ///< terminate when no cutoff moves more than this
  std::size_t max_iters = 1000;
  std::vector<double> p0;  ///< initial cutoffs, in [0,1]^n

  /// Throws std::invalid_argument on a bad parameter or a p0 of wrong
  /// length / out of range.
  void validate(std::size_t n_schools) const;
};

/// Step size alpha/(k+1)^beta for iteration k (0-based). With beta < 1 the
/// partial sums of the schedule diverge, which is what lets the process
/// reach an equilibrium arbitrarily far from its start.
double step_size(double alpha, double beta, std::size_t k);

/// One recorded iteration: cutoffs and excess demand before the update.
struct TrajectoryPoint {
  std::size_t iter = 0;
  std::vector<double> p;
  std::vector<double> excess;  ///< demand minus capacity at p
};

/// Full record of an iterative run. `converged` is false when the loop hit
/// its iteration cap while cutoffs were still moving; that is reported, not
/// thrown, since non-convergence is a legitimate experimental outcome.
struct Trajectory {
  std::vector<TrajectoryPoint> iterates;
  bool converged = false;
  std::vector<double> final_p;
};

/// Simultaneous process: every school moves its cutoff in the direction of
/// its own excess demand by step_size(alpha, beta, k), clamped to [0,1].
/// The clamp at 1 is ours: demand is undefined above 1, and a cutoff of 1
/// already yields zero demand.
Trajectory simultaneous_tatonnement(const MarketParams& params,
                                    const TatonnementConfig& config);

/// Successive process: each round, every school whose demand misses its
/// capacity jumps to the cutoff that would clear it exactly with the others
/// held fixed (or to 0 when no such cutoff exists). All schools move
/// simultaneously off the same round's demand. Stops when a round moves no
/// cutoff by more than 1e-12, or at max_rounds (converged = false).
Trajectory da_tatonnement(const MarketParams& params,
                          std::span<const double> p0,
                          std::size_t max_rounds);

}  // namespace admissions
