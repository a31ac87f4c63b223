#include "admissions/tatonnement.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "admissions/demand.hpp"

namespace admissions {

void TatonnementConfig::validate(std::size_t n_schools) const {
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
  if (!(beta >= 0.0 && beta < 1.0)) {
    throw std::invalid_argument("beta must lie in [0, 1)");
  }
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  if (max_iters == 0) throw std::invalid_argument("max_iters must be positive");
  if (p0.size() != n_schools) {
    throw std::invalid_argument("p0 length does not match the market");
  }
  for (double x : p0) {
    if (!(x >= 0.0 && x <= 1.0)) {
      throw std::invalid_argument("p0 entries must lie in [0,1]");
    }
  }
}

double step_size(double alpha, double beta, std::size_t k) {
  return alpha / std::pow(static_cast<double>(k + 1), beta);
}

Trajectory simultaneous_tatonnement(const MarketParams& params,
                                    const TatonnementConfig& config) {
  params.validate();
  config.validate(params.size());
  const std::size_t n = params.size();

  Trajectory trajectory;
  std::vector<double> p = config.p0;
  for (std::size_t k = 0; k < config.max_iters; ++k) {
    const DemandResult at = demand(params, p);
    TrajectoryPoint point;
    point.iter = k;
    point.p = p;
    point.excess.resize(n);
    for (std::size_t c = 0; c < n; ++c) {
      point.excess[c] = at.enrollment[c] - params.capacity[c];
    }

    const double step = step_size(config.alpha, config.beta, k);
    double max_move = 0.0;
    for (std::size_t c = 0; c < n; ++c) {
      const double next = std::clamp(p[c] + step * point.excess[c], 0.0, 1.0);
      max_move = std::max(max_move, std::abs(next - p[c]));
      p[c] = next;
    }
    trajectory.iterates.push_back(std::move(point));
    if (max_move < config.epsilon) {
      trajectory.converged = true;
      break;
    }
  }
  trajectory.final_p = std::move(p);
  return trajectory;
}

Trajectory da_tatonnement(const MarketParams& params,
                          std::span<const double> p0,
                          std::size_t max_rounds) {
  params.validate();
  if (p0.size() != params.size()) {
    throw std::invalid_argument("p0 length does not match the market");
  }
  const std::size_t n = params.size();
  constexpr double kSettled = 1e-12;

  Trajectory trajectory;
  std::vector<double> p(p0.begin(), p0.end());
  for (std::size_t round = 0; round < max_rounds; ++round) {
    const DemandResult at = demand(params, p);
    TrajectoryPoint point;
    point.iter = round;
    point.p = p;
    point.excess.resize(n);
    for (std::size_t c = 0; c < n; ++c) {
      point.excess[c] = at.enrollment[c] - params.capacity[c];
    }

    std::vector<double> next = p;
    for (std::size_t c = 0; c < n; ++c) {
      if (point.excess[c] == 0.0) continue;
      next[c] = cutoff_clearing_demand(params.gamma, p, c, params.capacity[c])
                    .value_or(0.0);
    }
    double max_move = 0.0;
    for (std::size_t c = 0; c < n; ++c) {
      max_move = std::max(max_move, std::abs(next[c] - p[c]));
    }
    p = std::move(next);
    trajectory.iterates.push_back(std::move(point));
    if (max_move < kSettled) {
      trajectory.converged = true;
      break;
    }
  }
  trajectory.final_p = std::move(p);
  return trajectory;
}

}  // namespace admissions
