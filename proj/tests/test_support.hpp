#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

#include "admissions/demand.hpp"
#include "admissions/equilibrium.hpp"
#include "admissions/market.hpp"
#include "admissions/random.hpp"
#include "admissions/tatonnement.hpp"

namespace test_support {

// The running fixture: four schools with integer weights 2,1,3,6 and
// capacities (.3,.1,.2,.2). All four clear at cutoffs (.2,.3,.4,.6), and
// the weight scale matches the published sensitivity matrices.
inline admissions::MarketParams pallet_town() {
  return {{2.0, 1.0, 3.0, 6.0}, {0.3, 0.1, 0.2, 0.2}};
}

inline std::vector<double> pallet_cutoffs() { return {0.2, 0.3, 0.4, 0.6}; }

inline admissions::MarketParams random_market(admissions::Rng& rng,
                                              std::size_t n,
                                              double q_lo = 0.0,
                                              double q_hi = 0.1) {
  admissions::MarketParams params;
  params.gamma.resize(n);
  params.capacity.resize(n);
  for (std::size_t c = 0; c < n; ++c) {
    params.gamma[c] = std::exp(rng.uniform());
    params.capacity[c] = q_lo + (q_hi - q_lo) * rng.uniform_open();
  }
  return params;
}

// Independent demand route: assemble the coefficient matrix for the sorted
// piece and evaluate it as a dense product.
inline std::vector<double> matrix_demand(const admissions::MarketParams& params,
                                         const std::vector<double>& p) {
  const auto cv = admissions::make_cutoff_vector(p);
  const auto a_matrix = admissions::build_A(params, cv.perm);
  const std::size_t n = params.size();
  const double total = params.gamma_total();
  std::vector<double> result(n);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = params.gamma[cv.perm[i]] / total;
    for (std::size_t j = 0; j < n; ++j) {
      acc += a_matrix(static_cast<Eigen::Index>(i),
                      static_cast<Eigen::Index>(j)) *
             p[cv.perm[j]];
    }
    result[cv.perm[i]] = acc;
  }
  return result;
}

// Equilibrium route that never touches the closed form: long simultaneous
// adjustment with a slowly decaying step.
inline std::vector<double> brute_force_equilibrium(
    const admissions::MarketParams& params, std::size_t iters = 60000) {
  admissions::TatonnementConfig config;
  config.alpha = 0.5;
  config.beta = 0.1;
  config.epsilon = 1e-13;
  config.max_iters = iters;
  config.p0.assign(params.size(), 0.5);
  return admissions::simultaneous_tatonnement(params, config).final_p;
}

inline double central_difference(const std::function<double(double)>& f,
                                 double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

inline double fd_step(double x) { return 1e-6 * std::max(1.0, std::abs(x)); }

inline double max_abs_diff(const std::vector<double>& a,
                           const std::vector<double>& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    worst = std::max(worst, std::abs(a[i] - b[i]));
  }
  return worst;
}

}  // namespace test_support
