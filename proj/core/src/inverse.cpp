#include "admissions/inverse.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "admissions/demand.hpp"
#include "admissions/errors.hpp"
#include "admissions/statics.hpp"

namespace admissions {

namespace {

constexpr double kValidationSlack = 1e-9;
constexpr double kDenomFloor = 1e-12;
constexpr double kTieSpread = 1e-12;

// Compensated (Kahan) accumulator. The recursion's remainders shrink toward
// zero, so naive accumulation of the weights would leak error into exactly
// the divisions that can least afford it.
class Kahan {
 public:
  void add(double x) {
    const double y = x - carry_;
    const double t = sum_ + y;
    carry_ = (t - sum_) - y;
    sum_ = t;
  }
  double value() const { return sum_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

std::string school_label(const MarketObservation& obs, std::size_t c) {
  if (c < obs.labels.size() && !obs.labels[c].empty()) return obs.labels[c];
  return "#" + std::to_string(c);
}

std::vector<double> normalized(std::vector<double> g) {
  Kahan total;
  for (double x : g) total.add(x);
  for (double& x : g) x /= total.value();
  return g;
}

double max_residual(const MarketObservation& obs,
                    std::span<const double> gamma) {
  const DemandResult at = demand(gamma, obs.cutoffs);
  double worst = 0.0;
  for (std::size_t c = 0; c < obs.size(); ++c) {
    worst = std::max(worst, std::abs(at.enrollment[c] - obs.demands[c]));
  }
  return worst;
}

PreferabilityEstimate finish(const MarketObservation& obs,
                             std::vector<double> gamma,
                             InversionMethod method, bool ties_perturbed) {
  PreferabilityEstimate est;
  est.gamma = normalized(std::move(gamma));
  est.method = method;
  est.residual = max_residual(obs, est.gamma);
  est.true_yield = true_yields(obs);
  est.ties_perturbed = ties_perturbed;
  return est;
}

}  // namespace

void MarketObservation::validate() const {
  if (cutoffs.empty() || cutoffs.size() != demands.size()) {
    throw DataError("observation is empty or has mismatched lengths");
  }
  double total = 0.0;
  for (std::size_t c = 0; c < size(); ++c) {
    if (!(cutoffs[c] >= 0.0) || cutoffs[c] >= 1.0) {
      throw DataError("cutoff outside [0,1) at " + school_label(*this, c));
    }
    if (!(demands[c] > 0.0) || demands[c] > 1.0 + kValidationSlack) {
      throw DataError("demand outside (0,1] at " + school_label(*this, c));
    }
    if (demands[c] > 1.0 - cutoffs[c] + kValidationSlack) {
      throw DataError("demand exceeds qualified mass at " +
                      school_label(*this, c));
    }
    total += demands[c];
  }
  if (total > 1.0 + kValidationSlack) {
    throw DataError("total demand exceeds the student mass");
  }
}

PreferabilityEstimate invert_recursion(const MarketObservation& obs) {
  obs.validate();
  const std::size_t n = obs.size();

  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return obs.cutoffs[a] < obs.cutoffs[b];
  });

  std::vector<double> ps(n);
  bool ties_perturbed = false;
  for (std::size_t k = 0; k < n; ++k) ps[k] = obs.cutoffs[idx[k]];
  for (std::size_t k = 1; k < n; ++k) {
    if (ps[k] <= ps[k - 1]) {
      ps[k] = ps[k - 1] + kTieSpread;
      ties_perturbed = true;
    }
  }

  // Walk the schools from most to least selective. Each step extends the
  // band sum by one term whose denominator is the weight mass not yet
  // recovered.
  std::vector<double> gamma_sorted(n);
  Kahan recovered;  // sum of weights already computed
  Kahan band_sum;
  double band_hi = 1.0;
  for (std::size_t k = n; k-- > 0;) {
    const std::size_t school = idx[k];
    const double remaining = 1.0 - recovered.value();
    if (remaining < kDenomFloor) {
      throw DegeneracyError("recovered weights exhaust the simplex before " +
                                school_label(obs, school),
                            school);
    }
    band_sum.add((band_hi - ps[k]) / remaining);
    const double g = obs.demands[idx[k]] / band_sum.value();
    if (!(g > 0.0) || !std::isfinite(g)) {
      throw DegeneracyError(
          "nonpositive weight recovered at " + school_label(obs, school),
          school);
    }
    gamma_sorted[k] = g;
    recovered.add(g);
    band_hi = ps[k];
  }

  std::vector<double> gamma(n);
  for (std::size_t k = 0; k < n; ++k) gamma[idx[k]] = gamma_sorted[k];
  return finish(obs, std::move(gamma), InversionMethod::kRecursion,
                ties_perturbed);
}

PreferabilityEstimate invert_rootfind(const MarketObservation& obs) {
  obs.validate();
  const std::size_t n = obs.size();

  std::vector<double> gamma(n, 1.0 / static_cast<double>(n));
  bool ties_perturbed = false;
  try {
    PreferabilityEstimate seed = invert_recursion(obs);
    gamma = std::move(seed.gamma);
    ties_perturbed = seed.ties_perturbed;
  } catch (const DegeneracyError&) {
    // fall back to the uniform start
  }

  // The demand system is scale-free in the weights, so the raw Jacobian is
  // singular along gamma. Replacing the most redundant row (the demand
  // identities are linearly dependent given the total mass) with the
  // normalization pins both null directions.
  const std::size_t drop = static_cast<std::size_t>(std::distance(
      obs.demands.begin(),
      std::max_element(obs.demands.begin(), obs.demands.end())));

  MarketParams fake;  // capacities are irrelevant to the demand Jacobian
  fake.capacity.assign(n, 1.0);

  const std::size_t max_iters = 100;
  double residual = max_residual(obs, gamma);
  for (std::size_t it = 0; it < max_iters && residual > 1e-14; ++it) {
    const auto ni = static_cast<Eigen::Index>(n);
    fake.gamma = gamma;
    Eigen::MatrixXd jac =
        unconstrained_jacobians(fake, obs.cutoffs).demand_by_weight;
    Eigen::VectorXd rhs(ni);
    const DemandResult at = demand(gamma, obs.cutoffs);
    double gamma_total = 0.0;
    for (std::size_t c = 0; c < n; ++c) gamma_total += gamma[c];
    for (std::size_t c = 0; c < n; ++c) {
      rhs(static_cast<Eigen::Index>(c)) =
          -(at.enrollment[c] - obs.demands[c]);
    }
    jac.row(static_cast<Eigen::Index>(drop)).setOnes();
    rhs(static_cast<Eigen::Index>(drop)) = -(gamma_total - 1.0);

    const Eigen::VectorXd delta = jac.partialPivLu().solve(rhs);
    if (!delta.allFinite()) break;

    double t = 1.0;
    for (std::size_t c = 0; c < n; ++c) {
      const double d = delta(static_cast<Eigen::Index>(c));
      if (d < 0.0) t = std::min(t, -0.95 * gamma[c] / d);
    }
    std::vector<double> candidate(n);
    bool improved = false;
    for (int half = 0; half < 40; ++half) {
      for (std::size_t c = 0; c < n; ++c) {
        candidate[c] = gamma[c] + t * delta(static_cast<Eigen::Index>(c));
      }
      const double r = max_residual(obs, candidate);
      if (r < residual) {
        gamma = candidate;
        residual = r;
        improved = true;
        break;
      }
      t *= 0.5;
    }
    if (!improved) break;
  }

  PreferabilityEstimate est = finish(obs, std::move(gamma),
                                     InversionMethod::kRootFinder,
                                     ties_perturbed);
  est.converged = est.residual <= 1e-9;
  return est;
}

std::vector<std::pair<double, double>> demand_curve(
    std::span<const double> gamma, std::span<const double> p,
    std::size_t school, std::span<const double> grid) {
  if (school >= p.size()) throw std::invalid_argument("school out of range");
  std::vector<double> probe(p.begin(), p.end());
  std::vector<std::pair<double, double>> curve;
  curve.reserve(grid.size());
  for (double x : grid) {
    probe[school] = x;  // demand() validates the range
    curve.emplace_back(x, demand(gamma, probe).enrollment[school]);
  }
  return curve;
}

double target_cutoff(std::span<const double> gamma, std::span<const double> p,
                     std::size_t school, double target) {
  const auto root = cutoff_clearing_demand(gamma, p, school, target);
  if (!root) {
    std::vector<double> probe(p.begin(), p.end());
    probe[school] = 0.0;
    const double bound = demand(gamma, probe).enrollment[school];
    throw InfeasibleTargetError(
        "target demand " + std::to_string(target) +
            " exceeds the maximum achievable " + std::to_string(bound),
        bound);
  }
  return *root;
}

std::vector<double> true_yields(const MarketObservation& obs) {
  std::vector<double> yields(obs.size());
  for (std::size_t c = 0; c < obs.size(); ++c) {
    yields[c] = obs.demands[c] / (1.0 - obs.cutoffs[c]);
  }
  return yields;
}

}  // namespace admissions
