#include "admissions/demand.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace admissions {

namespace {

void check_cutoffs(std::span<const double> gamma, std::span<const double> p) {
  if (gamma.size() != p.size() || gamma.empty()) {
    throw std::invalid_argument("gamma and cutoff lengths differ or are zero");
  }
  for (std::size_t c = 0; c < p.size(); ++c) {
    if (!(p[c] >= 0.0 && p[c] <= 1.0)) {
      throw std::domain_error("cutoff outside [0,1] at school " +
                              std::to_string(c));
    }
  }
}

struct Band {
  double value = 0.0;        // common cutoff of the group opening this band
  double gamma_prefix = 0.0; // total weight admitted on the band
  std::size_t begin = 0;     // [begin, end) range into the sorted index
  std::size_t end = 0;
};

// Groups tied cutoffs and accumulates weight prefixes. Each group's weight
// is summed in ascending value order so the result does not depend on how
// tied schools are labeled, down to the last bit.
std::vector<Band> make_bands(std::span<const double> gamma,
                             std::span<const double> p,
                             std::vector<std::size_t>& idx) {
  idx.resize(p.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return p[a] < p[b]; });

  std::vector<Band> bands;
  std::vector<double> group;
  double prefix = 0.0;
  std::size_t k = 0;
  while (k < idx.size()) {
    std::size_t j = k;
    group.clear();
    while (j < idx.size() && p[idx[j]] == p[idx[k]]) {
      group.push_back(gamma[idx[j]]);
      ++j;
    }
    std::sort(group.begin(), group.end());
    double gsum = 0.0;
    for (double g : group) gsum += g;
    prefix += gsum;
    bands.push_back({p[idx[k]], prefix, k, j});
    k = j;
  }
  return bands;
}

}  // namespace

DemandResult demand(std::span<const double> gamma, std::span<const double> p) {
  check_cutoffs(gamma, p);
  std::vector<std::size_t> idx;
  const std::vector<Band> bands = make_bands(gamma, p, idx);
  const std::size_t nb = bands.size();

  // Suffix sums of band_width / admitted_weight give each school's demand
  // multiplier; squared-endpoint widths give the appeal multiplier.
  std::vector<double> mult_d(nb), mult_l(nb);
  double acc_d = 0.0;
  double acc_l = 0.0;
  for (std::size_t g = nb; g-- > 0;) {
    const double lo = bands[g].value;
    const double hi = (g + 1 < nb) ? bands[g + 1].value : 1.0;
    acc_d += (hi - lo) / bands[g].gamma_prefix;
    acc_l += 0.5 * (hi * hi - lo * lo) / bands[g].gamma_prefix;
    mult_d[g] = acc_d;
    mult_l[g] = acc_l;
  }

  DemandResult result;
  result.enrollment.resize(p.size());
  result.appeal.resize(p.size());
  for (std::size_t g = 0; g < nb; ++g) {
    for (std::size_t k = bands[g].begin; k < bands[g].end; ++k) {
      result.enrollment[idx[k]] = gamma[idx[k]] * mult_d[g];
      result.appeal[idx[k]] = gamma[idx[k]] * mult_l[g];
    }
  }
  result.unassigned_mass = bands.front().value;
  return result;
}

DemandResult demand(const MarketParams& params, std::span<const double> p) {
  params.validate();
  return demand(std::span<const double>(params.gamma), p);
}

EquilibriumCertificate verify_equilibrium(const MarketParams& params,
                                          std::span<const double> p,
                                          double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  const DemandResult at = demand(params, p);
  EquilibriumCertificate cert;
  double ncp = 0.0;
  double total_demand = 0.0;
  for (std::size_t c = 0; c < params.size(); ++c) {
    const double excess = at.enrollment[c] - params.capacity[c];
    cert.max_capacity_violation = std::max(cert.max_capacity_violation, excess);
    if (p[c] > 0.0) {
      cert.max_stability_violation =
          std::max(cert.max_stability_violation, std::abs(excess));
    }
    ncp += -excess * p[c];
    total_demand += at.enrollment[c];
  }
  cert.max_capacity_violation = std::max(cert.max_capacity_violation, 0.0);
  cert.ncp_residual = std::abs(ncp);
  const double total_capacity =
      std::accumulate(params.capacity.begin(), params.capacity.end(), 0.0);
  cert.clearing_gap = std::abs(total_demand - std::min(1.0, total_capacity));
  return cert;
}

std::optional<double> cutoff_clearing_demand(std::span<const double> gamma,
                                             std::span<const double> p,
                                             std::size_t school,
                                             double target) {
  if (school >= p.size()) throw std::invalid_argument("school out of range");
  if (!(target > 0.0)) throw std::invalid_argument("target must be positive");

  std::vector<double> probe(p.begin(), p.end());
  const auto own_demand = [&](double x) {
    probe[school] = x;
    return demand(gamma, probe).enrollment[school];
  };

  // The map is linear between consecutive distinct cutoffs of the other
  // schools and strictly decreasing everywhere, so scanning the breakpoints
  // brackets the unique root and interpolation recovers it exactly.
  std::vector<double> breaks;
  breaks.reserve(p.size() + 1);
  breaks.push_back(0.0);
  breaks.push_back(1.0);
  for (std::size_t j = 0; j < p.size(); ++j) {
    if (j != school && p[j] > 0.0 && p[j] < 1.0) breaks.push_back(p[j]);
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

  double left = breaks.front();
  double d_left = own_demand(left);
  if (d_left < target) return std::nullopt;
  if (d_left == target) return left;
  for (std::size_t i = 1; i < breaks.size(); ++i) {
    const double right = breaks[i];
    const double d_right = own_demand(right);
    if (d_right <= target) {
      return left + (d_left - target) * (right - left) / (d_left - d_right);
    }
    left = right;
    d_left = d_right;
  }
  return 1.0;  // target below the demand at cutoff 1, i.e. target <= 0
}

}  // namespace admissions
