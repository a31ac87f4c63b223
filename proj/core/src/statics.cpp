#include "admissions/statics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "admissions/equilibrium.hpp"
#include "admissions/errors.hpp"

namespace admissions {

namespace {

Eigen::MatrixXd to_original_order(const Eigen::MatrixXd& sorted,
                                  std::span<const std::size_t> order) {
  Eigen::MatrixXd out(sorted.rows(), sorted.cols());
  for (Eigen::Index a = 0; a < sorted.rows(); ++a) {
    for (Eigen::Index b = 0; b < sorted.cols(); ++b) {
      out(static_cast<Eigen::Index>(order[static_cast<std::size_t>(a)]),
          static_cast<Eigen::Index>(order[static_cast<std::size_t>(b)])) =
          sorted(a, b);
    }
  }
  return out;
}

}  // namespace

UnconstrainedJacobians unconstrained_jacobians(const MarketParams& params,
                                               std::span<const double> p,
                                               double tie_tol) {
  params.validate();
  if (p.size() != params.size()) {
    throw std::invalid_argument("cutoff length does not match the market");
  }
  const std::size_t n = params.size();

  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return p[a] < p[b]; });

  UnconstrainedJacobians jac;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (std::abs(p[idx[k + 1]] - p[idx[k]]) < tie_tol) {
      jac.tie_detected = true;  // values below describe the stable-sort piece
      break;
    }
  }

  std::vector<double> gs(n), ps(n), prefix(n);
  double run = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    gs[k] = params.gamma[idx[k]];
    ps[k] = p[idx[k]];
    run += gs[k];
    prefix[k] = run;
  }

  // Suffix sums over the bands: linear and squared widths, over the
  // admitted weight and its square.
  std::vector<double> v1(n), u1(n), v2(n), u2(n);
  double a_v1 = 0.0, a_u1 = 0.0, a_v2 = 0.0, a_u2 = 0.0;
  for (std::size_t d = n; d-- > 0;) {
    const double hi = (d + 1 < n) ? ps[d + 1] : 1.0;
    const double w = hi - ps[d];
    const double w2 = 0.5 * (hi * hi - ps[d] * ps[d]);
    a_v1 += w / prefix[d];
    a_u1 += w / (prefix[d] * prefix[d]);
    a_v2 += w2 / prefix[d];
    a_u2 += w2 / (prefix[d] * prefix[d]);
    v1[d] = a_v1;
    u1[d] = a_u1;
    v2[d] = a_v2;
    u2[d] = a_u2;
  }

  const auto ni = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd a_matrix = build_A(params, idx);
  Eigen::MatrixXd dd(ni, ni), dl(ni, ni);
  for (Eigen::Index c = 0; c < ni; ++c) {
    const auto cc = static_cast<std::size_t>(c);
    for (Eigen::Index h = 0; h < ni; ++h) {
      const auto hh = static_cast<std::size_t>(h);
      if (hh == cc) {
        dd(c, h) = v1[cc] - gs[cc] * u1[cc];
        dl(c, h) = v2[cc] - gs[cc] * u2[cc];
      } else {
        const std::size_t from = std::max(cc, hh);
        dd(c, h) = -gs[cc] * u1[from];
        dl(c, h) = -gs[cc] * u2[from];
      }
    }
  }

  Eigen::VectorXd ps_vec(ni);
  for (Eigen::Index k = 0; k < ni; ++k) ps_vec(k) = ps[static_cast<std::size_t>(k)];

  jac.demand_by_cutoff = to_original_order(a_matrix, idx);
  jac.appeal_by_cutoff = to_original_order(a_matrix * ps_vec.asDiagonal(), idx);
  jac.demand_by_weight = to_original_order(dd, idx);
  jac.appeal_by_weight = to_original_order(dl, idx);
  return jac;
}

EquilibriumJacobians equilibrium_jacobians(const MarketParams& params,
                                           double knife_tol) {
  const EquilibriumSolution solution = solve(params);
  const std::size_t n = params.size();
  const auto& order = solution.cutoffs.perm;

  for (std::size_t k = 0; k < n; ++k) {
    if (std::abs(solution.pre_image[k]) < knife_tol) {
      throw KnifeEdgeError(
          "equilibrium derivative undefined: school " +
              std::to_string(order[k]) + " sits at the clipping boundary",
          order[k]);
    }
  }

  std::vector<double> gs(n), qs(n), prefix(n);
  double run = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    gs[k] = params.gamma[order[k]];
    qs[k] = params.capacity[order[k]];
    run += gs[k];
    prefix[k] = run;
  }
  const std::size_t b = solution.b_index;  // 1-based; entries < b-1 are below
  double below_weight = 0.0;
  for (std::size_t k = 0; k + 1 < b; ++k) below_weight += gs[k];
  double above_capacity = 0.0;
  for (std::size_t k = b - 1; k < n; ++k) above_capacity += qs[k];

  const auto ni = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd cw = Eigen::MatrixXd::Zero(ni, ni);
  Eigen::MatrixXd dw = Eigen::MatrixXd::Zero(ni, ni);
  Eigen::MatrixXd cq = Eigen::MatrixXd::Zero(ni, ni);
  Eigen::MatrixXd dq = Eigen::MatrixXd::Zero(ni, ni);

  for (std::size_t c = 0; c < n; ++c) {
    const auto ci = static_cast<Eigen::Index>(c);
    if (solution.pre_image[c] > 0.0) {
      // Clearing school: weight buys cutoff, capacity moves cutoffs through
      // the triangular inverse, demand is pinned at capacity.
      for (std::size_t h = 0; h < c; ++h) {
        cw(ci, static_cast<Eigen::Index>(h)) = -qs[c] / gs[c];
      }
      cw(ci, ci) = qs[c] * (prefix[c] - gs[c]) / (gs[c] * gs[c]);
      cq(ci, ci) = -prefix[c] / gs[c];
      for (std::size_t h = c + 1; h < n; ++h) {
        cq(ci, static_cast<Eigen::Index>(h)) = -1.0;
      }
      dq(ci, ci) = 1.0;
    } else {
      // Zero-cutoff school: it splits the leftover mass 1 - sum of clearing
      // capacities with the other zero-cutoff schools, in weight proportion.
      const double leftover = 1.0 - above_capacity;
      const double s2 = below_weight * below_weight;
      for (std::size_t h = 0; h + 1 < b; ++h) {
        dw(ci, static_cast<Eigen::Index>(h)) =
            (h == c) ? (below_weight - gs[c]) * leftover / s2
                     : -gs[c] * leftover / s2;
      }
      for (std::size_t h = b - 1; h < n; ++h) {
        dq(ci, static_cast<Eigen::Index>(h)) = -gs[c] / below_weight;
      }
    }
  }

  EquilibriumJacobians jac;
  jac.cutoff_by_weight = to_original_order(cw, order);
  jac.demand_by_weight = to_original_order(dw, order);
  jac.cutoff_by_capacity = to_original_order(cq, order);
  jac.demand_by_capacity = to_original_order(dq, order);
  return jac;
}

}  // namespace admissions
