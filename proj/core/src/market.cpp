#include "admissions/market.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace admissions {

double MarketParams::gamma_total() const {
  return std::accumulate(gamma.begin(), gamma.end(), 0.0);
}

void MarketParams::validate() const {
  if (gamma.empty()) {
    throw std::invalid_argument("market has no schools");
  }
  if (gamma.size() != capacity.size()) {
    throw std::invalid_argument("gamma and capacity lengths differ");
  }
  for (std::size_t c = 0; c < gamma.size(); ++c) {
    if (!(gamma[c] > 0.0) || !std::isfinite(gamma[c])) {
      throw std::invalid_argument("gamma must be positive and finite at school " +
                                  std::to_string(c));
    }
    if (!(capacity[c] > 0.0) || !std::isfinite(capacity[c])) {
      throw std::invalid_argument(
          "capacity must be positive and finite at school " + std::to_string(c));
    }
  }
  if (!std::isfinite(gamma_total())) {
    throw std::invalid_argument("total preferability weight overflows");
  }
}

MarketParams market_from_log_weights(std::span<const double> log_weights,
                                     std::span<const double> capacity) {
  MarketParams params;
  params.gamma.reserve(log_weights.size());
  for (double d : log_weights) params.gamma.push_back(std::exp(d));
  params.capacity.assign(capacity.begin(), capacity.end());
  params.validate();
  return params;
}

CutoffVector make_cutoff_vector(std::vector<double> p) {
  CutoffVector cv;
  cv.perm.resize(p.size());
  std::iota(cv.perm.begin(), cv.perm.end(), std::size_t{0});
  std::stable_sort(cv.perm.begin(), cv.perm.end(),
                   [&](std::size_t a, std::size_t b) { return p[a] < p[b]; });
  cv.p = std::move(p);
  return cv;
}

std::vector<std::size_t> sort_by_competitiveness(const MarketParams& params) {
  params.validate();
  std::vector<std::size_t> order(params.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return params.gamma[a] / params.capacity[a] <
           params.gamma[b] / params.capacity[b];
  });
  return order;
}

Eigen::MatrixXd build_A(const MarketParams& params,
                        std::span<const std::size_t> order) {
  const auto n = static_cast<Eigen::Index>(params.size());
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  std::vector<double> prefix(params.size());
  double run = 0.0;
  for (std::size_t k = 0; k < params.size(); ++k) {
    run += params.gamma[order[k]];
    prefix[k] = run;
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    const double gi = params.gamma[order[static_cast<std::size_t>(i)]];
    A(i, i) = -gi / prefix[static_cast<std::size_t>(i)];
    for (Eigen::Index j = i + 1; j < n; ++j) {
      A(i, j) = gi * (1.0 / prefix[static_cast<std::size_t>(j) - 1] -
                      1.0 / prefix[static_cast<std::size_t>(j)]);
    }
  }
  return A;
}

Eigen::MatrixXd build_A_inverse(const MarketParams& params,
                                std::span<const std::size_t> order) {
  const auto n = static_cast<Eigen::Index>(params.size());
  Eigen::MatrixXd inv = Eigen::MatrixXd::Zero(n, n);
  double prefix = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double gi = params.gamma[order[static_cast<std::size_t>(i)]];
    prefix += gi;
    inv(i, i) = -prefix / gi;
    for (Eigen::Index j = i + 1; j < n; ++j) inv(i, j) = -1.0;
  }
  return inv;
}

Eigen::MatrixXd build_T(const MarketParams& params,
                        std::span<const std::size_t> order,
                        std::size_t b_index) {
  const std::size_t n = params.size();
  if (b_index < 1 || b_index > n + 1) {
    throw std::invalid_argument("b_index out of range");
  }
  const std::size_t rows = b_index - 1;
  const std::size_t cols = n + 1 - b_index;
  Eigen::MatrixXd T(static_cast<Eigen::Index>(rows),
                    static_cast<Eigen::Index>(cols));
  if (rows == 0 || cols == 0) return T;
  double below = 0.0;
  for (std::size_t i = 0; i < rows; ++i) below += params.gamma[order[i]];
  for (std::size_t i = 0; i < rows; ++i) {
    const double value = -params.gamma[order[i]] / below;
    for (std::size_t j = 0; j < cols; ++j) {
      T(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = value;
    }
  }
  return T;
}

StructMatrices build_struct_matrices(const MarketParams& params,
                                     std::span<const std::size_t> order,
                                     std::size_t b_index) {
  StructMatrices sm;
  sm.A = build_A(params, order);
  sm.A_inv = build_A_inverse(params, order);
  sm.b_index = b_index;
  sm.T = build_T(params, order, b_index);
  return sm;
}

}  // namespace admissions
