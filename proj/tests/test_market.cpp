#include <doctest.h>

#include <numeric>

#include "admissions/demand.hpp"
#include "admissions/market.hpp"
#include "admissions/random.hpp"
#include "test_support.hpp"

using namespace admissions;

TEST_CASE("params validation rejects bad inputs") {
  CHECK_THROWS_AS((MarketParams{{}, {}}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((MarketParams{{1.0, -1.0}, {0.5, 0.5}}.validate()),
                  std::invalid_argument);
  CHECK_THROWS_AS((MarketParams{{1.0, 1.0}, {0.5, 0.0}}.validate()),
                  std::invalid_argument);
  CHECK_THROWS_AS((MarketParams{{1.0}, {0.5, 0.5}}.validate()),
                  std::invalid_argument);
}

TEST_CASE("log-weight construction exponentiates") {
  const std::vector<double> logs = {0.0, 1.0};
  const std::vector<double> caps = {0.5, 0.5};
  const auto params = market_from_log_weights(logs, caps);
  CHECK(params.gamma[0] == doctest::Approx(1.0));
  CHECK(params.gamma[1] == doctest::Approx(std::exp(1.0)));
}

TEST_CASE("competitiveness sort: fixture market is already ordered") {
  const auto order = sort_by_competitiveness(test_support::pallet_town());
  CHECK(order == std::vector<std::size_t>{0, 1, 2, 3});
}

TEST_CASE("competitiveness sort: ties keep original index") {
  const MarketParams params{{1.0, 1.0}, {1.0, 1.0}};
  CHECK(sort_by_competitiveness(params) == std::vector<std::size_t>{0, 1});
}

TEST_CASE("competitiveness sort orders an independently found equilibrium") {
  // 20 schools; the equilibrium is located by long-running cutoff
  // adjustment, not the closed form, and must come out nondecreasing in
  // the sorted order.
  Rng rng(20240101);
  const auto params = test_support::random_market(rng, 20);
  const auto p = test_support::brute_force_equilibrium(params);
  const auto order = sort_by_competitiveness(params);
  for (std::size_t k = 0; k + 1 < order.size(); ++k) {
    CHECK(p[order[k]] <= p[order[k + 1]] + 1e-6);
  }
}

TEST_CASE("single-school structural matrices") {
  const MarketParams params{{1.0}, {0.5}};
  const std::vector<std::size_t> order = {0};
  const auto a_matrix = build_A(params, order);
  const auto inv = build_A_inverse(params, order);
  CHECK(a_matrix(0, 0) == -1.0);
  CHECK(inv(0, 0) == -1.0);
}

TEST_CASE("coefficient matrix satisfies the fixture's clearing identity") {
  // A p* + gamma/Gamma must reproduce the capacities exactly when every
  // school clears.
  const auto params = test_support::pallet_town();
  const auto order = sort_by_competitiveness(params);
  const auto a_matrix = build_A(params, order);
  const auto p = test_support::pallet_cutoffs();
  const double total = params.gamma_total();
  for (std::size_t i = 0; i < 4; ++i) {
    double acc = params.gamma[order[i]] / total;
    for (std::size_t j = 0; j < 4; ++j) {
      acc += a_matrix(static_cast<Eigen::Index>(i),
                      static_cast<Eigen::Index>(j)) *
             p[order[j]];
    }
    CHECK(acc == doctest::Approx(params.capacity[order[i]]).epsilon(1e-12));
  }
}

TEST_CASE("matrix structure: negative diagonal, nonnegative above, zero below") {
  Rng rng(7);
  for (int rep = 0; rep < 20; ++rep) {
    const auto params = test_support::random_market(rng, 8);
    const auto order = sort_by_competitiveness(params);
    const auto a_matrix = build_A(params, order);
    for (Eigen::Index i = 0; i < 8; ++i) {
      CHECK(a_matrix(i, i) < 0.0);
      for (Eigen::Index j = 0; j < i; ++j) CHECK(a_matrix(i, j) == 0.0);
      for (Eigen::Index j = i + 1; j < 8; ++j) CHECK(a_matrix(i, j) >= 0.0);
    }
    CHECK(a_matrix(0, 0) == -1.0);
  }
}

TEST_CASE("closed-form inverse multiplies to the identity") {
  Rng rng(11);
  for (int rep = 0; rep < 20; ++rep) {
    const auto params = test_support::random_market(rng, 12);
    const auto order = sort_by_competitiveness(params);
    const auto sm = build_struct_matrices(params, order, 1);
    const Eigen::MatrixXd prod = sm.A * sm.A_inv;
    const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(12, 12);
    CHECK((prod - eye).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("closed-form inverse matches numeric inversion up to n=50") {
  Rng rng(13);
  const auto params = test_support::random_market(rng, 50);
  const auto order = sort_by_competitiveness(params);
  const auto a_matrix = build_A(params, order);
  const auto inv = build_A_inverse(params, order);
  const Eigen::MatrixXd numeric = a_matrix.inverse();
  CHECK((inv - numeric).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("T block examples") {
  SUBCASE("no underdemanded schools: empty block") {
    const auto params = test_support::pallet_town();
    const auto order = sort_by_competitiveness(params);
    const auto t_block = build_T(params, order, 1);
    CHECK(t_block.rows() == 0);
    CHECK(t_block.cols() == 4);
  }
  SUBCASE("two underdemanded schools split against one") {
    const MarketParams params{{1.0, 1.0, 2.0}, {1.0, 1.0, 0.01}};
    const std::vector<std::size_t> order = {0, 1, 2};
    const auto t_block = build_T(params, order, 3);
    REQUIRE(t_block.rows() == 2);
    REQUIRE(t_block.cols() == 1);
    CHECK(t_block(0, 0) == doctest::Approx(-0.5).epsilon(1e-15));
    CHECK(t_block(1, 0) == doctest::Approx(-0.5).epsilon(1e-15));
  }
  SUBCASE("entries strictly negative whenever the block is nonempty") {
    Rng rng(17);
    const auto params = test_support::random_market(rng, 6);
    const auto order = sort_by_competitiveness(params);
    for (std::size_t b = 2; b <= 7; ++b) {
      const auto t_block = build_T(params, order, b);
      for (Eigen::Index i = 0; i < t_block.rows(); ++i) {
        for (Eigen::Index j = 0; j < t_block.cols(); ++j) {
          CHECK(t_block(i, j) < 0.0);
        }
      }
    }
  }
  SUBCASE("b_index out of range rejected") {
    const auto params = test_support::pallet_town();
    const auto order = sort_by_competitiveness(params);
    CHECK_THROWS_AS(build_T(params, order, 0), std::invalid_argument);
    CHECK_THROWS_AS(build_T(params, order, 6), std::invalid_argument);
  }
}

TEST_CASE("boundary demand through the matrix route") {
  // All-zero cutoffs hand everyone a full consideration set; all-one
  // cutoffs admit nobody.
  Rng rng(23);
  const auto params = test_support::random_market(rng, 9);
  const double total = params.gamma_total();

  const auto at_zero = demand(params, std::vector<double>(9, 0.0));
  const auto at_one = demand(params, std::vector<double>(9, 1.0));
  for (std::size_t c = 0; c < 9; ++c) {
    CHECK(at_zero.enrollment[c] ==
          doctest::Approx(params.gamma[c] / total).epsilon(1e-14));
    CHECK(at_one.enrollment[c] == 0.0);
  }
}
