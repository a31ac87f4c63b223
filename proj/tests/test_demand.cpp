#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "admissions/demand.hpp"
#include "admissions/discrete.hpp"
#include "admissions/random.hpp"
#include "test_support.hpp"

using namespace admissions;

TEST_CASE("fixture demand reproduces the capacities") {
  const auto params = test_support::pallet_town();
  const auto result = demand(params, test_support::pallet_cutoffs());
  const std::vector<double> expected = {0.3, 0.1, 0.2, 0.2};
  CHECK(test_support::max_abs_diff(result.enrollment, expected) < 1e-15);
  CHECK(result.unassigned_mass == doctest::Approx(0.2));
}

TEST_CASE("all-zero cutoffs share out the whole mass by weight") {
  Rng rng(31);
  const auto params = test_support::random_market(rng, 7);
  const auto result = demand(params, std::vector<double>(7, 0.0));
  const double total = params.gamma_total();
  for (std::size_t c = 0; c < 7; ++c) {
    CHECK(result.enrollment[c] ==
          doctest::Approx(params.gamma[c] / total).epsilon(1e-14));
  }
  CHECK(result.unassigned_mass == 0.0);
}

TEST_CASE("demand agrees with a million-student simulation") {
  const auto params = test_support::pallet_town();
  const auto p = test_support::pallet_cutoffs();
  const auto expected = demand(params, p);

  const std::size_t n = 1'000'000;
  const auto sample = sample_students(params, n, 424242);
  const auto choice = decentralized_choice(sample, p);
  for (std::size_t c = 0; c < 4; ++c) {
    const double share =
        static_cast<double>(choice.fill_counts[c]) / static_cast<double>(n);
    const double se = std::sqrt(expected.enrollment[c] *
                                (1.0 - expected.enrollment[c]) /
                                static_cast<double>(n));
    CHECK(std::abs(share - expected.enrollment[c]) < 3.0 * se);
  }
}

TEST_CASE("band evaluation matches the dense matrix route") {
  Rng rng(37);
  for (int rep = 0; rep < 30; ++rep) {
    const auto params = test_support::random_market(rng, 10);
    std::vector<double> p(10);
    for (auto& x : p) x = rng.uniform();
    const auto fast = demand(params, p);
    const auto dense = test_support::matrix_demand(params, p);
    CHECK(test_support::max_abs_diff(fast.enrollment, dense) < 1e-13);
  }
}

TEST_CASE("appeal stays between zero and demand") {
  Rng rng(41);
  for (int rep = 0; rep < 30; ++rep) {
    const auto params = test_support::random_market(rng, 6);
    std::vector<double> p(6);
    for (auto& x : p) x = rng.uniform();
    const auto result = demand(params, p);
    for (std::size_t c = 0; c < 6; ++c) {
      CHECK(result.appeal[c] >= 0.0);
      CHECK(result.appeal[c] <= result.enrollment[c] + 1e-15);
    }
  }
}

TEST_CASE("mass accounting: enrollment plus unassigned is one") {
  Rng rng(43);
  for (int rep = 0; rep < 50; ++rep) {
    const auto params = test_support::random_market(rng, 12);
    std::vector<double> p(12);
    for (auto& x : p) x = rng.uniform();
    const auto result = demand(params, p);
    const double total = std::accumulate(result.enrollment.begin(),
                                         result.enrollment.end(), 0.0);
    CHECK(total + result.unassigned_mass == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("a cutoff of one empties the school") {
  const auto params = test_support::pallet_town();
  auto p = test_support::pallet_cutoffs();
  p[2] = 1.0;
  CHECK(demand(params, p).enrollment[2] == 0.0);
}

TEST_CASE("cutoffs outside the unit interval are rejected") {
  const auto params = test_support::pallet_town();
  CHECK_THROWS_AS(demand(params, std::vector<double>{0.1, 0.2, 0.3, 1.5}),
                  std::domain_error);
  CHECK_THROWS_AS(demand(params, std::vector<double>{-0.1, 0.2, 0.3, 0.5}),
                  std::domain_error);
}

TEST_CASE("tie-break invariance is exact for every relabeling, n <= 5") {
  // Relabel the schools by each permutation; the relabeled demand must be
  // the relabeled original, bit for bit, including across tied cutoffs.
  Rng rng(47);
  const std::vector<double> gamma = {0.7, 1.3, 0.9, 2.1, 0.4};
  const std::vector<double> p = {0.4, 0.2, 0.4, 0.4, 0.7};
  const auto base = demand(gamma, p);

  std::vector<std::size_t> perm = {0, 1, 2, 3, 4};
  do {
    std::vector<double> g2(5), p2(5);
    for (std::size_t k = 0; k < 5; ++k) {
      g2[k] = gamma[perm[k]];
      p2[k] = p[perm[k]];
    }
    const auto relabeled = demand(g2, p2);
    for (std::size_t k = 0; k < 5; ++k) {
      CHECK(relabeled.enrollment[k] == base.enrollment[perm[k]]);
      CHECK(relabeled.appeal[k] == base.appeal[perm[k]]);
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
}

TEST_CASE("demand is 1-Lipschitz in each cutoff, including across ties") {
  Rng rng(53);
  for (int rep = 0; rep < 20; ++rep) {
    const auto params = test_support::random_market(rng, 6);
    std::vector<double> p(6);
    for (auto& x : p) x = 0.2 + 0.6 * rng.uniform();
    p[3] = p[1];  // force a kink nearby
    const std::size_t c = rep % 6;
    const double eps = 1e-4;
    auto bumped = p;
    bumped[c] = std::min(1.0, p[c] + eps);
    const auto before = demand(params, p);
    const auto after = demand(params, bumped);
    for (std::size_t j = 0; j < 6; ++j) {
      CHECK(std::abs(after.enrollment[j] - before.enrollment[j]) <=
            (bumped[c] - p[c]) * (1.0 + 1e-9));
    }
  }
}

TEST_CASE("own-cutoff monotonicity and cross effects") {
  Rng rng(59);
  const auto params = test_support::random_market(rng, 5);
  std::vector<double> p = {0.1, 0.3, 0.5, 0.7, 0.9};
  const auto base = demand(params, p);
  for (std::size_t c = 0; c < 5; ++c) {
    auto bumped = p;
    bumped[c] += 0.05;
    const auto moved = demand(params, bumped);
    CHECK(moved.enrollment[c] < base.enrollment[c]);  // strictly decreasing
    for (std::size_t j = 0; j < c; ++j) {
      // raising a more selective school's cutoff cannot hurt the less
      // selective ones
      CHECK(moved.enrollment[j] >= base.enrollment[j] - 1e-15);
    }
  }
}

TEST_CASE("equilibrium certificate at the fixture solution") {
  const auto params = test_support::pallet_town();
  const auto cert =
      verify_equilibrium(params, test_support::pallet_cutoffs(), 1e-10);
  CHECK(cert.max_capacity_violation < 1e-12);
  CHECK(cert.max_stability_violation < 1e-12);
  CHECK(cert.ncp_residual < 1e-12);
  CHECK(cert.clearing_gap < 1e-12);
  CHECK(cert.within(1e-10));
}

TEST_CASE("certificate at all-zero cutoffs reports the capacity breach") {
  const auto params = test_support::pallet_town();
  const auto cert =
      verify_equilibrium(params, std::vector<double>(4, 0.0), 1e-10);
  // biggest weight share is 6/12 against capacity 0.2
  CHECK(cert.max_capacity_violation == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(cert.max_stability_violation == 0.0);
  CHECK_FALSE(cert.within(1e-10));
}

TEST_CASE("saturated market settles with zero stability violation") {
  // Total capacity above 1: every school that keeps a positive cutoff
  // clears; the rest sit at zero with slack. Equilibrium located by the
  // iterative route only.
  Rng rng(61);
  const auto params = test_support::random_market(rng, 8, 0.05, 0.3);
  const auto p = test_support::brute_force_equilibrium(params);
  const auto cert = verify_equilibrium(params, p, 1e-6);
  CHECK(cert.max_stability_violation < 1e-6);
  CHECK(cert.max_capacity_violation < 1e-6);
}

TEST_CASE("single-coordinate clearing root") {
  const auto params = test_support::pallet_town();
  const auto p = test_support::pallet_cutoffs();
  SUBCASE("root reproduces the demand exactly") {
    for (std::size_t c = 0; c < 4; ++c) {
      const double target = 0.5 * params.capacity[c];
      const auto root =
          cutoff_clearing_demand(params.gamma, p, c, target);
      REQUIRE(root.has_value());
      auto probe = p;
      probe[c] = *root;
      CHECK(demand(params, probe).enrollment[c] ==
            doctest::Approx(target).epsilon(1e-12));
    }
  }
  SUBCASE("unreachable target reports no root") {
    CHECK_FALSE(cutoff_clearing_demand(params.gamma, p, 1, 0.9).has_value());
  }
  SUBCASE("current demand maps back to the current cutoff") {
    const auto at = demand(params, p);
    const auto root =
        cutoff_clearing_demand(params.gamma, p, 2, at.enrollment[2]);
    REQUIRE(root.has_value());
    CHECK(*root == doctest::Approx(p[2]).epsilon(1e-12));
  }
}
