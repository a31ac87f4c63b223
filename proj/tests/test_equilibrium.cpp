#include <doctest.h>

#include <numeric>

#include "admissions/demand.hpp"
#include "admissions/equilibrium.hpp"
#include "admissions/errors.hpp"
#include "admissions/random.hpp"
#include "admissions/tatonnement.hpp"
#include "test_support.hpp"

using namespace admissions;

TEST_CASE("fixture equilibrium in closed form") {
  const auto params = test_support::pallet_town();
  const auto solution = solve(params);
  CHECK(test_support::max_abs_diff(solution.cutoffs.p,
                                   test_support::pallet_cutoffs()) < 1e-14);
  CHECK(solution.b_index == 1);
  CHECK(test_support::max_abs_diff(solution.demand_at_solution.enrollment,
                                   params.capacity) < 1e-14);
  const auto cert = verify_equilibrium(params, solution.cutoffs.p, 1e-10);
  CHECK(cert.within(1e-10));
}

TEST_CASE("single school cases") {
  SUBCASE("scarce seats price at the capacity") {
    const auto solution = solve(MarketParams{{1.0}, {0.5}});
    CHECK(solution.cutoffs.p[0] == doctest::Approx(0.5).epsilon(1e-15));
  }
  SUBCASE("ample seats leave the door open") {
    const auto solution = solve(MarketParams{{1.0}, {1.5}});
    CHECK(solution.cutoffs.p[0] == 0.0);
    CHECK(solution.b_index == 2);
  }
}

TEST_CASE("closed-form equilibrium demand matches direct evaluation") {
  SUBCASE("fixture: all schools clear") {
    const auto params = test_support::pallet_town();
    const auto solution = solve(params);
    const auto closed = equilibrium_demand(params, solution);
    CHECK(test_support::max_abs_diff(closed, params.capacity) < 1e-14);
  }
  SUBCASE("one school swallows the leftovers") {
    const MarketParams params{{1.0, 1.0}, {10.0, 0.1}};
    const auto solution = solve(params);
    CHECK(solution.cutoffs.p[0] == 0.0);
    CHECK(solution.cutoffs.p[1] == doctest::Approx(0.8).epsilon(1e-14));
    const auto closed = equilibrium_demand(params, solution);
    const auto direct = demand(params, solution.cutoffs.p);
    CHECK(test_support::max_abs_diff(closed, direct.enrollment) < 1e-12);
    CHECK(closed[0] == doctest::Approx(0.9).epsilon(1e-14));
  }
  SUBCASE("uncontested market: everyone in by weight share") {
    const MarketParams params{{2.0, 3.0}, {0.7, 0.9}};
    const auto solution = solve(params);
    CHECK(solution.cutoffs.p == std::vector<double>{0.0, 0.0});
    const auto closed = equilibrium_demand(params, solution);
    CHECK(closed[0] == doctest::Approx(0.4).epsilon(1e-14));
    CHECK(closed[1] == doctest::Approx(0.6).epsilon(1e-14));
  }
  SUBCASE("mixed random markets") {
    Rng rng(71);
    for (int rep = 0; rep < 40; ++rep) {
      const auto params = test_support::random_market(rng, 9, 0.02, 0.25);
      const auto solution = solve(params);
      const auto closed = equilibrium_demand(params, solution);
      const auto direct = demand(params, solution.cutoffs.p);
      CHECK(test_support::max_abs_diff(closed, direct.enrollment) < 1e-12);
    }
  }
}

TEST_CASE("adjacent gap formula") {
  SUBCASE("fixture gap between the first two sorted schools") {
    CHECK(adjacent_gap(test_support::pallet_town(), 0) ==
          doctest::Approx(0.1).epsilon(1e-12));
  }
  SUBCASE("equal ratios leave no gap") {
    const MarketParams params{{1.0, 2.0}, {0.2, 0.4}};
    CHECK(adjacent_gap(params, 0) == doctest::Approx(0.0));
  }
  SUBCASE("nonnegative across random markets") {
    Rng rng(73);
    for (int rep = 0; rep < 25; ++rep) {
      const auto params = test_support::random_market(rng, 8);
      for (std::size_t rank = 0; rank + 1 < 8; ++rank) {
        CHECK(adjacent_gap(params, rank) >= -1e-15);
      }
    }
  }
  SUBCASE("rank bounds enforced") {
    CHECK_THROWS_AS(adjacent_gap(test_support::pallet_town(), 3),
                    std::invalid_argument);
  }
}

TEST_CASE("equilibrium cutoffs are sorted by competitiveness: 1000 markets") {
  Rng rng(79);
  for (int rep = 0; rep < 1000; ++rep) {
    const auto params = test_support::random_market(rng, 20);
    const auto solution = solve(params);
    const auto& order = solution.cutoffs.perm;
    for (std::size_t k = 0; k + 1 < 20; ++k) {
      CHECK(solution.cutoffs.p[order[k]] <=
            solution.cutoffs.p[order[k + 1]] + 1e-15);
    }
    const auto cert = verify_equilibrium(params, solution.cutoffs.p, 1e-10);
    CHECK(cert.within(1e-10));
  }
}

TEST_CASE("market clearing identity at the solution") {
  Rng rng(83);
  for (int rep = 0; rep < 200; ++rep) {
    const auto params = test_support::random_market(rng, 15, 0.01, 0.15);
    const auto solution = solve(params);
    const double total_demand =
        std::accumulate(solution.demand_at_solution.enrollment.begin(),
                        solution.demand_at_solution.enrollment.end(), 0.0);
    const double total_capacity = std::accumulate(
        params.capacity.begin(), params.capacity.end(), 0.0);
    CHECK(std::abs(total_demand - std::min(1.0, total_capacity)) < 1e-10);
  }
}

TEST_CASE("the solution is a fixed point of one adjustment step") {
  Rng rng(89);
  for (int rep = 0; rep < 20; ++rep) {
    const auto params = test_support::random_market(rng, 10, 0.02, 0.2);
    const auto solution = solve(params);
    TatonnementConfig config;
    config.alpha = 1.0;
    config.beta = 0.0;
    config.epsilon = 1e-9;
    config.max_iters = 1;
    config.p0 = solution.cutoffs.p;
    const auto trajectory = simultaneous_tatonnement(params, config);
    CHECK(trajectory.converged);
    CHECK(test_support::max_abs_diff(trajectory.final_p, solution.cutoffs.p) <
          1e-13);
  }
}

TEST_CASE("lowering a slack school's capacity does not move the solution") {
  // A zero-cutoff school's capacity can shrink toward its demand without
  // touching any positive cutoff: those depend only on the clearing
  // schools' parameters.
  const MarketParams params{{1.0, 1.0, 2.0}, {0.8, 0.7, 0.05}};
  const auto solution = solve(params);
  REQUIRE(solution.b_index > 1);

  const std::size_t slack = solution.cutoffs.perm[0];
  const double at_demand = solution.demand_at_solution.enrollment[slack];
  MarketParams nudged = params;
  nudged.capacity[slack] =
      at_demand + 0.5 * (params.capacity[slack] - at_demand);
  const auto moved = solve(nudged);
  CHECK(moved.cutoffs.p == solution.cutoffs.p);  // bit-identical
}
