#include <doctest.h>

#include <cmath>

#include "poolgame/analytic.hpp"
#include "poolgame/model.hpp"
#include "testutil.hpp"

using namespace poolgame;

namespace {

double conservation_gap(const PoolSystem& sys, const RevenueReport& rep) {
  double total = sys.solo_power() * rep.solo_density;
  for (std::size_t i = 0; i < sys.pool_count(); ++i) {
    total += sys.power(i) * rep.density[i];
  }
  return std::abs(total - 1.0);
}

}  // namespace

TEST_CASE("direct rates") {
  SUBCASE("no attack: rates equal powers") {
    auto [sys, x] = validate_system({0.2, 0.3}, {0, 0, 0, 0});
    auto r = direct_rates(sys, x);
    CHECK(r[0] == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(r[1] == doctest::Approx(0.3).epsilon(1e-12));
  }
  SUBCASE("one-sided") {
    auto [sys, x] = validate_system({0.2, 0.2}, {0, 0.05, 0, 0});
    auto r = direct_rates(sys, x);
    CHECK(r[0] == doctest::Approx(0.15 / 0.95).epsilon(1e-12));
    CHECK(r[1] == doctest::Approx(0.2 / 0.95).epsilon(1e-12));
  }
  SUBCASE("mutual") {
    auto [sys, x] = validate_system({0.2, 0.3}, {0, 0.1, 0.1, 0});
    auto r = direct_rates(sys, x);
    CHECK(r[0] == doctest::Approx(0.125).epsilon(1e-12));
    CHECK(r[1] == doctest::Approx(0.25).epsilon(1e-12));
  }
}

TEST_CASE("converge_revenues examples") {
  SUBCASE("no attack baseline") {
    auto [sys, x] = validate_system({0.2, 0.3}, {0, 0, 0, 0});
    auto rep = converge_revenues(sys, x);
    CHECK(rep.density[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rep.density[1] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rep.solo_density == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("one-sided attack") {
    auto [sys, x] = validate_system({0.2, 0.2}, {0, 0.05, 0, 0});
    auto rep = converge_revenues(sys, x);
    CHECK(rep.density[0] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(rep.density[1] == doctest::Approx(0.842105).epsilon(1e-6));
  }
  SUBCASE("mutual attack") {
    auto [sys, x] = validate_system({0.2, 0.3}, {0, 0.1, 0.1, 0});
    auto rep = converge_revenues(sys, x);
    CHECK(rep.density[0] == doctest::Approx(0.681818).epsilon(1e-6));
    CHECK(rep.density[1] == doctest::Approx(0.795455).epsilon(1e-6));
  }
  SUBCASE("full fee zeroes infiltration income") {
    auto [sys, x] = validate_system({0.2, 0.3}, {0, 0.05, 0, 0});
    FeeSchedule fees{{0.0, 1.0}};
    auto rep = converge_revenues(sys, x, SolveMethod::direct(), &fees);
    // r_1 = R_1 / m_1 with the stolen revenue fully confiscated
    CHECK(rep.density[0] == doctest::Approx(0.789474).epsilon(1e-6));
  }
}

TEST_CASE("two_pool_revenues closed form") {
  SUBCASE("no attack") {
    auto [r1, r2] = two_pool_revenues(0.2, 0.3, 0.0, 0.0);
    CHECK(r1 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r2 == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("mutual") {
    auto [r1, r2] = two_pool_revenues(0.2, 0.3, 0.1, 0.1);
    CHECK(r1 == doctest::Approx(0.681818).epsilon(1e-6));
    CHECK(r2 == doctest::Approx(0.795455).epsilon(1e-6));
  }
  SUBCASE("one-sided matches solver") {
    auto [r1, r2] = two_pool_revenues(0.2, 0.2, 0.05, 0.0);
    CHECK(r1 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r2 == doctest::Approx(0.842105).epsilon(1e-6));
  }
  SUBCASE("agrees with converge_revenues to 1e-12") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
      double m1 = 0.05 + 0.45 * unit(rng);
      double m2 = 0.05 + 0.45 * unit(rng);
      double x12 = 0.9 * m1 * unit(rng);
      double x21 = 0.9 * m2 * unit(rng);
      auto [r1, r2] = two_pool_revenues(m1, m2, x12, x21);
      auto [sys, x] = validate_system({m1, m2}, {0, x12, x21, 0});
      auto rep = converge_revenues(sys, x);
      CHECK(std::abs(r1 - rep.density[0]) < 1e-12);
      CHECK(std::abs(r2 - rep.density[1]) < 1e-12);
    }
  }
}

TEST_CASE("iterate_revenue_step") {
  auto [sys, x] = validate_system({0.2, 0.2}, {0, 0.05, 0, 0});
  SUBCASE("single application from zero") {
    auto r = iterate_revenue_step(sys, x, {0.0, 0.0});
    CHECK(r[0] == doctest::Approx(0.789474).epsilon(1e-6));
    CHECK(r[1] == doctest::Approx(0.842105).epsilon(1e-6));
  }
  SUBCASE("fixed point maps to itself") {
    auto rep = converge_revenues(sys, x);
    auto r = iterate_revenue_step(sys, x, rep.density);
    CHECK(r[0] == doctest::Approx(rep.density[0]).epsilon(1e-12));
    CHECK(r[1] == doctest::Approx(rep.density[1]).epsilon(1e-12));
  }
  SUBCASE("no coupling yields baseline whatever the start") {
    auto [sys0, x0] = validate_system({0.2, 0.3}, {0, 0, 0, 0});
    auto r = iterate_revenue_step(sys0, x0, {17.0, -3.0});
    CHECK(r[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r[1] == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("conservation across random instances") {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 300; ++trial) {
    auto inst = testutil::random_instance(rng);
    auto [sys, x] = validate_system(inst.powers, inst.x);
    auto rep = converge_revenues(sys, x);
    CHECK(conservation_gap(sys, rep) < 1e-10);
  }
}

TEST_CASE("direct solve and fixed point agree") {
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 100; ++trial) {
    auto inst = testutil::random_instance(rng);
    auto [sys, x] = validate_system(inst.powers, inst.x);
    auto direct = converge_revenues(sys, x, SolveMethod::direct());
    auto iterated = converge_revenues(sys, x, SolveMethod::fixed_point(1'000'000, 1e-12));
    CHECK(iterated.iterations > 0);
    for (std::size_t i = 0; i < sys.pool_count(); ++i) {
      CHECK(std::abs(direct.density[i] - iterated.density[i]) < 1e-10);
    }
  }
}

TEST_CASE("victim revenue under one-sided attack") {
  // r_2 = m_2 / ((1 - x)(m_2 + x)) sits below 1 for any x > 0 and decreases
  // up to x = (1 - m_2) / 2; past that the difficulty drop wins and it climbs
  // back, still short of 1 inside the feasible box.
  std::mt19937_64 rng(44);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    double m1 = 0.05 + 0.45 * unit(rng);
    double m2 = 0.05 + 0.45 * unit(rng);
    double x_turn = 0.5 * (1.0 - m2);
    double x_max = std::min(m1 * 0.95, x_turn);
    double prev = 1.0;
    for (int k = 1; k <= 50; ++k) {
      double x12 = x_max * k / 50.0;
      auto [r1, r2] = two_pool_revenues(m1, m2, x12, 0.0);
      CHECK(r2 < prev);
      prev = r2;
    }
    for (int k = 1; k <= 20; ++k) {
      auto [r1, r2] = two_pool_revenues(m1, m2, m1 * 0.95 * k / 20.0, 0.0);
      CHECK(r2 < 1.0);
    }
  }
}

TEST_CASE("solo miners benefit from any attack") {
  auto [sys, x] = validate_system({0.2, 0.3}, {0, 0.01, 0, 0});
  auto rep = converge_revenues(sys, x);
  CHECK(rep.solo_density > 1.0);
  CHECK(rep.solo_density == doctest::Approx(1.0 / 0.99).epsilon(1e-12));
}

TEST_CASE("geometric convergence at rate of the spectral radius") {
  std::mt19937_64 rng(45);
  for (int trial = 0; trial < 20; ++trial) {
    auto inst = testutil::random_instance(rng);
    auto [sys, x] = validate_system(inst.powers, inst.x);
    std::size_t p = sys.pool_count();
    auto g = infiltration_matrix_G(sys, x);
    double rho = testutil::spectral_radius(g, p);
    double row_sum = 0.0;
    for (std::size_t i = 0; i < p; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < p; ++j) s += g[i * p + j];
      row_sum = std::max(row_sum, s);
    }
    auto fixed = converge_revenues(sys, x).density;

    // The error obeys e(k+1) = G e(k): each step contracts by at least the
    // max row sum, and the tail ratio approaches the spectral radius.
    std::vector<double> r(p, 0.0);
    std::vector<double> errs;
    double prev_err = 0.0;
    for (std::size_t i = 0; i < p; ++i) prev_err = std::max(prev_err, std::abs(fixed[i]));
    errs.push_back(prev_err);
    for (int k = 0; k < 60 && prev_err > 1e-12; ++k) {
      r = iterate_revenue_step(sys, x, r);
      double err = 0.0;
      for (std::size_t i = 0; i < p; ++i) err = std::max(err, std::abs(r[i] - fixed[i]));
      CHECK(err <= prev_err * row_sum * (1.0 + 1e-9) + 1e-15);
      prev_err = err;
      errs.push_back(err);
    }
    if (errs.size() >= 14 && errs.back() > 1e-13 && errs.back() > 0.0) {
      // G is not normal, so short windows overshoot; average over ten steps
      std::size_t tail = errs.size() - 11;
      double ratio = std::pow(errs.back() / errs[tail], 1.0 / 10.0);
      CHECK(ratio <= rho + 0.1);
    }
  }
}

TEST_CASE("fixed point iteration reports NonConvergence when starved") {
  auto [sys, x] = validate_system({0.3, 0.3}, {0, 0.2, 0.2, 0});
  CHECK_THROWS_AS(converge_revenues(sys, x, SolveMethod::fixed_point(1, 1e-12)), PoolGameError);
}
