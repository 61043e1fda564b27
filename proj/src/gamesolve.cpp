#include "poolgame/gamesolve.hpp"

#include <algorithm>
#include <cmath>

#include "poolgame/golden.hpp"

namespace poolgame {

namespace {

constexpr double kSearchTol = 1e-9;
constexpr std::size_t kMaxAscentSweeps = 1'000;

double actor_revenue(const PoolSystem& sys, const InfiltrationMatrix& x, std::size_t actor) {
  return converge_revenues(sys, x).density[actor];
}

}  // namespace

std::vector<double> best_response(const PoolSystem& sys, const InfiltrationMatrix& x,
                                  std::size_t actor) {
  validate_pair(sys, x);
  std::size_t p = sys.pool_count();
  std::vector<double> row(p, 0.0);
  if (p == 1) return row;

  double budget = sys.power(actor) - kBudgetEpsilon;
  auto coordinate_value = [&](std::size_t j, double xj) {
    std::vector<double> trial = row;
    trial[j] = xj;
    return actor_revenue(sys, x.with_row(actor, trial), actor);
  };

  std::vector<std::size_t> targets;
  for (std::size_t j = 0; j < p; ++j) {
    if (j != actor) targets.push_back(j);
  }

  if (targets.size() == 1) {
    std::size_t j = targets[0];
    row[j] = maximize_scalar([&](double v) { return coordinate_value(j, v); }, 0.0, budget,
                             kSearchTol);
    return row;
  }

  // Cyclic coordinate ascent; the objective is concave per coordinate, so
  // each inner step is a bounded scalar maximization.
  for (std::size_t sweep = 0; sweep < kMaxAscentSweeps; ++sweep) {
    double max_delta = 0.0;
    for (std::size_t j : targets) {
      double others = -row[j];
      for (std::size_t k : targets) others += row[k];
      double ub = std::max(0.0, budget - others);
      double next = maximize_scalar([&](double v) { return coordinate_value(j, v); }, 0.0, ub,
                                    kSearchTol);
      max_delta = std::max(max_delta, std::abs(next - row[j]));
      row[j] = next;
    }
    if (max_delta < kSearchTol) break;
  }
  return row;
}

GameTrace round_robin_equilibrium(const PoolSystem& sys, const InfiltrationMatrix& x0,
                                  std::size_t max_cycles, double x_tol) {
  validate_pair(sys, x0);
  std::size_t p = sys.pool_count();

  GameTrace trace;
  InfiltrationMatrix x = x0;
  for (std::size_t cycle = 0; cycle < max_cycles; ++cycle) {
    double max_delta = 0.0;
    for (std::size_t actor = 0; actor < p; ++actor) {
      std::vector<double> row = best_response(sys, x, actor);
      for (std::size_t j = 0; j < p; ++j) {
        max_delta = std::max(max_delta, std::abs(row[j] - x.rate(actor, j)));
      }
      x = x.with_row(actor, row);
      trace.rounds.push_back(GameRound{actor, std::move(row), converge_revenues(sys, x)});
    }
    trace.cycles = cycle + 1;
    if (max_delta < x_tol) {
      trace.converged = true;
      break;
    }
  }
  trace.final_x = x;
  trace.final_report = converge_revenues(sys, x);
  return trace;
}

EquilibriumCheck verify_equilibrium(const PoolSystem& sys, const InfiltrationMatrix& x,
                                    double probe_tol) {
  validate_pair(sys, x);
  std::size_t p = sys.pool_count();

  EquilibriumCheck check;
  check.gains.resize(p, 0.0);
  RevenueReport current = converge_revenues(sys, x);
  for (std::size_t actor = 0; actor < p; ++actor) {
    std::vector<double> row = best_response(sys, x, actor);
    double best = actor_revenue(sys, x.with_row(actor, row), actor);
    check.gains[actor] = std::max(0.0, best - current.density[actor]);
    check.worst_gain = std::max(check.worst_gain, check.gains[actor]);
  }
  check.is_nash = check.worst_gain <= probe_tol;
  return check;
}

DilemmaMatrix dilemma_matrix(double m1, double m2) {
  PoolSystem sys({m1, m2});
  InfiltrationMatrix zero = InfiltrationMatrix::zero(2);
  validate_pair(sys, zero);

  DilemmaMatrix dm;
  dm.none_none = DilemmaCell{0.0, 0.0, 1.0, 1.0};

  auto respond = [&](std::size_t actor) {
    std::vector<double> row = best_response(sys, zero, actor);
    InfiltrationMatrix x = zero.with_row(actor, row);
    RevenueReport rep = converge_revenues(sys, x);
    return DilemmaCell{x.rate(0, 1), x.rate(1, 0), rep.density[0], rep.density[1]};
  };
  dm.attack_none = respond(0);
  dm.none_attack = respond(1);

  GameTrace eq = round_robin_equilibrium(sys, zero);
  dm.attack_attack = DilemmaCell{eq.final_x.rate(0, 1), eq.final_x.rate(1, 0),
                                 eq.final_report.density[0], eq.final_report.density[1]};

  dm.attack_dominant_pool1 = dm.attack_none.r1 > dm.none_none.r1 &&
                             dm.attack_attack.r1 > dm.none_attack.r1;
  dm.attack_dominant_pool2 = dm.none_attack.r2 > dm.none_none.r2 &&
                             dm.attack_attack.r2 > dm.attack_none.r2;
  dm.mutual_attack_pareto_dominated = dm.none_none.r1 > dm.attack_attack.r1 &&
                                      dm.none_none.r2 > dm.attack_attack.r2;
  return dm;
}

}  // namespace poolgame
