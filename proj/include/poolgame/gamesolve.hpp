#pragma once

#include <cstddef>
#include <vector>

#include "poolgame/analytic.hpp"
#include "poolgame/model.hpp"

namespace poolgame {

struct GameRound {
  std::size_t actor;
  std::vector<double> row;  // the actor's updated infiltration rates
  RevenueReport report;     // converged revenues after the move
};

struct GameTrace {
  std::vector<GameRound> rounds;
  bool converged = false;
  std::size_t cycles = 0;
  InfiltrationMatrix final_x{0, {}};
  RevenueReport final_report;
};

struct EquilibriumCheck {
  bool is_nash = false;
  double worst_gain = 0.0;
  std::vector<double> gains;  // best-response payoff minus current, per pool
};

struct DilemmaCell {
  double x12 = 0.0, x21 = 0.0;
  double r1 = 1.0, r2 = 1.0;
};

// Attack here means best-responding, not a fixed rate: an attacking pool
// always optimizes its infiltration of the other.
struct DilemmaMatrix {
  DilemmaCell none_none;      // exactly (1, 1)
  DilemmaCell attack_none;    // pool 1 best-responds, pool 2 passive
  DilemmaCell none_attack;    // mirrored
  DilemmaCell attack_attack;  // mutual round-robin equilibrium
  bool attack_dominant_pool1 = false;
  bool attack_dominant_pool2 = false;
  bool mutual_attack_pareto_dominated = false;
};

// The actor's row maximizing its own converged revenue density while all
// other rates stay fixed, over the box {x_j >= 0, sum_j x_j <= m_actor}.
// Single target: one golden-section search. Multiple targets: cyclic
// coordinate ascent with per-coordinate golden-section.
std::vector<double> best_response(const PoolSystem& sys, const InfiltrationMatrix& x,
                                  std::size_t actor);

// Pools take turns (ascending index, starting from pool 0) choosing their
// best response until no rate moves more than x_tol over a full cycle.
GameTrace round_robin_equilibrium(const PoolSystem& sys, const InfiltrationMatrix& x0,
                                  std::size_t max_cycles = 10'000, double x_tol = 1e-7);

// Probes every pool with its best response; is_nash iff nobody gains more
// than probe_tol.
EquilibriumCheck verify_equilibrium(const PoolSystem& sys, const InfiltrationMatrix& x,
                                    double probe_tol = 1e-6);

// The 2x2 attack / no-attack payoff table for two pools.
DilemmaMatrix dilemma_matrix(double m1, double m2);

}  // namespace poolgame
