#pragma once

#include <cstddef>

#include "poolgame/model.hpp"

namespace poolgame {

// Stable state where pool 1 attacks pool 2 and pool 2 does not retaliate.
struct OneAttackerSolution {
  double x12 = 0.0;  // optimal infiltration rate of pool 1 into pool 2
  double r1 = 1.0;
  double r2 = 1.0;
};

// Common rate and revenue of p identical pools all attacking one another.
struct SymmetricSolution {
  std::size_t p = 0;
  double mi = 0.0;
  double x = 0.0;  // in [0, mi / p]
  double r = 1.0;
};

// Attacker revenue as a closed function of its rate:
//   r1 = (x^2 - m1 (m2 + x)) / (m1 (x - 1) (m2 + x))
double one_attacker_revenue(double m1, double m2, double x);

// Closed stable state for the one-attacker game. The square-root branch is
// chosen by feasibility: both branches are evaluated and the one inside
// [0, m1] that maximizes r1 wins. On the degenerate manifold m1 + m2 = 1
// the closed denominator vanishes and a golden-section maximizer is used.
OneAttackerSolution one_attacker_optimum(double m1, double m2);

// Symmetric equilibrium of p equal pools:
//   x = (p - mi - sqrt((mi - p)^2 - 4 mi^2 (p-1)^2 p)) / (2 (p-1)^2 p)
//   r = 2p / (p - mi + 2 mi p + sqrt((mi - p)^2 - 4 mi^2 (p-1)^2 p))
SymmetricSolution symmetric_equilibrium(std::size_t p, double mi);

// Revenue of pool 1 in the equal-size system when it attacks every other
// pool at x_own while every other pool attacks all its peers at x_others.
double symmetric_revenue(std::size_t p, double mi, double x_own, double x_others);

}  // namespace poolgame
