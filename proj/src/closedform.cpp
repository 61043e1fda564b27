#include "poolgame/closedform.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "poolgame/golden.hpp"

namespace poolgame {

namespace {

constexpr double kFeasSlack = 1e-12;
constexpr double kDegenerate = 1e-9;

void check_two_pool_sizes(double m1, double m2) {
  if (!(m1 > 0.0) || !(m2 > 0.0) || m1 + m2 > 1.0 + kFeasSlack) {
    throw PoolGameError(Violation::InfeasibleSizes,
                        "need m1, m2 > 0 and m1 + m2 <= 1, got m1 = " + std::to_string(m1) +
                            ", m2 = " + std::to_string(m2));
  }
}

}  // namespace

double one_attacker_revenue(double m1, double m2, double x) {
  check_two_pool_sizes(m1, m2);
  double denom = m1 * (x - 1.0) * (m2 + x);
  if (denom == 0.0) {
    throw PoolGameError(Violation::DegenerateDenominator,
                        "one-attacker revenue undefined at x = " + std::to_string(x));
  }
  return (x * x - m1 * (m2 + x)) / denom;
}

OneAttackerSolution one_attacker_optimum(double m1, double m2) {
  check_two_pool_sizes(m1, m2);

  double best_x;
  double pivot = -1.0 + m1 + m2;
  if (std::abs(pivot) < kDegenerate) {
    // Closed form divides by m1 + m2 - 1; maximize numerically instead.
    best_x = maximize_scalar([&](double x) { return one_attacker_revenue(m1, m2, x); }, 0.0,
                             m1, 1e-12);
  } else {
    double disc = -m2 * m2 * (-1.0 + m1 + m1 * m2);
    if (disc < 0.0) {
      throw PoolGameError(Violation::NegativeDiscriminant,
                          "discriminant " + std::to_string(disc));
    }
    double root = std::sqrt(disc);
    // Printed form uses the + branch, which lands outside [0, m1] on sampled
    // instances; keep whichever branch is feasible and pays more.
    double cand[2] = {(m2 - m1 * m2 + root) / pivot, (m2 - m1 * m2 - root) / pivot};
    bool found = false;
    best_x = 0.0;
    double best_r = -1.0;
    for (double x : cand) {
      if (x < -kFeasSlack || x > m1 + kFeasSlack) continue;
      x = std::clamp(x, 0.0, m1);
      double r = one_attacker_revenue(m1, m2, x);
      if (r > best_r) {
        best_r = r;
        best_x = x;
        found = true;
      }
    }
    if (!found) {
      best_x = maximize_scalar([&](double x) { return one_attacker_revenue(m1, m2, x); }, 0.0,
                               m1, 1e-12);
    }
  }

  OneAttackerSolution sol;
  sol.x12 = best_x;
  sol.r1 = one_attacker_revenue(m1, m2, best_x);
  sol.r2 = (m2 / (1.0 - best_x)) / (m2 + best_x);  // R2 / (m2 + x)
  return sol;
}

SymmetricSolution symmetric_equilibrium(std::size_t p, double mi) {
  if (p < 2 || !(mi > 0.0) || static_cast<double>(p) * mi > 1.0 + kFeasSlack) {
    throw PoolGameError(Violation::InfeasibleSizes,
                        "need p >= 2, mi > 0 and p * mi <= 1, got p = " + std::to_string(p) +
                            ", mi = " + std::to_string(mi));
  }
  double pd = static_cast<double>(p);
  double disc = (mi - pd) * (mi - pd) - 4.0 * mi * mi * (pd - 1.0) * (pd - 1.0) * pd;
  if (disc < 0.0) {
    throw PoolGameError(Violation::NegativeDiscriminant, "discriminant " + std::to_string(disc));
  }
  double root = std::sqrt(disc);

  SymmetricSolution sol;
  sol.p = p;
  sol.mi = mi;
  sol.x = (pd - mi - root) / (2.0 * (pd - 1.0) * (pd - 1.0) * pd);
  sol.r = 2.0 * pd / (pd - mi + 2.0 * mi * pd + root);
  if (sol.x < -kFeasSlack || sol.x > mi / pd + kFeasSlack) {
    throw PoolGameError(Violation::InfeasibleSizes,
                        "equilibrium rate " + std::to_string(sol.x) + " outside [0, mi/p]");
  }
  sol.x = std::clamp(sol.x, 0.0, mi / pd);
  return sol;
}

double symmetric_revenue(std::size_t p, double mi, double x_own, double x_others) {
  if (p < 2 || !(mi > 0.0) || static_cast<double>(p) * mi > 1.0 + kFeasSlack) {
    throw PoolGameError(Violation::InfeasibleSizes, "infeasible symmetric system");
  }
  double pd = static_cast<double>(p);
  double lim = mi / pd + kFeasSlack;
  if (x_own < -kFeasSlack || x_own > lim || x_others < -kFeasSlack || x_others > lim) {
    throw PoolGameError(Violation::BudgetExceeded, "rate outside [0, mi/p]");
  }
  double q = pd - 1.0;
  double num = mi * mi + mi * x_own - q * x_own * (q * x_others + x_own);
  double den = (q * x_own + q * q * x_others - 1.0) *
               ((mi + x_own) * (mi + q * x_others) - q * x_own * x_others);
  return -num / den;
}

}  // namespace poolgame
