#pragma once

#include <utility>
#include <vector>

#include "poolgame/model.hpp"

namespace poolgame {

struct SolveMethod {
  enum class Kind { DirectLinear, FixedPointIteration };

  Kind kind = Kind::DirectLinear;
  int max_steps = 1'000'000;
  double tol = 1e-12;

  static SolveMethod direct(double tol = 1e-12) {
    return SolveMethod{Kind::DirectLinear, 1, tol};
  }
  static SolveMethod fixed_point(int max_steps = 1'000'000, double tol = 1e-12) {
    return SolveMethod{Kind::FixedPointIteration, max_steps, tol};
  }
};

struct RevenueReport {
  std::vector<double> direct_rate;  // R_i
  std::vector<double> density;      // r_i, solo-baseline units (no attack => 1)
  double solo_density = 1.0;
  double residual = 0.0;
  int iterations = 0;  // 0 for the direct solve
};

// R_i = (m_i - outgoing(i)) / (1 - total infiltration): each pool's share of
// system revenue from its own honest mining, after difficulty normalization.
std::vector<double> direct_rates(const PoolSystem& sys, const InfiltrationMatrix& x);

// Solves the revenue fixed point
//   r_i = (R_i + sum_j x_i^j (1 - f_j) r_j) / (m_i + incoming(i))
// either directly or by iterating the map. fees == nullptr means no fees.
RevenueReport converge_revenues(const PoolSystem& sys, const InfiltrationMatrix& x,
                                const SolveMethod& method = SolveMethod::direct(),
                                const FeeSchedule* fees = nullptr);

// Closed two-pool form:
//   r_1 = (m_2 R_1 + x12 (R_1 + R_2)) / (m_1 m_2 + m_1 x12 + m_2 x21)
// and symmetrically for r_2.
std::pair<double, double> two_pool_revenues(double m1, double m2, double x12, double x21);

// One application of the normalized fixed-point map. Infiltration income is
// one step stale, which is exactly the per-step revenue delay of the
// discrete protocol.
std::vector<double> iterate_revenue_step(const PoolSystem& sys, const InfiltrationMatrix& x,
                                         const std::vector<double>& r_prev,
                                         const FeeSchedule* fees = nullptr);

}  // namespace poolgame
