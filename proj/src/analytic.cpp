#include "poolgame/analytic.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <cstdlib>

namespace poolgame {

namespace {

double fee_of(const FeeSchedule* fees, std::size_t j) {
  return fees == nullptr ? 0.0 : fees->f[j];
}

// Residual of r against the fixed-point map, in the map's own units.
double map_residual(const PoolSystem& sys, const InfiltrationMatrix& x,
                    const std::vector<double>& rates, const std::vector<double>& r,
                    const FeeSchedule* fees) {
  std::size_t p = sys.pool_count();
  double worst = 0.0;
  for (std::size_t i = 0; i < p; ++i) {
    double income = rates[i];
    for (std::size_t j = 0; j < p; ++j) {
      income += x.rate(i, j) * (1.0 - fee_of(fees, j)) * r[j];
    }
    double mapped = income / (sys.power(i) + x.incoming(i));
    worst = std::max(worst, std::abs(mapped - r[i]));
  }
  return worst;
}

}  // namespace

std::vector<double> direct_rates(const PoolSystem& sys, const InfiltrationMatrix& x) {
  validate_pair(sys, x);
  std::size_t p = sys.pool_count();
  double effective = 1.0 - x.total();
  std::vector<double> rates(p);
  for (std::size_t i = 0; i < p; ++i) {
    rates[i] = (sys.power(i) - x.outgoing(i)) / effective;
  }
  return rates;
}

RevenueReport converge_revenues(const PoolSystem& sys, const InfiltrationMatrix& x,
                                const SolveMethod& method, const FeeSchedule* fees) {
  std::size_t p = sys.pool_count();
  RevenueReport report;
  report.direct_rate = direct_rates(sys, x);
  report.solo_density = 1.0 / (1.0 - x.total());

  if (method.kind == SolveMethod::Kind::DirectLinear) {
    // (m_i + incoming(i)) r_i - sum_j x_i^j (1 - f_j) r_j = R_i
    Eigen::MatrixXd a(p, p);
    Eigen::VectorXd b(p);
    for (std::size_t i = 0; i < p; ++i) {
      for (std::size_t j = 0; j < p; ++j) {
        a(i, j) = -x.rate(i, j) * (1.0 - fee_of(fees, j));
      }
      a(i, i) += sys.power(i) + x.incoming(i);
      b(i) = report.direct_rate[i];
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    if (!lu.isInvertible()) {
      throw PoolGameError(Violation::SingularSystem, "revenue system is singular");
    }
    Eigen::VectorXd r = lu.solve(b);
    report.density.assign(r.data(), r.data() + p);
    report.iterations = 0;
  } else {
    std::vector<double> r(p, 0.0);
    int it = 0;
    for (; it < method.max_steps; ++it) {
      if (map_residual(sys, x, report.direct_rate, r, fees) <= method.tol) break;
      r = iterate_revenue_step(sys, x, r, fees);
    }
    if (it == method.max_steps &&
        map_residual(sys, x, report.direct_rate, r, fees) > method.tol) {
      throw PoolGameError(Violation::NonConvergence,
                          "fixed point not reached in " + std::to_string(method.max_steps) +
                              " iterations");
    }
    report.density = std::move(r);
    report.iterations = it;
  }
  report.residual = map_residual(sys, x, report.direct_rate, report.density, fees);
  return report;
}

std::pair<double, double> two_pool_revenues(double m1, double m2, double x12, double x21) {
  auto [sys, x] = validate_system({m1, m2}, {0.0, x12, x21, 0.0});
  auto rates = direct_rates(sys, x);
  double denom = m1 * m2 + m1 * x12 + m2 * x21;
  double r1 = (m2 * rates[0] + x12 * (rates[0] + rates[1])) / denom;
  double r2 = (m1 * rates[1] + x21 * (rates[0] + rates[1])) / denom;
  return {r1, r2};
}

std::vector<double> iterate_revenue_step(const PoolSystem& sys, const InfiltrationMatrix& x,
                                         const std::vector<double>& r_prev,
                                         const FeeSchedule* fees) {
  std::size_t p = sys.pool_count();
  auto rates = direct_rates(sys, x);
  std::vector<double> r_next(p);
  for (std::size_t i = 0; i < p; ++i) {
    double income = rates[i];
    for (std::size_t j = 0; j < p; ++j) {
      income += x.rate(i, j) * (1.0 - fee_of(fees, j)) * r_prev[j];
    }
    r_next[i] = income / (sys.power(i) + x.incoming(i));
  }
  return r_next;
}

}  // namespace poolgame
