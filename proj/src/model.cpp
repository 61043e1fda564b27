#include "poolgame/model.hpp"

#include <cmath>

namespace poolgame {

namespace {
constexpr double kSumSlack = 1e-12;  // float noise allowance for sum(m_i) <= 1
}

const char* violation_name(Violation v) {
  switch (v) {
    case Violation::NegativePower: return "NegativePower";
    case Violation::PowerSumExceedsOne: return "PowerSumExceedsOne";
    case Violation::NegativeInfiltration: return "NegativeInfiltration";
    case Violation::SelfInfiltration: return "SelfInfiltration";
    case Violation::BudgetExceeded: return "BudgetExceeded";
    case Violation::NoEffectivePower: return "NoEffectivePower";
    case Violation::InfeasibleSizes: return "InfeasibleSizes";
    case Violation::NonConvergence: return "NonConvergence";
    case Violation::SingularSystem: return "SingularSystem";
    case Violation::NegativeDiscriminant: return "NegativeDiscriminant";
    case Violation::DegenerateDenominator: return "DegenerateDenominator";
  }
  return "Unknown";
}

PoolGameError::PoolGameError(Violation v, const std::string& msg)
    : std::runtime_error(std::string(violation_name(v)) + ": " + msg), violation_(v) {}

PoolSystem::PoolSystem(std::vector<double> pool_powers) : powers_(std::move(pool_powers)) {
  if (powers_.empty()) {
    throw PoolGameError(Violation::NegativePower, "at least one pool required");
  }
  double sum = 0.0;
  for (double m : powers_) {
    if (!(m > 0.0)) {
      throw PoolGameError(Violation::NegativePower,
                          "pool power must be positive, got " + std::to_string(m));
    }
    sum += m;
  }
  if (sum > 1.0 + kSumSlack) {
    throw PoolGameError(Violation::PowerSumExceedsOne,
                        "pool powers sum to " + std::to_string(sum));
  }
  solo_power_ = sum >= 1.0 ? 0.0 : 1.0 - sum;
}

InfiltrationMatrix InfiltrationMatrix::zero(std::size_t p) {
  return InfiltrationMatrix(p, std::vector<double>(p * p, 0.0));
}

InfiltrationMatrix::InfiltrationMatrix(std::size_t p, std::vector<double> row_major)
    : p_(p), x_(std::move(row_major)) {
  if (x_.size() != p_ * p_) {
    throw PoolGameError(Violation::NegativeInfiltration, "matrix shape mismatch");
  }
  for (std::size_t i = 0; i < p_; ++i) {
    for (std::size_t j = 0; j < p_; ++j) {
      double v = x_[i * p_ + j];
      if (v < 0.0) {
        throw PoolGameError(Violation::NegativeInfiltration,
                            "x[" + std::to_string(i) + "][" + std::to_string(j) + "] = " +
                                std::to_string(v));
      }
      if (i == j && v != 0.0) {
        throw PoolGameError(Violation::SelfInfiltration,
                            "pool " + std::to_string(i) + " cannot infiltrate itself");
      }
    }
  }
}

double InfiltrationMatrix::outgoing(std::size_t i) const {
  double s = 0.0;
  for (std::size_t j = 0; j < p_; ++j) s += x_[i * p_ + j];
  return s;
}

double InfiltrationMatrix::incoming(std::size_t i) const {
  double s = 0.0;
  for (std::size_t j = 0; j < p_; ++j) s += x_[j * p_ + i];
  return s;
}

double InfiltrationMatrix::total() const {
  double s = 0.0;
  for (double v : x_) s += v;
  return s;
}

InfiltrationMatrix InfiltrationMatrix::with_row(std::size_t i,
                                                const std::vector<double>& row) const {
  std::vector<double> data = x_;
  for (std::size_t j = 0; j < p_; ++j) data[i * p_ + j] = row[j];
  return InfiltrationMatrix(p_, std::move(data));
}

void validate_pair(const PoolSystem& sys, const InfiltrationMatrix& x) {
  if (sys.pool_count() != x.pool_count()) {
    throw PoolGameError(Violation::InfeasibleSizes, "pool count mismatch");
  }
  for (std::size_t i = 0; i < sys.pool_count(); ++i) {
    double spent = x.outgoing(i);
    if (spent > sys.power(i) - kBudgetEpsilon) {
      throw PoolGameError(Violation::BudgetExceeded,
                          "pool " + std::to_string(i) + " spends " + std::to_string(spent) +
                              " of its " + std::to_string(sys.power(i)));
    }
  }
  if (1.0 - x.total() <= 0.0) {
    throw PoolGameError(Violation::NoEffectivePower, "no mining power left in the system");
  }
}

std::pair<PoolSystem, InfiltrationMatrix> validate_system(
    const std::vector<double>& powers, const std::vector<double>& x_row_major) {
  PoolSystem sys(powers);
  InfiltrationMatrix x(powers.size(), x_row_major);
  validate_pair(sys, x);
  return {std::move(sys), std::move(x)};
}

std::vector<double> infiltration_matrix_G(const PoolSystem& sys, const InfiltrationMatrix& x) {
  std::size_t p = sys.pool_count();
  std::vector<double> g(p * p, 0.0);
  for (std::size_t i = 0; i < p; ++i) {
    double members = sys.power(i) + x.incoming(i);
    for (std::size_t j = 0; j < p; ++j) {
      g[i * p + j] = x.rate(i, j) / members;
    }
  }
  return g;
}

}  // namespace poolgame
