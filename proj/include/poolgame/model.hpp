#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace poolgame {

enum class Violation {
  NegativePower,
  PowerSumExceedsOne,
  NegativeInfiltration,
  SelfInfiltration,
  BudgetExceeded,
  NoEffectivePower,
  InfeasibleSizes,
  NonConvergence,
  SingularSystem,
  NegativeDiscriminant,
  DegenerateDenominator,
};

const char* violation_name(Violation v);

class PoolGameError : public std::runtime_error {
public:
  PoolGameError(Violation v, const std::string& msg);
  Violation violation() const { return violation_; }

private:
  Violation violation_;
};

// A pool keeps at least this much of its power out of infiltration, so the
// infiltration matrix G always has row sums strictly below 1.
inline constexpr double kBudgetEpsilon = 1e-9;

// Loyal mining power per pool, as fractions of the total system power m = 1.
// The remainder 1 - sum(m_i) mines solo; solo miners neither attack nor can
// be attacked.
class PoolSystem {
public:
  explicit PoolSystem(std::vector<double> pool_powers);

  std::size_t pool_count() const { return powers_.size(); }
  double power(std::size_t i) const { return powers_[i]; }
  const std::vector<double>& powers() const { return powers_; }
  double solo_power() const { return solo_power_; }

private:
  std::vector<double> powers_;
  double solo_power_;
};

// Attack rates x[i][j]: the mining power pool i registers inside pool j
// solely to withhold blocks. Diagonal is zero.
class InfiltrationMatrix {
public:
  static InfiltrationMatrix zero(std::size_t p);
  InfiltrationMatrix(std::size_t p, std::vector<double> row_major);

  std::size_t pool_count() const { return p_; }
  double rate(std::size_t i, std::size_t j) const { return x_[i * p_ + j]; }
  const std::vector<double>& data() const { return x_; }

  double outgoing(std::size_t i) const;  // sum_j x_i^j
  double incoming(std::size_t i) const;  // sum_j x_j^i
  double total() const;                  // sum over all entries

  // Copy with pool i's row replaced (row[i] must be 0).
  InfiltrationMatrix with_row(std::size_t i, const std::vector<double>& row) const;

private:
  std::size_t p_;
  std::vector<double> x_;
};

// Per-victim-pool fee: the attacker of pool j keeps only (1 - f[j]) of its
// infiltration income from j.
struct FeeSchedule {
  std::vector<double> f;

  static FeeSchedule zero(std::size_t p) { return FeeSchedule{std::vector<double>(p, 0.0)}; }
};

// Cross-checks a system/matrix pair: per-pool infiltration budgets and
// positive total effective power. Throws PoolGameError; never clamps.
void validate_pair(const PoolSystem& sys, const InfiltrationMatrix& x);

// Builds and fully validates both objects from raw values.
std::pair<PoolSystem, InfiltrationMatrix> validate_system(const std::vector<double>& powers,
                                                          const std::vector<double>& x_row_major);

// The linear map G with G[i][j] = x_i^j / (m_i + incoming(i)); the revenue
// fixed point is r = m + G r and converges since all row sums are < 1.
std::vector<double> infiltration_matrix_G(const PoolSystem& sys, const InfiltrationMatrix& x);

}  // namespace poolgame
