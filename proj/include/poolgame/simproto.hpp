#pragma once

#include <cstdint>
#include <vector>

#include "poolgame/model.hpp"

namespace poolgame {

// What a unit miner does each step.
//   loyal_pool >= 0, victim_pool <  0: honest pool member
//   loyal_pool >= 0, victim_pool >= 0: infiltrator, loyal to loyal_pool,
//                                      withholding inside victim_pool
//   loyal_pool <  0, victim_pool <  0: solo miner
//   loyal_pool <  0, victim_pool >= 0: classical lone block withholder
struct MinerAssignment {
  int loyal_pool = -1;
  int victim_pool = -1;
};

struct SimConfig {
  std::vector<double> pool_powers;  // requested loyal power per pool
  std::vector<MinerAssignment> miners;
  double lambda_partial = 10.0;  // mean partial proofs per miner per step
  double lambda_full = 0.01;     // mean full proofs per miner per step
  std::uint64_t seed = 0;
  std::int64_t steps = 100'000;

  std::size_t pool_count() const { return pool_powers.size(); }
  std::size_t miners_per_unit() const { return miners.size(); }

  // Power fractions actually realized by the whole-miner discretization.
  std::vector<double> realized_powers() const;
  std::vector<double> realized_rates() const;  // row-major p x p

  void validate() const;
};

// Rounds m_i and x_i^j to whole miners (round-half-to-even). Infiltrators
// are drawn from their own pool's loyal count; the power not assigned to any
// pool mines solo.
SimConfig make_sim_config(const PoolSystem& sys, const InfiltrationMatrix& x,
                          std::size_t miners_per_unit, std::uint64_t seed, std::int64_t steps,
                          double lambda_partial = 10.0, double lambda_full = 0.01);

struct GroupStats {
  std::size_t members = 0;
  double density = 0.0;  // mean per-member revenue in solo-baseline units
  double se = 0.0;       // standard error of the density
};

struct SimReport {
  std::vector<GroupStats> pools;  // loyal members of each pool
  GroupStats solo;
  std::int64_t steps_executed = 0;  // after warm-up
  std::int64_t warmup_steps = 0;
  std::vector<double> miner_mean;  // per-miner mean revenue per step
  std::vector<double> miner_se;
};

class SimWorld {
public:
  explicit SimWorld(const SimConfig& config);

  void step();

  std::int64_t step_count() const { return step_count_; }
  const std::vector<double>& miner_revenue() const { return miner_revenue_; }
  double pending_infiltration(std::size_t pool) const { return pending_[pool]; }

  // Per-step conservation bookkeeping.
  double last_step_published() const { return last_published_; }
  double last_step_credited() const { return last_credited_; }
  double pending_total() const;
  double carry_total() const;

  // Starts accumulating the statistics that feed the report.
  void begin_measurement();
  SimReport report() const;

private:
  void draw_proofs();

  const SimConfig config_;
  double reward_per_full_proof_;
  std::int64_t step_count_ = 0;

  std::vector<std::uint64_t> rng_state_;  // per-miner substream state
  std::vector<std::int64_t> ppow_;
  std::vector<std::int64_t> fpow_;
  std::vector<double> credit_;  // per-miner credit within the current step

  std::vector<double> pending_;  // infiltration revenue earned last step
  std::vector<double> carry_;    // revenue a pool could not distribute

  std::vector<double> miner_revenue_;
  double last_published_ = 0.0;
  double last_credited_ = 0.0;

  // Post-warm-up accumulators: per-step group totals and their squares.
  bool measuring_ = false;
  std::int64_t measured_steps_ = 0;
  std::vector<double> pool_sum_, pool_sumsq_;
  double solo_sum_ = 0.0, solo_sumsq_ = 0.0;
  std::vector<double> miner_sum_, miner_sumsq_;
  std::vector<std::size_t> loyal_count_;
  std::size_t solo_count_ = 0;
};

// Runs the full horizon, discarding a warm-up for the infiltration revenue
// delay to settle, and reports empirical densities with standard errors.
SimReport run(const SimConfig& config);

}  // namespace poolgame
