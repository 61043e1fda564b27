#pragma once

#include <ostream>
#include <vector>

#include "poolgame/model.hpp"

namespace poolgame {

struct SweepSpec {
  enum class Mode { OneAttacker, TwoPoolEquilibrium };

  double m1_start = 0.05, m1_stop = 0.95, m1_step = 0.01;
  double m2_start = 0.05, m2_stop = 0.95, m2_step = 0.01;
  Mode mode = Mode::OneAttacker;
  double x_tol = 1e-7;
  std::size_t max_cycles = 10'000;
  unsigned threads = 0;  // 0: hardware concurrency
};

struct SweepCell {
  double m1 = 0.0, m2 = 0.0;
  bool feasible = false;
  bool converged = false;
  double x12 = 0.0, x21 = 0.0;
  double r1 = 0.0, r2 = 0.0;
};

// Evaluates every (m1, m2) grid cell, row-major over m1 then m2. Infeasible
// cells (m1 + m2 > 1) are emitted with feasible = false; per-cell failures
// are recorded as converged = false and never abort the sweep. Cells are
// computed by a worker pool but always returned in grid order.
std::vector<SweepCell> run_sweep(const SweepSpec& spec);

// Fixed CSV schema: m1,m2,feasible,x12,x21,r1,r2,converged. Values use 6
// significant digits; infeasible cells leave the numeric columns empty.
void write_sweep_csv(std::ostream& out, const std::vector<SweepCell>& cells);

}  // namespace poolgame
