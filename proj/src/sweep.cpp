#include "poolgame/sweep.hpp"

#include <atomic>
#include <cmath>
#include <thread>

#include "poolgame/closedform.hpp"
#include "poolgame/format.hpp"
#include "poolgame/gamesolve.hpp"

namespace poolgame {

namespace {

std::vector<double> grid_axis(double start, double stop, double step) {
  if (!(step > 0.0) || stop < start) {
    throw PoolGameError(Violation::InfeasibleSizes, "bad sweep axis");
  }
  std::size_t count = static_cast<std::size_t>(std::floor((stop - start) / step + 0.5)) + 1;
  std::vector<double> axis(count);
  for (std::size_t i = 0; i < count; ++i) axis[i] = start + static_cast<double>(i) * step;
  return axis;
}

SweepCell evaluate_cell(const SweepSpec& spec, double m1, double m2) {
  SweepCell cell;
  cell.m1 = m1;
  cell.m2 = m2;
  if (!(m1 > 0.0) || !(m2 > 0.0) || m1 + m2 > 1.0 + 1e-12) return cell;
  cell.feasible = true;
  try {
    if (spec.mode == SweepSpec::Mode::OneAttacker) {
      OneAttackerSolution sol = one_attacker_optimum(m1, m2);
      cell.x12 = sol.x12;
      cell.r1 = sol.r1;
      cell.r2 = sol.r2;
      cell.converged = true;
    } else {
      PoolSystem sys({m1, m2});
      GameTrace trace = round_robin_equilibrium(sys, InfiltrationMatrix::zero(2),
                                                spec.max_cycles, spec.x_tol);
      cell.x12 = trace.final_x.rate(0, 1);
      cell.x21 = trace.final_x.rate(1, 0);
      cell.r1 = trace.final_report.density[0];
      cell.r2 = trace.final_report.density[1];
      cell.converged = trace.converged;
    }
  } catch (const PoolGameError&) {
    cell.converged = false;
  }
  return cell;
}

}  // namespace

std::vector<SweepCell> run_sweep(const SweepSpec& spec) {
  std::vector<double> m1s = grid_axis(spec.m1_start, spec.m1_stop, spec.m1_step);
  std::vector<double> m2s = grid_axis(spec.m2_start, spec.m2_stop, spec.m2_step);
  std::vector<SweepCell> cells(m1s.size() * m2s.size());

  unsigned workers = spec.threads != 0 ? spec.threads : std::thread::hardware_concurrency();
  workers = std::max(1u, std::min<unsigned>(workers, cells.size()));

  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t k = next.fetch_add(1); k < cells.size(); k = next.fetch_add(1)) {
      cells[k] = evaluate_cell(spec, m1s[k / m2s.size()], m2s[k % m2s.size()]);
    }
  };
  std::vector<std::thread> threads;
  for (unsigned t = 1; t < workers; ++t) threads.emplace_back(work);
  work();
  for (std::thread& t : threads) t.join();
  return cells;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepCell>& cells) {
  out << "m1,m2,feasible,x12,x21,r1,r2,converged\n";
  for (const SweepCell& c : cells) {
    out << fmt_g6(c.m1) << ',' << fmt_g6(c.m2) << ',' << (c.feasible ? "true" : "false") << ',';
    if (c.feasible) {
      out << fmt_g6(c.x12) << ',' << fmt_g6(c.x21) << ',' << fmt_g6(c.r1) << ','
          << fmt_g6(c.r2) << ',' << (c.converged ? "true" : "false");
    } else {
      out << ",,,,";
    }
    out << '\n';
  }
}

}  // namespace poolgame
