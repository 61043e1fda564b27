#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "poolgame/analytic.hpp"
#include "poolgame/closedform.hpp"
#include "poolgame/format.hpp"
#include "poolgame/gamesolve.hpp"
#include "poolgame/model.hpp"
#include "poolgame/simproto.hpp"
#include "poolgame/sweep.hpp"

namespace pg = poolgame;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitNonConvergence = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<double> parse_numbers(const std::string& text, char sep) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) {
    if (item.empty()) throw UsageError("empty number in '" + text + "'");
    std::size_t pos = 0;
    double v = std::stod(item, &pos);
    if (pos != item.size()) throw UsageError("bad number '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw UsageError("no numbers in '" + text + "'");
  return out;
}

// "--x zero" or semicolon-separated rows: "0,0.1;0.1,0".
std::vector<double> parse_matrix(const std::string& text, std::size_t p) {
  if (text == "zero") return std::vector<double>(p * p, 0.0);
  std::vector<double> out;
  std::stringstream ss(text);
  std::string row;
  std::size_t rows = 0;
  while (std::getline(ss, row, ';')) {
    std::vector<double> vals = parse_numbers(row, ',');
    if (vals.size() != p) {
      throw UsageError("matrix row has " + std::to_string(vals.size()) + " entries, expected " +
                       std::to_string(p));
    }
    out.insert(out.end(), vals.begin(), vals.end());
    ++rows;
  }
  if (rows != p) {
    throw UsageError("matrix has " + std::to_string(rows) + " rows, expected " +
                     std::to_string(p));
  }
  return out;
}

class Output {
public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary);
      if (!file_) throw UsageError("cannot open output file '" + path + "'");
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

private:
  std::ofstream file_;
};

int cmd_converge(const std::string& powers_arg, const std::string& x_arg,
                 const std::string& fees_arg, double tol, const std::string& method_arg,
                 const std::string& out_path) {
  std::vector<double> powers = parse_numbers(powers_arg, ',');
  auto [sys, x] = pg::validate_system(powers, parse_matrix(x_arg, powers.size()));

  pg::SolveMethod method = method_arg == "iterate"
                               ? pg::SolveMethod::fixed_point(1'000'000, tol)
                               : pg::SolveMethod::direct(tol);
  std::optional<pg::FeeSchedule> fees;
  if (!fees_arg.empty()) {
    pg::FeeSchedule f{parse_numbers(fees_arg, ',')};
    if (f.f.size() != powers.size()) throw UsageError("fees length mismatch");
    fees = std::move(f);
  }

  pg::RevenueReport rep = pg::converge_revenues(sys, x, method, fees ? &*fees : nullptr);
  Output out(out_path);
  out.stream() << "pool,power,R,r,residual\n";
  for (std::size_t i = 0; i < sys.pool_count(); ++i) {
    out.stream() << (i + 1) << ',' << pg::fmt_g6(sys.power(i)) << ','
                 << pg::fmt_g6(rep.direct_rate[i]) << ',' << pg::fmt_g6(rep.density[i]) << ','
                 << pg::fmt_g6(rep.residual) << '\n';
  }
  out.stream() << "solo," << pg::fmt_g6(sys.solo_power()) << ",,"
               << pg::fmt_g6(rep.solo_density) << ',' << pg::fmt_g6(rep.residual) << '\n';
  return kExitOk;
}

int cmd_best_response(const std::string& powers_arg, const std::string& x_arg, std::size_t actor1,
                      const std::string& out_path) {
  std::vector<double> powers = parse_numbers(powers_arg, ',');
  auto [sys, x] = pg::validate_system(powers, parse_matrix(x_arg, powers.size()));
  if (actor1 < 1 || actor1 > sys.pool_count()) throw UsageError("actor out of range");
  std::size_t actor = actor1 - 1;

  std::vector<double> row = pg::best_response(sys, x, actor);
  pg::RevenueReport rep = pg::converge_revenues(sys, x.with_row(actor, row));
  Output out(out_path);
  out.stream() << "actor,target,x,r_actor\n";
  for (std::size_t j = 0; j < sys.pool_count(); ++j) {
    if (j == actor) continue;
    out.stream() << actor1 << ',' << (j + 1) << ',' << pg::fmt_g6(row[j]) << ','
                 << pg::fmt_g6(rep.density[actor]) << '\n';
  }
  return kExitOk;
}

int cmd_equilibrium(const std::string& powers_arg, const std::string& x0_arg,
                    std::size_t max_cycles, double x_tol, const std::string& out_path) {
  std::vector<double> powers = parse_numbers(powers_arg, ',');
  auto [sys, x0] = pg::validate_system(powers, parse_matrix(x0_arg, powers.size()));

  pg::GameTrace trace = pg::round_robin_equilibrium(sys, x0, max_cycles, x_tol);
  Output out(out_path);
  out.stream() << "i,j,x,r_i\n";
  for (std::size_t i = 0; i < sys.pool_count(); ++i) {
    for (std::size_t j = 0; j < sys.pool_count(); ++j) {
      if (i == j) continue;
      out.stream() << (i + 1) << ',' << (j + 1) << ',' << pg::fmt_g6(trace.final_x.rate(i, j))
                   << ',' << pg::fmt_g6(trace.final_report.density[i]) << '\n';
    }
  }
  out.stream() << "converged," << (trace.converged ? "true" : "false") << ",,\n";
  out.stream() << "cycles," << trace.cycles << ",,\n";
  return trace.converged ? kExitOk : kExitNonConvergence;
}

int cmd_symmetric(std::size_t p, double mi, const std::string& out_path) {
  pg::SymmetricSolution sol = pg::symmetric_equilibrium(p, mi);
  Output out(out_path);
  out.stream() << "p,mi,x,r\n";
  out.stream() << sol.p << ',' << pg::fmt_g6(sol.mi) << ',' << pg::fmt_g6(sol.x) << ','
               << pg::fmt_g6(sol.r) << '\n';
  return kExitOk;
}

int cmd_dilemma(double m1, double m2, const std::string& out_path) {
  pg::DilemmaMatrix dm = pg::dilemma_matrix(m1, m2);
  Output out(out_path);
  auto cell = [&](const char* c1, const char* c2, const pg::DilemmaCell& c) {
    out.stream() << c1 << ',' << c2 << ',' << pg::fmt_g6(c.x12) << ',' << pg::fmt_g6(c.x21)
                 << ',' << pg::fmt_g6(c.r1) << ',' << pg::fmt_g6(c.r2) << '\n';
  };
  out.stream() << "pool1,pool2,x12,x21,r1,r2\n";
  cell("none", "none", dm.none_none);
  cell("attack", "none", dm.attack_none);
  cell("none", "attack", dm.none_attack);
  cell("attack", "attack", dm.attack_attack);
  out.stream() << "attack_dominant_pool1," << (dm.attack_dominant_pool1 ? "true" : "false")
               << '\n';
  out.stream() << "attack_dominant_pool2," << (dm.attack_dominant_pool2 ? "true" : "false")
               << '\n';
  out.stream() << "mutual_attack_pareto_dominated,"
               << (dm.mutual_attack_pareto_dominated ? "true" : "false") << '\n';

  // Human-readable table on stderr so the CSV stays clean.
  auto show = [&](const pg::DilemmaCell& c) {
    return "(" + pg::fmt_g6(c.r1) + ", " + pg::fmt_g6(c.r2) + ")";
  };
  std::cerr << "            pool1:none        pool1:attack\n"
            << "pool2:none    " << show(dm.none_none) << "  " << show(dm.attack_none) << "\n"
            << "pool2:attack  " << show(dm.none_attack) << "  " << show(dm.attack_attack)
            << "\n";
  return kExitOk;
}

int cmd_sweep(const std::string& mode_arg, const std::string& m1_arg, const std::string& m2_arg,
              double step_override, double x_tol, std::size_t max_cycles, unsigned threads,
              const std::string& out_path) {
  pg::SweepSpec spec;
  spec.mode = mode_arg == "equilibrium" ? pg::SweepSpec::Mode::TwoPoolEquilibrium
                                        : pg::SweepSpec::Mode::OneAttacker;
  auto parse_axis = [](const std::string& text, double& start, double& stop, double& step) {
    if (text.empty()) return;
    std::vector<double> v = parse_numbers(text, ':');
    if (v.size() != 3) throw UsageError("axis must be start:stop:step");
    start = v[0];
    stop = v[1];
    step = v[2];
  };
  parse_axis(m1_arg, spec.m1_start, spec.m1_stop, spec.m1_step);
  parse_axis(m2_arg, spec.m2_start, spec.m2_stop, spec.m2_step);
  if (step_override > 0.0) spec.m1_step = spec.m2_step = step_override;
  spec.x_tol = x_tol;
  spec.max_cycles = max_cycles;
  spec.threads = threads;

  std::vector<pg::SweepCell> cells = pg::run_sweep(spec);
  Output out(out_path);
  pg::write_sweep_csv(out.stream(), cells);
  return kExitOk;
}

struct SimulateArgs {
  std::string powers, x;
  std::size_t miners = 1000;
  std::int64_t steps = 100'000;
  std::optional<std::uint64_t> seed;
  double lambda_partial = 10.0;
  double lambda_full = 0.01;
};

// Flat key=value config files mirror the CLI flags; flags override.
void load_sim_config_file(const std::string& path, SimulateArgs& args) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file '" + path + "'");
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::size_t eq = line.find('=');
    if (eq == std::string::npos) throw UsageError("bad config line: " + line);
    std::string key = line.substr(0, eq);
    std::string value = line.substr(eq + 1);
    if (key == "powers") args.powers = value;
    else if (key == "x") args.x = value;
    else if (key == "miners") args.miners = std::stoull(value);
    else if (key == "steps") args.steps = std::stoll(value);
    else if (key == "seed") args.seed = std::stoull(value);
    else if (key == "lambda_partial") args.lambda_partial = std::stod(value);
    else if (key == "lambda_full") args.lambda_full = std::stod(value);
    else throw UsageError("unknown config key '" + key + "'");
  }
}

int cmd_simulate(const SimulateArgs& args, const std::string& out_path) {
  if (args.powers.empty()) throw UsageError("powers required (flag or config file)");
  if (!args.seed) throw UsageError("seed required (flag or config file)");
  std::vector<double> powers = parse_numbers(args.powers, ',');
  std::string x_arg = args.x.empty() ? "zero" : args.x;
  auto [sys, x] = pg::validate_system(powers, parse_matrix(x_arg, powers.size()));

  pg::SimConfig config = pg::make_sim_config(sys, x, args.miners, *args.seed, args.steps,
                                             args.lambda_partial, args.lambda_full);
  pg::SimReport rep = pg::run(config);

  // The analytic oracle is evaluated at the rates the discretization
  // actually realized, not the requested ones.
  auto [rsys, rx] = pg::validate_system(config.realized_powers(), config.realized_rates());
  pg::RevenueReport analytic = pg::converge_revenues(rsys, rx);

  Output out(out_path);
  out.stream() << "group,members,empirical,analytic,se,z\n";
  for (std::size_t i = 0; i < rep.pools.size(); ++i) {
    const pg::GroupStats& g = rep.pools[i];
    double z = g.se > 0.0 ? (g.density - analytic.density[i]) / g.se : 0.0;
    out.stream() << "pool" << (i + 1) << ',' << g.members << ',' << pg::fmt_g6(g.density) << ','
                 << pg::fmt_g6(analytic.density[i]) << ',' << pg::fmt_g6(g.se) << ','
                 << pg::fmt_g6(z) << '\n';
  }
  double zs = rep.solo.se > 0.0 ? (rep.solo.density - analytic.solo_density) / rep.solo.se : 0.0;
  out.stream() << "solo," << rep.solo.members << ',' << pg::fmt_g6(rep.solo.density) << ','
               << pg::fmt_g6(analytic.solo_density) << ',' << pg::fmt_g6(rep.solo.se) << ','
               << pg::fmt_g6(zs) << '\n';
  out.stream() << "steps," << rep.steps_executed << ",,,,\n";
  out.stream() << "warmup," << rep.warmup_steps << ",,,,\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pool block-withholding game: revenues, best responses, equilibria, simulation"};
  app.require_subcommand(1);

  std::string powers, x = "zero", fees, out_path, method = "direct";
  double tol = 1e-12;

  auto* converge = app.add_subcommand("converge", "Revenue densities for fixed rates");
  converge->add_option("--powers", powers, "pool powers, e.g. 0.2,0.3")->required();
  converge->add_option("--x", x, "infiltration rows 'a,b;c,d' or 'zero'");
  converge->add_option("--fees", fees, "per-pool fee fractions");
  converge->add_option("--tol", tol, "solver tolerance");
  converge->add_option("--method", method)->check(CLI::IsMember({"direct", "iterate"}));
  converge->add_option("--out", out_path, "output file (default stdout)");

  std::size_t actor = 1;
  auto* best = app.add_subcommand("best-response", "Optimal row for one pool");
  best->add_option("--powers", powers)->required();
  best->add_option("--x", x);
  best->add_option("--actor", actor, "acting pool, 1-based")->required();
  best->add_option("--out", out_path);

  std::size_t max_cycles = 10'000;
  double x_tol = 1e-7;
  auto* equil = app.add_subcommand("equilibrium", "Round-robin dynamics to Nash equilibrium");
  equil->add_option("--powers", powers)->required();
  equil->add_option("--x0", x, "starting rates (default zero)");
  equil->add_option("--max-cycles", max_cycles);
  equil->add_option("--x-tol", x_tol);
  equil->add_option("--out", out_path);

  std::size_t sym_p = 2;
  double sym_mi = 0.0;
  auto* symmetric = app.add_subcommand("symmetric", "Symmetric equilibrium of p equal pools");
  symmetric->add_option("--p", sym_p)->required();
  symmetric->add_option("--mi", sym_mi)->required();
  symmetric->add_option("--out", out_path);

  double m1 = 0.0, m2 = 0.0;
  auto* dilemma = app.add_subcommand("dilemma", "2x2 attack / no-attack payoff table");
  dilemma->add_option("--m1", m1)->required();
  dilemma->add_option("--m2", m2)->required();
  dilemma->add_option("--out", out_path);

  std::string sweep_mode = "one-attacker", m1_axis, m2_axis;
  double sweep_step = 0.0;
  unsigned threads = 0;
  auto* sweep = app.add_subcommand("sweep", "Grid sweep over pool sizes");
  sweep->add_option("--mode", sweep_mode)
      ->check(CLI::IsMember({"one-attacker", "equilibrium"}));
  sweep->add_option("--m1", m1_axis, "axis start:stop:step (default 0.05:0.95:0.01)");
  sweep->add_option("--m2", m2_axis);
  sweep->add_option("--step", sweep_step, "override both axis steps");
  sweep->add_option("--x-tol", x_tol);
  sweep->add_option("--max-cycles", max_cycles);
  sweep->add_option("--threads", threads);
  sweep->add_option("--out", out_path);

  SimulateArgs sim;
  std::string sim_config_path;
  std::uint64_t sim_seed = 0;
  auto* simulate = app.add_subcommand("simulate", "Stochastic protocol simulation");
  simulate->add_option("--config", sim_config_path, "key=value config file");
  auto* sim_powers_opt = simulate->add_option("--powers", sim.powers);
  auto* sim_x_opt = simulate->add_option("--x", sim.x);
  auto* sim_miners_opt = simulate->add_option("--miners", sim.miners);
  auto* sim_steps_opt = simulate->add_option("--steps", sim.steps);
  auto* sim_seed_opt = simulate->add_option("--seed", sim_seed);
  auto* sim_lp_opt = simulate->add_option("--lambda-partial", sim.lambda_partial);
  auto* sim_lf_opt = simulate->add_option("--lambda-full", sim.lambda_full);
  simulate->add_option("--out", out_path);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    if (converge->parsed()) return cmd_converge(powers, x, fees, tol, method, out_path);
    if (best->parsed()) return cmd_best_response(powers, x, actor, out_path);
    if (equil->parsed()) return cmd_equilibrium(powers, x, max_cycles, x_tol, out_path);
    if (symmetric->parsed()) return cmd_symmetric(sym_p, sym_mi, out_path);
    if (dilemma->parsed()) return cmd_dilemma(m1, m2, out_path);
    if (sweep->parsed()) {
      return cmd_sweep(sweep_mode, m1_axis, m2_axis, sweep_step, x_tol, max_cycles, threads,
                       out_path);
    }
    if (simulate->parsed()) {
      SimulateArgs merged;
      if (!sim_config_path.empty()) load_sim_config_file(sim_config_path, merged);
      if (sim_powers_opt->count() > 0) merged.powers = sim.powers;
      if (sim_x_opt->count() > 0) merged.x = sim.x;
      if (sim_miners_opt->count() > 0) merged.miners = sim.miners;
      if (sim_steps_opt->count() > 0) merged.steps = sim.steps;
      if (sim_seed_opt->count() > 0) merged.seed = sim_seed;
      if (sim_lp_opt->count() > 0) merged.lambda_partial = sim.lambda_partial;
      if (sim_lf_opt->count() > 0) merged.lambda_full = sim.lambda_full;
      return cmd_simulate(merged, out_path);
    }
  } catch (const pg::PoolGameError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.violation() == pg::Violation::NonConvergence ? kExitNonConvergence
                                                          : kExitValidation;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitOk;
}
