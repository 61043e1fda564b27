#include "poolgame/simproto.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace poolgame {

namespace {

// splitmix64: tiny splittable generator, one 64-bit word of state per miner.
// Substreams are seeded from (seed, miner id) so adding a miner never
// perturbs the draws of the others.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline double uniform01(std::uint64_t& state) {
  return static_cast<double>(splitmix64_next(state) >> 11) * 0x1.0p-53;
}

// Knuth's multiplication method; fine for the small step means used here.
inline std::int64_t poisson_draw(std::uint64_t& state, double exp_neg_lambda) {
  std::int64_t k = 0;
  double prod = uniform01(state);
  while (prod > exp_neg_lambda) {
    prod *= uniform01(state);
    ++k;
  }
  return k;
}

std::int64_t round_half_even(double v) {
  return static_cast<std::int64_t>(std::nearbyint(v));  // default mode: ties to even
}

bool publishes(const MinerAssignment& a) {
  // Solo miners and honest pool members publish; infiltrators and lone
  // withholders discard their full proofs.
  return a.victim_pool < 0;
}

}  // namespace

void SimConfig::validate() const {
  if (miners.empty()) {
    throw PoolGameError(Violation::InfeasibleSizes, "no miners configured");
  }
  if (steps < 1) {
    throw PoolGameError(Violation::InfeasibleSizes, "step horizon must be positive");
  }
  if (!(lambda_full > 0.0) || !(lambda_partial > lambda_full)) {
    throw PoolGameError(Violation::InfeasibleSizes,
                        "need lambda_partial > lambda_full > 0");
  }
  int p = static_cast<int>(pool_count());
  bool any_publisher = false;
  for (const MinerAssignment& a : miners) {
    if (a.loyal_pool >= p || a.victim_pool >= p) {
      throw PoolGameError(Violation::InfeasibleSizes, "miner assigned to unknown pool");
    }
    if (a.loyal_pool >= 0 && a.loyal_pool == a.victim_pool) {
      throw PoolGameError(Violation::SelfInfiltration,
                          "a pool cannot infiltrate itself");
    }
    any_publisher = any_publisher || publishes(a);
  }
  if (!any_publisher) {
    throw PoolGameError(Violation::NoEffectivePower, "nobody publishes full proofs");
  }
}

std::vector<double> SimConfig::realized_powers() const {
  std::vector<double> powers(pool_count(), 0.0);
  for (const MinerAssignment& a : miners) {
    if (a.loyal_pool >= 0) powers[a.loyal_pool] += 1.0;
  }
  for (double& v : powers) v /= static_cast<double>(miners.size());
  return powers;
}

std::vector<double> SimConfig::realized_rates() const {
  std::size_t p = pool_count();
  std::vector<double> rates(p * p, 0.0);
  for (const MinerAssignment& a : miners) {
    if (a.loyal_pool >= 0 && a.victim_pool >= 0) {
      rates[static_cast<std::size_t>(a.loyal_pool) * p +
            static_cast<std::size_t>(a.victim_pool)] += 1.0;
    }
  }
  for (double& v : rates) v /= static_cast<double>(miners.size());
  return rates;
}

SimConfig make_sim_config(const PoolSystem& sys, const InfiltrationMatrix& x,
                          std::size_t miners_per_unit, std::uint64_t seed, std::int64_t steps,
                          double lambda_partial, double lambda_full) {
  validate_pair(sys, x);
  std::size_t p = sys.pool_count();
  double n = static_cast<double>(miners_per_unit);

  SimConfig config;
  config.pool_powers = sys.powers();
  config.lambda_partial = lambda_partial;
  config.lambda_full = lambda_full;
  config.seed = seed;
  config.steps = steps;

  std::int64_t assigned = 0;
  for (std::size_t i = 0; i < p; ++i) {
    std::int64_t loyal = round_half_even(sys.power(i) * n);
    std::int64_t infiltrating = 0;
    std::vector<std::int64_t> out(p, 0);
    for (std::size_t j = 0; j < p; ++j) {
      out[j] = round_half_even(x.rate(i, j) * n);
      infiltrating += out[j];
    }
    if (infiltrating > loyal) {
      throw PoolGameError(Violation::BudgetExceeded,
                          "pool " + std::to_string(i) + " rounds to more infiltrators (" +
                              std::to_string(infiltrating) + ") than loyal miners (" +
                              std::to_string(loyal) + ")");
    }
    for (std::int64_t k = 0; k < loyal - infiltrating; ++k) {
      config.miners.push_back(MinerAssignment{static_cast<int>(i), -1});
    }
    for (std::size_t j = 0; j < p; ++j) {
      for (std::int64_t k = 0; k < out[j]; ++k) {
        config.miners.push_back(MinerAssignment{static_cast<int>(i), static_cast<int>(j)});
      }
    }
    assigned += loyal;
  }
  if (assigned > static_cast<std::int64_t>(miners_per_unit)) {
    throw PoolGameError(Violation::PowerSumExceedsOne,
                        "pool sizes round to more miners than exist");
  }
  for (std::int64_t k = assigned; k < static_cast<std::int64_t>(miners_per_unit); ++k) {
    config.miners.push_back(MinerAssignment{-1, -1});
  }
  config.validate();
  return config;
}

SimWorld::SimWorld(const SimConfig& config) : config_(config) {
  config_.validate();
  std::size_t n = config_.miners.size();
  std::size_t p = config_.pool_count();

  std::int64_t publishers = 0;
  loyal_count_.assign(p, 0);
  for (const MinerAssignment& a : config_.miners) {
    if (publishes(a)) ++publishers;
    if (a.loyal_pool >= 0) ++loyal_count_[a.loyal_pool];
    if (a.loyal_pool < 0 && a.victim_pool < 0) ++solo_count_;
  }
  // Difficulty normalization: the expected total published revenue per step
  // is exactly 1, whatever power is burned on withholding.
  reward_per_full_proof_ = 1.0 / (config_.lambda_full * static_cast<double>(publishers));

  rng_state_.resize(n);
  for (std::size_t w = 0; w < n; ++w) {
    std::uint64_t s = config_.seed;
    splitmix64_next(s);
    s ^= 0x632be59bd9b4e019ULL * (static_cast<std::uint64_t>(w) + 1);
    splitmix64_next(s);
    rng_state_[w] = s;
  }

  ppow_.assign(n, 0);
  fpow_.assign(n, 0);
  credit_.assign(n, 0.0);
  pending_.assign(p, 0.0);
  carry_.assign(p, 0.0);
  miner_revenue_.assign(n, 0.0);
  pool_sum_.assign(p, 0.0);
  pool_sumsq_.assign(p, 0.0);
  miner_sum_.assign(n, 0.0);
  miner_sumsq_.assign(n, 0.0);
}

void SimWorld::draw_proofs() {
  const double exp_partial = std::exp(-config_.lambda_partial);
  const double exp_full = std::exp(-config_.lambda_full);
  std::size_t n = config_.miners.size();
  for (std::size_t w = 0; w < n; ++w) {
    ppow_[w] = poisson_draw(rng_state_[w], exp_partial);
    fpow_[w] = poisson_draw(rng_state_[w], exp_full);
  }
}

void SimWorld::step() {
  std::size_t n = config_.miners.size();
  std::size_t p = config_.pool_count();

  draw_proofs();

  // Partial proofs land in the distribution base of the loyal pool, and for
  // infiltrators additionally in the victim's base (the victim cannot tell
  // them apart from honest members).
  std::vector<double> published(p, 0.0);
  std::vector<double> base(p, 0.0);
  for (std::size_t w = 0; w < n; ++w) {
    const MinerAssignment& a = config_.miners[w];
    double pp = static_cast<double>(ppow_[w]);
    if (a.loyal_pool >= 0) {
      base[a.loyal_pool] += pp;
      if (a.victim_pool >= 0) {
        base[a.victim_pool] += pp;
      } else {
        published[a.loyal_pool] += static_cast<double>(fpow_[w]) * reward_per_full_proof_;
      }
    } else if (a.victim_pool >= 0) {
      base[a.victim_pool] += pp;
    }
  }

  std::vector<double> payout_per_ppow(p, 0.0);
  last_published_ = 0.0;
  for (std::size_t i = 0; i < p; ++i) {
    last_published_ += published[i];
    double step_revenue = published[i] + pending_[i] + carry_[i];
    if (base[i] > 0.0) {
      payout_per_ppow[i] = step_revenue / base[i];
      carry_[i] = 0.0;
    } else {
      carry_[i] = step_revenue;  // nobody to pay this step; keep it
    }
  }

  std::vector<double> pending_next(p, 0.0);
  std::fill(credit_.begin(), credit_.end(), 0.0);
  last_credited_ = 0.0;
  for (std::size_t w = 0; w < n; ++w) {
    const MinerAssignment& a = config_.miners[w];
    double pp = static_cast<double>(ppow_[w]);
    if (a.loyal_pool >= 0) {
      credit_[w] += pp * payout_per_ppow[a.loyal_pool];
      if (a.victim_pool >= 0) {
        // The victim pays the infiltrator; the attacker collects it and can
        // distribute it only from the next step on.
        pending_next[a.loyal_pool] += pp * payout_per_ppow[a.victim_pool];
      }
    } else if (a.victim_pool >= 0) {
      credit_[w] += pp * payout_per_ppow[a.victim_pool];
    } else {
      credit_[w] += static_cast<double>(fpow_[w]) * reward_per_full_proof_;
      last_published_ += credit_[w];
    }
    last_credited_ += credit_[w];
    miner_revenue_[w] += credit_[w];
  }
  pending_ = std::move(pending_next);
  ++step_count_;

  if (measuring_) {
    std::vector<double> group(p, 0.0);
    double solo = 0.0;
    for (std::size_t w = 0; w < n; ++w) {
      const MinerAssignment& a = config_.miners[w];
      if (a.loyal_pool >= 0) {
        group[a.loyal_pool] += credit_[w];
      } else if (a.victim_pool < 0) {
        solo += credit_[w];
      }
      miner_sum_[w] += credit_[w];
      miner_sumsq_[w] += credit_[w] * credit_[w];
    }
    for (std::size_t i = 0; i < p; ++i) {
      pool_sum_[i] += group[i];
      pool_sumsq_[i] += group[i] * group[i];
    }
    solo_sum_ += solo;
    solo_sumsq_ += solo * solo;
    ++measured_steps_;
  }
}

double SimWorld::pending_total() const {
  double s = 0.0;
  for (double v : pending_) s += v;
  return s;
}

double SimWorld::carry_total() const {
  double s = 0.0;
  for (double v : carry_) s += v;
  return s;
}

void SimWorld::begin_measurement() {
  measuring_ = true;
}

SimReport SimWorld::report() const {
  std::size_t n = config_.miners.size();
  std::size_t p = config_.pool_count();
  double t = static_cast<double>(std::max<std::int64_t>(measured_steps_, 1));
  // Densities are in solo-baseline units: a unit miner's fair share of the
  // unit step revenue is 1 / n.
  double baseline = 1.0 / static_cast<double>(n);

  auto group_stats = [&](double sum, double sumsq, std::size_t members) {
    GroupStats g;
    g.members = members;
    if (members == 0) return g;
    double mean = sum / t;
    double var = std::max(0.0, sumsq / t - mean * mean);
    double scale = 1.0 / (static_cast<double>(members) * baseline);
    g.density = mean * scale;
    g.se = std::sqrt(var / t) * scale;
    return g;
  };

  SimReport rep;
  rep.steps_executed = measured_steps_;
  rep.warmup_steps = step_count_ - measured_steps_;
  for (std::size_t i = 0; i < p; ++i) {
    rep.pools.push_back(group_stats(pool_sum_[i], pool_sumsq_[i], loyal_count_[i]));
  }
  rep.solo = group_stats(solo_sum_, solo_sumsq_, solo_count_);
  rep.miner_mean.resize(n);
  rep.miner_se.resize(n);
  for (std::size_t w = 0; w < n; ++w) {
    double mean = miner_sum_[w] / t;
    double var = std::max(0.0, miner_sumsq_[w] / t - mean * mean);
    rep.miner_mean[w] = mean;
    rep.miner_se[w] = std::sqrt(var / t);
  }
  return rep;
}

namespace {

// Longest pool-to-pool infiltration chain; with a cycle the revenue only
// converges geometrically, so a fixed generous warm-up is used instead.
std::int64_t warmup_length(const SimConfig& config) {
  std::size_t p = config.pool_count();
  std::vector<std::vector<std::size_t>> edges(p);
  for (const MinerAssignment& a : config.miners) {
    if (a.loyal_pool >= 0 && a.victim_pool >= 0) {
      auto& e = edges[a.loyal_pool];
      std::size_t v = static_cast<std::size_t>(a.victim_pool);
      if (std::find(e.begin(), e.end(), v) == e.end()) e.push_back(v);
    }
  }
  std::vector<int> state(p, 0);  // 0 unvisited, 1 on stack, 2 done
  std::vector<std::int64_t> depth(p, 0);
  bool cyclic = false;
  auto dfs = [&](auto&& self, std::size_t u) -> std::int64_t {
    if (state[u] == 1) {
      cyclic = true;
      return 0;
    }
    if (state[u] == 2) return depth[u];
    state[u] = 1;
    std::int64_t best = 0;
    for (std::size_t v : edges[u]) best = std::max(best, 1 + self(self, v));
    state[u] = 2;
    depth[u] = best;
    return best;
  };
  std::int64_t longest = 0;
  for (std::size_t u = 0; u < p; ++u) longest = std::max(longest, dfs(dfs, u));
  return cyclic ? 100 : longest;
}

}  // namespace

SimReport run(const SimConfig& config) {
  config.validate();
  SimWorld world(config);
  std::int64_t warmup = std::min<std::int64_t>(warmup_length(config), config.steps - 1);
  for (std::int64_t t = 0; t < warmup; ++t) world.step();
  world.begin_measurement();
  for (std::int64_t t = warmup; t < config.steps; ++t) world.step();
  return world.report();
}

}  // namespace poolgame
