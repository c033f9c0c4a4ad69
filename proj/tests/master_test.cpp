#include <gtest/gtest.h>

#include <random>

#include "jrtp/jrtp.hpp"
#include "support.hpp"

using namespace jrtp;

namespace {

// n requests, riders of size 1 or 2 over consecutive ids.
Instance abstract_instance(std::mt19937_64& rng, int n, int fleet) {
  Instance inst;
  inst.fleet_size = fleet;
  int id = 1;
  while (id <= n) {
    Rider u{static_cast<int>(inst.riders.size()) + 1, {}};
    const int size = (id < n && rng() % 2) ? 2 : 1;
    for (int k = 0; k < size; ++k) {
      TripRequest r;
      r.id = id++;
      r.rider_id = u.id;
      r.pickup_window = {400, 500};
      r.dropoff_window = {400, 600};
      inst.requests.push_back(r);
      u.request_ids.push_back(r.id);
    }
    inst.riders.push_back(u);
  }
  return inst;
}

std::vector<Column> random_pool(std::mt19937_64& rng, int n, int count) {
  std::vector<Column> pool;
  for (int k = 0; k < count; ++k) {
    Column c;
    c.id = k;
    for (int r = 1; r <= n; ++r)
      if (rng() % 3 == 0) c.served.push_back(r);
    if (c.served.empty()) c.served.push_back(1 + static_cast<int>(rng() % n));
    pool.push_back(c);
  }
  return pool;
}

// Dense covering LP with explicit lambda <= 1 rows and y_r <= 1, equal y
// within a rider as two opposite inequalities, fixed columns as constants.
double oracle_lp(const Instance& inst, const std::vector<Column>& pool, const std::set<int>& fixed) {
  const int n = inst.num_requests();
  std::vector<const Column*> free;
  for (const Column& c : pool)
    if (!fixed.count(c.id)) free.push_back(&c);
  const int m = static_cast<int>(free.size());
  const int vars = m + n;
  std::vector<std::vector<double>> a;
  std::vector<double> b;
  std::vector<double> c(vars, 0.0);
  for (int r = 0; r < n; ++r) c[m + r] = 1.0;
  auto row = [&] { return std::vector<double>(vars, 0.0); };
  for (int r = 1; r <= n; ++r) {
    auto x = row();
    x[m + r - 1] = 1.0;
    double given = 0;
    for (const Column& col : pool)
      if (fixed.count(col.id) && col.serves(r)) given += 1.0;
    for (int j = 0; j < m; ++j)
      if (free[j]->serves(r)) x[j] = -1.0;
    a.push_back(x);
    b.push_back(given);
    auto cap = row();
    cap[m + r - 1] = 1.0;
    a.push_back(cap);
    b.push_back(1.0);
  }
  auto fleet = row();
  for (int j = 0; j < m; ++j) fleet[j] = 1.0;
  a.push_back(fleet);
  b.push_back(inst.vehicles() - static_cast<double>(fixed.size()));
  for (int j = 0; j < m; ++j) {
    auto x = row();
    x[j] = 1.0;
    a.push_back(x);
    b.push_back(1.0);
  }
  for (const Rider& u : inst.riders)
    for (std::size_t k = 1; k < u.request_ids.size(); ++k) {
      auto x = row();
      x[m + u.request_ids[0] - 1] = 1.0;
      x[m + u.request_ids[k] - 1] = -1.0;
      a.push_back(x);
      b.push_back(0.0);
      for (double& v : x) v = -v;
      a.push_back(x);
      b.push_back(0.0);
    }
  return oracle::detail::tableau_max(a, b, c);
}

}  // namespace

TEST(Master, ObjectiveMatchesIndependentLp) {
  std::mt19937_64 rng(99);
  const lp::RevisedSimplex backend;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 5);
    const Instance inst = abstract_instance(rng, n, 1 + static_cast<int>(rng() % 3));
    const auto pool = random_pool(rng, n, 1 + static_cast<int>(rng() % 8));
    std::set<int> fixed;
    if (trial % 3 == 0) fixed.insert(0);
    const MasterSolution sol = solve_rlmp(pool, fixed, inst, backend);
    ASSERT_TRUE(sol.feasible);
    EXPECT_NEAR(sol.objective, oracle_lp(inst, pool, fixed), 1e-6) << "trial " << trial;

    // Primal feasibility of the reported solution.
    double used = 0;
    for (const auto& [id, v] : sol.lambda) {
      EXPECT_GT(v, 0.0);
      EXPECT_LE(v, 1.0 + 1e-12);
      used += v;
    }
    EXPECT_LE(used, inst.vehicles() + 1e-6);
    for (int r = 1; r <= n; ++r) {
      double cover = 0;
      for (const Column& c : pool)
        if (c.serves(r)) cover += sol.value(c.id);
      EXPECT_LE(sol.y[r - 1], cover + 1e-6);
    }
    for (const Rider& u : inst.riders)
      for (int r : u.request_ids) EXPECT_DOUBLE_EQ(sol.y[r - 1], sol.y[u.request_ids[0] - 1]);

    // Every pooled column prices out at the returned duals.
    EXPECT_LE(sol.sigma, 0.0);
    for (const Column& c : pool)
      if (!fixed.count(c.id)) {
        EXPECT_GE(sol.reduced_cost(c.served), -kReducedCostTolerance);
      }
  }
}

TEST(Master, EmptyPool) {
  std::mt19937_64 rng(1);
  const Instance inst = abstract_instance(rng, 5, 2);
  const MasterSolution sol = solve_rlmp({}, {}, inst, lp::RevisedSimplex{});
  EXPECT_TRUE(sol.feasible);
  EXPECT_DOUBLE_EQ(sol.objective, 0.0);
  EXPECT_DOUBLE_EQ(sol.sigma, 0.0);
  EXPECT_TRUE(sol.lambda.empty());
  // Dual feasibility for each rider variable.
  for (const Rider& u : inst.riders) {
    double s = 0;
    for (int r : u.request_ids) {
      EXPECT_GE(sol.pi[r - 1], 0.0);
      s += sol.pi[r - 1];
    }
    EXPECT_GE(s, static_cast<double>(u.request_ids.size()) - 1e-9);
  }
}

TEST(Master, TooManyFixedIsInfeasible) {
  std::mt19937_64 rng(2);
  const Instance inst = abstract_instance(rng, 3, 1);
  const auto pool = random_pool(rng, 3, 3);
  EXPECT_FALSE(solve_rlmp(pool, {0, 1}, inst, lp::RevisedSimplex{}).feasible);
  EXPECT_THROW(solve_rlmp(pool, {17}, inst, lp::RevisedSimplex{}), std::invalid_argument);
}

TEST(Master, ExcludedColumnsAreLeftOut) {
  std::mt19937_64 rng(3);
  const Instance inst = abstract_instance(rng, 4, 2);
  std::vector<Column> pool = random_pool(rng, 4, 6);
  const std::set<int> excluded{0, 2, 4};
  std::vector<Column> rest;
  for (const Column& c : pool)
    if (!excluded.count(c.id)) rest.push_back(c);
  const MasterSolution a = solve_rlmp(pool, {}, inst, lp::RevisedSimplex{}, nullptr, &excluded);
  const MasterSolution b = solve_rlmp(rest, {}, inst, lp::RevisedSimplex{});
  EXPECT_NEAR(a.objective, b.objective, 1e-9);
  for (int id : excluded) EXPECT_EQ(a.value(id), 0.0);
}

TEST(Master, WarmStartGivesSameOptimum) {
  std::mt19937_64 rng(4);
  const lp::RevisedSimplex backend;
  for (int trial = 0; trial < 50; ++trial) {
    const Instance inst = abstract_instance(rng, 6, 2);
    auto pool = random_pool(rng, 6, 4);
    MasterWarmStart warm;
    solve_rlmp(pool, {}, inst, backend, &warm);
    auto more = random_pool(rng, 6, 8);
    for (std::size_t k = 4; k < more.size(); ++k) pool.push_back(more[k]);
    const MasterSolution w = solve_rlmp(pool, {}, inst, backend, &warm);
    const MasterSolution c = solve_rlmp(pool, {}, inst, backend);
    EXPECT_NEAR(w.objective, c.objective, 1e-9);
  }
}

TEST(Master, MaxFractionalTieBreak) {
  MasterSolution sol;
  sol.lambda = {{1, 0.5}, {2, 0.5}, {3, 0.7}, {4, 1.0}, {5, 0.5}};
  std::vector<Column> pool(5);
  for (int k = 0; k < 5; ++k) pool[k].id = k + 1;
  pool[0].served = {1};
  pool[1].served = {1, 2};
  pool[2].served = {3};
  pool[3].served = {4, 5, 6};
  pool[4].served = {2, 3};
  EXPECT_EQ(find_max_fractional_column(sol, {}, pool), 3);
  // Equal values: more served requests first, then lower id.
  EXPECT_EQ(find_max_fractional_column(sol, {3}, pool), 2);
  EXPECT_EQ(find_max_fractional_column(sol, {2, 3}, pool), 5);
  EXPECT_EQ(find_max_fractional_column(sol, {2, 3, 5}, pool), 1);
  EXPECT_THROW(find_max_fractional_column(sol, {1, 2, 3, 5}, pool), std::logic_error);
  EXPECT_FALSE(sol.integral());
  sol.lambda = {{1, 1.0 - 1e-7}, {2, 1e-7}};
  EXPECT_TRUE(sol.integral());
}
