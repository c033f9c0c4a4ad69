#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

#include "jrtp/column.hpp"
#include "jrtp/instance.hpp"
#include "jrtp/lp.hpp"

namespace jrtp {

inline constexpr double kIntegralityTolerance = 1e-6;
inline constexpr double kReducedCostTolerance = 1e-6;

struct MasterSolution {
  bool feasible = true;
  std::map<int, double> lambda;  // column id -> value
  std::vector<double> y;         // per request, index r - 1
  double objective = 0.0;
  std::vector<double> pi;  // per request, index r - 1, >= 0
  double sigma = 0.0;      // fleet dual, <= 0; pricing starts from -sigma
  int lp_iterations = 0;

  double value(int column_id) const {
    auto it = lambda.find(column_id);
    return it == lambda.end() ? 0.0 : it->second;
  }

  bool integral(double eps = kIntegralityTolerance) const {
    return std::all_of(lambda.begin(), lambda.end(), [eps](const auto& kv) {
      return kv.second <= eps || kv.second >= 1.0 - eps;
    });
  }

  // Reduced cost of a route serving `served` under these duals.
  double reduced_cost(const std::vector<int>& served) const {
    double c = -sigma;
    for (int r : served) c -= pi[r - 1];
    return c;
  }
};

// Basis carried between consecutive master solves so that each re-solve
// starts from the previous optimum.
class MasterWarmStart {
 public:
  enum class Kind { Column, Rider, Slack };
  using Key = std::pair<Kind, int>;

  std::vector<Key> basis;
};

// Restricted linear master over `pool`:
//
//   max  sum_r y_r
//   s.t. y_r <= sum_theta alpha_{r,theta} lambda_theta    (dual pi_r >= 0)
//        sum_theta lambda_theta <= |F|                    (dual -sigma >= 0)
//        y_r equal within a rider, 0 <= y <= 1, lambda >= 0, fixed lambda = 1
//
// One y per rider carries the equal-service rows. The lambda <= 1 bounds are
// left implicit: a value above one never adds coverage, so the optimum is
// unchanged and every pool column prices out nonnegative at the returned duals.
// Columns in `excluded` are left out of the model.
inline MasterSolution solve_rlmp(const std::vector<Column>& pool, const std::set<int>& fixed,
                                 const Instance& inst, const lp::Backend& backend,
                                 MasterWarmStart* warm = nullptr, const std::set<int>* excluded = nullptr) {
  const int n = inst.num_requests();
  const int fleet = inst.vehicles();
  const int riders = static_cast<int>(inst.riders.size());

  std::map<int, const Column*> by_id;
  for (const Column& c : pool) by_id[c.id] = &c;
  for (int id : fixed)
    if (!by_id.count(id)) throw std::invalid_argument("fixed column " + std::to_string(id) + " not in pool");

  MasterSolution sol;
  sol.y.assign(n, 0.0);
  sol.pi.assign(n, 0.0);
  if (static_cast<int>(fixed.size()) > fleet) {
    sol.feasible = false;
    return sol;
  }

  const int fleet_row = n;
  const int rider_row0 = n + 1;
  lp::Problem p;
  p.num_rows = n + 1 + riders;
  p.rhs.assign(p.num_rows, 0.0);
  for (int id : fixed)
    for (int r : by_id[id]->served) p.rhs[r - 1] += 1.0;
  p.rhs[fleet_row] = fleet - static_cast<double>(fixed.size());
  for (int u = 0; u < riders; ++u) p.rhs[rider_row0 + u] = 1.0;

  std::vector<int> var_column;
  for (const Column& c : pool) {
    if (fixed.count(c.id) || (excluded && excluded->count(c.id))) continue;
    std::vector<lp::Problem::Entry> entries;
    entries.reserve(c.served.size() + 1);
    for (int r : c.served) entries.push_back({r - 1, -1.0});
    entries.push_back({fleet_row, 1.0});
    p.add_column(0.0, std::move(entries));
    var_column.push_back(c.id);
  }
  const int first_rider_var = p.num_cols();
  for (int u = 0; u < riders; ++u) {
    const Rider& rider = inst.riders[u];
    std::vector<lp::Problem::Entry> entries;
    for (int r : rider.request_ids) entries.push_back({r - 1, 1.0});
    entries.push_back({rider_row0 + u, 1.0});
    p.add_column(static_cast<double>(rider.request_ids.size()), std::move(entries));
  }

  std::vector<int> start;
  if (warm && !warm->basis.empty()) {
    std::map<int, int> column_var;
    for (int v = 0; v < static_cast<int>(var_column.size()); ++v) column_var[var_column[v]] = v;
    for (const auto& [kind, id] : warm->basis) {
      if (kind == MasterWarmStart::Kind::Column) {
        auto it = column_var.find(id);
        if (it == column_var.end()) break;
        start.push_back(it->second);
      } else if (kind == MasterWarmStart::Kind::Rider) {
        start.push_back(first_rider_var + id);
      } else {
        start.push_back(p.num_cols() + id);
      }
    }
    if (static_cast<int>(start.size()) != p.num_rows) start.clear();
  }

  const lp::Result res = backend.solve(p, start);
  if (res.status != lp::Status::Optimal) throw std::runtime_error("LP backend did not reach optimality");
  sol.lp_iterations = res.iterations;

  for (int id : fixed) sol.lambda[id] = 1.0;
  for (int v = 0; v < static_cast<int>(var_column.size()); ++v) {
    const double x = std::min(1.0, res.x[v]);
    if (x > 0.0) sol.lambda[var_column[v]] = x;
  }
  for (int u = 0; u < riders; ++u) {
    const double yu = std::clamp(res.x[first_rider_var + u], 0.0, 1.0);
    for (int r : inst.riders[u].request_ids) sol.y[r - 1] = yu;
  }
  sol.objective = 0.0;
  for (double v : sol.y) sol.objective += v;
  for (int r = 0; r < n; ++r) sol.pi[r] = std::max(0.0, res.duals[r]);
  sol.sigma = -std::max(0.0, res.duals[fleet_row]);

  if (warm) {
    warm->basis.clear();
    for (int var : res.basis) {
      if (var < first_rider_var)
        warm->basis.push_back({MasterWarmStart::Kind::Column, var_column[var]});
      else if (var < p.num_cols())
        warm->basis.push_back({MasterWarmStart::Kind::Rider, var - first_rider_var});
      else
        warm->basis.push_back({MasterWarmStart::Kind::Slack, var - p.num_cols()});
    }
  }
  return sol;
}

// Unfixed, non-excluded column with the largest fractional value. Ties go to
// the column serving more requests, then to the lower id.
inline int find_max_fractional_column(const MasterSolution& sol, const std::set<int>& excluded,
                                      const std::vector<Column>& pool,
                                      double eps = kIntegralityTolerance) {
  int best = -1;
  double best_value = 0.0;
  std::size_t best_served = 0;
  for (const Column& c : pool) {
    if (excluded.count(c.id)) continue;
    const double v = sol.value(c.id);
    if (v <= eps || v >= 1.0 - eps) continue;
    const bool better = best < 0 || v > best_value + 1e-12 ||
                        (std::abs(v - best_value) <= 1e-12 &&
                         (c.served.size() > best_served ||
                          (c.served.size() == best_served && c.id < best)));
    if (better) {
      best = c.id;
      best_value = v;
      best_served = c.served.size();
    }
  }
  if (best < 0) throw std::logic_error("no fractional column to fix");
  return best;
}

}  // namespace jrtp
