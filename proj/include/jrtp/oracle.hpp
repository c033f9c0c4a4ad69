#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "jrtp/column.hpp"
#include "jrtp/graph.hpp"
#include "jrtp/instance.hpp"
#include "jrtp/shifts.hpp"

namespace jrtp::oracle {

struct Limits {
  int max_requests = 6;
  int max_shifts = 4;
};

class CapExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

struct Walker {
  const RoutingGraph& g;
  const Shift& shift;
  std::vector<Column>& out;
  std::vector<int> stops;
  std::vector<StopTime> times;
  std::uint32_t open = 0;
  std::uint32_t served = 0;
  int load = 0;

  bool step(int j, StopTime& t) const {
    const int i = stops.back();
    if (!g.has_edge(i, j)) return false;
    const Node& nd = g.node(j);
    const Minutes arrive = times.back().depart + g.travel_time(i, j);
    if (arrive > nd.window.latest || arrive > shift.end) return false;
    const Minutes start = std::max(arrive, nd.window.earliest);
    t = {arrive, start, start + nd.service_time};
    return true;
  }

  void visit(int j, const StopTime& t) {
    stops.push_back(j);
    times.push_back(t);
    walk();
    stops.pop_back();
    times.pop_back();
  }

  void walk() {
    const int n = g.num_requests();
    StopTime t;
    if (open == 0 && served != 0 && step(g.destination(), t)) {
      Column c;
      c.shift = shift;
      c.stops = stops;
      c.stops.push_back(g.destination());
      c.times = times;
      c.times.push_back(t);
      c.served = served_requests(g, c.stops);
      out.push_back(std::move(c));
    }
    for (int r = 1; r <= n; ++r) {
      const std::uint32_t bit = 1u << (r - 1);
      if ((open & bit) && step(g.dropoff(r), t)) {
        open &= ~bit;
        load -= g.node(g.pickup(r)).demand;
        visit(g.dropoff(r), t);
        load += g.node(g.pickup(r)).demand;
        open |= bit;
      }
    }
    for (int r = 1; r <= n; ++r) {
      const std::uint32_t bit = 1u << (r - 1);
      const int d = g.node(g.pickup(r)).demand;
      if ((served & bit) || load + d > g.capacity()) continue;
      if (!step(g.pickup(r), t)) continue;
      open |= bit;
      served |= bit;
      load += d;
      visit(g.pickup(r), t);
      load -= d;
      served &= ~bit;
      open &= ~bit;
    }
  }
};

// Textbook full-tableau simplex with Bland's rule for
//   max c'x  s.t.  A x <= b,  x >= 0,  b >= 0.
// Kept separate from the master's LP engine so the two can be compared.
inline double tableau_max(const std::vector<std::vector<double>>& a, const std::vector<double>& b,
                          const std::vector<double>& c) {
  const int m = static_cast<int>(a.size());
  const int n = static_cast<int>(c.size());
  const int width = n + m + 1;
  std::vector<std::vector<double>> t(m + 1, std::vector<double>(width, 0.0));
  std::vector<int> basic(m);
  for (int r = 0; r < m; ++r) {
    for (int j = 0; j < n; ++j) t[r][j] = a[r][j];
    t[r][n + r] = 1.0;
    t[r][width - 1] = b[r];
    basic[r] = n + r;
  }
  for (int j = 0; j < n; ++j) t[m][j] = -c[j];
  constexpr double eps = 1e-10;
  while (true) {
    int enter = -1;
    for (int j = 0; j < n + m; ++j)
      if (t[m][j] < -eps) {
        enter = j;
        break;
      }
    if (enter < 0) break;
    int leave = -1;
    double best = 0.0;
    for (int r = 0; r < m; ++r) {
      if (t[r][enter] <= eps) continue;
      const double q = t[r][width - 1] / t[r][enter];
      if (leave < 0 || q < best - eps || (q <= best + eps && basic[r] < basic[leave])) {
        leave = r;
        best = q;
      }
    }
    if (leave < 0) throw std::runtime_error("oracle LP unbounded");
    const double piv = t[leave][enter];
    for (double& v : t[leave]) v /= piv;
    for (int r = 0; r <= m; ++r) {
      if (r == leave) continue;
      const double f = t[r][enter];
      if (f == 0.0) continue;
      for (int j = 0; j < width; ++j) t[r][j] -= f * t[leave][j];
    }
    basic[leave] = enter;
  }
  return t[m][width - 1];
}

}  // namespace detail

// Every feasible route in `shift` that serves at least one request.
inline std::vector<Column> enumerate_routes(const RoutingGraph& g, const Shift& shift, const Limits& lim = {}) {
  if (g.num_requests() > lim.max_requests)
    throw CapExceeded("oracle limited to " + std::to_string(lim.max_requests) + " requests");
  std::vector<Column> out;
  detail::Walker w{g, shift, out, {g.origin()}, {{shift.start, shift.start, shift.start}}};
  w.walk();
  return out;
}

struct ExactResult {
  int objective = 0;
  std::vector<Column> witness;
  // LP relaxation of the path model over every feasible route.
  double lp_bound = 0.0;
  std::size_t routes = 0;
};

// Exhaustive optimum of the path model. Only the set of requests a route
// serves matters to the objective, so routes are grouped by that set and at
// most |F| groups are chosen.
inline ExactResult solve_exact(const Instance& inst, const RoutingGraph& g, const std::vector<Shift>& shifts,
                               const Limits& lim = {}) {
  if (static_cast<int>(shifts.size()) > lim.max_shifts)
    throw CapExceeded("oracle limited to " + std::to_string(lim.max_shifts) + " shifts");
  const int n = inst.num_requests();
  std::map<std::uint32_t, Column> by_mask;
  ExactResult res;
  for (const Shift& s : shifts) {
    for (Column& c : enumerate_routes(g, s, lim)) {
      ++res.routes;
      std::uint32_t mask = 0;
      for (int r : c.served) mask |= 1u << (r - 1);
      by_mask.emplace(mask, std::move(c));
    }
  }
  std::vector<std::uint32_t> masks;
  for (const auto& kv : by_mask) masks.push_back(kv.first);

  auto value = [&](std::uint32_t covered) {
    int v = 0;
    for (const Rider& u : inst.riders) {
      const bool all = std::all_of(u.request_ids.begin(), u.request_ids.end(),
                                   [&](int r) { return covered & (1u << (r - 1)); });
      if (all) v += static_cast<int>(u.request_ids.size());
    }
    return v;
  };

  const int fleet = inst.vehicles();
  std::vector<std::uint32_t> pick, best_pick;
  int best = 0;
  auto search = [&](auto&& self, std::size_t from, std::uint32_t covered) -> void {
    const int v = value(covered);
    if (v > best) {
      best = v;
      best_pick = pick;
    }
    if (static_cast<int>(pick.size()) == fleet || best == n) return;
    for (std::size_t k = from; k < masks.size(); ++k) {
      if ((masks[k] | covered) == covered) continue;
      pick.push_back(masks[k]);
      self(self, k + 1, covered | masks[k]);
      pick.pop_back();
    }
  };
  search(search, 0, 0u);
  res.objective = best;

  // Witness: shrink the chosen sets so they are disjoint and keep only fully
  // served riders. Any subset of a feasible route's requests is itself
  // served by some enumerated route, so each shrunk set has a route.
  std::uint32_t keep = 0;
  std::uint32_t all_chosen = 0;
  for (std::uint32_t m : best_pick) all_chosen |= m;
  for (const Rider& u : inst.riders) {
    std::uint32_t rm = 0;
    for (int r : u.request_ids) rm |= 1u << (r - 1);
    if ((all_chosen & rm) == rm) keep |= rm;
  }
  std::uint32_t taken = 0;
  int next_id = 0;
  for (std::uint32_t m : best_pick) {
    const std::uint32_t part = m & keep & ~taken;
    if (part == 0) continue;
    auto it = by_mask.find(part);
    if (it == by_mask.end()) throw std::logic_error("no route serves a subset of a feasible route");
    Column c = it->second;
    c.id = next_id++;
    res.witness.push_back(std::move(c));
    taken |= part;
  }

  // LP over all route groups; one y per rider.
  const int riders = static_cast<int>(inst.riders.size());
  const int cols = static_cast<int>(masks.size()) + riders;
  const int rows = n + 1 + riders;
  std::vector<std::vector<double>> a(rows, std::vector<double>(cols, 0.0));
  std::vector<double> b(rows, 0.0), c(cols, 0.0);
  for (std::size_t k = 0; k < masks.size(); ++k) {
    for (int r = 1; r <= n; ++r)
      if (masks[k] & (1u << (r - 1))) a[r - 1][k] = -1.0;
    a[n][k] = 1.0;
  }
  b[n] = fleet;
  for (int u = 0; u < riders; ++u) {
    const int col = static_cast<int>(masks.size()) + u;
    for (int r : inst.riders[u].request_ids) a[r - 1][col] = 1.0;
    a[n + 1 + u][col] = 1.0;
    b[n + 1 + u] = 1.0;
    c[col] = static_cast<double>(inst.riders[u].request_ids.size());
  }
  res.lp_bound = detail::tableau_max(a, b, c);
  return res;
}

}  // namespace jrtp::oracle
