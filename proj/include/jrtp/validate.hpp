#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "jrtp/column.hpp"
#include "jrtp/graph.hpp"
#include "jrtp/instance.hpp"
#include "jrtp/shifts.hpp"

namespace jrtp {

struct Verdict {
  std::vector<Violation> violations;
  int recomputed_objective = 0;

  bool ok() const { return violations.empty(); }
  bool has(Constraint c) const {
    return std::any_of(violations.begin(), violations.end(),
                       [c](const Violation& v) { return v.constraint == c; });
  }
};

// Re-checks a set of routes from scratch: each route on its own, the fleet
// limit, single service per request, complete service per rider, and the
// claimed objective against a recount.
inline Verdict validate_solution(const std::vector<Column>& routes, int claimed_objective,
                                 const Instance& inst, const RoutingGraph& g) {
  Verdict v;
  const auto shifts = enumerate_shifts(inst);
  for (const Column& c : routes) {
    auto found = validate_route(c, g, inst.shift_duration);
    v.violations.insert(v.violations.end(), found.begin(), found.end());
    if (std::find(shifts.begin(), shifts.end(), c.shift) == shifts.end())
      v.violations.push_back({Constraint::ShiftDuration, c.id, "shift is not a candidate shift"});
  }
  if (static_cast<int>(routes.size()) > inst.vehicles())
    v.violations.push_back({Constraint::FleetSize, -1,
                            std::to_string(routes.size()) + " routes for " +
                                std::to_string(inst.vehicles()) + " vehicles"});

  std::vector<int> times_served(inst.num_requests() + 1, 0);
  for (const Column& c : routes)
    for (int s : c.stops)
      if (g.is_pickup(s)) ++times_served[g.node(s).request_id];
  for (int r = 1; r <= inst.num_requests(); ++r)
    if (times_served[r] > 1)
      v.violations.push_back({Constraint::RiderService, -1, "request " + std::to_string(r) + " served twice"});
  for (const Rider& u : inst.riders) {
    const auto served = std::count_if(u.request_ids.begin(), u.request_ids.end(),
                                      [&](int r) { return times_served[r] > 0; });
    if (served != 0 && served != static_cast<long>(u.request_ids.size()))
      v.violations.push_back({Constraint::RiderService, -1, "rider " + std::to_string(u.id) + " served partially"});
  }

  for (int r = 1; r <= inst.num_requests(); ++r)
    if (times_served[r] > 0) ++v.recomputed_objective;
  if (v.recomputed_objective != claimed_objective)
    v.violations.push_back({Constraint::Objective, -1,
                            "claimed " + std::to_string(claimed_objective) + ", recount " +
                                std::to_string(v.recomputed_objective)});
  return v;
}

}  // namespace jrtp
