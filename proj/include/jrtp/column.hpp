#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "jrtp/graph.hpp"
#include "jrtp/shifts.hpp"

namespace jrtp {

struct StopTime {
  Minutes arrive = 0;
  Minutes start = 0;
  Minutes depart = 0;

  friend bool operator==(const StopTime&, const StopTime&) = default;
};

// One vehicle route within one shift.
struct Column {
  int id = -1;
  Shift shift;
  std::vector<int> stops;  // 0, ..., 2n+1
  std::vector<StopTime> times;
  std::vector<int> served;  // request ids, ascending
  double reduced_cost = 0.0;

  bool serves(int request) const { return std::binary_search(served.begin(), served.end(), request); }
};

// Identity of a route independent of its pool id.
struct ColumnKey {
  int shift = 0;
  std::vector<int> stops;

  friend bool operator==(const ColumnKey&, const ColumnKey&) = default;
  friend auto operator<=>(const ColumnKey&, const ColumnKey&) = default;
};

inline ColumnKey key_of(const Column& c) { return {c.shift.index, c.stops}; }

inline std::vector<int> served_requests(const RoutingGraph& g, const std::vector<int>& stops) {
  std::vector<int> served;
  for (int s : stops)
    if (g.is_pickup(s)) served.push_back(g.node(s).request_id);
  std::sort(served.begin(), served.end());
  return served;
}

// Earliest-start schedule for `stops` leaving the depot at the shift start,
// or nullopt when a window, the shift end, or a missing edge blocks it.
// Capacity and pairing are not checked here.
inline std::optional<std::vector<StopTime>> earliest_schedule(const RoutingGraph& g,
                                                               const std::vector<int>& stops,
                                                               const Shift& shift) {
  if (stops.empty() || stops.front() != g.origin()) return std::nullopt;
  std::vector<StopTime> times;
  times.reserve(stops.size());
  times.push_back({shift.start, shift.start, shift.start});
  for (std::size_t k = 1; k < stops.size(); ++k) {
    const int i = stops[k - 1];
    const int j = stops[k];
    if (!g.has_edge(i, j)) return std::nullopt;
    const Node& nd = g.node(j);
    const Minutes arrive = times.back().depart + g.travel_time(i, j);
    if (arrive > nd.window.latest || arrive > shift.end) return std::nullopt;
    const Minutes start = std::max(arrive, nd.window.earliest);
    times.push_back({arrive, start, start + nd.service_time});
  }
  return times;
}

inline std::optional<Column> make_column(const RoutingGraph& g, std::vector<int> stops,
                                         const Shift& shift) {
  auto times = earliest_schedule(g, stops, shift);
  if (!times) return std::nullopt;
  Column c;
  c.shift = shift;
  c.served = served_requests(g, stops);
  c.stops = std::move(stops);
  c.times = std::move(*times);
  return c;
}

// The constraint families a solution is checked against.
enum class Constraint {
  RiderService,   // each request served at most once; riders all-or-nothing
  Precedence,     // pickup and drop-off on the same vehicle, pickup first
  FlowBalance,    // depot-to-depot path over existing edges
  ArrivalTime,    // arrival after departure plus travel; start after arrival
  TimeWindow,     // service start within [a, b]
  ShiftDuration,  // route inside its shift, shift no longer than the limit
  Load,           // running load never negative
  Capacity,       // running load never above capacity
  FleetSize,      // no more routes than vehicles
  Objective,      // reported objective matches the recount
};

constexpr std::string_view to_string(Constraint c) {
  switch (c) {
    case Constraint::RiderService: return "rider-service";
    case Constraint::Precedence: return "precedence";
    case Constraint::FlowBalance: return "flow-balance";
    case Constraint::ArrivalTime: return "arrival-time";
    case Constraint::TimeWindow: return "time-window";
    case Constraint::ShiftDuration: return "shift-duration";
    case Constraint::Load: return "load";
    case Constraint::Capacity: return "capacity";
    case Constraint::FleetSize: return "fleet-size";
    case Constraint::Objective: return "objective";
  }
  return "unknown";
}

struct Violation {
  Constraint constraint;
  int column_id = -1;
  std::string detail;
};

// Checks one route against the single-vehicle constraints: path structure,
// pairing and precedence, timing, windows, shift length and load.
inline std::vector<Violation> validate_route(const Column& c, const RoutingGraph& g,
                                             Minutes max_shift_duration) {
  std::vector<Violation> out;
  auto fail = [&](Constraint k, std::string detail) {
    out.push_back({k, c.id, std::move(detail)});
  };

  if (c.stops.size() < 2 || c.stops.front() != g.origin() || c.stops.back() != g.destination()) {
    fail(Constraint::FlowBalance, "route must start at the origin depot and end at the destination depot");
    return out;
  }
  std::vector<int> seen(g.num_nodes(), 0);
  for (std::size_t k = 0; k < c.stops.size(); ++k) {
    const int s = c.stops[k];
    if (s < 0 || s >= g.num_nodes()) {
      fail(Constraint::FlowBalance, "stop " + std::to_string(s) + " is not a node");
      return out;
    }
    if (++seen[s] > 1) fail(Constraint::FlowBalance, "node " + std::to_string(s) + " visited twice");
    if (k > 0 && k + 1 < c.stops.size() && (s == g.origin() || s == g.destination()))
      fail(Constraint::FlowBalance, "depot inside route");
    if (k > 0 && !g.has_edge(c.stops[k - 1], s))
      fail(Constraint::FlowBalance,
           "no edge (" + std::to_string(c.stops[k - 1]) + ", " + std::to_string(s) + ")");
  }
  if (!out.empty()) return out;

  std::vector<int> position(g.num_nodes(), -1);
  for (std::size_t k = 0; k < c.stops.size(); ++k) position[c.stops[k]] = static_cast<int>(k);
  for (int r = 1; r <= g.num_requests(); ++r) {
    const int p = position[g.pickup(r)];
    const int d = position[g.dropoff(r)];
    if ((p < 0) != (d < 0))
      fail(Constraint::Precedence, "request " + std::to_string(r) + " picked up or dropped off alone");
    else if (p >= 0 && d < p)
      fail(Constraint::Precedence, "request " + std::to_string(r) + " dropped off before pickup");
  }
  if (c.served != served_requests(g, c.stops))
    fail(Constraint::RiderService, "served set disagrees with the stop sequence");

  if (c.times.size() != c.stops.size()) {
    fail(Constraint::ArrivalTime, "schedule length differs from stop count");
    return out;
  }
  for (std::size_t k = 0; k < c.stops.size(); ++k) {
    const Node& nd = g.node(c.stops[k]);
    const StopTime& t = c.times[k];
    const std::string where = "stop " + std::to_string(k) + " (node " + std::to_string(nd.index) + ")";
    if (k > 0) {
      const Minutes earliest = c.times[k - 1].depart + g.drive_time(c.stops[k - 1], c.stops[k]);
      if (t.arrive < earliest) fail(Constraint::ArrivalTime, where + " reached before it can be");
    }
    if (t.start < t.arrive) fail(Constraint::ArrivalTime, where + " served before arrival");
    if (t.depart != t.start + nd.service_time)
      fail(Constraint::ArrivalTime, where + " departure disagrees with service time");
    if (t.start < nd.window.earliest || t.start > nd.window.latest)
      fail(Constraint::TimeWindow, where + " served outside its window");
  }

  const Minutes leave = c.times.front().depart;
  const Minutes back = c.times.back().arrive;
  if (c.shift.end - c.shift.start > max_shift_duration)
    fail(Constraint::ShiftDuration, "shift longer than the duration limit");
  if (leave < c.shift.start || back > c.shift.end)
    fail(Constraint::ShiftDuration, "route leaves the shift");
  if (back - leave > max_shift_duration) fail(Constraint::ShiftDuration, "route longer than a shift");

  int load = 0;
  for (int s : c.stops) {
    const Node& nd = g.node(s);
    load += nd.demand;
    if (load < std::max(0, nd.demand)) fail(Constraint::Load, "negative load after node " + std::to_string(s));
    if (load > std::min(g.capacity(), g.capacity() + nd.demand))
      fail(Constraint::Capacity, "capacity exceeded after node " + std::to_string(s));
  }
  return out;
}

}  // namespace jrtp
