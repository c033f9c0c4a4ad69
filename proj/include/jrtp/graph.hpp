#pragma once

#include <algorithm>
#include <fstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "jrtp/instance.hpp"
#include "jrtp/shifts.hpp"

namespace jrtp {

enum class NodeKind { OriginDepot, Pickup, Dropoff, DestDepot };

struct Node {
  int index = 0;
  NodeKind kind = NodeKind::OriginDepot;
  int request_id = 0;  // 0 for depots
  int demand = 0;      // +d at pickup, -d at drop-off
  Minutes service_time = 0;
  TimeWindow window;
};

struct Edge {
  int from = 0;
  int to = 0;
  Minutes travel_time = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge& a, const Edge& b) {
    return std::pair(a.from, a.to) <=> std::pair(b.from, b.to);
  }
};

class GraphError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Pickup/delivery graph: node 0 is the origin depot, 1..n pickups, n+1..2n
// drop-offs and 2n+1 the destination depot. Drive times are kept for every
// node pair; the edge set is a subset of those pairs.
class RoutingGraph {
 public:
  RoutingGraph() = default;

  RoutingGraph(int n, int capacity, std::vector<Node> nodes, std::vector<Minutes> drive_times)
      : n_(n),
        capacity_(capacity),
        nodes_(std::move(nodes)),
        drive_(std::move(drive_times)),
        has_edge_(nodes_.size() * nodes_.size(), 0),
        out_(nodes_.size()) {
    if (static_cast<int>(nodes_.size()) != 2 * n + 2)
      throw GraphError("node list must have 2n+2 entries");
    if (drive_.size() != nodes_.size() * nodes_.size())
      throw GraphError("drive-time matrix has the wrong size");
  }

  int num_requests() const { return n_; }
  int num_nodes() const { return static_cast<int>(nodes_.size()); }
  int capacity() const { return capacity_; }
  int origin() const { return 0; }
  int destination() const { return 2 * n_ + 1; }
  int pickup(int request) const { return request; }
  int dropoff(int request) const { return n_ + request; }
  bool is_pickup(int node) const { return node >= 1 && node <= n_; }
  bool is_dropoff(int node) const { return node > n_ && node <= 2 * n_; }
  const Node& node(int i) const { return nodes_.at(i); }
  const std::vector<Node>& nodes() const { return nodes_; }

  // Metric drive time between any two nodes, edge or not.
  Minutes drive_time(int i, int j) const { return drive_[index(i, j)]; }

  bool has_edge(int i, int j) const {
    if (i < 0 || j < 0 || i >= num_nodes() || j >= num_nodes()) return false;
    return has_edge_[index(i, j)] != 0;
  }

  Minutes travel_time(int i, int j) const {
    if (!has_edge(i, j))
      throw GraphError("no edge (" + std::to_string(i) + ", " + std::to_string(j) + ")");
    return drive_[index(i, j)];
  }

  const std::vector<Edge>& edges() const { return edges_; }
  std::size_t num_edges() const { return edges_.size(); }
  const std::vector<int>& successors(int i) const { return out_.at(i); }

  void add_edge(int i, int j) {
    if (i == j) throw GraphError("self-loop at node " + std::to_string(i));
    if (i < 0 || j < 0 || i >= num_nodes() || j >= num_nodes())
      throw GraphError("edge endpoint out of range");
    auto& flag = has_edge_[index(i, j)];
    if (flag) return;
    flag = 1;
    const Edge e{i, j, drive_time(i, j)};
    edges_.insert(std::lower_bound(edges_.begin(), edges_.end(), e), e);
    auto& succ = out_[i];
    succ.insert(std::lower_bound(succ.begin(), succ.end(), j), j);
  }

  // Same nodes and drive times, different edge set.
  RoutingGraph with_edges(const std::vector<Edge>& edges) const {
    RoutingGraph g(n_, capacity_, nodes_, drive_);
    for (const Edge& e : edges) g.add_edge(e.from, e.to);
    return g;
  }

  std::vector<Edge> mandatory_edges() const {
    std::vector<Edge> out;
    out.reserve(3 * n_);
    for (int r = 1; r <= n_; ++r) {
      out.push_back({origin(), pickup(r), drive_time(origin(), pickup(r))});
      out.push_back({pickup(r), dropoff(r), drive_time(pickup(r), dropoff(r))});
      out.push_back({dropoff(r), destination(), drive_time(dropoff(r), destination())});
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  bool is_mandatory(int i, int j) const {
    if (i == origin() && is_pickup(j)) return true;
    if (is_pickup(i) && j == dropoff(i)) return true;
    if (is_dropoff(i) && j == destination()) return true;
    return false;
  }

 private:
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(i) * nodes_.size() + static_cast<std::size_t>(j);
  }

  int n_ = 0;
  int capacity_ = 1;
  std::vector<Node> nodes_;
  std::vector<Minutes> drive_;
  std::vector<char> has_edge_;
  std::vector<std::vector<int>> out_;
  std::vector<Edge> edges_;
};

// Arcs that can never lie on a feasible route regardless of timing.
inline bool structurally_admissible(const RoutingGraph& g, int i, int j) {
  if (i == j) return false;
  if (j == g.origin() || i == g.destination()) return false;
  if (g.is_dropoff(i) && g.is_pickup(j) && i == g.dropoff(j)) return false;
  if (i == g.origin() && g.is_dropoff(j)) return false;
  if (g.is_pickup(i) && j == g.destination()) return false;
  return true;
}

// Service at i can start no earlier than a_i; the arc survives if the
// vehicle can then reach j before its latest start b_j.
inline bool time_admissible(const RoutingGraph& g, int i, int j) {
  const Node& from = g.node(i);
  return from.window.earliest + from.service_time + g.drive_time(i, j) <= g.node(j).window.latest;
}

inline bool edge_admissible(const RoutingGraph& g, int i, int j) {
  return structurally_admissible(g, i, j) && time_admissible(g, i, j);
}

namespace detail {

inline std::vector<Node> make_nodes(const Instance& inst) {
  const int n = inst.num_requests();
  std::vector<Node> nodes(2 * n + 2);
  const TimeWindow horizon{inst.shift_earliest, inst.shift_latest};
  nodes[0] = {0, NodeKind::OriginDepot, 0, 0, 0, horizon};
  nodes[2 * n + 1] = {2 * n + 1, NodeKind::DestDepot, 0, 0, 0, horizon};
  for (const TripRequest& r : inst.requests) {
    nodes[r.id] = {r.id, NodeKind::Pickup, r.id, r.demand, r.service_time, r.pickup_window};
    nodes[n + r.id] = {n + r.id, NodeKind::Dropoff, r.id, -r.demand, r.service_time,
                       r.dropoff_window};
  }
  return nodes;
}

inline GeoPoint location(const Instance& inst, int node) {
  const int n = inst.num_requests();
  if (node == 0 || node == 2 * n + 1) return inst.depot;
  if (node <= n) return inst.request(node).origin;
  return inst.request(node - n).destination;
}

}  // namespace detail

// Earliest-start schedule of depot -> pickup -> drop-off -> depot inside
// `shift`; true when every service start meets its window and the vehicle is
// back by the end of the shift.
inline bool request_fits_shift(const RoutingGraph& g, int request, const Shift& shift) {
  Minutes t = shift.start;
  int at = g.origin();
  for (int next : {g.pickup(request), g.dropoff(request), g.destination()}) {
    const Minutes arrive = t + g.drive_time(at, next);
    const Node& nd = g.node(next);
    if (arrive > nd.window.latest || arrive > shift.end) return false;
    t = std::max(arrive, nd.window.earliest) + nd.service_time;
    at = next;
  }
  return true;
}

inline RoutingGraph build_graph(const Instance& inst) {
  const int n = inst.num_requests();
  const int size = 2 * n + 2;
  std::vector<GeoPoint> where(size);
  for (int i = 0; i < size; ++i) where[i] = detail::location(inst, i);
  std::vector<Minutes> drive(static_cast<std::size_t>(size) * size, 0);
  for (int i = 0; i < size; ++i)
    for (int j = 0; j < size; ++j)
      if (i != j)
        drive[static_cast<std::size_t>(i) * size + j] =
            minutes_for_distance(haversine_km(where[i], where[j]), inst.speed);

  RoutingGraph g(n, inst.capacity, detail::make_nodes(inst), std::move(drive));

  const auto shifts = enumerate_shifts(inst);
  for (int r = 1; r <= n; ++r) {
    const bool fits = std::any_of(shifts.begin(), shifts.end(),
                                  [&](const Shift& s) { return request_fits_shift(g, r, s); });
    if (!fits)
      throw InvalidInstance("requests[" + std::to_string(r - 1) + "]",
                            "request " + std::to_string(r) + " cannot be served within any shift");
  }

  for (int i = 0; i < size; ++i)
    for (int j = 0; j < size; ++j)
      if (edge_admissible(g, i, j)) g.add_edge(i, j);
  return g;
}

inline void write_edges_csv(const RoutingGraph& g, std::ostream& out) {
  out << "i,j,t_ij\n";
  for (const Edge& e : g.edges()) out << e.from << ',' << e.to << ',' << e.travel_time << '\n';
}

inline void write_edges_csv(const RoutingGraph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  write_edges_csv(g, out);
}

}  // namespace jrtp
