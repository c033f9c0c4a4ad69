#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <deque>
#include <limits>
#include <optional>
#include <queue>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "jrtp/column.hpp"
#include "jrtp/graph.hpp"
#include "jrtp/master.hpp"
#include "jrtp/request_set.hpp"
#include "jrtp/shifts.hpp"

namespace jrtp {

struct Duals {
  std::vector<double> pi;  // per request, index r - 1
  double sigma = 0.0;

  static Duals of(const MasterSolution& m) { return {m.pi, m.sigma}; }
};

inline constexpr int kUnlimited = std::numeric_limits<int>::max();

struct PricingConfig {
  int max_columns = 10;
  int max_labels_per_node = 200;
  bool dominance = true;
  // Pricing gives up and returns what it has once this passes.
  std::optional<std::chrono::steady_clock::time_point> deadline;
};

// Partial route from the origin depot ending at `node`.
// Request sets use bit r - 1 for request r.
struct Label {
  int node = 0;
  double cost = 0.0;
  RequestSet open;
  RequestSet reachable;
  RequestSet served;
  int served_count = 0;
  int load = 0;  // seats occupied by open requests
  Minutes t_arrive = 0;
  Minutes t_start = 0;
  Minutes t_depart = 0;
  int prev = -1;  // index into the label store, -1 at the root
};

struct TimeUpdate {
  Minutes arrive;
  Minutes start;
  Minutes depart;

  friend bool operator==(const TimeUpdate&, const TimeUpdate&) = default;
};

inline TimeUpdate time_update(Minutes depart_prev, Minutes travel, Minutes window_earliest,
                              Minutes service) {
  const Minutes arrive = depart_prev + travel;
  const Minutes start = std::max(arrive, window_earliest);
  return {arrive, start, start + service};
}

inline bool time_feasible(Minutes arrive, const Node& j, const Shift& shift) {
  return arrive <= j.window.latest && arrive <= shift.end;
}

// Requests still startable after leaving `node` at `depart`: keeps r when
// the direct chain node -> pickup(r) -> dropoff(r) -> depot meets every
// latest start and the shift end under earliest-departure propagation.
inline RequestSet update_reachable(const RequestSet& previous, int node, Minutes depart,
                                   const RoutingGraph& g, const Shift& shift) {
  RequestSet out(previous.size());
  for (auto b = previous.find_first(); b != RequestSet::npos; b = previous.find_next(b)) {
    const int r = static_cast<int>(b) + 1;
    Minutes t = depart;
    int at = node;
    bool ok = true;
    for (int next : {g.pickup(r), g.dropoff(r), g.destination()}) {
      const Node& nd = g.node(next);
      const Minutes arrive = t + (at == next ? 0 : g.drive_time(at, next));
      if (!time_feasible(arrive, nd, shift)) {
        ok = false;
        break;
      }
      t = std::max(arrive, nd.window.earliest) + nd.service_time;
      at = next;
    }
    if (ok) out.set(b);
  }
  return out;
}

// Latest departures per shift, following the graph's edges rather than
// direct drives: from each node, the latest departure that still reaches
// pickup(r) with time to finish r, the latest that still reaches dropoff(r)
// and then the depot, and the latest that still reaches the depot. Every
// route is such an edge path, so a label past these times has no feasible
// completion. On a graph holding every time-admissible arc this agrees with
// update_reachable for any departure the node's window allows.
class ReachTable {
 public:
  static constexpr Minutes kNever = std::numeric_limits<Minutes>::min();

  ReachTable(const RoutingGraph& g, const Shift& shift)
      : n_(g.num_requests()),
        pick_(static_cast<std::size_t>(g.num_nodes()) * n_, kNever),
        drop_(static_cast<std::size_t>(g.num_nodes()) * n_, kNever),
        end_(g.num_nodes(), kNever) {
    const int size = g.num_nodes();
    std::vector<std::vector<std::pair<int, Minutes>>> into(size);
    for (const Edge& e : g.edges()) into[e.to].push_back({e.from, e.travel_time});

    std::vector<Minutes> arrive(size), depart(size);
    using Entry = std::pair<Minutes, int>;
    // Latest arrival at every node (`arrive`) and latest departure from it
    // (`depart`) that still reaches `target` by `deadline`.
    auto search = [&](int target, Minutes deadline) {
      std::fill(arrive.begin(), arrive.end(), kNever);
      std::fill(depart.begin(), depart.end(), kNever);
      if (deadline == kNever) return;
      std::priority_queue<Entry> heap;
      arrive[target] = deadline;
      heap.push({deadline, target});
      while (!heap.empty()) {
        const auto [at, m] = heap.top();
        heap.pop();
        if (at != arrive[m]) continue;
        for (const auto& [k, travel] : into[m]) {
          if (k == target) continue;
          const Minutes leave = at - travel;
          if (leave <= depart[k]) continue;
          depart[k] = leave;
          const Node& x = g.node(k);
          if (x.window.earliest + x.service_time > leave) continue;
          const Minutes latest = std::min({x.window.latest, shift.end, leave - x.service_time});
          if (latest > arrive[k]) {
            arrive[k] = latest;
            heap.push({latest, k});
          }
        }
      }
    };

    const Node& sink = g.node(g.destination());
    search(g.destination(), std::min(sink.window.latest, shift.end));
    end_ = depart;
    const std::vector<Minutes> arrive_end = arrive;
    for (int r = 1; r <= n_; ++r) {
      const int p = g.pickup(r), d = g.dropoff(r);
      search(d, arrive_end[d]);
      for (int i = 0; i < size; ++i) drop_[at(i, r - 1)] = depart[i];
      const Minutes pickup_deadline = arrive[p];
      const Minutes after_pickup = depart[p];
      search(p, pickup_deadline);
      for (int i = 0; i < size; ++i) pick_[at(i, r - 1)] = depart[i];
      pick_[at(p, r - 1)] = after_pickup;
    }
  }

  // Request `bit` can still be started after leaving `node` at `depart`.
  bool keeps(int node, std::size_t bit, Minutes depart) const {
    const Minutes l = pick_[at(node, bit)];
    return l != kNever && depart <= l;
  }

  RequestSet update(const RequestSet& previous, int node, Minutes depart) const {
    RequestSet out(previous.size());
    for (auto b = previous.find_first(); b != RequestSet::npos; b = previous.find_next(b))
      if (keeps(node, b, depart)) out.set(b);
    return out;
  }

  // Every open drop-off and the depot are still within reach of `l`.
  bool can_finish(const Label& l) const {
    const Minutes e = end_[l.node];
    if (e == kNever || l.t_depart > e) return false;
    for (auto b = l.open.find_first(); b != RequestSet::npos; b = l.open.find_next(b)) {
      const Minutes d = drop_[at(l.node, b)];
      if (d == kNever || l.t_depart > d) return false;
    }
    return true;
  }

 private:
  std::size_t at(int node, std::size_t bit) const { return static_cast<std::size_t>(node) * n_ + bit; }

  int n_;
  std::vector<Minutes> pick_;
  std::vector<Minutes> drop_;
  std::vector<Minutes> end_;
};

// True when `candidate` is dominated by `incumbent`: fewer-or-equal open
// requests, earlier-or-equal departure, lower-or-equal cost and at least as
// many requests served.
inline bool check_dominance(const Label& candidate, const Label& incumbent) {
  if (candidate.node != incumbent.node)
    throw std::logic_error("dominance compared labels at different nodes");
  return incumbent.t_depart <= candidate.t_depart && incumbent.cost <= candidate.cost &&
         incumbent.served_count >= candidate.served_count && incumbent.open.is_subset_of(candidate.open);
}

// False when some open request can no longer be dropped off in time, or the
// depot can no longer be reached, even by driving there directly.
inline bool can_complete(const Label& l, const RoutingGraph& g, const Shift& shift) {
  for (auto b = l.open.find_first(); b != RequestSet::npos; b = l.open.find_next(b)) {
    const Node& d = g.node(g.dropoff(static_cast<int>(b) + 1));
    if (!time_feasible(l.t_depart + g.drive_time(l.node, d.index), d, shift)) return false;
  }
  const Node& end = g.node(g.destination());
  return time_feasible(l.t_depart + g.drive_time(l.node, end.index), end, shift);
}

// False when even collecting the dual of every request still reachable
// cannot bring the label's cost below zero.
inline bool may_price_out(const Label& l, const Duals& duals) {
  double best = l.cost;
  for (auto b = l.reachable.find_first(); b != RequestSet::npos; b = l.reachable.find_next(b))
    if (!l.served.test(b)) best -= duals.pi[b];
  return best < -kReducedCostTolerance;
}

inline Label root_label(const Duals& duals, const Shift& shift, const RoutingGraph& g) {
  const auto n = static_cast<std::size_t>(g.num_requests());
  Label root;
  root.node = g.origin();
  root.cost = -duals.sigma;
  root.open = RequestSet(n);
  root.served = RequestSet(n);
  root.reachable = RequestSet(n);
  root.reachable.set();
  root.t_arrive = root.t_start = root.t_depart = shift.start;
  return root;
}

// Successor labels of `from` (stored at index `from_index`): return to the
// depot, drop-offs of open requests, then pickups of reachable ones.
inline std::vector<Label> extend_label(const Label& from, int from_index, const Duals& duals,
                                       const Shift& shift, const RoutingGraph& g,
                                       const ReachTable* reach = nullptr) {
  std::vector<Label> out;
  auto reachable = [&](int j, Minutes depart) {
    return reach ? reach->update(from.reachable, j, depart) : update_reachable(from.reachable, j, depart, g, shift);
  };
  const int i = from.node;
  const int n = g.num_requests();

  if (i != g.origin() && from.open.none() && from.cost < -kReducedCostTolerance) {
    const int j = g.destination();
    if (g.has_edge(i, j)) {
      const Node& nd = g.node(j);
      const TimeUpdate t = time_update(from.t_depart, g.travel_time(i, j), nd.window.earliest, nd.service_time);
      if (time_feasible(t.arrive, nd, shift)) {
        Label l;
        l.node = j;
        l.cost = from.cost;
        l.open = RequestSet(n);
        l.reachable = RequestSet(n);
        l.served = from.served;
        l.served_count = from.served_count;
        l.t_arrive = t.arrive;
        l.t_start = t.start;
        l.t_depart = t.depart;
        l.prev = from_index;
        out.push_back(std::move(l));
      }
    }
  }

  for (auto b = from.open.find_first(); b != RequestSet::npos; b = from.open.find_next(b)) {
    const int r = static_cast<int>(b) + 1;
    const int j = g.dropoff(r);
    if (!g.has_edge(i, j)) continue;
    const Node& nd = g.node(j);
    const TimeUpdate t = time_update(from.t_depart, g.travel_time(i, j), nd.window.earliest, nd.service_time);
    if (!time_feasible(t.arrive, nd, shift)) continue;
    Label l;
    l.node = j;
    l.cost = from.cost;
    l.open = from.open;
    l.open.reset(b);
    l.served = from.served;
    l.served_count = from.served_count;
    l.load = from.load - g.node(g.pickup(r)).demand;
    l.t_arrive = t.arrive;
    l.t_start = t.start;
    l.t_depart = t.depart;
    l.prev = from_index;
    if (!can_complete(l, g, shift) || (reach && !reach->can_finish(l))) continue;
    l.reachable = reachable(j, t.depart);
    if (may_price_out(l, duals)) out.push_back(std::move(l));
  }

  for (auto b = from.reachable.find_first(); b != RequestSet::npos; b = from.reachable.find_next(b)) {
    const int r = static_cast<int>(b) + 1;
    const int j = g.pickup(r);
    if (!g.has_edge(i, j)) continue;
    const Node& nd = g.node(j);
    if (from.load + nd.demand > g.capacity() || from.open.test(b) || from.served.test(b)) continue;
    const TimeUpdate t = time_update(from.t_depart, g.travel_time(i, j), nd.window.earliest, nd.service_time);
    if (!time_feasible(t.arrive, nd, shift)) continue;
    Label l;
    l.node = j;
    l.cost = from.cost - duals.pi[r - 1];
    l.open = from.open;
    l.open.set(b);
    l.served = from.served;
    l.served.set(b);
    l.served_count = from.served_count + 1;
    l.load = from.load + nd.demand;
    l.t_arrive = t.arrive;
    l.t_start = t.start;
    l.t_depart = t.depart;
    l.prev = from_index;
    if (!can_complete(l, g, shift) || (reach && !reach->can_finish(l))) continue;
    l.reachable = reachable(j, t.depart);
    if (may_price_out(l, duals)) out.push_back(std::move(l));
  }
  return out;
}

// Labeling search for negative reduced-cost routes in one shift. Labels are
// expanded cheapest first; the search stops after `max_columns` routes. Each
// node keeps at most `max_labels_per_node` live labels, dropping the most
// expensive. Dominated and evicted labels are discarded from the queue too.
class PricingSolver {
 public:
  // `reach` must belong to `g` and `shift`; it is built here when absent.
  PricingSolver(const Duals& duals, const Shift& shift, const RoutingGraph& g, const PricingConfig& cfg,
                const ReachTable* reach = nullptr)
      : duals_(duals), shift_(shift), g_(g), cfg_(cfg), processed_(g.num_nodes()) {
    if (cfg.max_columns < 1 || cfg.max_labels_per_node < 1)
      throw std::invalid_argument("pricing caps must be >= 1");
    if (static_cast<int>(duals.pi.size()) != g.num_requests())
      throw std::invalid_argument("dual vector size differs from request count");
    if (reach) {
      reach_ = reach;
    } else {
      owned_.emplace(g, shift);
      reach_ = &*owned_;
    }
  }
  PricingSolver(const PricingSolver&) = delete;
  PricingSolver& operator=(const PricingSolver&) = delete;

  std::vector<Column> run() {
    std::vector<Column> found;
    push(root_label(duals_, shift_, g_));
    std::size_t polls = 0;
    while (!queue_.empty() && static_cast<int>(found.size()) < cfg_.max_columns) {
      if (cfg_.deadline && (++polls & 255) == 0 && std::chrono::steady_clock::now() > *cfg_.deadline) break;
      const int current = queue_.top().index;
      queue_.pop();
      if (!alive_[current]) continue;
      const Label& from = store_[current];
      std::vector<Label> next = extend_label(from, current, duals_, shift_, g_, reach_);
      for (Label& l : next) {
        if (l.node == g_.destination()) {
          found.push_back(backtrace(l));
          if (static_cast<int>(found.size()) >= cfg_.max_columns) break;
          continue;
        }
        insert(std::move(l));
      }
    }
    return found;
  }

  std::size_t labels_created() const { return store_.size(); }

 private:
  struct QueueEntry {
    double cost;
    std::size_t open;
    int node;
    int index;
  };
  struct Later {
    bool operator()(const QueueEntry& a, const QueueEntry& b) const {
      return std::tie(a.cost, a.open, a.node, a.index) > std::tie(b.cost, b.open, b.node, b.index);
    }
  };

  // Scalar dominance keys of a live label, kept beside its index so the
  // per-node scan stays in cache. Each node's slots are sorted by
  // (cost, index), so the most expensive label sits at the back.
  struct Slot {
    double cost;
    Minutes t_depart;
    int served;
    int index;
  };
  static bool before(const Slot& a, const Slot& b) { return std::tie(a.cost, a.index) < std::tie(b.cost, b.index); }

  int push(Label l) {
    const int idx = static_cast<int>(store_.size());
    queue_.push({l.cost, l.open.count(), l.node, idx});
    auto& pool = processed_[l.node];
    const Slot slot{l.cost, l.t_depart, l.served_count, idx};
    pool.insert(std::upper_bound(pool.begin(), pool.end(), slot, before), slot);
    store_.push_back(std::move(l));
    alive_.push_back(1);
    return idx;
  }

  void insert(Label l) {
    auto& pool = processed_[l.node];
    bool removed = false;
    if (cfg_.dominance) {
      // Only cheaper-or-equal labels can dominate the newcomer and only
      // dearer-or-equal ones can be dominated by it.
      const auto split = std::upper_bound(pool.begin(), pool.end(), l.cost,
                                          [](double c, const Slot& o) { return c < o.cost; });
      for (auto it = pool.begin(); it != split; ++it)
        if (it->t_depart <= l.t_depart && it->served >= l.served_count &&
            store_[it->index].open.is_subset_of(l.open))
          return;
      std::vector<int> remove;
      for (auto it = std::lower_bound(pool.begin(), pool.end(), l.cost,
                                      [](const Slot& o, double c) { return o.cost < c; });
           it != pool.end(); ++it)
        if (l.t_depart <= it->t_depart && l.served_count >= it->served &&
            l.open.is_subset_of(store_[it->index].open))
          remove.push_back(it->index);
      for (int other : remove) kill(other);
      removed = !remove.empty();
    }
    // A full node would evict the newcomer straight away.
    if (!removed && static_cast<int>(pool.size()) >= cfg_.max_labels_per_node && l.cost >= pool.back().cost) return;
    push(std::move(l));
    while (static_cast<int>(pool.size()) > cfg_.max_labels_per_node) kill(pool.back().index);
  }

  void kill(int idx) {
    alive_[idx] = 0;
    auto& pool = processed_[store_[idx].node];
    pool.erase(std::find_if(pool.begin(), pool.end(), [idx](const Slot& o) { return o.index == idx; }));
  }

  Column backtrace(const Label& last) const {
    std::vector<int> stops{last.node};
    std::vector<StopTime> times{{last.t_arrive, last.t_start, last.t_depart}};
    for (int k = last.prev; k >= 0; k = store_[k].prev) {
      stops.push_back(store_[k].node);
      times.push_back({store_[k].t_arrive, store_[k].t_start, store_[k].t_depart});
    }
    std::reverse(stops.begin(), stops.end());
    std::reverse(times.begin(), times.end());
    Column c;
    c.shift = shift_;
    c.served = served_requests(g_, stops);
    c.stops = std::move(stops);
    c.times = std::move(times);
    c.reduced_cost = last.cost;
    return c;
  }

  const Duals& duals_;
  Shift shift_;
  const RoutingGraph& g_;
  PricingConfig cfg_;
  std::optional<ReachTable> owned_;
  const ReachTable* reach_ = nullptr;
  std::deque<Label> store_;  // stable addresses while successors are added
  std::vector<char> alive_;
  std::vector<std::vector<Slot>> processed_;
  std::priority_queue<QueueEntry, std::vector<QueueEntry>, Later> queue_;
};

inline std::vector<Column> solve_pricing(const Duals& duals, const Shift& shift, const RoutingGraph& g,
                                         const PricingConfig& cfg, const ReachTable* reach = nullptr) {
  return PricingSolver(duals, shift, g, cfg, reach).run();
}

}  // namespace jrtp
