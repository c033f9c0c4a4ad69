#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "jrtp/column.hpp"
#include "jrtp/graph.hpp"
#include "jrtp/lp.hpp"
#include "jrtp/master.hpp"
#include "jrtp/pricing.hpp"
#include "jrtp/shifts.hpp"

namespace jrtp {

enum class SolveStatus { Converged, TimeLimit, Stalled, Infeasible };

constexpr std::string_view to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::TimeLimit: return "time_limit";
    case SolveStatus::Stalled: return "stalled";
    case SolveStatus::Infeasible: return "infeasible";
  }
  return "unknown";
}

// Columns generated so far, deduplicated by (shift, stop sequence).
class ColumnPool {
 public:
  // Assigns the next id and stores `c` unless an identical route exists.
  std::optional<int> add(Column c) {
    ColumnKey key = key_of(c);
    if (index_.count(key)) return std::nullopt;
    c.id = next_id_++;
    index_.emplace(std::move(key), static_cast<int>(columns_.size()));
    columns_.push_back(std::move(c));
    return columns_.back().id;
  }

  bool contains(const Column& c) const { return index_.count(key_of(c)) != 0; }
  const std::vector<Column>& columns() const { return columns_; }
  std::size_t size() const { return columns_.size(); }
  const Column& by_id(int id) const { return columns_.at(id); }

 private:
  std::vector<Column> columns_;  // columns_[k].id == k
  std::map<ColumnKey, int> index_;
  int next_id_ = 0;
};

// Everything the label extractor needs: every column that entered the pool
// and the positive lambda values of every master solve.
struct SolveTrace {
  std::vector<Column> columns;
  std::vector<std::vector<std::pair<int, double>>> solutions;
};

using ServedSet = std::vector<int>;  // sorted request ids
using Pricer = std::function<std::vector<Column>(const Duals&, const Shift&, const RoutingGraph&)>;

struct SolveConfig {
  double time_limit_seconds = 1800.0;
  int stall_iters = 20;
  PricingConfig pricing;
  int jobs = 1;
  bool record_trace = false;
  // Branch-and-price nodes spent after the fixing loop when it leaves a gap
  // to the LP bound. 0 turns it off.
  int polish_nodes = 50;
  // Replaces the labeling search when set.
  Pricer pricer;
};

struct PhaseResult {
  MasterSolution master;
  int iterations = 0;  // master solves in this phase
  int flat_iterations = 0;
  bool stalled = false;
  bool timed_out = false;
  std::vector<double> objectives;
};

struct SolveReport {
  std::vector<Column> routes;
  int objective = 0;
  int iterations = 0;
  std::vector<int> fixes;
  double wall_time = 0.0;
  SolveStatus status = SolveStatus::Converged;
  double first_phase_objective = 0.0;
  double first_phase_seconds = 0.0;
  int pool_size = 0;
  int polish_nodes = 0;
  bool polish_improved = false;
  SolveTrace trace;
};

class ColumnGeneration {
 public:
  using Clock = std::chrono::steady_clock;

  ColumnGeneration(const Instance& inst, const RoutingGraph& graph, std::vector<Shift> shifts,
                   SolveConfig cfg, const lp::Backend& backend)
      : inst_(inst),
        graph_(graph),
        shifts_(std::move(shifts)),
        cfg_(std::move(cfg)),
        backend_(backend),
        start_(Clock::now()),
        deadline_(start_ + std::chrono::duration_cast<Clock::duration>(
                               std::chrono::duration<double>(cfg_.time_limit_seconds))) {}

  ColumnPool& pool() { return pool_; }
  const SolveTrace& trace() const { return trace_; }
  bool expired() const { return Clock::now() > deadline_; }
  double elapsed() const { return std::chrono::duration<double>(Clock::now() - start_).count(); }

  // One singleton route per request in the earliest shift that fits it.
  void seed_singletons() {
    for (int r = 1; r <= graph_.num_requests(); ++r) {
      for (const Shift& s : shifts_) {
        auto c = make_column(graph_, {graph_.origin(), graph_.pickup(r), graph_.dropoff(r), graph_.destination()}, s);
        if (c) {
          add_to_pool(std::move(*c));
          break;
        }
      }
    }
  }

  // Master solve and pricing alternate until no shift yields a new column,
  // the objective stays flat for `stall_iters` solves, or time runs out.
  // After the deadline only the master is solved.
  // Columns serving a request set in `excluded` stay out of the master and
  // are not pooled when pricing finds them.
  PhaseResult run_phase(const std::set<int>& fixed, const std::set<ServedSet>& excluded = {}) {
    PhaseResult out;
    while (true) {
      std::set<int> skip;
      if (!excluded.empty())
        for (const Column& c : pool_.columns())
          if (excluded.count(c.served)) skip.insert(c.id);
      out.master = solve_rlmp(pool_.columns(), fixed, inst_, backend_, &warm_, &skip);
      ++out.iterations;
      if (!out.master.feasible) return out;
      if (cfg_.record_trace) record(out.master);
      if (!out.objectives.empty() && std::abs(out.master.objective - out.objectives.back()) <= 1e-9)
        ++out.flat_iterations;
      else
        out.flat_iterations = 0;
      out.objectives.push_back(out.master.objective);
      if (out.flat_iterations >= cfg_.stall_iters) {
        out.stalled = true;
        return out;
      }
      if (expired()) {
        out.timed_out = true;
        return out;
      }
      if (price(Duals::of(out.master), excluded) == 0) return out;
    }
  }

  SolveReport solve(const RoutingGraph* repair_graph = nullptr) {
    seed_singletons();
    SolveReport report;
    std::set<int> fixed;
    std::set<int> blacklist;
    bool first = true;
    bool stalled = false;
    bool timed_out = false;
    MasterSolution master;
    while (true) {
      PhaseResult phase = run_phase(fixed);
      report.iterations += phase.iterations;
      stalled = stalled || phase.stalled;
      timed_out = timed_out || phase.timed_out;
      if (first) {
        report.first_phase_objective = phase.master.objective;
        report.first_phase_seconds = elapsed();
        first = false;
      }
      if (!phase.master.feasible) {
        if (report.fixes.empty()) {
          report.status = SolveStatus::Infeasible;
          break;
        }
        const int undo = report.fixes.back();
        report.fixes.pop_back();
        fixed.erase(undo);
        blacklist.insert(undo);
        continue;
      }
      master = std::move(phase.master);
      if (master.integral()) break;
      std::set<int> excluded = fixed;
      excluded.insert(blacklist.begin(), blacklist.end());
      int pick = -1;
      try {
        pick = find_max_fractional_column(master, excluded, pool_.columns());
      } catch (const std::logic_error&) {
        report.status = SolveStatus::Infeasible;
        break;
      }
      fixed.insert(pick);
      report.fixes.push_back(pick);
    }

    if (report.status != SolveStatus::Infeasible) {
      report.status = timed_out ? SolveStatus::TimeLimit : stalled ? SolveStatus::Stalled : SolveStatus::Converged;
      std::vector<Column> chosen;
      for (const Column& c : pool_.columns())
        if (master.value(c.id) >= 1.0 - kIntegralityTolerance) chosen.push_back(c);
      const RoutingGraph& final_graph = repair_graph ? *repair_graph : graph_;
      report.routes = repair_routes(chosen, inst_, final_graph);
      for (const Column& c : report.routes) report.objective += static_cast<int>(c.served.size());
      if (cfg_.polish_nodes > 0 && !timed_out) polish(report, final_graph);
    }
    report.pool_size = static_cast<int>(pool_.size());
    report.wall_time = elapsed();
    if (cfg_.record_trace) report.trace = trace_;
    return report;
  }

  // Turns an integral master selection into routes where every request is
  // served at most once and every rider is served completely or not at all.
  // Requests are removed from later routes first; removal keeps a route
  // feasible because drive times obey the triangle inequality. Routes that
  // cannot be rescheduled are dropped whole.
  static std::vector<Column> repair_routes(std::vector<Column> routes, const Instance& inst,
                                           const RoutingGraph& g) {
    while (true) {
      std::vector<int> owner(g.num_requests() + 1, -1);
      std::set<std::pair<int, int>> drop;  // (route, request)
      for (int k = 0; k < static_cast<int>(routes.size()); ++k)
        for (int r : routes[k].served) {
          if (owner[r] >= 0) drop.insert({k, r});
          else owner[r] = k;
        }
      for (const Rider& u : inst.riders) {
        const bool all = std::all_of(u.request_ids.begin(), u.request_ids.end(),
                                     [&](int r) { return owner[r] >= 0; });
        if (all) continue;
        for (int r : u.request_ids)
          if (owner[r] >= 0) drop.insert({owner[r], r});
      }
      if (drop.empty()) break;

      std::vector<Column> next;
      for (int k = 0; k < static_cast<int>(routes.size()); ++k) {
        std::set<int> remove_nodes;
        for (const auto& [route, r] : drop)
          if (route == k) {
            remove_nodes.insert(g.pickup(r));
            remove_nodes.insert(g.dropoff(r));
          }
        if (remove_nodes.empty()) {
          next.push_back(std::move(routes[k]));
          continue;
        }
        std::vector<int> stops;
        for (int s : routes[k].stops)
          if (!remove_nodes.count(s)) stops.push_back(s);
        if (stops.size() <= 2) continue;
        auto fixed_route = make_column(g, std::move(stops), routes[k].shift);
        if (!fixed_route) continue;
        fixed_route->id = routes[k].id;
        fixed_route->reduced_cost = routes[k].reduced_cost;
        next.push_back(std::move(*fixed_route));
      }
      routes = std::move(next);
    }
    return routes;
  }

 private:
  static int served_count(const std::vector<Column>& routes) {
    int v = 0;
    for (const Column& c : routes) v += static_cast<int>(c.served.size());
    return v;
  }

  // Depth-first branch-and-price on lambda: each node runs a column
  // generation phase under its fixings and exclusions, the 1-branch first.
  // Keeps the best integral selection if it beats `report`.
  void polish(SolveReport& report, const RoutingGraph& final_graph) {
    struct Branch {
      std::set<int> fixed;
      std::set<ServedSet> excluded;
    };
    std::vector<Branch> open{{}};
    int best = report.objective;
    while (!open.empty() && report.polish_nodes < cfg_.polish_nodes && !expired()) {
      Branch b = std::move(open.back());
      open.pop_back();
      const PhaseResult phase = run_phase(b.fixed, b.excluded);
      report.iterations += phase.iterations;
      ++report.polish_nodes;
      const MasterSolution& m = phase.master;
      if (!m.feasible || std::floor(m.objective + kIntegralityTolerance) <= best) continue;
      if (m.integral()) {
        std::vector<Column> chosen;
        for (const Column& c : pool_.columns())
          if (m.value(c.id) >= 1.0 - kIntegralityTolerance) chosen.push_back(c);
        std::vector<Column> routes = repair_routes(std::move(chosen), inst_, final_graph);
        if (const int v = served_count(routes); v > best) {
          best = v;
          report.routes = std::move(routes);
          report.objective = v;
          report.polish_improved = true;
        }
        continue;
      }
      const int pick = find_max_fractional_column(m, b.fixed, pool_.columns());
      Branch down = b;
      down.excluded.insert(pool_.by_id(pick).served);
      b.fixed.insert(pick);
      open.push_back(std::move(down));
      open.push_back(std::move(b));
    }
  }

  void add_to_pool(Column c) {
    if (auto id = pool_.add(std::move(c)); id && cfg_.record_trace) trace_.columns.push_back(pool_.by_id(*id));
  }

  void record(const MasterSolution& m) {
    std::vector<std::pair<int, double>> used;
    for (const auto& [id, v] : m.lambda)
      if (v > kIntegralityTolerance) used.emplace_back(id, v);
    trace_.solutions.push_back(std::move(used));
  }

  // An excluded route can dominate the labels of its alternatives, so a
  // shift that offers one is priced once more without dominance.
  std::vector<Column> price_shift(const Duals& duals, const Shift& s, const ReachTable* reach,
                                  const std::set<ServedSet>& excluded) const {
    PricingConfig pc = cfg_.pricing;
    pc.deadline = deadline_;
    std::vector<Column> found = cfg_.pricer ? cfg_.pricer(duals, s, graph_) : solve_pricing(duals, s, graph_, pc, reach);
    if (excluded.empty()) return found;
    auto is_excluded = [&](const Column& c) { return excluded.count(c.served) != 0; };
    if (!cfg_.pricer && pc.dominance && std::any_of(found.begin(), found.end(), is_excluded)) {
      pc.dominance = false;
      found = solve_pricing(duals, s, graph_, pc, reach);
    }
    std::erase_if(found, is_excluded);
    return found;
  }

  // Prices every shift and returns the number of new columns pooled. Results
  // are merged in shift order so that parallel runs stay deterministic.
  std::size_t price(const Duals& duals, const std::set<ServedSet>& excluded) {
    std::vector<std::vector<Column>> per_shift(shifts_.size());
    const int workers = std::max(1, std::min<int>(cfg_.jobs, static_cast<int>(shifts_.size())));
    auto each_shift = [&](auto&& work) {
      if (workers == 1) {
        for (std::size_t k = 0; k < shifts_.size(); ++k) work(k);
        return;
      }
      std::atomic<std::size_t> next{0};
      std::vector<std::thread> threads;
      for (int w = 0; w < workers; ++w)
        threads.emplace_back([&] {
          for (std::size_t k = next++; k < shifts_.size(); k = next++) work(k);
        });
      for (auto& t : threads) t.join();
    };
    if (reach_.empty() && !cfg_.pricer) {
      reach_.resize(shifts_.size());
      each_shift([&](std::size_t k) { reach_[k] = std::make_unique<ReachTable>(graph_, shifts_[k]); });
    }
    each_shift([&](std::size_t k) { per_shift[k] = price_shift(duals, shifts_[k], reach_.empty() ? nullptr : reach_[k].get(), excluded); });
    const std::size_t before = pool_.size();
    for (auto& cols : per_shift)
      for (Column& c : cols) add_to_pool(std::move(c));
    return pool_.size() - before;
  }

  const Instance& inst_;
  const RoutingGraph& graph_;
  std::vector<Shift> shifts_;
  SolveConfig cfg_;
  const lp::Backend& backend_;
  Clock::time_point start_;
  Clock::time_point deadline_;
  ColumnPool pool_;
  MasterWarmStart warm_;
  SolveTrace trace_;
  std::vector<std::unique_ptr<ReachTable>> reach_;  // per shift, built on first pricing
};

// `repair_graph` is the graph final routes are rescheduled on when requests
// have to be dropped; it defaults to `graph`.
inline SolveReport solve(const Instance& inst, const RoutingGraph& graph, const SolveConfig& cfg,
                         const lp::Backend& backend, const RoutingGraph* repair_graph = nullptr) {
  ColumnGeneration cg(inst, graph, enumerate_shifts(inst), cfg, backend);
  return cg.solve(repair_graph);
}

inline SolveReport solve(const Instance& inst, const RoutingGraph& graph, const SolveConfig& cfg = {}) {
  lp::RevisedSimplex backend;
  return solve(inst, graph, cfg, backend);
}

}  // namespace jrtp
