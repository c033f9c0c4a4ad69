#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "jrtp/colgen.hpp"
#include "jrtp/graph.hpp"
#include "jrtp/instance.hpp"

namespace jrtp {

using EdgeId = std::pair<int, int>;

// Per-edge scores in [0, 1], keyed by (i, j).
class EdgeScoreMap {
 public:
  void set(int i, int j, double score) {
    if (!(score >= 0.0 && score <= 1.0))
      throw std::invalid_argument("score for edge (" + std::to_string(i) + ", " + std::to_string(j) +
                                  ") outside [0, 1]");
    scores_[{i, j}] = score;
  }

  std::optional<double> get(int i, int j) const {
    auto it = scores_.find({i, j});
    if (it == scores_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t size() const { return scores_.size(); }
  const std::map<EdgeId, double>& entries() const { return scores_; }

 private:
  std::map<EdgeId, double> scores_;
};

// Reads "i,j,score" rows; a leading header row is skipped.
inline EdgeScoreMap read_scores_csv(std::istream& in) {
  EdgeScoreMap m;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (lineno == 1 && line.find_first_of("0123456789") != 0) continue;
    std::stringstream ss(line);
    std::string a, b, s;
    if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',') || !std::getline(ss, s))
      throw std::runtime_error("score file line " + std::to_string(lineno) + ": expected i,j,score");
    try {
      m.set(std::stoi(a), std::stoi(b), std::stod(s));
    } catch (const std::invalid_argument& e) {
      throw std::runtime_error("score file line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return m;
}

inline EdgeScoreMap read_scores_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open score file " + path);
  return read_scores_csv(in);
}

inline void write_scores_csv(const EdgeScoreMap& m, std::ostream& out) {
  out << "i,j,score\n";
  out.precision(17);
  for (const auto& [e, s] : m.entries()) out << e.first << ',' << e.second << ',' << s << '\n';
}

// Scores that favour short drives: 1 - t_ij / max t over the edge set.
inline EdgeScoreMap short_edge_prior(const RoutingGraph& g) {
  Minutes longest = 1;
  for (const Edge& e : g.edges()) longest = std::max(longest, e.travel_time);
  EdgeScoreMap m;
  for (const Edge& e : g.edges())
    m.set(e.from, e.to, 1.0 - static_cast<double>(e.travel_time) / longest);
  return m;
}

// Keeps the ceil(tau |E| / 100) best-scored edges (ties to the smaller
// (i, j)) together with every depot->pickup, pickup->drop-off and
// drop-off->depot edge.
inline RoutingGraph reduce_graph(const RoutingGraph& g, const EdgeScoreMap& scores, double tau) {
  if (!(tau >= 0.0 && tau <= 100.0)) throw std::invalid_argument("tau must lie in [0, 100]");
  std::vector<std::pair<double, EdgeId>> ranked;
  ranked.reserve(g.num_edges());
  for (const Edge& e : g.edges()) {
    auto s = scores.get(e.from, e.to);
    if (!s)
      throw std::invalid_argument("score map has no entry for edge (" + std::to_string(e.from) + ", " +
                                  std::to_string(e.to) + ")");
    ranked.push_back({*s, {e.from, e.to}});
  }
  for (const auto& [e, s] : scores.entries())
    if (!g.has_edge(e.first, e.second))
      throw std::invalid_argument("score map names (" + std::to_string(e.first) + ", " +
                                  std::to_string(e.second) + ") which is not an edge");
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  const auto keep = static_cast<std::size_t>(std::ceil(tau * static_cast<double>(g.num_edges()) / 100.0 - 1e-9));
  std::vector<Edge> kept = g.mandatory_edges();
  for (std::size_t k = 0; k < keep && k < ranked.size(); ++k) {
    const auto [i, j] = ranked[k].second;
    kept.push_back({i, j, g.drive_time(i, j)});
  }
  return g.with_edges(kept);
}

// ---- training labels ----------------------------------------------------

enum class LabelClass { All, Used, Used80, Used50, Used30 };

inline LabelClass parse_label_class(const std::string& s) {
  if (s == "a" || s == "A") return LabelClass::All;
  if (s == "u" || s == "U") return LabelClass::Used;
  if (s == "u80" || s == "U80") return LabelClass::Used80;
  if (s == "u50" || s == "U50") return LabelClass::Used50;
  if (s == "u30" || s == "U30") return LabelClass::Used30;
  throw std::invalid_argument("unknown label class '" + s + "' (expected a, u, u80, u50 or u30)");
}

constexpr std::string_view to_string(LabelClass c) {
  switch (c) {
    case LabelClass::All: return "a";
    case LabelClass::Used: return "u";
    case LabelClass::Used80: return "u80";
    case LabelClass::Used50: return "u50";
    case LabelClass::Used30: return "u30";
  }
  return "?";
}

struct EdgeLabelSet {
  std::map<LabelClass, std::set<EdgeId>> positive;
  std::map<EdgeId, int> usage_counts;

  const std::set<EdgeId>& of(LabelClass c) const { return positive.at(c); }
};

inline std::vector<EdgeId> route_edges(const Column& c) {
  std::vector<EdgeId> out;
  for (std::size_t k = 1; k < c.stops.size(); ++k) out.push_back({c.stops[k - 1], c.stops[k]});
  return out;
}

// Positive edges per class from a recorded solve:
//   all   - edges of every pooled column
//   used  - edges of columns with positive lambda in some master solution
//   usedX - top X% of `used` by how often they appear in master solutions
inline EdgeLabelSet extract_labels(const SolveTrace& trace) {
  if (trace.columns.empty()) throw std::invalid_argument("trace holds no columns");
  std::map<int, const Column*> by_id;
  EdgeLabelSet out;
  auto& all = out.positive[LabelClass::All];
  for (const Column& c : trace.columns) {
    by_id[c.id] = &c;
    for (const EdgeId& e : route_edges(c)) all.insert(e);
  }
  auto& used = out.positive[LabelClass::Used];
  for (const auto& solution : trace.solutions)
    for (const auto& [id, v] : solution) {
      if (v <= kIntegralityTolerance) continue;
      auto it = by_id.find(id);
      if (it == by_id.end()) throw std::invalid_argument("trace solution names unknown column " + std::to_string(id));
      for (const EdgeId& e : route_edges(*it->second)) {
        used.insert(e);
        ++out.usage_counts[e];
      }
    }
  std::vector<EdgeId> ranked(used.begin(), used.end());
  std::stable_sort(ranked.begin(), ranked.end(), [&](const EdgeId& a, const EdgeId& b) {
    return out.usage_counts[a] > out.usage_counts[b];
  });
  for (auto [cls, pct] : {std::pair{LabelClass::Used80, 80}, {LabelClass::Used50, 50}, {LabelClass::Used30, 30}}) {
    const auto take = (static_cast<std::size_t>(pct) * ranked.size() + 99) / 100;
    out.positive[cls] = std::set<EdgeId>(ranked.begin(), ranked.begin() + static_cast<long>(take));
  }
  return out;
}

// ---- trace and sample files ----------------------------------------------

inline constexpr int kTraceFormatVersion = 1;
inline constexpr int kSampleFormatVersion = 1;

inline nlohmann::json trace_to_json(const SolveTrace& t, const Instance& inst) {
  nlohmann::json cols = nlohmann::json::array();
  for (const Column& c : t.columns)
    cols.push_back({{"id", c.id}, {"shift", c.shift.index}, {"stops", c.stops}});
  nlohmann::json sols = nlohmann::json::array();
  for (const auto& s : t.solutions) {
    nlohmann::json one = nlohmann::json::array();
    for (const auto& [id, v] : s) one.push_back({id, v});
    sols.push_back(std::move(one));
  }
  return {{"format_version", kTraceFormatVersion},
          {"instance", instance_to_json(inst)},
          {"columns", std::move(cols)},
          {"solutions", std::move(sols)}};
}

// Columns come back with stops and shift index only; that is all the label
// extractor reads.
inline std::pair<Instance, SolveTrace> trace_from_json(const nlohmann::json& j) {
  if (j.at("format_version").get<int>() != kTraceFormatVersion) throw std::runtime_error("unsupported trace version");
  Instance inst = instance_from_json(j.at("instance"));
  SolveTrace t;
  for (const auto& c : j.at("columns")) {
    Column col;
    col.id = c.at("id").get<int>();
    col.shift.index = c.at("shift").get<int>();
    col.stops = c.at("stops").get<std::vector<int>>();
    t.columns.push_back(std::move(col));
  }
  for (const auto& s : j.at("solutions")) {
    std::vector<std::pair<int, double>> one;
    for (const auto& kv : s) one.emplace_back(kv.at(0).get<int>(), kv.at(1).get<double>());
    t.solutions.push_back(std::move(one));
  }
  return {std::move(inst), std::move(t)};
}

namespace detail {

// Column-wise min-max scaling; a constant column becomes all zeros.
inline void min_max_scale(std::vector<std::vector<double>>& rows, std::size_t col) {
  if (rows.empty()) return;
  double lo = rows[0][col], hi = rows[0][col];
  for (const auto& r : rows) {
    lo = std::min(lo, r[col]);
    hi = std::max(hi, r[col]);
  }
  for (auto& r : rows) r[col] = hi > lo ? (r[col] - lo) / (hi - lo) : 0.0;
}

}  // namespace detail

// One graph sample for the edge classifier. Without `labels` the sample is
// the unlabeled variant used for inference.
inline nlohmann::json export_training_sample(const Instance& inst, const RoutingGraph& g,
                                             const std::set<EdgeId>* labels = nullptr,
                                             std::optional<LabelClass> cls = std::nullopt) {
  const int n = g.num_requests();
  std::vector<std::vector<double>> nodes;
  nodes.reserve(g.num_nodes());
  for (const Node& nd : g.nodes()) {
    GeoPoint p = inst.depot;
    if (nd.kind == NodeKind::Pickup) p = inst.request(nd.request_id).origin;
    if (nd.kind == NodeKind::Dropoff) p = inst.request(nd.request_id).destination;
    const bool depot = nd.kind == NodeKind::OriginDepot || nd.kind == NodeKind::DestDepot;
    nodes.push_back({p.lat, p.lon, static_cast<double>(nd.window.earliest), static_cast<double>(nd.window.latest),
                     nd.kind == NodeKind::Pickup ? 1.0 : 0.0, nd.kind == NodeKind::Dropoff ? 1.0 : 0.0,
                     depot ? 1.0 : 0.0});
  }
  for (std::size_t c = 0; c < 4; ++c) detail::min_max_scale(nodes, c);

  std::vector<std::vector<double>> edge_features;
  nlohmann::json edges = nlohmann::json::array();
  nlohmann::json label_values = nlohmann::json::array();
  for (const Edge& e : g.edges()) {
    const bool same_trip = g.is_pickup(e.from) && e.to == e.from + n;
    edge_features.push_back({static_cast<double>(e.travel_time), same_trip ? 1.0 : 0.0});
    edges.push_back({e.from, e.to});
    if (labels) label_values.push_back(labels->count({e.from, e.to}) ? 1 : 0);
  }
  detail::min_max_scale(edge_features, 0);

  nlohmann::json j;
  j["format_version"] = kSampleFormatVersion;
  j["num_nodes"] = g.num_nodes();
  j["num_requests"] = n;
  j["node_feature_names"] = {"lat", "lon", "window_start", "window_end", "is_pickup", "is_dropoff", "is_depot"};
  j["node_features"] = nodes;
  j["edge_feature_names"] = {"travel_time", "same_trip"};
  j["edges"] = std::move(edges);
  j["edge_features"] = edge_features;
  if (labels) {
    j["label_class"] = cls ? std::string(to_string(*cls)) : std::string("custom");
    j["labels"] = std::move(label_values);
  }
  return j;
}

}  // namespace jrtp
