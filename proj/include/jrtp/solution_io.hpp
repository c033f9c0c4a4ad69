#pragma once

#include <fstream>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "jrtp/colgen.hpp"
#include "jrtp/graph.hpp"
#include "jrtp/instance.hpp"

namespace jrtp {

inline constexpr int kSolutionFormatVersion = 1;

// The solution file holds only run-independent content so that equal inputs
// give byte-identical files; wall-clock figures go to the run manifest.
struct Solution {
  std::string status = "converged";
  int objective = 0;
  double lp_bound = 0.0;
  int iterations = 0;
  std::vector<int> fixes;
  std::vector<Column> routes;
};

inline Solution to_solution(const SolveReport& r) {
  return {std::string(to_string(r.status)), r.objective, r.first_phase_objective, r.iterations, r.fixes, r.routes};
}

inline std::string_view kind_name(NodeKind k) {
  switch (k) {
    case NodeKind::OriginDepot: return "origin_depot";
    case NodeKind::Pickup: return "pickup";
    case NodeKind::Dropoff: return "dropoff";
    case NodeKind::DestDepot: return "dest_depot";
  }
  return "?";
}

inline nlohmann::json solution_to_json(const Solution& s, const Instance& inst, const RoutingGraph& g) {
  std::set<int> served_requests;
  nlohmann::json routes = nlohmann::json::array();
  for (const Column& c : s.routes) {
    nlohmann::json stops = nlohmann::json::array();
    for (std::size_t k = 0; k < c.stops.size(); ++k) {
      const Node& nd = g.node(c.stops[k]);
      nlohmann::json stop{{"node", nd.index},
                          {"kind", kind_name(nd.kind)},
                          {"arrive", c.times[k].arrive},
                          {"start", c.times[k].start},
                          {"depart", c.times[k].depart}};
      if (nd.request_id != 0) stop["request"] = nd.request_id;
      stops.push_back(std::move(stop));
    }
    served_requests.insert(c.served.begin(), c.served.end());
    routes.push_back({{"column_id", c.id},
                      {"shift", {{"index", c.shift.index}, {"start", c.shift.start}, {"end", c.shift.end}}},
                      {"served", c.served},
                      {"stops", std::move(stops)}});
  }
  std::vector<int> riders;
  for (const Rider& u : inst.riders)
    if (!u.request_ids.empty() && served_requests.count(u.request_ids.front())) riders.push_back(u.id);
  return {{"format_version", kSolutionFormatVersion},
          {"status", s.status},
          {"objective", s.objective},
          {"lp_bound", s.lp_bound},
          {"iterations", s.iterations},
          {"fixes", s.fixes},
          {"vehicles_used", s.routes.size()},
          {"served_riders", riders},
          {"served_requests", std::vector<int>(served_requests.begin(), served_requests.end())},
          {"routes", std::move(routes)}};
}

inline Solution solution_from_json(const nlohmann::json& j) {
  if (j.at("format_version").get<int>() != kSolutionFormatVersion)
    throw std::runtime_error("unsupported solution version");
  Solution s;
  j.at("status").get_to(s.status);
  j.at("objective").get_to(s.objective);
  s.lp_bound = j.value("lp_bound", 0.0);
  s.iterations = j.value("iterations", 0);
  s.fixes = j.value("fixes", std::vector<int>{});
  for (const auto& r : j.at("routes")) {
    Column c;
    c.id = r.at("column_id").get<int>();
    const auto& sh = r.at("shift");
    c.shift = {sh.at("index").get<int>(), sh.at("start").get<Minutes>(), sh.at("end").get<Minutes>()};
    c.served = r.at("served").get<std::vector<int>>();
    for (const auto& stop : r.at("stops")) {
      c.stops.push_back(stop.at("node").get<int>());
      c.times.push_back({stop.at("arrive").get<Minutes>(), stop.at("start").get<Minutes>(),
                         stop.at("depart").get<Minutes>()});
    }
    s.routes.push_back(std::move(c));
  }
  return s;
}

inline Solution load_solution(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open solution file " + path);
  return solution_from_json(nlohmann::json::parse(in));
}

}  // namespace jrtp
