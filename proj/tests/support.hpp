#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "jrtp/jrtp.hpp"

namespace jrtp::fixtures {

// Instance assembled from explicit requests; riders own consecutive ids.
struct InstanceBuilder {
  Instance inst;

  InstanceBuilder() {
    inst.depot = {32.03, -81.125};
    inst.shift_earliest = 300;
    inst.shift_latest = 900;
    inst.shift_duration = 480;
    inst.shift_step = 60;
    inst.fleet_size = 1;
  }

  // One rider per call; each trip is (origin, destination, pickup window, drop-off window).
  struct Trip {
    GeoPoint from, to;
    TimeWindow pickup, dropoff;
  };
  InstanceBuilder& rider(const std::vector<Trip>& trips, Minutes service = 0) {
    Rider u{static_cast<int>(inst.riders.size()) + 1, {}};
    for (const Trip& t : trips) {
      TripRequest r;
      r.id = inst.num_requests() + 1;
      r.rider_id = u.id;
      r.origin = t.from;
      r.destination = t.to;
      r.pickup_window = t.pickup;
      r.dropoff_window = t.dropoff;
      r.service_time = service;
      inst.requests.push_back(r);
      u.request_ids.push_back(r.id);
    }
    inst.riders.push_back(u);
    return *this;
  }
  Instance build() const {
    validate(inst);
    return inst;
  }
};

// Small corpus where fleet, windows and capacity bind: 2-5 requests, three
// 120-minute shifts. Returns false when the generator refuses the seed.
inline bool tight_instance(std::uint64_t seed, Instance& out) {
  GeneratorConfig gc;
  gc.seed = seed;
  gc.n_requests = 2 + static_cast<int>(seed % 4);
  gc.fraction_paired = 0.5;
  gc.fleet_size = 1 + static_cast<int>(seed % 2);
  gc.capacity = 1 + static_cast<int>((seed / 2) % 2);
  gc.shift_earliest = 300;
  gc.shift_latest = 540;
  gc.shift_duration = 120;
  gc.shift_step = 60;
  gc.window_width_min = 5;
  gc.window_width_max = 15;
  gc.ride_slack_min = 5;
  gc.ride_slack_max = 15;
  gc.return_gap_min = 5;
  gc.return_gap_max = 30;
  try {
    out = generate_instance(gc);
    return true;
  } catch (const GeneratorError&) {
    return false;
  }
}

// Every feasible route of one shift, found by brute force: each nonempty
// request subset, each ordering of its pickups and drop-offs, kept when the
// ordering respects precedence, capacity, existing edges and earliest-start
// timing. Shares no code with the library's route search.
inline std::set<std::vector<int>> brute_force_routes(const RoutingGraph& g, const Shift& shift) {
  const int n = g.num_requests();
  std::set<std::vector<int>> out;
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    std::vector<int> nodes;
    for (int r = 1; r <= n; ++r)
      if (mask & (1u << (r - 1))) {
        nodes.push_back(r);
        nodes.push_back(n + r);
      }
    std::sort(nodes.begin(), nodes.end());
    do {
      std::vector<int> stops{0};
      stops.insert(stops.end(), nodes.begin(), nodes.end());
      stops.push_back(2 * n + 1);
      bool ok = true;
      int load = 0;
      std::set<int> picked;
      Minutes t = shift.start;
      for (std::size_t k = 1; k < stops.size() && ok; ++k) {
        const int i = stops[k - 1];
        const int j = stops[k];
        if (!g.has_edge(i, j)) {
          ok = false;
          break;
        }
        if (j >= 1 && j <= n) {
          picked.insert(j);
          load += g.node(j).demand;
        } else if (j > n && j <= 2 * n) {
          if (!picked.count(j - n)) ok = false;
          load += g.node(j).demand;
        }
        if (load > g.capacity()) ok = false;
        const Node& nd = g.node(j);
        const Minutes arrive = t + g.drive_time(i, j);
        if (arrive > nd.window.latest || arrive > shift.end) ok = false;
        t = std::max(arrive, nd.window.earliest) + nd.service_time;
      }
      if (ok) out.insert(stops);
    } while (std::next_permutation(nodes.begin(), nodes.end()));
  }
  return out;
}

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("jrtp-test-" + std::to_string(rd()) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace jrtp::fixtures
