#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>

#include "jrtp/graph.hpp"
#include "jrtp/instance.hpp"

namespace jrtp {

struct BoundingBox {
  double lat_min = 31.98;
  double lat_max = 32.08;
  double lon_min = -81.20;
  double lon_max = -81.05;
};

struct GeneratorConfig {
  int n_requests = 20;
  // Share of requests that belong to riders with an outbound and a return trip.
  double fraction_paired = 0.3;
  BoundingBox bbox;
  Minutes window_width_min = 15;
  Minutes window_width_max = 45;
  // Extra minutes allowed on top of the direct ride before the latest drop-off.
  Minutes ride_slack_min = 15;
  Minutes ride_slack_max = 45;
  // Gap between the outbound latest drop-off and the return earliest pickup.
  Minutes return_gap_min = 60;
  Minutes return_gap_max = 240;
  Minutes service_time = 2;
  int capacity = 4;
  std::optional<int> fleet_size;  // empty: auto from omega
  int omega = 16;
  Minutes shift_earliest = 300;
  Minutes shift_latest = 1320;
  Minutes shift_duration = 480;
  Minutes shift_step = 60;
  double speed = 0.5;
  std::uint64_t seed = 0;
};

class GeneratorError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

// Distribution code is spelled out because the standard distributions are
// not required to produce the same sequence on every library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform(double lo, double hi) {
    const double unit = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * unit;
  }

  int uniform_int(int lo, int hi) {
    if (hi <= lo) return lo;
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<int>(engine_() % span);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace detail

inline Instance generate_instance(const GeneratorConfig& cfg) {
  if (cfg.n_requests < 1) throw GeneratorError("n_requests must be >= 1");
  if (cfg.fraction_paired < 0.0 || cfg.fraction_paired > 1.0)
    throw GeneratorError("fraction_paired must lie in [0, 1]");
  if (cfg.window_width_min > cfg.window_width_max || cfg.ride_slack_min > cfg.ride_slack_max ||
      cfg.return_gap_min > cfg.return_gap_max)
    throw GeneratorError("a min/max range is inverted");

  detail::Rng rng(cfg.seed);
  Instance inst;
  inst.depot = {(cfg.bbox.lat_min + cfg.bbox.lat_max) / 2, (cfg.bbox.lon_min + cfg.bbox.lon_max) / 2};
  inst.capacity = cfg.capacity;
  inst.fleet_size = cfg.fleet_size;
  inst.omega = cfg.omega;
  inst.shift_earliest = cfg.shift_earliest;
  inst.shift_latest = cfg.shift_latest;
  inst.shift_duration = cfg.shift_duration;
  inst.shift_step = cfg.shift_step;
  inst.speed = cfg.speed;
  inst.seed = cfg.seed;

  auto point = [&] {
    const double lat = rng.uniform(cfg.bbox.lat_min, cfg.bbox.lat_max);
    const double lon = rng.uniform(cfg.bbox.lon_min, cfg.bbox.lon_max);
    return GeoPoint{lat, lon};
  };
  auto minutes = [&](const GeoPoint& a, const GeoPoint& b) {
    return minutes_for_distance(haversine_km(a, b), cfg.speed);
  };

  const int paired = static_cast<int>(cfg.fraction_paired * cfg.n_requests / 2.0);
  const int riders = cfg.n_requests - paired;
  int next_request = 1;
  for (int k = 0; k < riders; ++k) {
    Rider rider{k + 1, {}};
    const bool two_trips = k < paired;
    const GeoPoint home = point();
    const GeoPoint away = point();
    const Minutes ride = minutes(home, away);
    const Minutes s = cfg.service_time;

    const Minutes width1 = rng.uniform_int(cfg.window_width_min, cfg.window_width_max);
    const Minutes slack1 = rng.uniform_int(cfg.ride_slack_min, cfg.ride_slack_max);
    Minutes tail = width1 + s + ride + slack1;  // outbound pickup earliest -> its drop-off latest
    Minutes width2 = 0, slack2 = 0, gap = 0;
    if (two_trips) {
      width2 = rng.uniform_int(cfg.window_width_min, cfg.window_width_max);
      slack2 = rng.uniform_int(cfg.ride_slack_min, cfg.ride_slack_max);
      gap = rng.uniform_int(cfg.return_gap_min, cfg.return_gap_max);
      tail += gap + width2 + s + ride + slack2;
    }
    const Minutes lo = cfg.shift_earliest + minutes(inst.depot, home);
    const Minutes hi = cfg.shift_latest - tail - s - minutes(two_trips ? home : away, inst.depot);
    if (lo > hi)
      throw GeneratorError("rider " + std::to_string(k + 1) +
                           ": time windows cannot fit between shift_earliest and shift_latest");
    const Minutes p = rng.uniform_int(lo, hi);

    TripRequest out;
    out.id = next_request++;
    out.rider_id = rider.id;
    out.origin = home;
    out.destination = away;
    out.pickup_window = {p, p + width1};
    out.dropoff_window = {p + s + ride, p + width1 + s + ride + slack1};
    out.service_time = s;
    out.demand = 1;
    rider.request_ids.push_back(out.id);
    inst.requests.push_back(out);

    if (two_trips) {
      const Minutes q = out.dropoff_window.latest + gap;
      TripRequest back;
      back.id = next_request++;
      back.rider_id = rider.id;
      back.origin = away;
      back.destination = home;
      back.pickup_window = {q, q + width2};
      back.dropoff_window = {q + s + ride, q + width2 + s + ride + slack2};
      back.service_time = s;
      back.demand = 1;
      rider.request_ids.push_back(back.id);
      inst.requests.push_back(back);
    }
    inst.riders.push_back(std::move(rider));
  }

  try {
    validate(inst);
    build_graph(inst);
  } catch (const InvalidInstance& e) {
    throw GeneratorError(std::string("generated instance is not servable: ") + e.what());
  }
  return inst;
}

}  // namespace jrtp
