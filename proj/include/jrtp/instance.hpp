#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "jrtp/geo.hpp"

namespace jrtp {

// Times are integer minutes from midnight throughout.
using Minutes = int;

struct TimeWindow {
  Minutes earliest = 0;
  Minutes latest = 0;

  friend bool operator==(const TimeWindow&, const TimeWindow&) = default;
};

struct TripRequest {
  int id = 0;  // 1..n
  int rider_id = 0;
  GeoPoint origin;
  GeoPoint destination;
  TimeWindow pickup_window;
  TimeWindow dropoff_window;
  Minutes service_time = 0;
  int demand = 1;

  friend bool operator==(const TripRequest&, const TripRequest&) = default;
};

struct Rider {
  int id = 0;
  std::vector<int> request_ids;

  friend bool operator==(const Rider&, const Rider&) = default;
};

// Drivers needed for `requests` trips at `omega` trips per driver.
constexpr int fleet_size(int requests, int omega) {
  return requests <= 0 ? 0 : (requests + omega - 1) / omega;
}

struct Instance {
  std::vector<Rider> riders;
  std::vector<TripRequest> requests;  // requests[r - 1].id == r
  GeoPoint depot;
  int capacity = 4;
  // Empty means "auto": derived from the request count and omega.
  std::optional<int> fleet_size;
  int omega = 16;
  Minutes shift_earliest = 300;
  Minutes shift_latest = 1320;
  Minutes shift_duration = 480;
  Minutes shift_step = 60;
  double speed = 0.5;  // km per minute
  std::uint64_t seed = 0;

  int num_requests() const { return static_cast<int>(requests.size()); }
  const TripRequest& request(int id) const { return requests.at(id - 1); }
  int vehicles() const {
    return fleet_size ? *fleet_size : jrtp::fleet_size(num_requests(), omega);
  }

  friend bool operator==(const Instance&, const Instance&) = default;
};

inline constexpr int kInstanceFormatVersion = 1;

// Raised for any violated instance rule; `field` names the offending entry.
class InvalidInstance : public std::runtime_error {
 public:
  InvalidInstance(std::string field, std::string rule)
      : std::runtime_error(field + ": " + rule),
        field_(std::move(field)),
        rule_(std::move(rule)) {}

  const std::string& field() const { return field_; }
  const std::string& rule() const { return rule_; }

 private:
  std::string field_;
  std::string rule_;
};

inline void validate(const Instance& inst) {
  auto fail = [](std::string field, std::string rule) {
    throw InvalidInstance(std::move(field), std::move(rule));
  };
  if (inst.shift_step <= 0) fail("shift_step", "must be > 0");
  if (inst.shift_duration <= 0) fail("shift_duration", "must be > 0");
  if (inst.shift_earliest + inst.shift_duration > inst.shift_latest)
    fail("shift_duration", "shift_earliest + shift_duration must not exceed shift_latest");
  if (inst.capacity < 1) fail("capacity", "must be >= 1");
  if (inst.omega < 1) fail("omega", "must be >= 1");
  if (inst.fleet_size && *inst.fleet_size < 0) fail("fleet_size", "must be >= 0");
  if (!(inst.speed > 0.0)) fail("speed", "must be > 0");
  if (inst.requests.empty()) fail("requests", "at least one request is required");

  const int n = inst.num_requests();
  for (int k = 0; k < n; ++k) {
    const TripRequest& r = inst.requests[k];
    const std::string field = "requests[" + std::to_string(k) + "]";
    if (r.id != k + 1) fail(field + ".id", "request ids must be 1..n in order");
    if (r.pickup_window.earliest > r.pickup_window.latest)
      fail(field + ".pickup_window", "earliest must not exceed latest");
    if (r.dropoff_window.earliest > r.dropoff_window.latest)
      fail(field + ".dropoff_window", "earliest must not exceed latest");
    if (r.service_time < 0) fail(field + ".service_time", "must be >= 0");
    if (r.demand < 1) fail(field + ".demand", "must be >= 1");
    if (r.demand > inst.capacity) fail(field + ".demand", "must not exceed capacity");
  }

  std::vector<int> owner(n + 1, 0);
  std::set<int> rider_ids;
  for (const Rider& u : inst.riders) {
    const std::string field = "riders[" + std::to_string(u.id) + "]";
    if (!rider_ids.insert(u.id).second) fail(field + ".id", "duplicate rider id");
    if (u.request_ids.empty()) fail(field + ".request_ids", "must be nonempty");
    for (int rid : u.request_ids) {
      if (rid < 1 || rid > n) fail(field + ".request_ids", "unknown request " + std::to_string(rid));
      if (owner[rid] != 0)
        fail(field + ".request_ids", "request " + std::to_string(rid) + " owned by two riders");
      owner[rid] = u.id;
      if (inst.request(rid).rider_id != u.id)
        fail("requests[" + std::to_string(rid - 1) + "].rider_id", "disagrees with rider list");
    }
  }
  for (int rid = 1; rid <= n; ++rid)
    if (owner[rid] == 0)
      fail("requests[" + std::to_string(rid - 1) + "]", "not owned by any rider");
}

// ---- JSON ---------------------------------------------------------------

inline void to_json(nlohmann::json& j, const GeoPoint& p) {
  j = nlohmann::json{{"lat", p.lat}, {"lon", p.lon}};
}
inline void from_json(const nlohmann::json& j, GeoPoint& p) {
  j.at("lat").get_to(p.lat);
  j.at("lon").get_to(p.lon);
}
inline void to_json(nlohmann::json& j, const TimeWindow& w) {
  j = nlohmann::json::array({w.earliest, w.latest});
}
inline void from_json(const nlohmann::json& j, TimeWindow& w) {
  if (!j.is_array() || j.size() != 2) throw nlohmann::json::type_error::create(302, "time window must be [a, b]", &j);
  j.at(0).get_to(w.earliest);
  j.at(1).get_to(w.latest);
}
inline void to_json(nlohmann::json& j, const TripRequest& r) {
  j = nlohmann::json{{"id", r.id},
                     {"rider_id", r.rider_id},
                     {"origin", r.origin},
                     {"destination", r.destination},
                     {"pickup_window", r.pickup_window},
                     {"dropoff_window", r.dropoff_window},
                     {"service_time", r.service_time},
                     {"demand", r.demand}};
}
inline void from_json(const nlohmann::json& j, TripRequest& r) {
  j.at("id").get_to(r.id);
  j.at("rider_id").get_to(r.rider_id);
  j.at("origin").get_to(r.origin);
  j.at("destination").get_to(r.destination);
  j.at("pickup_window").get_to(r.pickup_window);
  j.at("dropoff_window").get_to(r.dropoff_window);
  r.service_time = j.value("service_time", 0);
  r.demand = j.value("demand", 1);
}
inline void to_json(nlohmann::json& j, const Rider& u) {
  j = nlohmann::json{{"id", u.id}, {"request_ids", u.request_ids}};
}
inline void from_json(const nlohmann::json& j, Rider& u) {
  j.at("id").get_to(u.id);
  j.at("request_ids").get_to(u.request_ids);
}

inline nlohmann::json instance_to_json(const Instance& inst) {
  nlohmann::json j;
  j["format_version"] = kInstanceFormatVersion;
  j["depot"] = inst.depot;
  j["capacity"] = inst.capacity;
  j["fleet_size"] = inst.fleet_size ? nlohmann::json(*inst.fleet_size) : nlohmann::json("auto");
  j["omega"] = inst.omega;
  j["shift_earliest"] = inst.shift_earliest;
  j["shift_latest"] = inst.shift_latest;
  j["shift_duration"] = inst.shift_duration;
  j["shift_step"] = inst.shift_step;
  j["speed"] = inst.speed;
  j["seed"] = inst.seed;
  j["riders"] = inst.riders;
  j["requests"] = inst.requests;
  return j;
}

// Parses and validates. Throws nlohmann::json::exception on malformed input
// and InvalidInstance on rule violations.
inline Instance instance_from_json(const nlohmann::json& j) {
  const int version = j.at("format_version").get<int>();
  if (version != kInstanceFormatVersion)
    throw InvalidInstance("format_version", "unsupported version " + std::to_string(version));
  Instance inst;
  j.at("depot").get_to(inst.depot);
  j.at("capacity").get_to(inst.capacity);
  const auto& fleet = j.at("fleet_size");
  if (fleet.is_string()) {
    if (fleet.get<std::string>() != "auto") throw InvalidInstance("fleet_size", "must be an integer or \"auto\"");
  } else {
    inst.fleet_size = fleet.get<int>();
  }
  inst.omega = j.value("omega", 16);
  j.at("shift_earliest").get_to(inst.shift_earliest);
  j.at("shift_latest").get_to(inst.shift_latest);
  j.at("shift_duration").get_to(inst.shift_duration);
  j.at("shift_step").get_to(inst.shift_step);
  j.at("speed").get_to(inst.speed);
  inst.seed = j.value("seed", std::uint64_t{0});
  j.at("riders").get_to(inst.riders);
  j.at("requests").get_to(inst.requests);
  validate(inst);
  return inst;
}

inline Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open instance file " + path);
  return instance_from_json(nlohmann::json::parse(in));
}

inline void save_instance(const Instance& inst, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << instance_to_json(inst).dump(2) << '\n';
}

}  // namespace jrtp
