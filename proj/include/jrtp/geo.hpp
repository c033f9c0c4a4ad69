#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>

namespace jrtp {

struct GeoPoint {
  double lat = 0.0;
  double lon = 0.0;

  friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

inline constexpr double kEarthRadiusKm = 6371.0088;

// Great-circle distance in kilometres.
inline double haversine_km(const GeoPoint& a, const GeoPoint& b) {
  constexpr double deg = std::numbers::pi / 180.0;
  const double dlat = (b.lat - a.lat) * deg;
  const double dlon = (b.lon - a.lon) * deg;
  const double s = std::sin(dlat / 2) * std::sin(dlat / 2) +
                   std::cos(a.lat * deg) * std::cos(b.lat * deg) *
                       std::sin(dlon / 2) * std::sin(dlon / 2);
  return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(s)));
}

// Whole minutes needed to cover `km` at `km_per_minute`, rounded up.
// The slack absorbs floating noise so that 12 km at 0.6 km/min is 20, not 21.
inline int minutes_for_distance(double km, double km_per_minute) {
  return static_cast<int>(std::ceil(km / km_per_minute - 1e-9));
}

}  // namespace jrtp
