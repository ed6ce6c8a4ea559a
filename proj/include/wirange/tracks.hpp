#pragma once

#include <optional>
#include <string>
#include <vector>

namespace wirange {

struct TrackPoint {
  double timestamp{0.0};  // epoch seconds
  double lat{0.0};
  double lon{0.0};
  std::optional<double> sog;  // knots
  std::string mmsi;
};

struct GeoPoint {
  double lat{0.0};
  double lon{0.0};
};

struct RangeRateProfile {
  std::vector<double> times;   // s
  std::vector<double> ranges;  // m
  std::vector<double> rates;   // m/s
};

// Great-circle distance in meters (haversine, R = 6371.0 km).
double haversine_m(const GeoPoint& a, const GeoPoint& b);

// Parse "timestamp,lat,lon[,sog[,mmsi]]" CSV rows (header required;
// ISO-8601 or epoch-second timestamps).
std::vector<TrackPoint> parse_track_csv(const std::string& path);

// Receiver-relative range/rate profile: haversine ranges, duplicate
// timestamps dropped, linear resampling to uniform dt, centered-difference
// rates. Where the source points leave gaps > 60 s, reported speed over
// ground (if present) substitutes for the position-derived rate.
RangeRateProfile ingest_track(const std::string& csv_path, const GeoPoint& receiver,
                              double resample_dt);

RangeRateProfile build_profile(std::vector<TrackPoint> points, const GeoPoint& receiver,
                               double resample_dt);

}  // namespace wirange
