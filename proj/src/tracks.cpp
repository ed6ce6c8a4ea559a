#include "wirange/tracks.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <ctime>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace wirange {

namespace {

constexpr double earth_radius_m = 6371.0e3;
constexpr double knots_to_mps = 0.514444;

double deg2rad(double d) { return d * std::numbers::pi / 180.0; }

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

// Epoch seconds from "YYYY-MM-DD[T ]HH:MM:SS[.fff][Z]" (UTC) or a plain number.
double parse_timestamp(const std::string& raw) {
  const std::string s = trim(raw);
  if (s.empty()) throw std::runtime_error("track csv: empty timestamp");
  const bool iso = s.find('-') != std::string::npos && s.find(':') != std::string::npos;
  if (!iso) {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos == 0) throw std::runtime_error("track csv: bad timestamp '" + s + "'");
    return v;
  }
  std::tm tm{};
  int year, mon, day, hour, min;
  double sec;
  if (std::sscanf(s.c_str(), "%d-%d-%d%*1[T ]%d:%d:%lf", &year, &mon, &day, &hour, &min, &sec) != 6)
    throw std::runtime_error("track csv: bad ISO timestamp '" + s + "'");
  tm.tm_year = year - 1900;
  tm.tm_mon = mon - 1;
  tm.tm_mday = day;
  tm.tm_hour = hour;
  tm.tm_min = min;
  tm.tm_sec = 0;
  const std::time_t base = timegm(&tm);
  return static_cast<double>(base) + sec;
}

std::vector<std::string> split_csv_row(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

double haversine_m(const GeoPoint& a, const GeoPoint& b) {
  const double phi1 = deg2rad(a.lat), phi2 = deg2rad(b.lat);
  const double dphi = phi2 - phi1;
  const double dlam = deg2rad(b.lon - a.lon);
  const double s1 = std::sin(0.5 * dphi);
  const double s2 = std::sin(0.5 * dlam);
  const double h = s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2;
  return 2.0 * earth_radius_m * std::asin(std::min(1.0, std::sqrt(h)));
}

std::vector<TrackPoint> parse_track_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("track csv: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("track csv: empty file");

  const auto header = split_csv_row(line);
  int c_time = -1, c_lat = -1, c_lon = -1, c_sog = -1, c_mmsi = -1;
  for (std::size_t i = 0; i < header.size(); ++i) {
    std::string h = header[i];
    std::transform(h.begin(), h.end(), h.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (h == "timestamp" || h == "time") c_time = static_cast<int>(i);
    else if (h == "lat" || h == "latitude") c_lat = static_cast<int>(i);
    else if (h == "lon" || h == "longitude") c_lon = static_cast<int>(i);
    else if (h == "sog") c_sog = static_cast<int>(i);
    else if (h == "mmsi") c_mmsi = static_cast<int>(i);
  }
  if (c_time < 0 || c_lat < 0 || c_lon < 0)
    throw std::runtime_error("track csv: header must name timestamp, lat, lon");

  std::vector<TrackPoint> points;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto f = split_csv_row(line);
    if (f.size() <= static_cast<std::size_t>(std::max(c_time, std::max(c_lat, c_lon)))) continue;
    TrackPoint p;
    p.timestamp = parse_timestamp(f[static_cast<std::size_t>(c_time)]);
    p.lat = std::stod(f[static_cast<std::size_t>(c_lat)]);
    p.lon = std::stod(f[static_cast<std::size_t>(c_lon)]);
    if (std::abs(p.lat) > 90.0 || std::abs(p.lon) > 180.0) continue;  // invalid row dropped
    if (c_sog >= 0 && static_cast<std::size_t>(c_sog) < f.size() && !f[static_cast<std::size_t>(c_sog)].empty())
      p.sog = std::stod(f[static_cast<std::size_t>(c_sog)]);
    if (c_mmsi >= 0 && static_cast<std::size_t>(c_mmsi) < f.size())
      p.mmsi = f[static_cast<std::size_t>(c_mmsi)];
    points.push_back(std::move(p));
  }
  return points;
}

RangeRateProfile build_profile(std::vector<TrackPoint> points, const GeoPoint& receiver,
                               double resample_dt) {
  if (!(resample_dt > 0.0)) throw std::invalid_argument("ingest_track: resample_dt must be > 0");
  std::stable_sort(points.begin(), points.end(),
                   [](const TrackPoint& a, const TrackPoint& b) { return a.timestamp < b.timestamp; });
  std::vector<TrackPoint> clean;
  for (auto& p : points) {
    if (!clean.empty() && !(p.timestamp > clean.back().timestamp)) continue;  // duplicate dropped
    clean.push_back(std::move(p));
  }
  if (clean.size() < 2) throw std::runtime_error("ingest_track: fewer than 2 valid points");

  std::vector<double> src_t(clean.size()), src_r(clean.size());
  for (std::size_t i = 0; i < clean.size(); ++i) {
    src_t[i] = clean[i].timestamp;
    src_r[i] = haversine_m({clean[i].lat, clean[i].lon}, receiver);
  }

  RangeRateProfile prof;
  const double t0 = src_t.front();
  const double t_end = src_t.back();
  const auto n = static_cast<std::size_t>(std::floor((t_end - t0) / resample_dt + 1e-9)) + 1;
  prof.times.resize(n);
  prof.ranges.resize(n);
  std::size_t seg = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = t0 + resample_dt * static_cast<double>(i);
    while (seg + 2 < src_t.size() && src_t[seg + 1] < t) ++seg;
    const double w = std::clamp((t - src_t[seg]) / (src_t[seg + 1] - src_t[seg]), 0.0, 1.0);
    prof.times[i] = t;
    prof.ranges[i] = src_r[seg] * (1.0 - w) + src_r[seg + 1] * w;
  }

  prof.rates.resize(n);
  if (n == 1) {
    prof.rates[0] = 0.0;
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t lo = i == 0 ? 0 : i - 1;
      const std::size_t hi = i + 1 == n ? n - 1 : i + 1;
      prof.rates[i] = (prof.ranges[hi] - prof.ranges[lo]) /
                      (prof.times[hi] - prof.times[lo]);
    }
  }

  // Sparse-gap fallback: inside source gaps > 60 s, prefer reported speed
  // over ground, signed by the range trend across the gap.
  seg = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = prof.times[i];
    while (seg + 2 < src_t.size() && src_t[seg + 1] < t) ++seg;
    const double gap = src_t[seg + 1] - src_t[seg];
    if (gap <= 60.0) continue;
    if (!clean[seg].sog || !clean[seg + 1].sog) continue;
    if (t <= src_t[seg] || t >= src_t[seg + 1]) continue;
    const double w = (t - src_t[seg]) / gap;
    const double sog_mps = (clean[seg].sog.value() * (1.0 - w) + clean[seg + 1].sog.value() * w) *
                           knots_to_mps;
    const double sign = src_r[seg + 1] >= src_r[seg] ? 1.0 : -1.0;
    prof.rates[i] = sign * sog_mps;
  }
  return prof;
}

RangeRateProfile ingest_track(const std::string& csv_path, const GeoPoint& receiver,
                              double resample_dt) {
  return build_profile(parse_track_csv(csv_path), receiver, resample_dt);
}

}  // namespace wirange
