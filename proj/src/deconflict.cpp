#include "birdcast/deconflict.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace birdcast::deconflict {

void RunwaySpec::validate() const {
  if (!(threshold_lat >= -90.0 && threshold_lat <= 90.0))
    throw std::invalid_argument("threshold_lat outside [-90, 90]");
  if (!(threshold_lon >= -180.0 && threshold_lon <= 180.0))
    throw std::invalid_argument("threshold_lon outside [-180, 180]");
  if (!(heading_deg >= 0.0 && heading_deg < 360.0))
    throw std::invalid_argument("heading_deg outside [0, 360)");
  if (!(v_takeoff_mps > 0.0))
    throw std::invalid_argument("v_takeoff_mps must be > 0");
  if (!(t_roll_s > 0.0)) throw std::invalid_argument("t_roll_s must be > 0");
}

void DeconflictConfig::validate() const {
  runway.validate();
  if (!(eps_lat_m > 0.0)) throw std::invalid_argument("eps_lat_m must be > 0");
  if (!(eps_lon_m > 0.0)) throw std::invalid_argument("eps_lon_m must be > 0");
  if (!(max_delay_s >= 0.0))
    throw std::invalid_argument("max_delay_s must be >= 0");
}

data::TrackSeries runway_trajectory(const RunwaySpec& spec, double t_depart) {
  spec.validate();
  const double accel = spec.v_takeoff_mps / spec.t_roll_s;
  const double heading_rad = spec.heading_deg * geo::kPi / 180.0;
  const geo::GeoRef ref{spec.threshold_lat};
  const Index steps = static_cast<Index>(std::floor(spec.t_roll_s + 1e-9)) + 1;

  data::TrackSeries out;
  out.label = "aircraft";
  out.t.resize(steps);
  out.lat.resize(steps);
  out.lon.resize(steps);
  for (Index k = 0; k < steps; ++k) {
    const double tau = static_cast<double>(k);
    const double s = 0.5 * accel * tau * tau;
    const double north = s * std::cos(heading_rad);
    const double east = s * std::sin(heading_rad);
    out.t(k) = t_depart + tau;
    out.lat(k) = spec.threshold_lat + geo::m_to_lat_deg(north);
    out.lon(k) = spec.threshold_lon + geo::m_to_lon_deg(east, ref);
  }
  return out;
}

std::vector<SeparationSample> separation_trace(const data::TrackSeries& a,
                                               const data::TrackSeries& b) {
  constexpr double kTimeTol = 1e-6;
  std::vector<SeparationSample> trace;
  Index ia = 0, ib = 0;
  while (ia < a.size() && ib < b.size()) {
    const double ta = a.t(ia);
    const double tb = b.t(ib);
    if (ta < tb - kTimeTol) {
      ++ia;
      continue;
    }
    if (tb < ta - kTimeTol) {
      ++ib;
      continue;
    }
    SeparationSample s;
    s.t = ta;
    s.aircraft_lat = a.lat(ia);
    s.aircraft_lon = a.lon(ia);
    s.bird_lat = b.lat(ib);
    s.bird_lon = b.lon(ib);
    const geo::GeoRef ref{0.5 * (a.lat(ia) + b.lat(ib))};
    s.sep_lat_m = std::abs(geo::lat_deg_to_m(a.lat(ia) - b.lat(ib)));
    s.sep_lon_m = std::abs(geo::lon_deg_to_m(a.lon(ia) - b.lon(ib), ref));
    trace.push_back(s);
    ++ia;
    ++ib;
  }
  if (trace.empty())
    throw std::invalid_argument("series share no timestamps");
  return trace;
}

std::optional<ConflictEvent> detect_conflict(const data::TrackSeries& aircraft,
                                             const data::TrackSeries& bird,
                                             double eps_lat_m,
                                             double eps_lon_m,
                                             DetectMode mode) {
  if (!(eps_lat_m > 0.0) || !(eps_lon_m > 0.0))
    throw std::invalid_argument("conflict thresholds must be > 0");
  const auto violates = [&](const SeparationSample& s) {
    if (mode == DetectMode::Box)
      return s.sep_lat_m < eps_lat_m && s.sep_lon_m < eps_lon_m;
    const double u = s.sep_lat_m / eps_lat_m;
    const double v = s.sep_lon_m / eps_lon_m;
    return u * u + v * v < 1.0;
  };
  for (const SeparationSample& s : separation_trace(aircraft, bird)) {
    if (violates(s)) {
      ConflictEvent ev;
      ev.t = s.t;
      ev.aircraft_lat = s.aircraft_lat;
      ev.aircraft_lon = s.aircraft_lon;
      ev.bird_lat = s.bird_lat;
      ev.bird_lon = s.bird_lon;
      ev.sep_lat_m = s.sep_lat_m;
      ev.sep_lon_m = s.sep_lon_m;
      return ev;
    }
  }
  return std::nullopt;
}

ConflictReport min_delay(const RunwaySpec& spec,
                         const data::TrackSeries& bird_forecast,
                         double eps_lat_m, double eps_lon_m,
                         double max_delay_s, double t_depart,
                         DetectMode mode) {
  spec.validate();
  if (!(max_delay_s >= 0.0))
    throw std::invalid_argument("max_delay_s must be >= 0");
  ConflictReport report;
  const Index max_d = static_cast<Index>(std::floor(max_delay_s + 1e-9));
  for (Index d = 0; d <= max_d; ++d) {
    const data::TrackSeries roll =
        runway_trajectory(spec, t_depart + static_cast<double>(d));
    const auto hit =
        detect_conflict(roll, bird_forecast, eps_lat_m, eps_lon_m, mode);
    if (d == 0) report.conflict = hit;
    if (!hit) {
      report.min_delay_s = d;
      report.trace = separation_trace(roll, bird_forecast);
      return report;
    }
  }
  throw std::runtime_error("no safe delay within horizon");
}

DeconflictConfig load_runway_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open runway config: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("runway config " + path + ": " + e.what());
  }
  if (!j.is_object())
    throw std::invalid_argument("runway config must be a JSON object");
  auto need = [&j](const char* key) {
    if (!j.contains(key))
      throw std::invalid_argument(std::string("runway config missing key: ") +
                                  key);
    if (!j[key].is_number())
      throw std::invalid_argument(std::string("runway config key ") + key +
                                  " must be a number");
    return j[key].get<double>();
  };
  DeconflictConfig cfg;
  cfg.runway.threshold_lat = need("threshold_lat");
  cfg.runway.threshold_lon = need("threshold_lon");
  cfg.runway.heading_deg = need("heading_deg");
  cfg.runway.v_takeoff_mps = need("v_takeoff_mps");
  cfg.runway.t_roll_s = need("t_roll_s");
  cfg.eps_lat_m = need("eps_lat_m");
  cfg.eps_lon_m = need("eps_lon_m");
  cfg.max_delay_s = need("max_delay_s");
  cfg.validate();
  return cfg;
}

}  // namespace birdcast::deconflict
