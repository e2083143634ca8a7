#ifndef BIRDCAST_GEO_HPP
#define BIRDCAST_GEO_HPP

#include "birdcast/numerics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace birdcast::geo {

// Local tangent-plane conversion on a spherical earth. Over the sub-degree
// spans this toolkit deals with, the difference to an ellipsoidal model is
// below 0.6%, well under the 100 m granularity the error metrics use.
inline constexpr double kEarthRadiusM = 6'371'000.0;
inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kMetersPerDegree = 2.0 * kPi * kEarthRadiusM / 360.0;

enum class Axis { Lat, Lon };

inline std::string to_string(Axis a) { return a == Axis::Lat ? "lat" : "lon"; }

inline Axis axis_from_string(const std::string& name) {
  if (name == "lat" || name == "latitude") return Axis::Lat;
  if (name == "lon" || name == "longitude") return Axis::Lon;
  throw std::invalid_argument("unknown axis: " + name);
}

// Latitude at which the longitude scale factor is evaluated.
struct GeoRef {
  double ref_lat = 0.0;

  void validate() const {
    if (!(ref_lat >= -90.0 && ref_lat <= 90.0))
      throw std::invalid_argument("GeoRef: reference latitude " +
                                  std::to_string(ref_lat) +
                                  " outside [-90, 90]");
  }
};

inline double lat_deg_to_m(double dlat) {
  if (!std::isfinite(dlat))
    throw std::invalid_argument("lat_deg_to_m: non-finite input");
  return dlat * kMetersPerDegree;
}

inline double lon_deg_to_m(double dlon, const GeoRef& ref) {
  ref.validate();
  if (!std::isfinite(dlon))
    throw std::invalid_argument("lon_deg_to_m: non-finite input");
  return dlon * kMetersPerDegree * std::cos(ref.ref_lat * kPi / 180.0);
}

inline double deg_to_m(double d, Axis axis, const GeoRef& ref) {
  return axis == Axis::Lat ? lat_deg_to_m(d) : lon_deg_to_m(d, ref);
}

// Inverses, used to lay out metric displacements (e.g. a runway roll) in
// degree space.
inline double m_to_lat_deg(double m) {
  if (!std::isfinite(m))
    throw std::invalid_argument("m_to_lat_deg: non-finite input");
  return m / kMetersPerDegree;
}

inline double m_to_lon_deg(double m, const GeoRef& ref) {
  ref.validate();
  if (!std::isfinite(m))
    throw std::invalid_argument("m_to_lon_deg: non-finite input");
  const double c = std::cos(ref.ref_lat * kPi / 180.0);
  if (c < 1e-12)
    throw std::invalid_argument("m_to_lon_deg: reference latitude at a pole");
  return m / (kMetersPerDegree * c);
}

// Mean absolute error between two degree series, reported in meters.
// Convention used throughout: for Axis::Lon the caller passes the mean
// latitude of the ground-truth segment as the reference.
inline double mae_meters(const Vector& pred, const Vector& truth, Axis axis,
                         const GeoRef& ref) {
  if (pred.size() != truth.size())
    throw std::invalid_argument(
        "mae_meters: length mismatch (" + std::to_string(pred.size()) + " vs " +
        std::to_string(truth.size()) + ")");
  if (pred.size() == 0) throw std::invalid_argument("mae_meters: empty series");
  ref.validate();
  const double factor =
      axis == Axis::Lat
          ? kMetersPerDegree
          : kMetersPerDegree * std::cos(ref.ref_lat * kPi / 180.0);
  return (pred - truth).cwiseAbs().mean() * factor;
}

inline double mae_degrees(const Vector& pred, const Vector& truth) {
  if (pred.size() != truth.size() || pred.size() == 0)
    throw std::invalid_argument("mae_degrees: bad series lengths");
  return (pred - truth).cwiseAbs().mean();
}

}  // namespace birdcast::geo

#endif  // BIRDCAST_GEO_HPP
