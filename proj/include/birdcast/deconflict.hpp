#ifndef BIRDCAST_DECONFLICT_HPP
#define BIRDCAST_DECONFLICT_HPP

#include "birdcast/data.hpp"
#include "birdcast/geo.hpp"

#include <optional>
#include <string>
#include <vector>

namespace birdcast::deconflict {

// Takeoff ground roll: constant acceleration from rest at the threshold,
// reaching v_takeoff after t_roll seconds.
struct RunwaySpec {
  double threshold_lat = 0.0;
  double threshold_lon = 0.0;
  double heading_deg = 0.0;  // degrees true, displacement direction
  double v_takeoff_mps = 77.0;
  double t_roll_s = 30.0;

  void validate() const;
};

// Both separations under their thresholds at a shared timestamp.
struct ConflictEvent {
  double t = 0.0;
  double aircraft_lat = 0.0, aircraft_lon = 0.0;
  double bird_lat = 0.0, bird_lon = 0.0;
  double sep_lat_m = 0.0, sep_lon_m = 0.0;
};

struct SeparationSample {
  double t = 0.0;
  double sep_lat_m = 0.0, sep_lon_m = 0.0;
  double aircraft_lat = 0.0, aircraft_lon = 0.0;
  double bird_lat = 0.0, bird_lon = 0.0;
};

struct ConflictReport {
  std::optional<ConflictEvent> conflict;  // with no delay applied
  Index min_delay_s = 0;
  std::vector<SeparationSample> trace;  // roll at the returned delay
};

// Aircraft positions at 1-second steps over [t_depart, t_depart + t_roll].
// Along-track distance s(tau) = 0.5 * (v_takeoff / t_roll) * tau^2, laid out
// along the heading from the threshold.
data::TrackSeries runway_trajectory(const RunwaySpec& spec, double t_depart);

// Per-second separations at shared timestamps (1e-6 s tolerance). The
// longitude scale is taken at the mean of the two latitudes per sample.
// Throws if the series share no timestamps.
std::vector<SeparationSample> separation_trace(const data::TrackSeries& a,
                                               const data::TrackSeries& b);

// Box: both separations strictly under their thresholds. Euclidean: the
// elliptically normalized distance (sep_lat/eps_lat)^2 + (sep_lon/eps_lon)^2
// strictly under 1, a circle of radius eps when the thresholds are equal.
enum class DetectMode { Box, Euclidean };

// Earliest shared timestamp where the separations violate the chosen
// threshold shape; nullopt when clear. Symmetric in a and b.
std::optional<ConflictEvent> detect_conflict(const data::TrackSeries& aircraft,
                                             const data::TrackSeries& bird,
                                             double eps_lat_m,
                                             double eps_lon_m,
                                             DetectMode mode = DetectMode::Box);

// Smallest integer delay d in [0, max_delay_s] whose delayed roll is
// conflict-free against the forecast bird track. Throws
// "no safe delay within horizon" if every delay conflicts.
ConflictReport min_delay(const RunwaySpec& spec,
                         const data::TrackSeries& bird_forecast,
                         double eps_lat_m, double eps_lon_m,
                         double max_delay_s, double t_depart,
                         DetectMode mode = DetectMode::Box);

// Flat key-value runway/photo-scenario configuration file.
struct DeconflictConfig {
  RunwaySpec runway;
  double eps_lat_m = 50.0;
  double eps_lon_m = 50.0;
  double max_delay_s = 300.0;

  void validate() const;
};

// JSON object with exactly the keys threshold_lat, threshold_lon,
// heading_deg, v_takeoff_mps, t_roll_s, eps_lat_m, eps_lon_m, max_delay_s.
// A missing key is a validation error naming the key.
DeconflictConfig load_runway_config(const std::string& path);

}  // namespace birdcast::deconflict

#endif  // BIRDCAST_DECONFLICT_HPP
