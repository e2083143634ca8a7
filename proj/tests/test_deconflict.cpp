#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "birdcast/deconflict.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>

using namespace birdcast;
using deconflict::ConflictReport;
using deconflict::DetectMode;
using deconflict::RunwaySpec;

namespace {

RunwaySpec east_runway() {
  RunwaySpec spec;
  spec.threshold_lat = 43.0;
  spec.threshold_lon = 10.0;
  spec.heading_deg = 90.0;
  spec.v_takeoff_mps = 77.0;
  spec.t_roll_s = 30.0;
  return spec;
}

// Straight track at constant velocity, positions given in meters relative to
// an origin so tests can reason in metric units.
data::TrackSeries linear_track(double t0, Index n, double lat0_m,
                               double lon0_m, double v_lat_mps,
                               double v_lon_mps) {
  const geo::GeoRef ref{43.0};
  data::TrackSeries s;
  s.t.resize(n);
  s.lat.resize(n);
  s.lon.resize(n);
  s.label = "gull";
  for (Index k = 0; k < n; ++k) {
    const double tau = static_cast<double>(k);
    s.t(k) = t0 + tau;
    s.lat(k) = 43.0 + geo::m_to_lat_deg(lat0_m + v_lat_mps * tau);
    s.lon(k) = 10.0 + geo::m_to_lon_deg(lon0_m + v_lon_mps * tau, ref);
  }
  return s;
}

// Northbound bird at 20 m/s crossing the extended centerline 600 m east of
// the threshold at time t_cross (coming from 400 m south).
data::TrackSeries crossing_bird(double t0, Index n, double t_cross) {
  return linear_track(t0, n, -20.0 * (t_cross - t0), 600.0, 20.0, 0.0);
}

}  // namespace

TEST_CASE("ground roll starts at the threshold and covers 1155 m in 30 s") {
  const RunwaySpec spec = east_runway();
  data::TrackSeries roll = deconflict::runway_trajectory(spec, 100.0);
  REQUIRE(roll.size() == 31);  // [100, 130] inclusive at 1 s
  CHECK(roll.t(0) == 100.0);
  CHECK(roll.t(30) == 130.0);
  CHECK(roll.lat(0) == 43.0);
  CHECK(roll.lon(0) == 10.0);

  const geo::GeoRef ref{43.0};
  const double s_final = geo::lon_deg_to_m(roll.lon(30) - 10.0, ref);
  CHECK(s_final == doctest::Approx(1155.0).epsilon(1e-9));
  // s = a t^2 / 2 means 2 s / t equals the final speed v_takeoff.
  CHECK(2.0 * s_final / 30.0 == doctest::Approx(77.0).epsilon(1e-9));
}

TEST_CASE("eastward roll leaves latitude constant to 1e-9 degrees") {
  data::TrackSeries roll = deconflict::runway_trajectory(east_runway(), 0.0);
  for (Index k = 0; k < roll.size(); ++k)
    CHECK(std::abs(roll.lat(k) - 43.0) < 1e-9);
}

TEST_CASE("along-track distance grows monotonically as tau squared") {
  const RunwaySpec spec = east_runway();
  data::TrackSeries roll = deconflict::runway_trajectory(spec, 0.0);
  const geo::GeoRef ref{43.0};
  double prev = -1.0;
  for (Index k = 0; k < roll.size(); ++k) {
    const double s = geo::lon_deg_to_m(roll.lon(k) - 10.0, ref);
    const double tau = static_cast<double>(k);
    CHECK(s == doctest::Approx(0.5 * (77.0 / 30.0) * tau * tau).epsilon(1e-9));
    CHECK(s > prev);
    prev = s;
  }
}

TEST_CASE("a northwest heading moves both coordinates") {
  RunwaySpec spec = east_runway();
  spec.heading_deg = 315.0;
  data::TrackSeries roll = deconflict::runway_trajectory(spec, 0.0);
  CHECK(roll.lat(30) > 43.0);  // north
  CHECK(roll.lon(30) < 10.0);  // west
  const geo::GeoRef ref{43.0};
  const double north = geo::lat_deg_to_m(roll.lat(30) - 43.0);
  const double east = geo::lon_deg_to_m(roll.lon(30) - 10.0, ref);
  CHECK(std::hypot(north, east) == doctest::Approx(1155.0).epsilon(1e-9));
  CHECK(north == doctest::Approx(-east).epsilon(1e-9));
}

TEST_CASE("runway spec validation") {
  RunwaySpec spec = east_runway();
  CHECK_NOTHROW(spec.validate());
  spec.heading_deg = 360.0;
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
  spec.heading_deg = -0.5;
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
  spec = east_runway();
  spec.v_takeoff_mps = 0.0;
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
  spec = east_runway();
  spec.t_roll_s = -1.0;
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
}

TEST_CASE("identical trajectories conflict at the first shared timestamp") {
  data::TrackSeries a = linear_track(0.0, 20, 0.0, 0.0, 10.0, 5.0);
  auto hit = deconflict::detect_conflict(a, a, 50.0, 50.0);
  REQUIRE(hit.has_value());
  CHECK(hit->t == 0.0);
  CHECK(hit->sep_lat_m == 0.0);
  CHECK(hit->sep_lon_m == 0.0);
}

TEST_CASE("well separated trajectories never conflict") {
  data::TrackSeries a = linear_track(0.0, 30, 0.0, 0.0, 0.0, 30.0);
  data::TrackSeries b = linear_track(0.0, 30, 20000.0, 0.0, 0.0, 30.0);
  CHECK_FALSE(deconflict::detect_conflict(a, b, 50.0, 50.0).has_value());
}

TEST_CASE("perpendicular crossing conflicts only when timed together") {
  // Both cross point P (600 m east of the origin) at 50 m/s; the 50 m boxes
  // admit only the integer second of the crossing itself.
  data::TrackSeries aircraft = linear_track(0.0, 30, 0.0, 0.0, 0.0, 50.0);
  data::TrackSeries bird_12 = linear_track(0.0, 30, -50.0 * 12.0, 600.0, 50.0, 0.0);
  auto hit = deconflict::detect_conflict(aircraft, bird_12, 50.0, 50.0);
  REQUIRE(hit.has_value());
  CHECK(hit->t == 12.0);

  data::TrackSeries bird_20 = linear_track(0.0, 30, -50.0 * 20.0, 600.0, 50.0, 0.0);
  CHECK_FALSE(
      deconflict::detect_conflict(aircraft, bird_20, 50.0, 50.0).has_value());
}

TEST_CASE("detection is symmetric in its arguments") {
  data::TrackSeries a = linear_track(0.0, 40, 0.0, 0.0, 0.0, 40.0);
  data::TrackSeries b = crossing_bird(0.0, 40, 15.0);
  auto ab = deconflict::detect_conflict(a, b, 50.0, 50.0);
  auto ba = deconflict::detect_conflict(b, a, 50.0, 50.0);
  REQUIRE(ab.has_value() == ba.has_value());
  if (ab) {
    CHECK(ab->t == ba->t);
    CHECK(ab->sep_lat_m == ba->sep_lat_m);
    CHECK(ab->sep_lon_m == ba->sep_lon_m);
  }
}

TEST_CASE("the elliptical mode is stricter than the box at the corners") {
  // Constant separation of 45 m on each axis: inside the 50 m box, outside
  // the 50 m circle (45*sqrt(2) > 50).
  data::TrackSeries a = linear_track(0.0, 10, 0.0, 0.0, 0.0, 0.0);
  data::TrackSeries b = linear_track(0.0, 10, 45.0, 45.0, 0.0, 0.0);
  CHECK(deconflict::detect_conflict(a, b, 50.0, 50.0).has_value());
  CHECK_FALSE(deconflict::detect_conflict(a, b, 50.0, 50.0,
                                          DetectMode::Euclidean)
                  .has_value());

  data::TrackSeries c = linear_track(0.0, 10, 30.0, 30.0, 0.0, 0.0);
  CHECK(deconflict::detect_conflict(a, c, 50.0, 50.0, DetectMode::Euclidean)
            .has_value());
}

TEST_CASE("disjoint time ranges are an error") {
  data::TrackSeries a = linear_track(0.0, 10, 0.0, 0.0, 0.0, 10.0);
  data::TrackSeries b = linear_track(100.0, 10, 0.0, 0.0, 0.0, 10.0);
  CHECK_THROWS_WITH_AS(deconflict::detect_conflict(a, b, 50.0, 50.0),
                       "series share no timestamps", std::invalid_argument);
}

TEST_CASE("thresholds must be positive") {
  data::TrackSeries a = linear_track(0.0, 10, 0.0, 0.0, 0.0, 10.0);
  CHECK_THROWS_AS(deconflict::detect_conflict(a, a, 0.0, 50.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(deconflict::detect_conflict(a, a, 50.0, -1.0),
                  std::invalid_argument);
}

TEST_CASE("a faraway bird needs no delay") {
  const RunwaySpec spec = east_runway();
  data::TrackSeries bird = linear_track(0.0, 400, 30000.0, 0.0, 0.0, 20.0);
  ConflictReport rep = deconflict::min_delay(spec, bird, 50.0, 50.0, 300.0, 0.0);
  CHECK(rep.min_delay_s == 0);
  CHECK_FALSE(rep.conflict.has_value());
  CHECK(rep.trace.size() == 31);
}

TEST_CASE("the bundled crossing geometry needs exactly four seconds of delay") {
  RunwaySpec spec = east_runway();
  spec.t_roll_s = 20.0;  // reaches 600 m between tau = 17 and tau = 18

  // Bird crosses the centerline 600 m east at t = 318; departure at t = 300.
  data::TrackSeries bird = crossing_bird(300.0, 29, 318.0);
  ConflictReport rep =
      deconflict::min_delay(spec, bird, 50.0, 50.0, 8.0, 300.0);
  CHECK(rep.min_delay_s == 4);
  REQUIRE(rep.conflict.has_value());
  CHECK(rep.conflict->t == 317.0);

  // Minimality, re-verified independently of the search loop.
  auto at_delay = [&](Index d) {
    return deconflict::detect_conflict(
        deconflict::runway_trajectory(spec, 300.0 + double(d)), bird, 50.0,
        50.0);
  };
  for (Index d = 0; d <= 3; ++d) CHECK(at_delay(d).has_value());
  CHECK_FALSE(at_delay(4).has_value());
}

TEST_CASE("min_delay is invariant to shifting the whole scenario in time") {
  RunwaySpec spec = east_runway();
  spec.t_roll_s = 20.0;
  for (double shift : {0.0, 57.0, -123.0}) {
    data::TrackSeries bird = crossing_bird(300.0 + shift, 29, 318.0 + shift);
    ConflictReport rep =
        deconflict::min_delay(spec, bird, 50.0, 50.0, 8.0, 300.0 + shift);
    CHECK(rep.min_delay_s == 4);
  }
}

TEST_CASE("a bird hovering over the runway exhausts the delay horizon") {
  const RunwaySpec spec = east_runway();
  data::TrackSeries bird = linear_track(0.0, 100, 0.0, 0.0, 0.0, 0.0);
  CHECK_THROWS_WITH_AS(deconflict::min_delay(spec, bird, 50.0, 50.0, 10.0, 0.0),
                       "no safe delay within horizon", std::runtime_error);
}

TEST_CASE("runway config files round-trip and name missing keys") {
  namespace fs = std::filesystem;
  const fs::path good = fs::temp_directory_path() / "runway_good.json";
  {
    std::ofstream out(good);
    out << R"({"threshold_lat": 43.0, "threshold_lon": 10.0,
               "heading_deg": 90.0, "v_takeoff_mps": 77.0, "t_roll_s": 30.0,
               "eps_lat_m": 50.0, "eps_lon_m": 50.0, "max_delay_s": 300.0})";
  }
  deconflict::DeconflictConfig cfg =
      deconflict::load_runway_config(good.string());
  CHECK(cfg.runway.heading_deg == 90.0);
  CHECK(cfg.eps_lon_m == 50.0);
  CHECK(cfg.max_delay_s == 300.0);

  const fs::path missing = fs::temp_directory_path() / "runway_missing.json";
  {
    std::ofstream out(missing);
    out << R"({"threshold_lat": 43.0, "threshold_lon": 10.0,
               "heading_deg": 90.0, "v_takeoff_mps": 77.0, "t_roll_s": 30.0,
               "eps_lat_m": 50.0, "max_delay_s": 300.0})";
  }
  try {
    deconflict::load_runway_config(missing.string());
    FAIL("expected an error");
  } catch (const std::exception& e) {
    CHECK(std::string(e.what()).find("eps_lon_m") != std::string::npos);
  }

  CHECK_THROWS_AS(deconflict::load_runway_config("/nonexistent/runway.json"),
                  std::runtime_error);
}
