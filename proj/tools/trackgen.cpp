// Generates the bundled sample data:
//   pigeon_track.csv    4-hour 1 Hz quasi-periodic pigeon flight (14400 rows)
//   crossing_track.csv  straight northbound gull crossing the sample runway
// Both are synthetic but shaped to the statistics the pipeline expects
// (sub-degree span, 15-25 m/s ground speed, strictly 1 s sampling).

#include "birdcast/format.hpp"
#include "birdcast/geo.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

using birdcast::fmt_double;
namespace geo = birdcast::geo;

namespace {

constexpr double kTwoPi = 2.0 * geo::kPi;

double pigeon_lat(double t) {
  return 43.215 + 0.0065 * std::sin(kTwoPi * t / 11500.0 + 0.30) +
         0.0033 * std::sin(kTwoPi * t / 4800.0 + 0.70) +
         0.0017 * std::sin(kTwoPi * t / 1900.0 + 2.10) +
         0.0022 * std::sin(kTwoPi * t / 150.0) +
         0.00007 * std::sin(kTwoPi * t / 91.0 + 1.00) +
         0.00005 * std::sin(kTwoPi * t / 77.0 + 4.20);
}

double pigeon_lon(double t) {
  return 10.572 + 0.0080 * std::sin(kTwoPi * t / 12800.0 + 3.60) +
         0.0037 * std::sin(kTwoPi * t / 5300.0 + 4.00) +
         0.0021 * std::sin(kTwoPi * t / 2300.0 + 1.20) +
         0.0030 * std::cos(kTwoPi * t / 150.0) +
         0.00009 * std::sin(kTwoPi * t / 83.0 + 2.50) +
         0.00006 * std::sin(kTwoPi * t / 71.0 + 0.30);
}

// 8:00:00 AM plus t seconds, morning hours only.
std::string clock_time(long t) {
  const long sec = 8 * 3600 + t;
  const long h = sec / 3600, m = (sec / 60) % 60, s = sec % 60;
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%ld:%02ld:%02ld AM", h, m, s);
  return buf;
}

void write_pigeon(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "time,latitude,longitude,bird_type\n";
  for (long t = 0; t < 14400; ++t)
    out << clock_time(t) << "," << fmt_double(pigeon_lat(double(t))) << ","
        << fmt_double(pigeon_lon(double(t))) << ",pigeon\n";
}

// Northbound at 20 m/s, 600 m east of the crossing-runway threshold,
// passing the runway centerline at t = 318. With the bundled
// runway_crossing.json (heading 90 deg, v 77 m/s, t_roll 20 s, 50 m
// thresholds, max delay 8 s, departure at t = 300) delays 0-3 conflict and
// 4 is the first clear one.
void write_crossing(const std::string& path) {
  const double lat0 = 43.0, lon0 = 10.0;
  const geo::GeoRef ref{lat0};
  const double lon = lon0 + geo::m_to_lon_deg(600.0, ref);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "t_s,latitude,longitude,bird_type\n";
  for (long t = 0; t < 329; ++t) {
    const double lat = lat0 + geo::m_to_lat_deg(20.0 * (double(t) - 318.0));
    out << t << "," << fmt_double(lat) << "," << fmt_double(lon) << ",gull\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: trackgen <output-dir>\n";
    return 1;
  }
  try {
    const std::filesystem::path dir(argv[1]);
    std::filesystem::create_directories(dir);
    write_pigeon((dir / "pigeon_track.csv").string());
    write_crossing((dir / "crossing_track.csv").string());
    std::cout << "wrote pigeon_track.csv and crossing_track.csv in "
              << dir.string() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
