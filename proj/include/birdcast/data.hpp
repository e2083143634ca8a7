#ifndef BIRDCAST_DATA_HPP
#define BIRDCAST_DATA_HPP

#include "birdcast/geo.hpp"
#include "birdcast/numerics.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace birdcast::data {

// A timestamped latitude/longitude track, uniformly sampled once the gaps
// have been repaired. Timestamps are seconds since the first sample.
struct TrackSeries {
  Vector t;
  Vector lat;
  Vector lon;
  std::string label;

  Index size() const { return t.size(); }

  const Vector& axis(geo::Axis a) const {
    return a == geo::Axis::Lat ? lat : lon;
  }

  // [first, first+count)
  TrackSeries segment(Index first, Index count) const;

  // Throws if timestamps are not strictly increasing or coordinates leave
  // the valid degree ranges.
  void validate() const;
};

// Reads a CSV with header columns time, latitude, longitude, bird_type (any
// order, case-insensitive). `time` accepts H:MM:SS AM/PM clock strings,
// ISO-8601 date-times, or plain numeric seconds (column may then also be
// named t_s). Timestamps are rebased to seconds since the first row.
TrackSeries ingest_csv(const std::string& path);

// Fills missing grid points between samples by linear interpolation. Every
// original timestamp must already sit on the (t0 + k*resolution) grid;
// original samples are preserved bit-exact.
TrackSeries interpolate_gaps(const TrackSeries& series, double resolution_s);

struct SplitSpec {
  double train_fraction = 0.65;
  double val_fraction = 0.15;
  double test_fraction = 0.20;
  std::optional<std::array<Index, 3>> explicit_counts;

  void validate(Index series_len) const;
};

struct SplitResult {
  TrackSeries train;
  TrackSeries val;
  TrackSeries test;
};

// Contiguous chronological partition; no shuffling. With fractions, train and
// test get floor(fraction * N) samples and the remainder goes to validation.
SplitResult split(const TrackSeries& series, const SplitSpec& spec);

// Affine [min, max] -> [0, 1] map, fitted on the training split only.
struct Scaler {
  double min = 0.0;
  double max = 1.0;

  double scale(double x) const { return (x - min) / (max - min); }
  double unscale(double y) const { return min + y * (max - min); }
  Vector scale(const Vector& x) const {
    return (x.array() - min) / (max - min);
  }
  Vector unscale(const Vector& y) const {
    return (y.array() * (max - min) + min).matrix();
  }
};

Scaler fit_scaler(const Vector& train_values);

// Supervised (input window, target) pairs, one column per window.
struct WindowedDataset {
  Matrix inputs;   // L x n
  Matrix targets;  // M x n

  Index input_horizon() const { return inputs.rows(); }
  Index prediction_horizon() const { return targets.rows(); }
  Index count() const { return inputs.cols(); }
};

WindowedDataset make_windows(const Vector& series, Index input_horizon,
                             Index prediction_horizon, Index stride);

// k contiguous equal-length segments; the division remainder is appended to
// the last one.
std::vector<TrackSeries> partition_test_windows(const TrackSeries& test,
                                                Index k);

// Writes/reads the normalized track format produced by the ingest command:
// header t_s,latitude,longitude,bird_type.
void write_track_csv(const TrackSeries& series, const std::string& path);

}  // namespace birdcast::data

#endif  // BIRDCAST_DATA_HPP
