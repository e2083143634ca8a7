#include "birdcast/data.hpp"

#include "birdcast/format.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace birdcast::data {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string normalize_header(std::string s) {
  std::string out;
  for (char c : s) {
    if (c == ' ' || c == '_' || c == '-' || c == '"') continue;
    out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (char c : line) {
    if (c == '"') {
      quoted = !quoted;
    } else if (c == ',' && !quoted) {
      fields.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(trim(cur));
  return fields;
}

[[noreturn]] void row_error(std::size_t line_no, const std::string& what) {
  throw std::runtime_error("row " + std::to_string(line_no) + ": " + what);
}

double parse_double_field(const std::string& s, std::size_t line_no,
                          const char* what) {
  try {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    row_error(line_no, std::string("unparseable ") + what + " '" + s + "'");
  }
}

// Days since 1970-01-01 for a proleptic Gregorian date (Howard Hinnant's
// days_from_civil).
std::int64_t days_from_civil(int y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

bool parse_clock(const std::string& s, double& out) {
  // H:MM:SS[.fff][ AM|PM]
  unsigned h = 0, m = 0;
  double sec = 0.0;
  std::size_t i = 0;
  auto read_uint = [&](unsigned& v, int max_digits) {
    int n = 0;
    v = 0;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i])) &&
           n < max_digits) {
      v = v * 10 + static_cast<unsigned>(s[i] - '0');
      ++i;
      ++n;
    }
    return n > 0;
  };
  if (!read_uint(h, 2) || i >= s.size() || s[i] != ':') return false;
  ++i;
  if (!read_uint(m, 2) || i >= s.size() || s[i] != ':') return false;
  ++i;
  std::size_t sec_start = i;
  while (i < s.size() &&
         (std::isdigit(static_cast<unsigned char>(s[i])) || s[i] == '.'))
    ++i;
  if (i == sec_start) return false;
  sec = std::stod(s.substr(sec_start, i - sec_start));
  std::string suffix = trim(s.substr(i));
  std::transform(suffix.begin(), suffix.end(), suffix.begin(),
                 [](unsigned char c) { return std::toupper(c); });
  if (suffix == "AM") {
    if (h == 12) h = 0;
  } else if (suffix == "PM") {
    if (h != 12) h += 12;
  } else if (!suffix.empty()) {
    return false;
  }
  if (h > 23 || m > 59 || sec >= 61.0) return false;
  out = h * 3600.0 + m * 60.0 + sec;
  return true;
}

bool parse_iso8601(const std::string& s, double& out) {
  // YYYY-MM-DD[T ]HH:MM:SS[.fff][Z]
  if (s.size() < 19) return false;
  auto digits = [&](std::size_t at, std::size_t n) {
    for (std::size_t k = at; k < at + n; ++k)
      if (k >= s.size() || !std::isdigit(static_cast<unsigned char>(s[k])))
        return false;
    return true;
  };
  if (!digits(0, 4) || s[4] != '-' || !digits(5, 2) || s[7] != '-' ||
      !digits(8, 2) || (s[10] != 'T' && s[10] != ' '))
    return false;
  const int y = std::stoi(s.substr(0, 4));
  const unsigned mo = static_cast<unsigned>(std::stoi(s.substr(5, 2)));
  const unsigned d = static_cast<unsigned>(std::stoi(s.substr(8, 2)));
  if (mo < 1 || mo > 12 || d < 1 || d > 31) return false;
  double clock = 0.0;
  std::string rest = s.substr(11);
  if (!rest.empty() && (rest.back() == 'Z' || rest.back() == 'z'))
    rest.pop_back();
  if (!parse_clock(rest, clock)) return false;
  out = static_cast<double>(days_from_civil(y, mo, d)) * 86400.0 + clock;
  return true;
}

double parse_time_field(const std::string& s, std::size_t line_no) {
  double v = 0.0;
  if (parse_iso8601(s, v)) return v;
  if (parse_clock(s, v)) return v;
  try {
    std::size_t pos = 0;
    v = std::stod(s, &pos);
    if (pos == s.size()) return v;
  } catch (const std::exception&) {
  }
  row_error(line_no, "unparseable time '" + s + "'");
}

}  // namespace

TrackSeries TrackSeries::segment(Index first, Index count) const {
  if (first < 0 || count < 0 || first + count > size())
    throw std::invalid_argument("TrackSeries::segment: range [" +
                                std::to_string(first) + ", " +
                                std::to_string(first + count) +
                                ") outside series of length " +
                                std::to_string(size()));
  TrackSeries out;
  out.t = t.segment(first, count);
  out.lat = lat.segment(first, count);
  out.lon = lon.segment(first, count);
  out.label = label;
  return out;
}

void TrackSeries::validate() const {
  const Index n = size();
  if (lat.size() != n || lon.size() != n)
    throw std::invalid_argument("TrackSeries: channel length mismatch");
  for (Index i = 0; i < n; ++i) {
    if (i > 0 && !(t[i] > t[i - 1]))
      throw std::invalid_argument("TrackSeries: timestamps not strictly "
                                  "increasing at index " +
                                  std::to_string(i));
    if (!(lat[i] >= -90.0 && lat[i] <= 90.0))
      throw std::invalid_argument("TrackSeries: latitude " +
                                  fmt_double(lat[i]) + " out of range at index " +
                                  std::to_string(i));
    if (!(lon[i] >= -180.0 && lon[i] <= 180.0))
      throw std::invalid_argument("TrackSeries: longitude " +
                                  fmt_double(lon[i]) +
                                  " out of range at index " +
                                  std::to_string(i));
  }
}

TrackSeries ingest_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");

  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path + ": no data rows");

  const auto header = split_csv_line(line);
  int col_time = -1, col_lat = -1, col_lon = -1, col_type = -1;
  for (std::size_t i = 0; i < header.size(); ++i) {
    const std::string h = normalize_header(header[i]);
    if (h == "time" || h == "timestamp" || h == "ts")
      col_time = static_cast<int>(i);
    else if (h == "latitude" || h == "lat" || h == "locationlat")
      col_lat = static_cast<int>(i);
    else if (h == "longitude" || h == "lon" || h == "long" ||
             h == "locationlong")
      col_lon = static_cast<int>(i);
    else if (h == "birdtype" || h == "species")
      col_type = static_cast<int>(i);
  }
  if (col_time < 0) throw std::runtime_error(path + ": missing column 'time'");
  if (col_lat < 0)
    throw std::runtime_error(path + ": missing column 'latitude'");
  if (col_lon < 0)
    throw std::runtime_error(path + ": missing column 'longitude'");
  if (col_type < 0)
    throw std::runtime_error(path + ": missing column 'bird_type'");
  const std::size_t min_cols =
      static_cast<std::size_t>(
          std::max(std::max(col_time, col_lat), std::max(col_lon, col_type))) +
      1;

  std::vector<double> ts, lats, lons;
  std::string label;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() < min_cols)
      row_error(line_no, "expected at least " + std::to_string(min_cols) +
                             " columns, got " + std::to_string(fields.size()));
    const double tv = parse_time_field(fields[col_time], line_no);
    const double lat = parse_double_field(fields[col_lat], line_no, "latitude");
    const double lon =
        parse_double_field(fields[col_lon], line_no, "longitude");
    if (!ts.empty() && !(tv > ts.back()))
      row_error(line_no, "time not strictly increasing (" +
                             fields[col_time] + ")");
    if (label.empty()) label = fields[col_type];
    ts.push_back(tv);
    lats.push_back(lat);
    lons.push_back(lon);
  }
  if (ts.empty()) throw std::runtime_error(path + ": no data rows");

  TrackSeries out;
  out.label = label;
  const Index n = static_cast<Index>(ts.size());
  out.t.resize(n);
  out.lat.resize(n);
  out.lon.resize(n);
  const double t0 = ts.front();
  for (Index i = 0; i < n; ++i) {
    out.t[i] = ts[static_cast<std::size_t>(i)] - t0;
    out.lat[i] = lats[static_cast<std::size_t>(i)];
    out.lon[i] = lons[static_cast<std::size_t>(i)];
  }
  out.validate();
  return out;
}

TrackSeries interpolate_gaps(const TrackSeries& series, double resolution_s) {
  if (series.size() < 2)
    throw std::invalid_argument(
        "interpolate_gaps: need at least 2 points, got " +
        std::to_string(series.size()));
  if (!(resolution_s > 0.0))
    throw std::invalid_argument("interpolate_gaps: resolution must be > 0");
  series.validate();

  const double t0 = series.t[0];
  // Every sample must sit on the t0 + k*res grid.
  std::vector<Index> grid_index(static_cast<std::size_t>(series.size()));
  for (Index i = 0; i < series.size(); ++i) {
    const double k = (series.t[i] - t0) / resolution_s;
    const double kr = std::round(k);
    if (std::abs(k - kr) > 1e-9)
      throw std::invalid_argument(
          "interpolate_gaps: sample at t=" + fmt_double(series.t[i]) +
          " is not on the " + fmt_double(resolution_s) + " s grid");
    grid_index[static_cast<std::size_t>(i)] = static_cast<Index>(kr);
  }

  const Index total = grid_index.back() + 1;
  TrackSeries out;
  out.label = series.label;
  out.t.resize(total);
  out.lat.resize(total);
  out.lon.resize(total);

  Index src = 0;
  for (Index g = 0; g < total; ++g) {
    if (grid_index[static_cast<std::size_t>(src)] == g) {
      out.t[g] = series.t[src];
      out.lat[g] = series.lat[src];
      out.lon[g] = series.lon[src];
      ++src;
    } else {
      // Between original samples src-1 and src.
      const Index a = src - 1, b = src;
      const double tg = t0 + static_cast<double>(g) * resolution_s;
      const double frac = (tg - series.t[a]) / (series.t[b] - series.t[a]);
      out.t[g] = tg;
      out.lat[g] = series.lat[a] + frac * (series.lat[b] - series.lat[a]);
      out.lon[g] = series.lon[a] + frac * (series.lon[b] - series.lon[a]);
    }
  }
  return out;
}

void SplitSpec::validate(Index series_len) const {
  if (explicit_counts) {
    const auto& c = *explicit_counts;
    if (c[0] + c[1] + c[2] != series_len)
      throw std::invalid_argument(
          "split: explicit counts " + std::to_string(c[0]) + "+" +
          std::to_string(c[1]) + "+" + std::to_string(c[2]) +
          " do not sum to series length " + std::to_string(series_len));
    if (c[0] < 1 || c[1] < 1 || c[2] < 1)
      throw std::invalid_argument("split: every part must be nonempty");
    return;
  }
  const double sum = train_fraction + val_fraction + test_fraction;
  if (std::abs(sum - 1.0) > 1e-9)
    throw std::invalid_argument("split: fractions sum to " + fmt_double(sum) +
                                ", expected 1");
  if (train_fraction <= 0.0 || val_fraction <= 0.0 || test_fraction <= 0.0)
    throw std::invalid_argument("split: fractions must be positive");
}

SplitResult split(const TrackSeries& series, const SplitSpec& spec) {
  const Index n = series.size();
  if (n < 3)
    throw std::invalid_argument("split: series too short (" +
                                std::to_string(n) + " < 3)");
  spec.validate(n);

  Index n_train, n_val, n_test;
  if (spec.explicit_counts) {
    n_train = (*spec.explicit_counts)[0];
    n_val = (*spec.explicit_counts)[1];
    n_test = (*spec.explicit_counts)[2];
  } else {
    n_train = static_cast<Index>(
        std::floor(spec.train_fraction * static_cast<double>(n)));
    n_test = static_cast<Index>(
        std::floor(spec.test_fraction * static_cast<double>(n)));
    n_val = n - n_train - n_test;
  }
  if (n_train < 1 || n_val < 1 || n_test < 1)
    throw std::invalid_argument("split: a part would be empty (train " +
                                std::to_string(n_train) + ", val " +
                                std::to_string(n_val) + ", test " +
                                std::to_string(n_test) + ")");
  return SplitResult{series.segment(0, n_train),
                     series.segment(n_train, n_val),
                     series.segment(n_train + n_val, n_test)};
}

Scaler fit_scaler(const Vector& train_values) {
  if (train_values.size() == 0)
    throw std::invalid_argument("fit_scaler: empty series");
  Scaler s;
  s.min = train_values.minCoeff();
  s.max = train_values.maxCoeff();
  if (!(s.max > s.min))
    throw std::invalid_argument(
        "fit_scaler: constant series (min == max == " + fmt_double(s.min) +
        ")");
  return s;
}

WindowedDataset make_windows(const Vector& series, Index input_horizon,
                             Index prediction_horizon, Index stride) {
  if (input_horizon < 1 || prediction_horizon < 1 || stride < 1)
    throw std::invalid_argument("make_windows: horizons and stride must be >= 1");
  const Index n = series.size();
  const Index need = input_horizon + prediction_horizon;
  if (n < need)
    throw std::invalid_argument("make_windows: series length " +
                                std::to_string(n) + " < L+M = " +
                                std::to_string(need));
  const Index count = (n - need) / stride + 1;
  WindowedDataset ds;
  ds.inputs.resize(input_horizon, count);
  ds.targets.resize(prediction_horizon, count);
  for (Index w = 0; w < count; ++w) {
    const Index s = w * stride;
    ds.inputs.col(w) = series.segment(s, input_horizon);
    ds.targets.col(w) = series.segment(s + input_horizon, prediction_horizon);
  }
  return ds;
}

std::vector<TrackSeries> partition_test_windows(const TrackSeries& test,
                                                Index k) {
  if (k < 1) throw std::invalid_argument("partition_test_windows: k must be >= 1");
  const Index n = test.size();
  if (n < k)
    throw std::invalid_argument("partition_test_windows: series length " +
                                std::to_string(n) + " < k = " +
                                std::to_string(k));
  const Index base = n / k;
  std::vector<TrackSeries> parts;
  parts.reserve(static_cast<std::size_t>(k));
  for (Index i = 0; i < k; ++i) {
    const Index first = i * base;
    const Index count = (i == k - 1) ? n - first : base;
    parts.push_back(test.segment(first, count));
  }
  return parts;
}

void write_track_csv(const TrackSeries& series, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << "t_s,latitude,longitude,bird_type\n";
  for (Index i = 0; i < series.size(); ++i) {
    out << fmt_double(series.t[i]) << ',' << fmt_double(series.lat[i]) << ','
        << fmt_double(series.lon[i]) << ',' << series.label << '\n';
  }
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace birdcast::data
