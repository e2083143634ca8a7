#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

// BIRDCAST_BIN and BIRDCAST_DATA_DIR are injected by the build.

namespace fs = std::filesystem;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunResult run_cli(const std::string& args) {
  static int counter = 0;
  const fs::path dir = fs::temp_directory_path();
  const fs::path out = dir / ("cli_stdout_" + std::to_string(counter) + ".txt");
  const fs::path err = dir / ("cli_stderr_" + std::to_string(counter) + ".txt");
  ++counter;
  const std::string cmd = std::string(BIRDCAST_BIN) + " " + args + " > " +
                          out.string() + " 2> " + err.string();
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = (status >= 256) ? status / 256 : status;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// Small smooth synthetic track with numeric timestamps.
fs::path write_wave_track(const fs::path& path, int n) {
  std::ofstream out(path, std::ios::binary);
  out << "t_s,latitude,longitude,bird_type\n";
  out.precision(17);
  for (int t = 0; t < n; ++t) {
    const double lat = 43.1 + 0.002 * std::sin(0.03 * t) + 0.00001 * t;
    const double lon = 10.2 + 0.003 * std::cos(0.025 * t) + 0.00002 * t;
    out << t << "," << lat << "," << lon << ",pigeon\n";
  }
  return path;
}

fs::path write_config(const fs::path& path, const fs::path& data,
                      const fs::path& out_dir, const std::string& extra) {
  std::ofstream out(path);
  out << "{\n"
      << "  \"data\": \"" << data.string() << "\",\n"
      << "  \"output_dir\": \"" << out_dir.string() << "\",\n"
      << "  \"input_horizon\": 12,\n"
      << "  \"layer_units\": [4],\n"
      << "  \"stride\": 1,\n"
      << "  \"epochs\": 3,\n"
      << "  \"seed\": 5,\n"
      << "  \"test_partitions\": 2,\n"
      << "  \"forecast_horizon\": 6,\n"
      << "  \"axis\": \"lat\"" << (extra.empty() ? "" : ",") << "\n"
      << extra << "}\n";
  return path;
}

std::string data_file(const std::string& name) {
  return (fs::path(BIRDCAST_DATA_DIR) / name).string();
}

}  // namespace

TEST_CASE("ingest fills gaps and reports the counts") {
  const fs::path dir = scratch_dir("cli_ingest");
  const fs::path raw = dir / "raw.csv";
  {
    std::ofstream out(raw);
    out << "time,latitude,longitude,bird_type\n"
        << "8:00:00 AM,43.10,10.20,pigeon\n"
        << "8:00:01 AM,43.11,10.21,pigeon\n"
        << "8:00:04 AM,43.14,10.24,pigeon\n"   // 2 missing samples
        << "8:00:05 AM,43.15,10.25,pigeon\n";
  }
  const fs::path norm = dir / "norm.csv";
  RunResult r = run_cli("ingest " + raw.string() + " " + norm.string());
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("6 samples") != std::string::npos);
  CHECK(r.out.find("2 gaps filled") != std::string::npos);

  std::ifstream check(norm);
  int lines = 0;
  std::string line;
  while (std::getline(check, line)) ++lines;
  CHECK(lines == 7);  // header + 6 samples
}

TEST_CASE("ingest aborts on a malformed row, naming it") {
  const fs::path dir = scratch_dir("cli_badrow");
  const fs::path raw = dir / "raw.csv";
  {
    std::ofstream out(raw);
    out << "time,latitude,longitude,bird_type\n"
        << "0,43.10,10.20,pigeon\n"
        << "1,43.11,oops,pigeon\n";
  }
  RunResult r = run_cli("ingest " + raw.string() + " " +
                        (dir / "norm.csv").string());
  CHECK(r.exit_code != 0);
  CHECK(r.err.find("row 3") != std::string::npos);
  CHECK(r.err.find("oops") != std::string::npos);
}

TEST_CASE("training twice with one seed produces byte-identical artifacts") {
  const fs::path dir = scratch_dir("cli_determinism");
  const fs::path track = write_wave_track(dir / "track.csv", 700);
  const fs::path out_a = dir / "a", out_b = dir / "b";
  write_config(dir / "cfg_a.json", track, out_a, "");
  write_config(dir / "cfg_b.json", track, out_b, "");

  RunResult ra = run_cli("train --config " + (dir / "cfg_a.json").string());
  REQUIRE(ra.exit_code == 0);
  RunResult rb = run_cli("train --config " + (dir / "cfg_b.json").string());
  REQUIRE(rb.exit_code == 0);

  const std::string model_a = slurp(out_a / "model_vanilla_lat.json");
  const std::string model_b = slurp(out_b / "model_vanilla_lat.json");
  REQUIRE(model_a.size() > 0);
  CHECK(model_a == model_b);
  CHECK(slurp(out_a / "history_vanilla_lat.csv") ==
        slurp(out_b / "history_vanilla_lat.csv"));
}

TEST_CASE("a different seed changes the trained model") {
  const fs::path dir = scratch_dir("cli_seed");
  const fs::path track = write_wave_track(dir / "track.csv", 700);
  const fs::path out_a = dir / "a", out_b = dir / "b";
  write_config(dir / "cfg_a.json", track, out_a, "");
  write_config(dir / "cfg_b.json", track, out_b, "");

  REQUIRE(run_cli("train --config " + (dir / "cfg_a.json").string()).exit_code == 0);
  REQUIRE(run_cli("train --config " + (dir / "cfg_b.json").string() +
                  " --seed 6").exit_code == 0);
  CHECK(slurp(out_a / "model_vanilla_lat.json") !=
        slurp(out_b / "model_vanilla_lat.json"));
}

TEST_CASE("oracle evaluation scores zero error everywhere") {
  const fs::path dir = scratch_dir("cli_oracle");
  const fs::path track = write_wave_track(dir / "track.csv", 700);
  const fs::path out_dir = dir / "out";
  write_config(dir / "cfg.json", track, out_dir, "");

  RunResult r = run_cli("evaluate --config " + (dir / "cfg.json").string() +
                        " --oracle");
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.find("overall: 0") != std::string::npos);
}

TEST_CASE("evaluate rejects an out-of-range partition index") {
  const fs::path dir = scratch_dir("cli_partition");
  const fs::path track = write_wave_track(dir / "track.csv", 700);
  write_config(dir / "cfg.json", track, dir / "out", "");

  RunResult r = run_cli("evaluate --config " + (dir / "cfg.json").string() +
                        " --oracle --partition 7");
  CHECK(r.exit_code != 0);
  CHECK(r.err.find("partition index 7") != std::string::npos);
  CHECK(r.err.find("1..2") != std::string::npos);
}

TEST_CASE("evaluate requires a model file or the oracle flag") {
  const fs::path dir = scratch_dir("cli_nomodel");
  const fs::path track = write_wave_track(dir / "track.csv", 700);
  write_config(dir / "cfg.json", track, dir / "out", "");
  RunResult r = run_cli("evaluate --config " + (dir / "cfg.json").string());
  CHECK(r.exit_code != 0);
}

TEST_CASE("train rejects zero epochs before touching the filesystem") {
  const fs::path dir = scratch_dir("cli_epochs");
  const fs::path track = write_wave_track(dir / "track.csv", 700);
  const fs::path out_dir = dir / "out";
  write_config(dir / "cfg.json", track, out_dir, "");
  RunResult r = run_cli("train --config " + (dir / "cfg.json").string() +
                        " --epochs 0");
  CHECK(r.exit_code != 0);
  CHECK(r.err.find("epochs") != std::string::npos);
  CHECK_FALSE(fs::exists(out_dir / "model_vanilla_lat.json"));
}

TEST_CASE("unknown config keys are rejected") {
  const fs::path dir = scratch_dir("cli_badkey");
  const fs::path track = write_wave_track(dir / "track.csv", 700);
  write_config(dir / "cfg.json", track, dir / "out",
               "  \"learning_rat\": 0.1\n");
  RunResult r = run_cli("train --config " + (dir / "cfg.json").string());
  CHECK(r.exit_code != 0);
  CHECK(r.err.find("learning_rat") != std::string::npos);
}

TEST_CASE("forecast replays truth under the oracle flag") {
  const fs::path dir = scratch_dir("cli_forecast");
  const fs::path track = write_wave_track(dir / "track.csv", 100);
  const fs::path out_csv = dir / "forecast.csv";
  RunResult r = run_cli("forecast --track " + track.string() +
                        " --oracle --t-start 50 --horizon 3 --out " +
                        out_csv.string());
  REQUIRE(r.exit_code == 0);
  std::ifstream in(out_csv);
  std::string header, row;
  std::getline(in, header);
  int rows = 0;
  bool mismatch = false;
  while (std::getline(in, row)) {
    ++rows;
    // predicted and truth columns must agree for the oracle
    std::istringstream ss(row);
    std::string t, pred_lat, pred_lon, true_lat, true_lon;
    std::getline(ss, t, ',');
    std::getline(ss, pred_lat, ',');
    std::getline(ss, pred_lon, ',');
    std::getline(ss, true_lat, ',');
    std::getline(ss, true_lon, ',');
    if (pred_lat != true_lat || pred_lon != true_lon) mismatch = true;
  }
  CHECK(rows == 3);
  CHECK_FALSE(mismatch);
}

TEST_CASE("simulate resolves the bundled crossing with a four second delay") {
  const fs::path dir = scratch_dir("cli_sim");
  RunResult r = run_cli("simulate --track " + data_file("crossing_track.csv") +
                        " --runway " + data_file("runway_crossing.json") +
                        " --oracle --out " + dir.string());
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.find("minimum safe departure delay: 4 s") != std::string::npos);
  CHECK(r.out.find("conflict without delay at t=317") != std::string::npos);

  const std::string report = slurp(dir / "conflict_report.json");
  CHECK(report.find("\"min_delay_s\": 4") != std::string::npos);
  CHECK(fs::exists(dir / "separations.csv"));
}

TEST_CASE("simulate reports zero delay when the bird is far away") {
  const fs::path dir = scratch_dir("cli_sim_clear");
  const fs::path runway = dir / "runway.json";
  {
    std::ofstream out(runway);
    out << R"({"threshold_lat": 45.0, "threshold_lon": 10.0,
               "heading_deg": 90.0, "v_takeoff_mps": 77.0, "t_roll_s": 20.0,
               "eps_lat_m": 50.0, "eps_lon_m": 50.0, "max_delay_s": 8.0})";
  }
  RunResult r = run_cli("simulate --track " + data_file("crossing_track.csv") +
                        " --runway " + runway.string() + " --oracle --out " +
                        dir.string());
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.find("no conflict without delay") != std::string::npos);
  CHECK(r.out.find("minimum safe departure delay: 0 s") != std::string::npos);
}

TEST_CASE("simulate names a missing runway config key") {
  const fs::path dir = scratch_dir("cli_sim_badcfg");
  const fs::path runway = dir / "runway.json";
  {
    std::ofstream out(runway);
    out << R"({"threshold_lat": 43.0, "threshold_lon": 10.0,
               "heading_deg": 90.0, "v_takeoff_mps": 77.0, "t_roll_s": 20.0,
               "eps_lat_m": 50.0, "max_delay_s": 8.0})";
  }
  RunResult r = run_cli("simulate --track " + data_file("crossing_track.csv") +
                        " --runway " + runway.string() + " --oracle --out " +
                        dir.string());
  CHECK(r.exit_code != 0);
  CHECK(r.err.find("eps_lon_m") != std::string::npos);
}

TEST_CASE("the full train, evaluate, forecast, simulate pipeline runs") {
  const fs::path dir = scratch_dir("cli_pipeline");
  const fs::path track = write_wave_track(dir / "track.csv", 700);
  const fs::path out_dir = dir / "out";
  write_config(dir / "cfg.json", track, out_dir, "");

  REQUIRE(run_cli("train --config " + (dir / "cfg.json").string()).exit_code ==
          0);
  const fs::path model = out_dir / "model_vanilla_lat.json";
  REQUIRE(fs::exists(model));

  RunResult ev = run_cli("evaluate --config " + (dir / "cfg.json").string() +
                         " --model-file " + model.string());
  CHECK(ev.exit_code == 0);
  CHECK(fs::exists(out_dir / "mae_vanilla_lat.csv"));
  CHECK(fs::exists(out_dir / "per_step_mae_vanilla_lat.csv"));

  // A longitude twin so simulate has both axes.
  RunResult tl = run_cli("train --config " + (dir / "cfg.json").string() +
                         " --axis lon");
  REQUIRE(tl.exit_code == 0);
  const fs::path model_lon = out_dir / "model_vanilla_lon.json";
  REQUIRE(fs::exists(model_lon));

  const fs::path runway = dir / "runway.json";
  {
    std::ofstream out(runway);
    out << R"({"threshold_lat": 43.0, "threshold_lon": 10.0,
               "heading_deg": 90.0, "v_takeoff_mps": 77.0, "t_roll_s": 10.0,
               "eps_lat_m": 50.0, "eps_lon_m": 50.0, "max_delay_s": 5.0})";
  }
  RunResult sim = run_cli("simulate --track " + track.string() + " --runway " +
                          runway.string() + " --model-lat " + model.string() +
                          " --model-lon " + model_lon.string() + " --out " +
                          dir.string());
  REQUIRE(sim.exit_code == 0);
  CHECK(sim.out.find("minimum safe departure delay:") != std::string::npos);
}
