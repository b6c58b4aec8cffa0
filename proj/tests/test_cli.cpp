#include <catch2/catch_amalgamated.hpp>

#include <unistd.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "hrvkit/io/report.hpp"

namespace fs = std::filesystem;
using Catch::Approx;
using hrvkit::io::json;

namespace {

struct Scratch {
  fs::path dir;
  explicit Scratch(const std::string& name)
      : dir(fs::temp_directory_path() / ("hrvkit_cli_" + name + "_" + std::to_string(::getpid()))) {
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }
  std::string operator/(const std::string& leaf) const { return (dir / leaf).string(); }
};

// Runs the CLI with stdout and stderr sent to files and returns the exit code.
int run(const std::string& args, const Scratch& where) {
  const std::string cmd = std::string("\"") + HRVKIT_CLI_PATH + "\" " + args + " >\"" + (where / "stdout.txt") +
                          "\" 2>\"" + (where / "stderr.txt") + "\"";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

json read_json(const std::string& path) { return json::parse(slurp(path)); }

}  // namespace

TEST_CASE("synth is deterministic for a fixed seed", "[cli]") {
  Scratch s("synth");
  const std::string args = "synth --duration 300 --mean-rr 800 --lf-amp 30 --jitter 10 --snr 20 ";
  REQUIRE(run(args + "--seed 7 --out \"" + (s / "a") + "\"", s) == 0);
  REQUIRE(run(args + "--seed 7 --out \"" + (s / "b") + "\"", s) == 0);
  for (const char* f : {"ecg.csv", "bcg.csv", "beats.csv", "j_beats.csv"}) {
    INFO(f);
    const auto a = slurp(s / "a/" + f);
    REQUIRE_FALSE(a.empty());
    CHECK(a == slurp(s / "b/" + f));
  }
  REQUIRE(run(args + "--seed 8 --out \"" + (s / "c") + "\"", s) == 0);
  CHECK(slurp(s / "a/ecg.csv") != slurp(s / "c/ecg.csv"));
}

TEST_CASE("hrv on a beats file", "[cli]") {
  Scratch s("hrv");
  std::ofstream(s / "beats.csv") << "t_seconds,amplitude\n0,1\n0.8,1\n1.6,1\n2.4,1\n";
  REQUIRE(run("hrv \"" + (s / "beats.csv") + "\"", s) == 0);
  const auto j = json::parse(slurp(s / "stdout.txt"));
  CHECK(j["result"]["time_domain"]["mean_hr_bpm"].get<double>() == Approx(75.0).epsilon(1e-12));
  CHECK(j["result"]["time_domain"]["sdnn_ms"].get<double>() == Approx(0.0).margin(1e-9));
  CHECK(j.contains("provenance"));
}

TEST_CASE("pipeline, detect, hrv and compare on a synth pair", "[cli]") {
  Scratch s("pipeline");
  const std::string data = s / "data";
  REQUIRE(run("synth --duration 120 --lf-amp 40 --hf-amp 25 --jitter 10 --snr 20 --seed 3 --out \"" + data + "\"",
               s) == 0);
  const std::string ecg = data + "/ecg.csv", bcg = data + "/bcg.csv";

  REQUIRE(run("pipeline --ecg \"" + ecg + "\" --bcg \"" + bcg + "\" --subject s01 --out \"" + (s / "run") + "\"",
              s) == 0);
  const auto report = read_json(s / "run/report.json");
  CHECK(report["subject_id"] == "s01");
  CHECK(report["ecg"]["time_domain"]["sdnn_ms"].get<double>() > 0.0);
  CHECK(fs::exists(s / "run/plots/ecg_psd.csv"));
  CHECK(fs::exists(s / "run/plots/bcg_preprocess.csv"));
  CHECK(std::distance(fs::directory_iterator(s / "run/plots"), fs::directory_iterator{}) == 10);

  REQUIRE(run("detect --modality bcg \"" + bcg + "\" --out \"" + (s / "j.csv") + "\"", s) == 0);
  const auto detected = slurp(s / "j.csv");
  CHECK(detected.rfind("t_seconds,amplitude\n", 0) == 0);
  CHECK(std::count(detected.begin(), detected.end(), '\n') ==
        report["bcg"]["beat_count"].get<long>() + 1);

  REQUIRE(run("hrv --modality ecg \"" + ecg + "\" --out \"" + (s / "ecg.json") + "\"", s) == 0);
  REQUIRE(run("hrv --modality bcg \"" + bcg + "\" --out \"" + (s / "bcg.json") + "\"", s) == 0);
  CHECK(read_json(s / "ecg.json")["result"]["time_domain"] == report["ecg"]["time_domain"]);
  REQUIRE(run("compare \"" + (s / "ecg.json") + "\" \"" + (s / "bcg.json") + "\"", s) == 0);
  const auto cmp = json::parse(slurp(s / "stdout.txt"));
  CHECK(cmp["per_subject"]["subject"]["abs_diff"]["sdnn_ms"] ==
        report["comparison"]["abs_diff"]["sdnn_ms"]);
}

TEST_CASE("compare over a cohort directory", "[cli]") {
  Scratch s("cohort");
  fs::create_directories(s / "cohort");
  for (int i = 0; i < 3; ++i) {
    const std::string id = "s0" + std::to_string(i);
    const std::string data = s / ("data_" + id);
    REQUIRE(run("synth --duration 120 --mean-rr " + std::to_string(700 + 100 * i) + " --lf-amp " +
                    std::to_string(20 + 15 * i) + " --jitter 10 --seed " + std::to_string(i + 1) + " --out \"" +
                    data + "\"",
                s) == 0);
    REQUIRE(run("pipeline --ecg \"" + data + "/ecg.csv\" --bcg \"" + data + "/bcg.csv\" --subject " + id +
                    " --out \"" + (s / ("run_" + id)) + "\"",
                s) == 0);
    fs::copy_file(s / ("run_" + id + "/report.json"), s / ("cohort/" + id + ".json"));
  }
  REQUIRE(run("compare --cohort \"" + (s / "cohort") + "\" --out \"" + (s / "cmp.json") + "\"", s) == 0);
  const auto cmp = read_json(s / "cmp.json");
  CHECK(cmp["per_subject"].size() == 3);
  CHECK(cmp["cohort_pearson_r"]["mean_hr_bpm"].get<double>() > 0.99);
  CHECK(cmp["bland_altman"].contains("sdnn_ms"));
}

TEST_CASE("CLI exit codes", "[cli][errors]") {
  Scratch s("errors");
  const std::string data = s / "data";
  REQUIRE(run("synth --duration 30 --seed 1 --out \"" + data + "\"", s) == 0);
  const std::string ecg = data + "/ecg.csv", bcg = data + "/bcg.csv";

  CHECK(run("pipeline --ecg \"" + ecg + "\" --out \"" + (s / "x") + "\"", s) == 1);
  CHECK(run("frobnicate", s) == 1);
  CHECK(run("detect \"" + ecg + "\"", s) == 1);  // no modality

  std::ofstream(s / "hi.cfg") << "ecg.band_hi_hz = 125\n";
  CHECK(run("pipeline --config \"" + (s / "hi.cfg") + "\" --ecg \"" + ecg + "\" --bcg \"" + bcg + "\" --out \"" +
                (s / "y") + "\"",
            s) == 1);
  CHECK_FALSE(fs::exists(s / "y"));
  CHECK(slurp(s / "stderr.txt").find("band_hi_hz") != std::string::npos);

  std::ofstream(s / "bad.csv") << "t,value\n0,1\n0.004,oops\n";
  CHECK(run("detect --modality ecg \"" + (s / "bad.csv") + "\"", s) == 2);
  CHECK(run("detect --modality ecg \"" + (s / "missing.csv") + "\"", s) == 2);
  std::ofstream(s / "empty.csv") << "";
  CHECK(run("hrv --modality ecg \"" + (s / "empty.csv") + "\"", s) == 2);

  const std::vector<double> zeros(7500, 0.0);
  {
    std::ofstream flat(s / "flat.csv");
    flat << "value\n";
    for (double z : zeros) flat << z << '\n';
  }
  CHECK(run("pipeline --format sampled --fs 250 --ecg \"" + (s / "flat.csv") + "\" --bcg \"" + (s / "flat.csv") +
                "\" --out \"" + (s / "z") + "\"",
            s) == 3);
}
