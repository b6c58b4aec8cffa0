// hrvkit command-line front end: synth, detect, hrv, compare, pipeline.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <future>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hrvkit/hrvkit.hpp"
#include "hrvkit/io/config.hpp"
#include "hrvkit/io/csv.hpp"
#include "hrvkit/io/pipeline.hpp"
#include "hrvkit/io/plot_data.hpp"
#include "hrvkit/io/report.hpp"

namespace fs = std::filesystem;
using namespace hrvkit;

namespace {

struct GlobalOptions {
  std::optional<double> fs;
  std::string modality;
  std::string format = "timed";
  std::string out;
  std::string config;
  std::uint64_t seed = 0;
};

io::PipelineConfig load_pipeline_config(const GlobalOptions& g) {
  return g.config.empty() ? io::PipelineConfig{} : io::load_config(g.config);
}

Modality require_modality(const GlobalOptions& g) {
  if (g.modality == "ecg") return Modality::ecg;
  if (g.modality == "bcg") return Modality::bcg;
  throw Error(ErrorKind::usage, "--modality must be 'ecg' or 'bcg'");
}

void emit_json(const io::json& j, const std::string& out) {
  if (out.empty()) {
    std::cout << io::dump(j);
  } else {
    io::write_json(out, j);
  }
}

struct SynthOptions {
  double duration_s = 300.0;
  double mean_rr_ms = 800.0;
  double lf_amp_ms = 0.0;
  double lf_freq_hz = 0.1;
  double hf_amp_ms = 0.0;
  double hf_freq_hz = 0.25;
  double jitter_ms = 0.0;
  double snr_db = std::numeric_limits<double>::infinity();
  double latency_ms = 150.0;
  double ecg_amplitude_mv = 1.0;
  double bcg_amplitude_mv = 50.0;
};

int run_synth(const GlobalOptions& g, const SynthOptions& s) {
  if (g.out.empty()) throw Error(ErrorKind::usage, "synth needs --out DIR");
  BeatTrainProfile profile{s.duration_s, s.mean_rr_ms, s.lf_amp_ms, s.lf_freq_hz,
                           s.hf_amp_ms,  s.hf_freq_hz, s.jitter_ms, g.seed};
  RenderProfile render;
  render.fs = g.fs.value_or(250.0);
  render.noise_snr_db = s.snr_db;
  render.bcg_latency_ms = s.latency_ms;
  render.seed = g.seed;

  const BeatSeries beats = generate_beat_times(profile);
  RenderProfile ecg_render = render;
  ecg_render.amplitude_mv = s.ecg_amplitude_mv;
  RenderProfile bcg_render = render;
  bcg_render.amplitude_mv = s.bcg_amplitude_mv;
  const Signal ecg = render_ecg(beats, ecg_render, s.duration_s);
  const Signal bcg = render_bcg(beats, bcg_render, s.duration_s);

  const fs::path dir(g.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::io, "cannot create '" + dir.string() + "'");
  const auto format = io::parse_signal_format(g.format);
  io::write_signal(dir / "ecg.csv", ecg, format);
  io::write_signal(dir / "bcg.csv", bcg, format);
  io::write_beats(dir / "beats.csv", beats);
  io::write_beats(dir / "j_beats.csv", j_peak_truth(beats, bcg_render));
  return 0;
}

int run_detect(const GlobalOptions& g, const std::string& input) {
  const Modality modality = require_modality(g);
  const auto cfg = load_pipeline_config(g);
  const Signal x = io::read_signal(input, io::parse_signal_format(g.format), g.fs);
  io::validate(cfg, x.fs(), x.fs());
  const BeatSeries beats = io::detect(io::preprocess(x, modality, cfg), cfg);
  if (g.out.empty()) {
    io::write_beats(std::cout, beats);
  } else {
    io::write_beats(g.out, beats);
  }
  return 0;
}

int run_hrv(const GlobalOptions& g, const std::string& input) {
  const auto cfg = load_pipeline_config(g);
  io::HrvDocument doc;
  if (g.format == "beats" || io::looks_like_beats_file(input)) {
    const bool bcg = g.modality == "bcg";
    const BeatSeries beats = io::read_beats(input, bcg ? BeatKind::bcg_j : BeatKind::ecg_r);
    const auto intervals = beats_to_intervals(beats);
    const auto analysis = io::analyze_intervals(intervals, cfg);
    doc.result = io::make_report(bcg ? "bcg" : "ecg", beats.size(), analysis);
  } else {
    const Modality modality = require_modality(g);
    const Signal x = io::read_signal(input, io::parse_signal_format(g.format), g.fs);
    io::validate(cfg, x.fs(), x.fs());
    doc.result = io::make_report(io::analyze_signal(x, modality, cfg));
  }
  doc.provenance = io::make_provenance(cfg, {{"input", input}});
  emit_json(io::to_json(doc), g.out);
  return 0;
}


std::vector<SubjectResult> load_cohort(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw Error(ErrorKind::io, "'" + dir.string() + "' is not a directory");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  // one task per subject file; results merged in subject-id order
  std::vector<std::future<SubjectResult>> tasks;
  for (const auto& f : files) {
    tasks.push_back(std::async(std::launch::async, [f] {
      const auto report = io::report_from_json(io::read_json(f));
      return SubjectResult{report.subject_id, report.ecg.indices, report.bcg.indices};
    }));
  }
  std::vector<SubjectResult> results;
  for (auto& t : tasks) results.push_back(t.get());
  std::sort(results.begin(), results.end(),
            [](const auto& a, const auto& b) { return a.subject_id < b.subject_id; });
  return results;
}

int run_compare(const GlobalOptions& g, const std::vector<std::string>& reports,
                const std::string& cohort_dir) {
  std::vector<SubjectResult> results;
  if (!cohort_dir.empty()) {
    if (!reports.empty()) throw Error(ErrorKind::usage, "give either two reports or --cohort, not both");
    results = load_cohort(cohort_dir);
    if (results.empty()) throw Error(ErrorKind::empty_input, "no *.json reports in '" + cohort_dir + "'");
  } else {
    if (reports.size() != 2) throw Error(ErrorKind::usage, "compare needs ECG and BCG reports, or --cohort DIR");
    const auto ecg = io::hrv_from_json(io::read_json(reports[0]));
    const auto bcg = io::hrv_from_json(io::read_json(reports[1]));
    results.push_back({"subject", ecg.result.indices, bcg.result.indices});
  }
  emit_json(io::to_json(build_comparison(results)), g.out);
  return 0;
}

int run_pipeline_cmd(const GlobalOptions& g, const std::string& ecg, const std::string& bcg,
                     const std::string& subject) {
  if (g.out.empty()) throw Error(ErrorKind::usage, "pipeline needs --out DIR");
  const auto cfg = load_pipeline_config(g);
  const auto format = io::parse_signal_format(g.format);
  const auto result = io::run_pipeline(io::RecordingInput{ecg, format, g.fs},
                                       io::RecordingInput{bcg, format, g.fs}, cfg, subject);
  const fs::path dir(g.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::io, "cannot create '" + dir.string() + "'");
  io::write_json(dir / "report.json", io::to_json(result.report));
  io::emit_plot_data(result.ecg, dir / "plots");
  io::emit_plot_data(result.bcg, dir / "plots");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ECG/BCG heart-rate-variability toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(io::kToolVersion));

  GlobalOptions g;
  app.add_option("--fs", g.fs, "Sampling rate in Hz (sampled CSV input, synth output)");
  app.add_option("--modality", g.modality, "Signal modality: ecg or bcg");
  app.add_option("--format", g.format, "Signal CSV format: timed, sampled (hrv also accepts beats)");
  app.add_option("--out", g.out, "Output file or directory");
  app.add_option("--config", g.config, "key=value file overriding analysis defaults");
  app.add_option("--seed", g.seed, "Random seed for synth");

  SynthOptions s;
  auto* synth = app.add_subcommand("synth", "Generate a paired ECG/BCG recording with ground-truth beats");
  synth->add_option("--duration", s.duration_s, "Recording length in seconds");
  synth->add_option("--mean-rr", s.mean_rr_ms, "Mean beat interval in ms");
  synth->add_option("--lf-amp", s.lf_amp_ms, "LF modulation amplitude in ms");
  synth->add_option("--lf-freq", s.lf_freq_hz, "LF modulation frequency in Hz");
  synth->add_option("--hf-amp", s.hf_amp_ms, "HF modulation amplitude in ms");
  synth->add_option("--hf-freq", s.hf_freq_hz, "HF modulation frequency in Hz");
  synth->add_option("--jitter", s.jitter_ms, "White interval jitter std in ms");
  synth->add_option("--snr", s.snr_db, "Template-to-noise power ratio in dB (inf = clean)");
  synth->add_option("--latency", s.latency_ms, "J-peak delay after the R peak in ms");
  synth->add_option("--ecg-amplitude", s.ecg_amplitude_mv, "ECG R amplitude in mV");
  synth->add_option("--bcg-amplitude", s.bcg_amplitude_mv, "BCG J amplitude in mV");

  std::string input;
  auto* detect = app.add_subcommand("detect", "Detect beats in a recording, write beats CSV");
  detect->add_option("input", input, "Recording CSV")->required();

  auto* hrv = app.add_subcommand("hrv", "HRV indices of a recording or beats CSV as JSON");
  hrv->add_option("input", input, "Recording or beats CSV")->required();

  std::vector<std::string> reports;
  std::string cohort;
  auto* compare = app.add_subcommand("compare", "Compare ECG vs BCG indices");
  compare->add_option("reports", reports, "ECG hrv report then BCG hrv report");
  compare->add_option("--cohort", cohort, "Directory of pipeline report.json files (one per subject)");

  std::string ecg_path, bcg_path, subject = "subject";
  auto* pipeline = app.add_subcommand("pipeline", "Full ECG+BCG analysis, report and plot data");
  pipeline->add_option("--ecg", ecg_path, "ECG recording CSV")->required();
  pipeline->add_option("--bcg", bcg_path, "BCG recording CSV")->required();
  pipeline->add_option("--subject", subject, "Subject id recorded in the report");

  for (auto* sub : {synth, detect, hrv, compare, pipeline}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*synth) return run_synth(g, s);
    if (*detect) return run_detect(g, input);
    if (*hrv) return run_hrv(g, input);
    if (*compare) return run_compare(g, reports, cohort);
    if (*pipeline) return run_pipeline_cmd(g, ecg_path, bcg_path, subject);
  } catch (const Error& e) {
    std::cerr << "hrvkit: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "hrvkit: " << e.what() << '\n';
    return 3;
  }
  return 1;
}
