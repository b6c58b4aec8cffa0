#pragma once

#include <chrono>
#include <ctime>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hrvkit/compare.hpp"
#include "hrvkit/detect.hpp"
#include "hrvkit/error.hpp"
#include "hrvkit/hrv.hpp"
#include "hrvkit/intervals.hpp"
#include "hrvkit/io/config.hpp"
#include "hrvkit/io/csv.hpp"
#include "hrvkit/io/report.hpp"
#include "hrvkit/preprocess.hpp"

namespace hrvkit::io {

// Intervals and everything derived from them.
struct IntervalAnalysis {
  IntervalSeries intervals;  // after optional NN cleaning
  TimeDomainIndices time;
  std::optional<Tachogram> tachogram;
  std::optional<Spectrum> spectrum;
  std::optional<FreqDomainIndices> freq;
  std::vector<std::string> warnings;
};

// Every intermediate of one modality's analysis, kept for plot emission.
struct ModalityRun {
  Modality modality;
  Signal raw;
  PreprocessedSignal pre;
  BeatSeries beats;
  IntervalAnalysis hrv;
};

inline ModalityReport make_report(std::string modality, std::size_t beat_count,
                                  const IntervalAnalysis& a) {
  return {std::move(modality), to_string(a.intervals.kind()), beat_count, a.intervals.size(),
          {a.time, a.freq}, a.warnings};
}

inline ModalityReport make_report(const ModalityRun& run) {
  return make_report(to_string(run.modality), run.beats.size(), run.hrv);
}

struct PipelineResult {
  ModalityRun ecg;
  ModalityRun bcg;
  ReportDocument report;
};

namespace detail {

template <class F>
auto stage(const char* name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    throw Error(e.kind(), std::string("stage '") + name + "': " + e.detail());
  }
}

inline std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace detail

// Optional NN cleaning, time domain, then the frequency domain when there are
// at least 4 intervals (reported absent with a warning otherwise).
inline IntervalAnalysis analyze_intervals(const IntervalSeries& raw, const PipelineConfig& cfg) {
  IntervalAnalysis a;
  a.intervals = cfg.clean_nn ? detail::stage("clean_nn", [&] { return clean_nn(raw, cfg.nn); }) : raw;
  a.time = detail::stage("time_domain", [&] { return time_domain(a.intervals); });
  if (a.intervals.size() < 4) {
    a.warnings.push_back("fewer than 4 intervals; frequency-domain indices omitted");
    return a;
  }
  a.tachogram = detail::stage("resample_tachogram",
                              [&] { return resample_tachogram(a.intervals, cfg.resample_hz); });
  if (a.tachogram->warning) a.warnings.push_back(*a.tachogram->warning);
  a.spectrum = detail::stage("welch_psd", [&] { return welch_psd(a.tachogram->signal, cfg.welch); });
  for (const auto& w : a.spectrum->warnings) a.warnings.push_back(w);
  a.freq = detail::stage("band_powers", [&] { return band_powers(*a.spectrum, cfg.bands); });
  return a;
}

inline BeatSeries detect(const PreprocessedSignal& pre, const PipelineConfig& cfg) {
  return pre.modality == Modality::ecg
      ? detail::stage("detect_qrs", [&] { return detect_qrs(pre, cfg.ecg_detector); })
      : detail::stage("detect_j_peaks", [&] { return detect_j_peaks(pre, cfg.bcg_detector); });
}

inline PreprocessedSignal preprocess(const Signal& x, Modality modality, const PipelineConfig& cfg) {
  return modality == Modality::ecg
      ? detail::stage("preprocess_ecg", [&] { return preprocess_ecg(x, cfg.ecg); })
      : detail::stage("preprocess_bcg", [&] { return preprocess_bcg(x, cfg.bcg); });
}

inline ModalityRun analyze_signal(const Signal& x, Modality modality, const PipelineConfig& cfg) {
  PreprocessedSignal pre = preprocess(x, modality, cfg);
  BeatSeries beats = detect(pre, cfg);
  const IntervalSeries intervals =
      detail::stage("beats_to_intervals", [&] { return beats_to_intervals(beats); });
  IntervalAnalysis hrv = analyze_intervals(intervals, cfg);
  return {modality, x, std::move(pre), std::move(beats), std::move(hrv)};
}

inline Provenance make_provenance(const PipelineConfig& cfg,
                                  std::map<std::string, std::string> inputs) {
  Provenance p;
  p.inputs = std::move(inputs);
  p.config = effective_values(cfg);
  p.config_hash = config_hash(cfg);
  p.generated_at = detail::utc_timestamp();
  return p;
}

inline PipelineResult run_pipeline(const Signal& ecg, const Signal& bcg, const PipelineConfig& cfg,
                                   const std::string& subject_id = "subject",
                                   std::map<std::string, std::string> inputs = {}) {
  try {
    validate(cfg, ecg.fs(), bcg.fs());
    ModalityRun ecg_run = analyze_signal(ecg, Modality::ecg, cfg);
    ModalityRun bcg_run = analyze_signal(bcg, Modality::bcg, cfg);

    ReportDocument report;
    report.subject_id = subject_id;
    report.ecg = make_report(ecg_run);
    report.bcg = make_report(bcg_run);
    report.comparison = detail::stage("compare_indices", [&] {
      return compare_indices(report.ecg.indices, report.bcg.indices);
    });
    report.provenance = make_provenance(cfg, std::move(inputs));
    return {std::move(ecg_run), std::move(bcg_run), std::move(report)};
  } catch (const Error& e) {
    throw Error(e.kind(), "subject '" + subject_id + "': " + e.detail());
  }
}

struct RecordingInput {
  std::filesystem::path path;
  SignalFormat format = SignalFormat::timed;
  std::optional<double> fs;
};

inline PipelineResult run_pipeline(const RecordingInput& ecg, const RecordingInput& bcg,
                                   const PipelineConfig& cfg, const std::string& subject_id = "subject") {
  const Signal e = read_signal(ecg.path, ecg.format, ecg.fs);
  const Signal b = read_signal(bcg.path, bcg.format, bcg.fs);
  return run_pipeline(e, b, cfg, subject_id, {{"ecg", ecg.path.string()}, {"bcg", bcg.path.string()}});
}

}  // namespace hrvkit::io
