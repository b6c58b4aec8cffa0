#pragma once

#include <filesystem>
#include <string>
#include <system_error>
#include <vector>

#include "hrvkit/error.hpp"
#include "hrvkit/io/csv.hpp"
#include "hrvkit/io/pipeline.hpp"

namespace hrvkit::io {

// CSV series mirroring the figure set of an ECG/BCG comparison: preprocessing
// stages, detected-beat overlay, instantaneous heart rate, interval series and
// PSD. Returns the written paths in that order.
inline std::vector<std::filesystem::path> emit_plot_data(const ModalityRun& run,
                                                         const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorKind::io, "cannot create '" + out_dir.string() + "': " + ec.message());

  const std::string prefix = to_string(run.modality);
  std::vector<std::filesystem::path> written;
  auto open = [&](const std::string& name) {
    written.push_back(out_dir / (prefix + "_" + name + ".csv"));
    return detail::open_output(written.back());
  };

  {
    auto out = open("preprocess");
    out << "t_seconds,raw,filtered,integrated\n";
    for (std::size_t i = 0; i < run.raw.size(); ++i) {
      out << format_number(run.raw.time_at(i)) << ',' << format_number(run.raw[i]) << ','
          << format_number(run.pre.filtered[i]) << ',' << format_number(run.pre.integrated[i]) << '\n';
    }
  }
  {
    auto out = open("beats");
    write_beats(out, run.beats);
  }
  {
    auto out = open("heart_rate");
    out << "t_seconds,hr_bpm\n";
    for (std::size_t i = 0; i < run.hrv.intervals.size(); ++i) {
      out << format_number(run.hrv.intervals.anchors()[i]) << ','
          << format_number(60000.0 / run.hrv.intervals.intervals()[i]) << '\n';
    }
  }
  {
    auto out = open("intervals");
    out << "t_seconds,interval_ms\n";
    for (std::size_t i = 0; i < run.hrv.intervals.size(); ++i) {
      out << format_number(run.hrv.intervals.anchors()[i]) << ','
          << format_number(run.hrv.intervals.intervals()[i]) << '\n';
    }
  }
  {
    auto out = open("psd");
    out << "freq_hz,psd_ms2_per_hz\n";
    if (run.hrv.spectrum) {
      for (std::size_t k = 0; k < run.hrv.spectrum->freqs.size(); ++k) {
        out << format_number(run.hrv.spectrum->freqs[k]) << ',' << format_number(run.hrv.spectrum->psd[k])
            << '\n';
      }
    }
  }
  for (const auto& p : written) {
    if (!std::filesystem::exists(p)) throw Error(ErrorKind::io, "failed writing '" + p.string() + "'");
  }
  return written;
}

}  // namespace hrvkit::io
