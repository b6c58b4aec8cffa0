#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <type_traits>

#include "hrvkit/detect.hpp"
#include "hrvkit/error.hpp"
#include "hrvkit/hrv.hpp"
#include "hrvkit/io/csv.hpp"
#include "hrvkit/preprocess.hpp"

namespace hrvkit::io {

// Every tunable of the analysis pipeline, defaults as documented in the README.
struct PipelineConfig {
  EcgPreprocessConfig ecg;
  BcgPreprocessConfig bcg;
  DetectorConfig ecg_detector = DetectorConfig::ecg();
  DetectorConfig bcg_detector = DetectorConfig::bcg();
  bool clean_nn = false;
  NnCleaningConfig nn;
  double resample_hz = 4.0;
  WelchConfig welch;
  BandEdges bands;
};

// Visits every field under its config-file key, in a fixed order.
template <class Config, class Visitor>
void visit_fields(Config& c, Visitor&& v) {
  v("ecg.band_lo_hz", c.ecg.band.lo_hz);
  v("ecg.band_hi_hz", c.ecg.band.hi_hz);
  v("ecg.filter_order", c.ecg.band.order);
  v("ecg.integrator_s", c.ecg.integrator_s);
  v("bcg.gain", c.bcg.gain);
  v("bcg.band_lo_hz", c.bcg.band.lo_hz);
  v("bcg.band_hi_hz", c.bcg.band.hi_hz);
  v("bcg.filter_order", c.bcg.band.order);
  v("bcg.detect_lo_hz", c.bcg.detection_band.lo_hz);
  v("bcg.detect_hi_hz", c.bcg.detection_band.hi_hz);
  v("bcg.detect_order", c.bcg.detection_band.order);
  v("bcg.integrator_s", c.bcg.integrator_s);
  v("ecg.refractory_s", c.ecg_detector.refractory_s);
  v("ecg.searchback_factor", c.ecg_detector.searchback_factor);
  v("ecg.threshold_fraction", c.ecg_detector.threshold_fraction);
  v("ecg.warmup_s", c.ecg_detector.warmup_s);
  v("ecg.refine_s", c.ecg_detector.refine_s);
  v("ecg.apex_fit_s", c.ecg_detector.apex_fit_s);
  v("bcg.refractory_s", c.bcg_detector.refractory_s);
  v("bcg.searchback_factor", c.bcg_detector.searchback_factor);
  v("bcg.threshold_fraction", c.bcg_detector.threshold_fraction);
  v("bcg.warmup_s", c.bcg_detector.warmup_s);
  v("bcg.refine_s", c.bcg_detector.refine_s);
  v("bcg.apex_fit_s", c.bcg_detector.apex_fit_s);
  v("nn.enabled", c.clean_nn);
  v("nn.min_ms", c.nn.min_ms);
  v("nn.max_ms", c.nn.max_ms);
  v("nn.max_relative_deviation", c.nn.max_relative_deviation);
  v("nn.median_window", c.nn.median_window);
  v("hrv.resample_hz", c.resample_hz);
  v("welch.segment_s", c.welch.segment_s);
  v("welch.overlap_fraction", c.welch.overlap_fraction);
  v("bands.vlf_lo_hz", c.bands.vlf_lo);
  v("bands.lf_lo_hz", c.bands.lf_lo);
  v("bands.hf_lo_hz", c.bands.hf_lo);
  v("bands.hf_hi_hz", c.bands.hf_hi);
}

namespace detail {

template <class T>
std::string render_value(const T& value) {
  if constexpr (std::is_same_v<T, bool>) {
    return value ? "true" : "false";
  } else if constexpr (std::is_same_v<T, double>) {
    return format_number(value);
  } else {
    return std::to_string(value);
  }
}

template <class T>
void assign_value(const std::string& key, const std::string& text, T& out) {
  auto bad = [&] {
    return Error(ErrorKind::parameter, "config key '" + key + "' has invalid value '" + text + "'");
  };
  if constexpr (std::is_same_v<T, bool>) {
    if (text == "true" || text == "1") out = true;
    else if (text == "false" || text == "0") out = false;
    else throw bad();
  } else if constexpr (std::is_same_v<T, double>) {
    const auto v = parse_number(text);
    if (!v || !std::isfinite(*v)) throw bad();
    out = *v;
  } else {
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(text, &used);
    } catch (const std::exception&) {
      throw bad();
    }
    if (used != text.size() || v < 0) throw bad();
    out = static_cast<T>(v);
  }
}

}  // namespace detail

// Effective values as ordered key -> text pairs.
inline std::map<std::string, std::string> effective_values(const PipelineConfig& cfg) {
  std::map<std::string, std::string> out;
  visit_fields(cfg, [&](const char* key, const auto& value) { out[key] = detail::render_value(value); });
  return out;
}

inline void set_value(PipelineConfig& cfg, const std::string& key, const std::string& text) {
  bool found = false;
  visit_fields(cfg, [&](const char* name, auto& field) {
    if (key == name) {
      detail::assign_value(key, text, field);
      found = true;
    }
  });
  if (!found) throw Error(ErrorKind::parameter, "unknown config key '" + key + "'");
}

// key=value lines; '#' starts a comment; blank lines ignored.
inline void apply_config(PipelineConfig& cfg, std::istream& in, const std::string& source = "<config>") {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto text = detail::trim(line);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorKind::parameter, source + ": line " + std::to_string(line_no) +
                                            " is not key=value");
    }
    set_value(cfg, std::string(detail::trim(text.substr(0, eq))),
              std::string(detail::trim(text.substr(eq + 1))));
  }
}

inline PipelineConfig load_config(const std::filesystem::path& path) {
  PipelineConfig cfg;
  auto in = detail::open_input(path);
  apply_config(cfg, in, path.string());
  return cfg;
}

// FNV-1a over the canonical key=value rendering of the effective values.
inline std::string config_hash(const PipelineConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& [k, v] : effective_values(cfg)) {
    for (const char ch : k + "=" + v + "\n") {
      h ^= static_cast<unsigned char>(ch);
      h *= 0x100000001b3ULL;
    }
  }
  std::ostringstream os;
  os << "fnv1a64:" << std::hex << h;
  return os.str();
}

// Checks everything that depends on the recordings' sampling rates so bad
// settings surface before any processing starts.
inline void validate(const PipelineConfig& cfg, double ecg_fs, double bcg_fs) {
  auto check_band = [](const BandSpec& band, double fs, const char* keys) {
    try {
      band.validate(fs);
    } catch (const Error& e) {
      throw Error(e.kind(), std::string(keys) + ": " + e.detail());
    }
  };
  check_band(cfg.ecg.band, ecg_fs, "ecg.band_lo_hz/ecg.band_hi_hz");
  check_band(cfg.bcg.band, bcg_fs, "bcg.band_lo_hz/bcg.band_hi_hz");
  check_band(cfg.bcg.detection_band, bcg_fs, "bcg.detect_lo_hz/bcg.detect_hi_hz");
  if (!(cfg.bcg.gain > 0.0)) throw Error(ErrorKind::parameter, "bcg.gain must be > 0");
  integrator_width(cfg.ecg.integrator_s, ecg_fs);
  integrator_width(cfg.bcg.integrator_s, bcg_fs);
  cfg.ecg_detector.validate();
  cfg.bcg_detector.validate();
  if (!(cfg.nn.min_ms < cfg.nn.max_ms)) throw Error(ErrorKind::parameter, "nn.min_ms must be < nn.max_ms");
  if (cfg.nn.median_window == 0) throw Error(ErrorKind::parameter, "nn.median_window must be >= 1");
  if (!(cfg.resample_hz > 2.0 * cfg.bands.hf_hi)) {
    throw Error(ErrorKind::parameter, "hrv.resample_hz must exceed twice bands.hf_hi_hz");
  }
  if (!(cfg.welch.segment_s * cfg.resample_hz >= 16.0)) {
    throw Error(ErrorKind::parameter, "welch.segment_s too short for hrv.resample_hz");
  }
  if (!(cfg.welch.overlap_fraction >= 0.0 && cfg.welch.overlap_fraction < 1.0)) {
    throw Error(ErrorKind::parameter, "welch.overlap_fraction must lie in [0, 1)");
  }
  const auto& b = cfg.bands;
  if (!(b.vlf_lo > 0.0 && b.vlf_lo < b.lf_lo && b.lf_lo < b.hf_lo && b.hf_lo < b.hf_hi)) {
    throw Error(ErrorKind::parameter, "frequency band edges must be positive and increasing");
  }
}

}  // namespace hrvkit::io
