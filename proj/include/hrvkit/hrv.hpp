#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "hrvkit/error.hpp"
#include "hrvkit/fft.hpp"
#include "hrvkit/intervals.hpp"
#include "hrvkit/signal.hpp"
#include "hrvkit/spline.hpp"

namespace hrvkit {

struct TimeDomainIndices {
  double mean_hr = 0.0;  // bpm
  double sdnn = 0.0;     // ms
  double rmssd = 0.0;    // ms
  double pnn50 = 0.0;    // percent
};

struct FreqDomainIndices {
  double vlf_power = 0.0;  // ms^2
  double lf_power = 0.0;
  double hf_power = 0.0;
  double total_power = 0.0;
  std::optional<double> lf_hf_ratio;  // absent when hf is 0
};

struct Spectrum {
  std::vector<double> freqs;  // Hz, uniform from 0
  std::vector<double> psd;    // ms^2/Hz for tachograms
  std::vector<std::string> warnings;
};

struct NnCleaningConfig {
  double min_ms = 300.0;
  double max_ms = 2000.0;
  double max_relative_deviation = 0.20;
  std::size_t median_window = 5;
};

// Drops intervals outside [min_ms, max_ms] and intervals deviating from the
// median of the preceding accepted ones by more than the allowed fraction.
inline IntervalSeries clean_nn(const IntervalSeries& iv, const NnCleaningConfig& cfg = {}) {
  if (iv.empty()) throw Error(ErrorKind::insufficient_data, "clean_nn: empty interval series");
  if (cfg.median_window == 0) throw Error(ErrorKind::parameter, "clean_nn: median window must be >= 1");
  std::vector<double> kept;
  std::vector<double> anchors;
  for (std::size_t i = 0; i < iv.size(); ++i) {
    const double v = iv.intervals()[i];
    if (v < cfg.min_ms || v > cfg.max_ms) continue;
    if (!kept.empty()) {
      const std::size_t n = std::min(cfg.median_window, kept.size());
      std::vector<double> recent(kept.end() - static_cast<std::ptrdiff_t>(n), kept.end());
      std::sort(recent.begin(), recent.end());
      const double median =
          n % 2 == 1 ? recent[n / 2] : 0.5 * (recent[n / 2 - 1] + recent[n / 2]);
      if (std::abs(v - median) > cfg.max_relative_deviation * median) continue;
    }
    kept.push_back(v);
    anchors.push_back(iv.anchors()[i]);
  }
  if (kept.empty()) {
    throw Error(ErrorKind::empty_after_cleaning, "clean_nn rejected every interval");
  }
  return {std::move(kept), std::move(anchors), iv.kind()};
}

inline TimeDomainIndices time_domain(const IntervalSeries& iv) {
  const auto& x = iv.intervals();
  const std::size_t n = x.size();
  if (n < 2) throw Error(ErrorKind::insufficient_data, "time-domain indices need >= 2 intervals");

  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(n);

  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);

  double sq_diff = 0.0;
  std::size_t over_50 = 0;
  for (std::size_t i = 1; i < n; ++i) {
    const double d = x[i] - x[i - 1];
    sq_diff += d * d;
    if (std::abs(d) > 50.0) ++over_50;
  }
  const auto pairs = static_cast<double>(n - 1);
  return {60000.0 / mean, std::sqrt(ss / pairs), std::sqrt(sq_diff / pairs),
          100.0 * static_cast<double>(over_50) / pairs};
}

struct Tachogram {
  Signal signal;
  std::optional<std::string> warning;
};

inline constexpr double kHfUpperEdgeHz = 0.4;
inline constexpr double kMinTachogramSpanS = 60.0;

// Least-squares line removal over sample index.
inline std::vector<double> detrend_linear(std::vector<double> y) {
  const std::size_t n = y.size();
  if (n < 2) {
    for (double& v : y) v = 0.0;
    return y;
  }
  const double t_mean = static_cast<double>(n - 1) / 2.0;
  double y_mean = 0.0;
  for (double v : y) y_mean += v;
  y_mean /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dt = static_cast<double>(i) - t_mean;
    sxy += dt * (y[i] - y_mean);
    sxx += dt * dt;
  }
  const double slope = sxy / sxx;
  for (std::size_t i = 0; i < n; ++i) y[i] -= y_mean + slope * (static_cast<double>(i) - t_mean);
  return y;
}

// Evenly resampled, linearly detrended tachogram via a natural cubic spline
// through (anchor, interval) pairs. Knots are taken relative to the first
// anchor so absolute time offsets do not enter the arithmetic.
inline Tachogram resample_tachogram(const IntervalSeries& iv, double fs_resample = 4.0) {
  if (iv.size() < 4) {
    throw Error(ErrorKind::insufficient_data, "tachogram resampling needs >= 4 intervals");
  }
  if (!(fs_resample > 2.0 * kHfUpperEdgeHz)) {
    throw Error(ErrorKind::parameter, "resampling rate must exceed 0.8 Hz");
  }
  const double start = iv.anchors().front();
  std::vector<double> knots;
  knots.reserve(iv.size());
  for (double a : iv.anchors()) knots.push_back(a - start);
  const double span = knots.back();
  const NaturalCubicSpline spline(std::move(knots), iv.intervals());

  const auto count = static_cast<std::size_t>(std::floor(span * fs_resample)) + 1;
  std::vector<double> y(count);
  for (std::size_t k = 0; k < count; ++k) y[k] = spline(static_cast<double>(k) / fs_resample);

  Tachogram out{Signal(detrend_linear(std::move(y)), fs_resample, start), std::nullopt};
  if (span < kMinTachogramSpanS) {
    out.warning = "insufficient duration: tachogram spans " + std::to_string(span) +
                  " s (< 60 s); frequency-domain indices are unreliable";
  }
  return out;
}

struct WelchConfig {
  double segment_s = 120.0;
  double overlap_fraction = 0.5;
};

// Averaged Hann-windowed periodogram, one-sided density. Each segment has its
// mean removed. Sum of psd * df equals the mean square of the (windowed,
// demeaned) signal.
inline Spectrum welch_psd(const Signal& x, const WelchConfig& cfg = {}) {
  require_non_empty(x, "welch_psd");
  const double fs = x.fs();
  auto seg_len = static_cast<std::size_t>(std::llround(cfg.segment_s * fs));
  if (seg_len < 16) throw Error(ErrorKind::parameter, "Welch segment shorter than 16 samples");
  if (!(cfg.overlap_fraction >= 0.0 && cfg.overlap_fraction < 1.0)) {
    throw Error(ErrorKind::parameter, "Welch overlap must lie in [0, 1)");
  }
  Spectrum out;
  if (x.size() < seg_len) {
    out.warnings.push_back("signal shorter than one Welch segment (" + std::to_string(seg_len) +
                           " samples); using a single periodogram");
    seg_len = x.size();
    if (seg_len < 2) throw Error(ErrorKind::insufficient_data, "periodogram needs >= 2 samples");
  }
  const auto overlap = static_cast<std::size_t>(
      std::floor(cfg.overlap_fraction * static_cast<double>(seg_len)));
  const std::size_t step = std::max<std::size_t>(1, seg_len - overlap);

  std::vector<double> window(seg_len);
  double win_power = 0.0;
  for (std::size_t i = 0; i < seg_len; ++i) {
    // periodic Hann
    window[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                     static_cast<double>(seg_len));
    win_power += window[i] * window[i];
  }
  const std::size_t bins = seg_len / 2 + 1;
  std::vector<double> acc(bins, 0.0);
  std::size_t segments = 0;
  const auto samples = x.samples();
  for (std::size_t start = 0; start + seg_len <= samples.size(); start += step) {
    double mean = 0.0;
    for (std::size_t i = 0; i < seg_len; ++i) mean += samples[start + i];
    mean /= static_cast<double>(seg_len);
    std::vector<double> seg(seg_len);
    for (std::size_t i = 0; i < seg_len; ++i) seg[i] = (samples[start + i] - mean) * window[i];
    const auto spec = dft(seg);
    for (std::size_t k = 0; k < bins; ++k) acc[k] += std::norm(spec[k]);
    ++segments;
  }
  const double scale = 1.0 / (fs * win_power * static_cast<double>(segments));
  out.freqs.resize(bins);
  out.psd.resize(bins);
  for (std::size_t k = 0; k < bins; ++k) {
    out.freqs[k] = static_cast<double>(k) * fs / static_cast<double>(seg_len);
    const bool unpaired = k == 0 || (seg_len % 2 == 0 && k == bins - 1);
    out.psd[k] = acc[k] * scale * (unpaired ? 1.0 : 2.0);
  }
  return out;
}

struct BandEdges {
  double vlf_lo = 0.0033;
  double lf_lo = 0.04;
  double hf_lo = 0.15;
  double hf_hi = 0.4;
};

// Integral over [a, b] of the piecewise-linear interpolant of the density.
inline double integrate_band(const Spectrum& s, double a, double b) {
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < s.freqs.size(); ++k) {
    const double f0 = s.freqs[k], f1 = s.freqs[k + 1];
    const double lo = std::max(a, f0), hi = std::min(b, f1);
    if (!(hi > lo)) continue;
    const double slope = (s.psd[k + 1] - s.psd[k]) / (f1 - f0);
    const double p_lo = s.psd[k] + slope * (lo - f0);
    const double p_hi = s.psd[k] + slope * (hi - f0);
    total += 0.5 * (p_lo + p_hi) * (hi - lo);
  }
  return total;
}

inline FreqDomainIndices band_powers(const Spectrum& s, const BandEdges& edges = {}) {
  if (s.freqs.size() < 2 || s.freqs.size() != s.psd.size()) {
    throw Error(ErrorKind::parameter, "spectrum needs at least two bins");
  }
  if (s.freqs.back() < edges.hf_hi) {
    throw Error(ErrorKind::parameter, "spectrum ends at " + std::to_string(s.freqs.back()) +
                                          " Hz, below the " + std::to_string(edges.hf_hi) +
                                          " Hz HF edge");
  }
  if (!(edges.vlf_lo < edges.lf_lo && edges.lf_lo < edges.hf_lo && edges.hf_lo < edges.hf_hi)) {
    throw Error(ErrorKind::parameter, "frequency band edges must increase");
  }
  FreqDomainIndices out;
  out.vlf_power = integrate_band(s, edges.vlf_lo, edges.lf_lo);
  out.lf_power = integrate_band(s, edges.lf_lo, edges.hf_lo);
  out.hf_power = integrate_band(s, edges.hf_lo, edges.hf_hi);
  out.total_power = integrate_band(s, edges.vlf_lo, edges.hf_hi);
  if (out.hf_power > 0.0) out.lf_hf_ratio = out.lf_power / out.hf_power;
  return out;
}

}  // namespace hrvkit
