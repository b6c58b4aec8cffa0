#pragma once

// Shared fixtures and independent oracles for the test binaries.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "hrvkit/hrvkit.hpp"

namespace hrvkit::test {

struct SynthPair {
  BeatSeries beats;    // R-peak ground truth
  BeatSeries j_beats;  // J-peak ground truth
  Signal ecg;
  Signal bcg;
};

inline SynthPair make_pair(const BeatTrainProfile& train, double snr_db, std::uint64_t render_seed,
                           double fs = 250.0, double latency_ms = 150.0) {
  RenderProfile ecg_r = RenderProfile::ecg_default();
  ecg_r.fs = fs;
  ecg_r.noise_snr_db = snr_db;
  ecg_r.seed = render_seed;
  RenderProfile bcg_r = RenderProfile::bcg_default();
  bcg_r.fs = fs;
  bcg_r.noise_snr_db = snr_db;
  bcg_r.bcg_latency_ms = latency_ms;
  bcg_r.seed = render_seed;
  BeatSeries beats = generate_beat_times(train);
  BeatSeries j = j_peak_truth(beats, bcg_r);
  Signal ecg = render_ecg(beats, ecg_r, train.duration_s);
  Signal bcg = render_bcg(beats, bcg_r, train.duration_s);
  return {std::move(beats), std::move(j), std::move(ecg), std::move(bcg)};
}

struct MatchScore {
  std::size_t truth_count = 0;
  std::size_t detected_count = 0;
  std::size_t true_positives = 0;  // truth beats with a detection inside the window
  std::size_t confirmed = 0;       // detections with a truth beat inside the window
  double max_error_s = 0.0;

  double sensitivity() const {
    return truth_count == 0 ? 1.0 : static_cast<double>(true_positives) / static_cast<double>(truth_count);
  }
  double ppv() const {
    return detected_count == 0 ? 1.0 : static_cast<double>(confirmed) / static_cast<double>(detected_count);
  }
};

inline double nearest_distance(const std::vector<double>& sorted, double t) {
  const auto it = std::lower_bound(sorted.begin(), sorted.end(), t);
  double best = INFINITY;
  if (it != sorted.end()) best = std::min(best, *it - t);
  if (it != sorted.begin()) best = std::min(best, t - *(it - 1));
  return best;
}

// Scores detections against ground truth inside [t_lo, t_hi]; both sides are
// restricted to that span so edge beats the detector is designed to skip
// (warm-up, truncated final complex) do not count either way.
inline MatchScore score_beats(const std::vector<double>& detected, const std::vector<double>& truth,
                              double tolerance_s, double t_lo, double t_hi) {
  MatchScore s;
  for (double t : truth) {
    if (t < t_lo || t > t_hi) continue;
    ++s.truth_count;
    const double d = nearest_distance(detected, t);
    if (d <= tolerance_s) {
      ++s.true_positives;
      s.max_error_s = std::max(s.max_error_s, d);
    }
  }
  for (double t : detected) {
    if (t < t_lo || t > t_hi) continue;
    ++s.detected_count;
    if (nearest_distance(truth, t) <= tolerance_s) ++s.confirmed;
  }
  return s;
}

// Random interval series: length and values uniform over the given ranges.
inline IntervalSeries random_series(std::mt19937_64& rng, std::size_t min_len, std::size_t max_len,
                                    double lo_ms = 300.0, double hi_ms = 1200.0) {
  std::uniform_int_distribution<std::size_t> len(min_len, max_len);
  std::uniform_real_distribution<double> value(lo_ms, hi_ms);
  const std::size_t n = len(rng);
  std::vector<double> iv(n), anchors(n);
  double t = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    iv[i] = value(rng);
    t += iv[i] / 1000.0;
    anchors[i] = t;
  }
  return {std::move(iv), std::move(anchors)};
}

// Single-pass time-domain indices (Welford running moments), written
// independently of the library's two-pass implementation.
struct OracleIndices {
  double mean_hr, sdnn, rmssd, pnn50;
};

inline OracleIndices oracle_time_domain(const std::vector<double>& x) {
  double mean = 0.0, m2 = 0.0, sq = 0.0;
  std::size_t count = 0, over = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    ++count;
    const double delta = x[i] - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta * (x[i] - mean);
    if (i > 0) {
      const double d = x[i] - x[i - 1];
      sq += d * d;
      if (d > 50.0 || d < -50.0) ++over;
    }
  }
  const double pairs = static_cast<double>(count - 1);
  return {60000.0 / mean, std::sqrt(m2 / pairs), std::sqrt(sq / pairs),
          100.0 * static_cast<double>(over) / pairs};
}

inline double rel_err(double got, double want) {
  if (want == 0.0) return std::abs(got);
  return std::abs(got - want) / std::abs(want);
}

// Intervals from a sinusoidally modulated tachogram: base + a*sin(2 pi f t),
// sampled at each beat, for `duration_s` seconds.
inline IntervalSeries sine_intervals(double base_ms, double amp_ms, double freq_hz, double duration_s) {
  std::vector<double> iv, anchors;
  double t = 0.0;
  while (t < duration_s) {
    const double v = base_ms + amp_ms * std::sin(2.0 * std::numbers::pi * freq_hz * t);
    t += v / 1000.0;
    iv.push_back(v);
    anchors.push_back(t);
  }
  return {std::move(iv), std::move(anchors)};
}

// Direct O(N^2) DFT magnitude at an arbitrary frequency.
inline std::complex<double> dft_at(const std::vector<double>& x, double f_hz, double fs) {
  std::complex<double> acc = 0.0;
  for (std::size_t n = 0; n < x.size(); ++n) {
    const double w = -2.0 * std::numbers::pi * f_hz * static_cast<double>(n) / fs;
    acc += x[n] * std::complex<double>(std::cos(w), std::sin(w));
  }
  return acc;
}

inline double peak_abs(std::span<const double> x, std::size_t from, std::size_t to) {
  double m = 0.0;
  for (std::size_t i = from; i < to; ++i) m = std::max(m, std::abs(x[i]));
  return m;
}

}  // namespace hrvkit::test
