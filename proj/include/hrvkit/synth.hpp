#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "hrvkit/error.hpp"
#include "hrvkit/intervals.hpp"
#include "hrvkit/signal.hpp"

namespace hrvkit {

// Seeded Gaussian source with platform-independent output. std::mt19937_64's
// sequence is fixed by the standard; the distributions in <random> are not,
// so uniform and normal variates are derived here explicitly (53-bit uniform
// in (0, 1), Box-Muller cosine branch).
class GaussianSource {
 public:
  explicit GaussianSource(std::uint64_t seed) : engine_(seed) {}

  double uniform() {
    // (k + 0.5) / 2^53 keeps the value strictly inside (0, 1)
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  double normal() {
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::mt19937_64 engine_;
};

struct BeatTrainProfile {
  double duration_s = 300.0;
  double mean_rr_ms = 800.0;
  double lf_amp_ms = 0.0;
  double lf_freq_hz = 0.1;
  double hf_amp_ms = 0.0;
  double hf_freq_hz = 0.25;
  double jitter_ms = 0.0;
  std::uint64_t seed = 0;

  void validate() const {
    if (!(duration_s > 0.0)) throw Error(ErrorKind::parameter, "duration must be > 0");
    if (!(mean_rr_ms >= 300.0 && mean_rr_ms <= 2000.0)) {
      throw Error(ErrorKind::parameter, "mean RR must lie in [300, 2000] ms");
    }
    if (lf_amp_ms < 0.0 || hf_amp_ms < 0.0 || jitter_ms < 0.0) {
      throw Error(ErrorKind::parameter, "modulation amplitudes and jitter must be >= 0");
    }
    auto freq_ok = [](double f) { return f > 0.0 && f < 0.5; };
    if (!freq_ok(lf_freq_hz) || !freq_ok(hf_freq_hz)) {
      throw Error(ErrorKind::parameter, "modulation frequencies must lie in (0, 0.5) Hz");
    }
  }
};

struct RenderProfile {
  double fs = 250.0;
  double noise_snr_db = std::numeric_limits<double>::infinity();
  double bcg_latency_ms = 150.0;
  double amplitude_mv = 1.0;
  std::uint64_t seed = 0;

  static RenderProfile ecg_default() { return {}; }
  static RenderProfile bcg_default() {
    RenderProfile r;
    r.amplitude_mv = 50.0;
    return r;
  }

  void validate() const {
    if (!(fs >= 100.0)) throw Error(ErrorKind::parameter, "render fs must be >= 100 Hz");
    if (!(bcg_latency_ms >= 0.0 && bcg_latency_ms <= 400.0)) {
      throw Error(ErrorKind::parameter, "BCG latency must lie in [0, 400] ms");
    }
    if (!(amplitude_mv > 0.0)) throw Error(ErrorKind::parameter, "amplitude must be > 0");
    if (std::isnan(noise_snr_db)) throw Error(ErrorKind::parameter, "SNR must not be NaN");
  }
};

inline constexpr double kMinSynthGapMs = 300.0;

// First beat at t = 0; each gap is evaluated at the current beat time.
inline BeatSeries generate_beat_times(const BeatTrainProfile& p) {
  p.validate();
  GaussianSource rng(p.seed);
  BeatSeries out;
  out.kind = BeatKind::ecg_r;
  const double two_pi = 2.0 * std::numbers::pi;
  double t = 0.0;
  while (t < p.duration_s) {
    out.times.push_back(t);
    out.amplitudes.push_back(1.0);
    double gap = p.mean_rr_ms + p.lf_amp_ms * std::sin(two_pi * p.lf_freq_hz * t) +
                 p.hf_amp_ms * std::sin(two_pi * p.hf_freq_hz * t);
    if (p.jitter_ms > 0.0) gap += p.jitter_ms * rng.normal();
    t += std::max(gap, kMinSynthGapMs) / 1000.0;
  }
  if (out.times.size() < 2) {
    throw Error(ErrorKind::parameter, "profile produces fewer than 2 beats");
  }
  return out;
}

// One Gaussian bump of a beat template, offsets relative to the fiducial apex.
struct Wave {
  double offset_s;
  double amplitude;
  double width_s;
};

// P, Q, R, S, T. Q and S mirror each other about R so the QRS stays
// symmetric and the R apex survives zero-phase band-passing in place.
inline const std::vector<Wave>& ecg_template() {
  static const std::vector<Wave> waves{
      {-0.200, 0.12, 0.025},
      {-0.028, -0.18, 0.009},
      {0.000, 1.00, 0.010},
      {0.028, -0.18, 0.009},
      {0.260, 0.28, 0.045},
  };
  return waves;
}

// H, I, J, K, L, M: alternating damped oscillation with a net area near zero,
// J dominant.
inline const std::vector<Wave>& bcg_template() {
  static const std::vector<Wave> waves{
      {-0.130, 0.25, 0.020},
      {-0.065, -0.50, 0.020},
      {0.000, 1.00, 0.022},
      {0.070, -0.60, 0.022},
      {0.140, 0.30, 0.025},
      {0.210, -0.45, 0.025},
  };
  return waves;
}

namespace detail {

inline std::vector<double> render_template(const std::vector<double>& apexes,
                                           const std::vector<Wave>& waves, double amplitude,
                                           double fs, std::size_t n) {
  std::vector<double> y(n, 0.0);
  for (double apex : apexes) {
    for (const Wave& w : waves) {
      const double centre = apex + w.offset_s;
      const double reach = 6.0 * w.width_s;
      const auto lo = static_cast<long long>(std::ceil((centre - reach) * fs));
      const auto hi = static_cast<long long>(std::floor((centre + reach) * fs));
      for (long long i = std::max(0LL, lo); i <= hi && i < static_cast<long long>(n); ++i) {
        const double dt = static_cast<double>(i) / fs - centre;
        y[static_cast<std::size_t>(i)] +=
            amplitude * w.amplitude * std::exp(-0.5 * dt * dt / (w.width_s * w.width_s));
      }
    }
  }
  return y;
}

inline void add_noise(std::vector<double>& y, double snr_db, std::uint64_t seed) {
  if (std::isinf(snr_db) && snr_db > 0.0) return;
  double power = 0.0;
  for (double v : y) power += v * v;
  power /= static_cast<double>(y.size());
  const double sigma = std::sqrt(power / std::pow(10.0, snr_db / 10.0));
  GaussianSource rng(seed);
  for (double& v : y) v += sigma * rng.normal();
}

inline std::size_t render_length(const BeatSeries& b, const RenderProfile& r, double duration_s) {
  r.validate();
  if (b.empty()) throw Error(ErrorKind::parameter, "cannot render zero beats");
  if (!(duration_s > 0.0)) throw Error(ErrorKind::parameter, "render duration must be > 0");
  if (b.times.front() < 0.0 || b.times.back() >= duration_s) {
    throw Error(ErrorKind::parameter, "beats fall outside the render duration");
  }
  return static_cast<std::size_t>(std::llround(duration_s * r.fs));
}

}  // namespace detail

// Sum of P-QRS-T templates with each R apex on its beat time, plus white
// noise at the requested template-to-noise power ratio.
inline Signal render_ecg(const BeatSeries& b, const RenderProfile& r, double duration_s) {
  const std::size_t n = detail::render_length(b, r, duration_s);
  auto y = detail::render_template(b.times, ecg_template(), r.amplitude_mv, r.fs, n);
  detail::add_noise(y, r.noise_snr_db, r.seed);
  return Signal(std::move(y), r.fs);
}

// BCG complexes with each J apex at beat time + latency.
inline Signal render_bcg(const BeatSeries& b, const RenderProfile& r, double duration_s) {
  const std::size_t n = detail::render_length(b, r, duration_s);
  std::vector<double> apexes(b.times);
  for (double& t : apexes) t += r.bcg_latency_ms / 1000.0;
  auto y = detail::render_template(apexes, bcg_template(), r.amplitude_mv, r.fs, n);
  // a distinct stream from the ECG render sharing the same seed
  detail::add_noise(y, r.noise_snr_db, r.seed ^ 0x9E3779B97F4A7C15ULL);
  return Signal(std::move(y), r.fs);
}

// Ground-truth J-peak times for a beat train rendered with `r`.
inline BeatSeries j_peak_truth(const BeatSeries& b, const RenderProfile& r) {
  BeatSeries out = b;
  out.kind = BeatKind::bcg_j;
  for (double& t : out.times) t += r.bcg_latency_ms / 1000.0;
  return out;
}

}  // namespace hrvkit
