#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "hrvkit/error.hpp"
#include "hrvkit/filter.hpp"
#include "hrvkit/signal.hpp"

namespace hrvkit {

// Five-point derivative y[n] = (2x[n] + x[n-1] - x[n-3] - 2x[n-4]) / 8 with
// zero history before the first sample.
inline Signal derivative(const Signal& x) {
  if (x.size() < 5) {
    throw Error(ErrorKind::input_too_short, "derivative needs at least 5 samples");
  }
  const auto in = x.samples();
  auto at = [&](std::ptrdiff_t i) { return i < 0 ? 0.0 : in[static_cast<std::size_t>(i)]; };
  std::vector<double> y(in.size());
  for (std::ptrdiff_t n = 0; n < static_cast<std::ptrdiff_t>(in.size()); ++n) {
    y[static_cast<std::size_t>(n)] =
        (2.0 * at(n) + at(n - 1) - at(n - 3) - 2.0 * at(n - 4)) / 8.0;
  }
  return x.with_samples(std::move(y));
}

inline Signal square(const Signal& x) {
  require_non_empty(x, "square");
  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] * x[i];
  return x.with_samples(std::move(y));
}

inline std::size_t integrator_width(double window_s, double fs) {
  if (!(window_s > 0.0)) throw Error(ErrorKind::parameter, "integrator window must be > 0");
  const auto width = static_cast<long long>(std::llround(window_s * fs));
  if (width < 1) throw Error(ErrorKind::parameter, "integrator window shorter than one sample");
  return static_cast<std::size_t>(width);
}

// Causal moving average over N = round(window_s * fs) samples, zero history.
// Summed directly per output so the result never goes negative on
// non-negative input.
inline Signal moving_window_integrate(const Signal& x, double window_s) {
  require_non_empty(x, "moving_window_integrate");
  const std::size_t width = integrator_width(window_s, x.fs());
  if (width > x.size()) {
    throw Error(ErrorKind::parameter, "integrator window (" + std::to_string(width) +
                                          " samples) longer than signal");
  }
  const auto in = x.samples();
  std::vector<double> y(in.size());
  const double inv = 1.0 / static_cast<double>(width);
  for (std::size_t n = 0; n < in.size(); ++n) {
    const std::size_t first = n + 1 >= width ? n + 1 - width : 0;
    double acc = 0.0;
    for (std::size_t k = first; k <= n; ++k) acc += in[k];
    y[n] = acc * inv;
  }
  return x.with_samples(std::move(y));
}

struct EcgPreprocessConfig {
  BandSpec band{5.0, 20.0, 4};
  double integrator_s = 0.150;
};

struct BcgPreprocessConfig {
  double gain = 10.0;
  BandSpec band{0.1, 30.0, 4};
  BandSpec detection_band{1.0, 10.0, 4};
  double integrator_s = 0.250;
};

inline constexpr double kMinPreprocessFs = 100.0;

namespace detail {

inline Signal energy_envelope(const Signal& filtered, double integrator_s) {
  return moving_window_integrate(square(derivative(filtered)), integrator_s);
}

// The five-point derivative is antisymmetric about n-2; the causal integrator
// of width N delays by (N-1)/2.
inline std::size_t envelope_delay(double integrator_s, double fs) {
  return 2 + (integrator_width(integrator_s, fs) - 1) / 2;
}

inline void require_preprocess_fs(const Signal& x) {
  if (x.fs() < kMinPreprocessFs) {
    throw Error(ErrorKind::parameter, "preprocessing needs fs >= 100 Hz, got " +
                                          std::to_string(x.fs()));
  }
}

}  // namespace detail

inline PreprocessedSignal preprocess_ecg(const Signal& x, const EcgPreprocessConfig& cfg = {}) {
  require_non_empty(x, "preprocess_ecg");
  detail::require_preprocess_fs(x);
  Signal filtered = bandpass_filter(x, cfg.band);
  Signal integrated = detail::energy_envelope(filtered, cfg.integrator_s);
  return {std::move(filtered), std::move(integrated), x.fs(), Modality::ecg,
          detail::envelope_delay(cfg.integrator_s, x.fs())};
}

// Gain, 0.1-30 Hz conditioning band, then a narrower detection band feeding
// the energy envelope. `filtered` keeps the conditioning-band signal, which is
// what J-peak refinement searches.
inline PreprocessedSignal preprocess_bcg(const Signal& x, const BcgPreprocessConfig& cfg = {}) {
  require_non_empty(x, "preprocess_bcg");
  if (!(cfg.gain > 0.0)) throw Error(ErrorKind::parameter, "BCG gain must be > 0");
  detail::require_preprocess_fs(x);
  cfg.band.validate(x.fs());
  cfg.detection_band.validate(x.fs());

  std::vector<double> amplified(x.values());
  for (double& v : amplified) v *= cfg.gain;
  Signal filtered = bandpass_filter(x.with_samples(std::move(amplified)), cfg.band);
  Signal detection = bandpass_filter(filtered, cfg.detection_band);
  Signal integrated = detail::energy_envelope(detection, cfg.integrator_s);
  return {std::move(filtered), std::move(integrated), x.fs(), Modality::bcg,
          detail::envelope_delay(cfg.integrator_s, x.fs())};
}

}  // namespace hrvkit
