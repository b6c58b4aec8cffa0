#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <vector>

#include "hrvkit/error.hpp"
#include "hrvkit/signal.hpp"

namespace hrvkit {

// Second-order section, a0 normalized to 1:
//   y[n] = b0 x[n] + b1 x[n-1] + b2 x[n-2] - a1 y[n-1] - a2 y[n-2]
struct Biquad {
  double b0 = 1.0, b1 = 0.0, b2 = 0.0;
  double a1 = 0.0, a2 = 0.0;

  std::complex<double> response(double f_hz, double fs) const {
    const std::complex<double> z1 = std::polar(1.0, -2.0 * std::numbers::pi * f_hz / fs);
    const std::complex<double> z2 = z1 * z1;
    return (b0 + b1 * z1 + b2 * z2) / (1.0 + a1 * z1 + a2 * z2);
  }

  double dc_gain() const { return (b0 + b1 + b2) / (1.0 + a1 + a2); }
};

using SosCascade = std::vector<Biquad>;

inline std::complex<double> cascade_response(const SosCascade& sos, double f_hz, double fs) {
  std::complex<double> h{1.0, 0.0};
  for (const auto& s : sos) h *= s.response(f_hz, fs);
  return h;
}

// Digital Butterworth band-pass of total order `band.order` (order/2 biquads).
// Analog low-pass prototype -> band-pass transform on prewarped edges ->
// bilinear transform. Gain is normalized to unity at the geometric centre.
inline SosCascade design_butterworth_bandpass(const BandSpec& band, double fs) {
  band.validate(fs);
  using cd = std::complex<double>;
  const int proto_order = band.order / 2;
  const double two_fs = 2.0 * fs;
  const double w_lo = two_fs * std::tan(std::numbers::pi * band.lo_hz / fs);
  const double w_hi = two_fs * std::tan(std::numbers::pi * band.hi_hz / fs);
  const double bw = w_hi - w_lo;
  const double w0_sq = w_lo * w_hi;

  auto bilinear = [two_fs](cd s) { return (two_fs + s) / (two_fs - s); };
  auto section_from = [](cd p, cd q) {
    // zeros at z = +1 and z = -1
    Biquad s;
    s.b0 = 1.0;
    s.b1 = 0.0;
    s.b2 = -1.0;
    s.a1 = -(p + q).real();
    s.a2 = (p * q).real();
    return s;
  };

  SosCascade sos;
  for (int k = 0; k < proto_order; ++k) {
    const double theta =
        std::numbers::pi * static_cast<double>(2 * k + proto_order + 1) / (2.0 * proto_order);
    const cd proto = std::polar(1.0, theta);
    if (proto.imag() < -1e-12) continue;  // conjugate partner handled with its mirror

    const cd half = proto * (bw / 2.0);
    const cd root = std::sqrt(half * half - w0_sq);
    const cd s1 = bilinear(half + root);
    const cd s2 = bilinear(half - root);
    if (std::abs(proto.imag()) <= 1e-12) {
      // real prototype pole: the two band-pass poles form their own pair
      sos.push_back(section_from(s1, s2));
    } else {
      sos.push_back(section_from(s1, std::conj(s1)));
      sos.push_back(section_from(s2, std::conj(s2)));
    }
  }

  const double w_centre = std::sqrt(w0_sq);
  const double f_centre = fs / std::numbers::pi * std::atan(w_centre / two_fs);
  const double gain = std::abs(cascade_response(sos, f_centre, fs));
  const double per_section = std::pow(gain, -1.0 / static_cast<double>(sos.size()));
  for (auto& s : sos) {
    s.b0 *= per_section;
    s.b1 *= per_section;
    s.b2 *= per_section;
  }
  return sos;
}

namespace detail {

// Transposed direct form II, in place. `state` holds two values per section.
inline void sos_run(const SosCascade& sos, std::vector<double>& x,
                    std::vector<std::array<double, 2>> state) {
  for (std::size_t k = 0; k < sos.size(); ++k) {
    const Biquad& s = sos[k];
    double z1 = state[k][0];
    double z2 = state[k][1];
    for (double& v : x) {
      const double in = v;
      const double out = s.b0 * in + z1;
      z1 = s.b1 * in - s.a1 * out + z2;
      z2 = s.b2 * in - s.a2 * out;
      v = out;
    }
  }
}

// Section states at steady state for a constant input of 1.
inline std::vector<std::array<double, 2>> sos_step_state(const SosCascade& sos) {
  std::vector<std::array<double, 2>> zi(sos.size());
  double u = 1.0;
  for (std::size_t k = 0; k < sos.size(); ++k) {
    const Biquad& s = sos[k];
    const double y = s.dc_gain() * u;
    const double z2 = s.b2 * u - s.a2 * y;
    const double z1 = s.b1 * u - s.a1 * y + z2;
    zi[k] = {z1, z2};
    u = y;
  }
  return zi;
}

inline std::vector<std::array<double, 2>> scaled(std::vector<std::array<double, 2>> zi,
                                                 double by) {
  for (auto& z : zi) {
    z[0] *= by;
    z[1] *= by;
  }
  return zi;
}

}  // namespace detail

// Startup transient, in samples, used for edge padding and the minimum input
// length of filtfilt.
inline std::size_t filtfilt_padlen(const SosCascade& sos) { return 3 * (2 * sos.size() + 1); }

// Single forward pass with zero initial state.
inline std::vector<double> sosfilt(const SosCascade& sos, std::span<const double> x) {
  std::vector<double> y(x.begin(), x.end());
  detail::sos_run(sos, y, std::vector<std::array<double, 2>>(sos.size(), {0.0, 0.0}));
  return y;
}

// Zero-phase forward-backward filtering with odd extension at both ends and
// steady-state initial conditions, so a constant input produces no transient.
inline std::vector<double> filtfilt(const SosCascade& sos, std::span<const double> x) {
  const std::size_t pad = filtfilt_padlen(sos);
  if (x.size() <= pad) {
    throw Error(ErrorKind::input_too_short,
                "filtfilt needs more than " + std::to_string(pad) + " samples, got " +
                    std::to_string(x.size()));
  }
  const std::size_t n = x.size();
  std::vector<double> ext;
  ext.reserve(n + 2 * pad);
  for (std::size_t i = pad; i >= 1; --i) ext.push_back(2.0 * x[0] - x[i]);
  ext.insert(ext.end(), x.begin(), x.end());
  for (std::size_t i = 1; i <= pad; ++i) ext.push_back(2.0 * x[n - 1] - x[n - 1 - i]);

  const auto zi = detail::sos_step_state(sos);
  detail::sos_run(sos, ext, detail::scaled(zi, ext.front()));
  std::reverse(ext.begin(), ext.end());
  detail::sos_run(sos, ext, detail::scaled(zi, ext.front()));
  std::reverse(ext.begin(), ext.end());

  return {ext.begin() + static_cast<std::ptrdiff_t>(pad),
          ext.begin() + static_cast<std::ptrdiff_t>(pad + n)};
}

inline Signal bandpass_filter(const Signal& x, const BandSpec& band) {
  require_non_empty(x, "bandpass_filter");
  const SosCascade sos = design_butterworth_bandpass(band, x.fs());
  return x.with_samples(filtfilt(sos, x.samples()));
}

}  // namespace hrvkit
