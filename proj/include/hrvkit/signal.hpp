#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hrvkit/error.hpp"

namespace hrvkit {

enum class Modality { ecg, bcg };

inline std::string to_string(Modality m) { return m == Modality::ecg ? "ecg" : "bcg"; }

// Uniformly sampled amplitude series. Samples are millivolts for raw
// recordings and dimensionless once past the derivative stage.
class Signal {
 public:
  Signal(std::vector<double> samples, double fs, double t0 = 0.0)
      : samples_(std::move(samples)), fs_(fs), t0_(t0) {
    if (!(fs_ > 0.0) || !std::isfinite(fs_)) {
      throw Error(ErrorKind::parameter, "sampling rate must be positive and finite");
    }
    if (!std::isfinite(t0_)) throw Error(ErrorKind::parameter, "start time must be finite");
    for (std::size_t i = 0; i < samples_.size(); ++i) {
      if (!std::isfinite(samples_[i])) {
        throw Error(ErrorKind::format, "non-finite sample at index " + std::to_string(i));
      }
    }
  }

  std::span<const double> samples() const noexcept { return samples_; }
  const std::vector<double>& values() const noexcept { return samples_; }
  double fs() const noexcept { return fs_; }
  double t0() const noexcept { return t0_; }
  std::size_t size() const noexcept { return samples_.size(); }
  bool empty() const noexcept { return samples_.empty(); }
  double operator[](std::size_t i) const { return samples_[i]; }

  double time_at(std::size_t i) const { return t0_ + static_cast<double>(i) / fs_; }
  double duration() const { return static_cast<double>(samples_.size()) / fs_; }

  // Same timebase, new samples.
  Signal with_samples(std::vector<double> samples) const {
    return Signal(std::move(samples), fs_, t0_);
  }
  Signal shifted(double dt) const { return Signal(samples_, fs_, t0_ + dt); }

 private:
  std::vector<double> samples_;
  double fs_;
  double t0_;
};

inline void require_non_empty(const Signal& x, const char* op) {
  if (x.empty()) throw Error(ErrorKind::empty_input, std::string(op) + ": empty signal");
}

struct BandSpec {
  double lo_hz = 0.0;
  double hi_hz = 0.0;
  int order = 4;

  void validate(double fs) const {
    if (order < 2 || order % 2 != 0) {
      throw Error(ErrorKind::parameter, "band-pass order must be even and >= 2, got " +
                                            std::to_string(order));
    }
    if (!(lo_hz > 0.0 && lo_hz < hi_hz && hi_hz < fs / 2.0)) {
      throw Error(ErrorKind::parameter,
                  "band [" + std::to_string(lo_hz) + ", " + std::to_string(hi_hz) +
                      "] Hz is not inside (0, fs/2) for fs " + std::to_string(fs) + " Hz");
    }
  }
};

struct PreprocessedSignal {
  Signal filtered;    // band-passed, pre-derivative
  Signal integrated;  // derivative -> square -> moving window integrate
  double source_fs;
  Modality modality;
  // Samples by which envelope lobes trail the events that caused them
  // (derivative plus integrator group delay).
  std::size_t envelope_delay = 0;
};

}  // namespace hrvkit
