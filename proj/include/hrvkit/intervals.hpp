#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "hrvkit/error.hpp"

namespace hrvkit {

enum class BeatKind { ecg_r, bcg_j };
enum class IntervalKind { rr, jj };

inline std::string to_string(BeatKind k) { return k == BeatKind::ecg_r ? "R" : "J"; }
inline std::string to_string(IntervalKind k) { return k == IntervalKind::rr ? "RR" : "JJ"; }
inline IntervalKind interval_kind_for(BeatKind k) {
  return k == BeatKind::ecg_r ? IntervalKind::rr : IntervalKind::jj;
}

// Beat timestamps (seconds) with the filtered-signal amplitude at each beat.
struct BeatSeries {
  std::vector<double> times;
  std::vector<double> amplitudes;
  BeatKind kind = BeatKind::ecg_r;

  std::size_t size() const noexcept { return times.size(); }
  bool empty() const noexcept { return times.empty(); }
};

// Beat-to-beat intervals in milliseconds; each anchored at the timestamp of
// its terminating beat.
class IntervalSeries {
 public:
  IntervalSeries() = default;
  IntervalSeries(std::vector<double> intervals_ms, std::vector<double> anchors_s,
                 IntervalKind kind = IntervalKind::rr)
      : intervals_(std::move(intervals_ms)), anchors_(std::move(anchors_s)), kind_(kind) {
    if (intervals_.size() != anchors_.size()) {
      throw Error(ErrorKind::parameter, "interval and anchor counts differ");
    }
    for (std::size_t i = 0; i < intervals_.size(); ++i) {
      if (!(intervals_[i] > 0.0) || !std::isfinite(intervals_[i])) {
        throw Error(ErrorKind::parameter, "interval " + std::to_string(i) + " is not positive");
      }
      if (!std::isfinite(anchors_[i]) || (i > 0 && !(anchors_[i] > anchors_[i - 1]))) {
        throw Error(ErrorKind::parameter, "anchors must be strictly increasing");
      }
    }
  }

  const std::vector<double>& intervals() const noexcept { return intervals_; }
  const std::vector<double>& anchors() const noexcept { return anchors_; }
  IntervalKind kind() const noexcept { return kind_; }
  std::size_t size() const noexcept { return intervals_.size(); }
  bool empty() const noexcept { return intervals_.empty(); }

  IntervalSeries shifted(double dt) const {
    std::vector<double> a(anchors_);
    for (double& v : a) v += dt;
    return {intervals_, std::move(a), kind_};
  }
  IntervalSeries relabeled(IntervalKind kind) const { return {intervals_, anchors_, kind}; }

 private:
  std::vector<double> intervals_;
  std::vector<double> anchors_;
  IntervalKind kind_ = IntervalKind::rr;
};

inline IntervalSeries beats_to_intervals(const BeatSeries& b) {
  if (b.times.size() < 2) {
    throw Error(ErrorKind::insufficient_beats,
                "need at least 2 beats for intervals, got " + std::to_string(b.times.size()));
  }
  std::vector<double> iv;
  std::vector<double> anchors;
  iv.reserve(b.times.size() - 1);
  anchors.reserve(b.times.size() - 1);
  for (std::size_t i = 1; i < b.times.size(); ++i) {
    iv.push_back((b.times[i] - b.times[i - 1]) * 1000.0);
    anchors.push_back(b.times[i]);
  }
  return {std::move(iv), std::move(anchors), interval_kind_for(b.kind)};
}

inline double mean_interval_ms(const IntervalSeries& iv) {
  if (iv.empty()) throw Error(ErrorKind::insufficient_beats, "empty interval series");
  double sum = 0.0;
  for (double v : iv.intervals()) sum += v;
  return sum / static_cast<double>(iv.size());
}

inline double mean_heart_rate(const IntervalSeries& iv) { return 60000.0 / mean_interval_ms(iv); }

}  // namespace hrvkit
