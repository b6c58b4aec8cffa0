#pragma once

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <optional>
#include <vector>

#include "hrvkit/error.hpp"
#include "hrvkit/intervals.hpp"
#include "hrvkit/signal.hpp"

namespace hrvkit {

struct DetectorConfig {
  double refractory_s = 0.200;
  double searchback_factor = 1.66;
  double threshold_fraction = 0.25;
  double warmup_s = 1.0;
  // Half-width of the filtered-signal window searched for the beat apex.
  double refine_s = 0.075;
  // Half-width of the least-squares parabola fitted around the apex sample.
  double apex_fit_s = 0.008;

  static DetectorConfig ecg() { return {}; }
  static DetectorConfig bcg() {
    DetectorConfig c;
    c.refractory_s = 0.300;
    c.refine_s = 0.150;
    c.apex_fit_s = 0.020;
    return c;
  }

  void validate() const {
    if (!(refractory_s > 0.0)) throw Error(ErrorKind::parameter, "refractory period must be > 0");
    if (!(searchback_factor > 1.0)) throw Error(ErrorKind::parameter, "search-back factor must be > 1");
    if (!(threshold_fraction > 0.0 && threshold_fraction < 1.0)) {
      throw Error(ErrorKind::parameter, "threshold fraction must lie in (0, 1)");
    }
    if (!(warmup_s >= 0.0)) throw Error(ErrorKind::parameter, "warm-up must be >= 0");
    if (!(refine_s >= 0.0)) throw Error(ErrorKind::parameter, "refinement window must be >= 0");
    if (!(apex_fit_s >= 0.0)) throw Error(ErrorKind::parameter, "apex fit window must be >= 0");
  }
};

namespace detail {

struct Candidate {
  std::size_t index;
  double height;
};

// Local maxima of `x`, thinned so that no two survivors are closer than
// `distance` samples (taller peaks win, earlier index breaks ties).
inline std::vector<Candidate> find_peaks(std::span<const double> x, std::size_t distance) {
  std::vector<Candidate> peaks;
  for (std::size_t i = 1; i + 1 < x.size(); ++i) {
    if (x[i - 1] < x[i] && x[i] >= x[i + 1]) peaks.push_back({i, x[i]});
  }
  if (distance <= 1 || peaks.size() < 2) return peaks;

  std::vector<std::size_t> order(peaks.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return peaks[a].height > peaks[b].height;
  });
  std::vector<bool> keep(peaks.size(), true);
  for (std::size_t rank : order) {
    if (!keep[rank]) continue;
    const std::size_t at = peaks[rank].index;
    for (std::size_t j = rank; j-- > 0 && at - peaks[j].index < distance;) keep[j] = false;
    for (std::size_t j = rank + 1; j < peaks.size() && peaks[j].index - at < distance; ++j) {
      keep[j] = false;
    }
  }
  std::vector<Candidate> out;
  for (std::size_t i = 0; i < peaks.size(); ++i) {
    if (keep[i]) out.push_back(peaks[i]);
  }
  return out;
}

// Adaptive dual-threshold event picking on an energy envelope. Signal and
// noise levels are running estimates seeded from the opening stretch of the
// envelope, so every decision scales with the input amplitude.
inline std::vector<std::size_t> pick_events(std::span<const double> env, double fs,
                                            const DetectorConfig& cfg) {
  const auto refractory = static_cast<std::size_t>(std::ceil(cfg.refractory_s * fs));
  const auto candidates = find_peaks(env, refractory);
  if (candidates.empty()) return {};

  const std::size_t seed_len = std::min(
      env.size(), static_cast<std::size_t>(std::llround(std::max(2.0, cfg.warmup_s) * fs)));
  const auto seed = env.first(seed_len);
  double spk = *std::max_element(seed.begin(), seed.end()) / 3.0;
  double npk = std::accumulate(seed.begin(), seed.end(), 0.0) / static_cast<double>(seed_len) / 2.0;
  if (!(spk > 0.0)) return {};

  double thr = npk + cfg.threshold_fraction * (spk - npk);
  std::vector<std::size_t> events;
  std::vector<Candidate> noise_since_last;
  std::deque<double> recent_rr;
  double rr_mean = 0.0;

  auto accept = [&](std::size_t index) {
    if (!events.empty()) {
      recent_rr.push_back(static_cast<double>(index - events.back()));
      if (recent_rr.size() > 8) recent_rr.pop_front();
      rr_mean = std::accumulate(recent_rr.begin(), recent_rr.end(), 0.0) /
                static_cast<double>(recent_rr.size());
    }
    events.push_back(index);
  };
  auto update_threshold = [&] { thr = npk + cfg.threshold_fraction * (spk - npk); };

  for (const Candidate& c : candidates) {
    if (!events.empty() && rr_mean > 0.0 &&
        static_cast<double>(c.index - events.back()) > cfg.searchback_factor * rr_mean) {
      const double low_thr = 0.5 * thr;
      std::optional<std::size_t> best;
      for (std::size_t k = 0; k < noise_since_last.size(); ++k) {
        const Candidate& n = noise_since_last[k];
        if (n.index - events.back() < refractory || n.height < low_thr) continue;
        if (!best || n.height > noise_since_last[*best].height) best = k;
      }
      if (best) {
        const Candidate found = noise_since_last[*best];
        accept(found.index);
        spk = 0.25 * found.height + 0.75 * spk;
        update_threshold();
        noise_since_last.erase(noise_since_last.begin(),
                               noise_since_last.begin() + static_cast<std::ptrdiff_t>(*best) + 1);
      }
    }

    if (c.height >= thr && (events.empty() || c.index - events.back() >= refractory)) {
      accept(c.index);
      spk = 0.125 * c.height + 0.875 * spk;
      noise_since_last.clear();
    } else {
      npk = 0.125 * c.height + 0.875 * npk;
      noise_since_last.push_back(c);
    }
    update_threshold();
  }
  return events;
}

// Sub-sample apex offset in [-0.5, 0.5] from a least-squares parabola over
// `half` samples either side of `apex`. The offset is snapped to 1/4096 of a
// sample so rescaling the input cannot perturb the low bits of beat times.
inline double apex_offset(std::span<const double> y, std::size_t apex, std::size_t half) {
  if (half == 0 || apex < half || apex + half >= y.size()) return 0.0;
  const auto m = static_cast<double>(half);
  const double mean_k2 = m * (m + 1.0) / 3.0;
  double sum_ky = 0.0, sum_k2 = 0.0, sum_qy = 0.0, sum_q2 = 0.0;
  for (std::size_t i = apex - half; i <= apex + half; ++i) {
    const double k = static_cast<double>(i) - static_cast<double>(apex);
    const double q = k * k - mean_k2;
    sum_ky += k * y[i];
    sum_k2 += k * k;
    sum_qy += q * y[i];
    sum_q2 += q * q;
  }
  const double slope = sum_ky / sum_k2;
  const double curvature = sum_qy / sum_q2;
  if (!(curvature < 0.0)) return 0.0;
  const double offset = std::clamp(-slope / (2.0 * curvature), -0.5, 0.5);
  return std::round(offset * 4096.0) / 4096.0;
}

inline BeatSeries detect_beats(const PreprocessedSignal& p, const DetectorConfig& cfg,
                               BeatKind kind) {
  cfg.validate();
  const Signal& env = p.integrated;
  const Signal& filtered = p.filtered;
  const double fs = env.fs();
  const auto events = pick_events(env.samples(), fs, cfg);

  const auto half = static_cast<std::size_t>(std::llround(cfg.refine_s * fs));
  const auto refractory = static_cast<std::size_t>(std::ceil(cfg.refractory_s * fs));
  const auto y = filtered.samples();

  const auto fit_half = static_cast<std::size_t>(std::llround(cfg.apex_fit_s * fs));
  std::vector<std::size_t> apexes;
  for (std::size_t e : events) {
    // blanking applies to the decision point, where threshold state lives
    if (static_cast<double>(e) / fs < cfg.warmup_s) continue;
    const std::size_t centre = e > p.envelope_delay ? e - p.envelope_delay : 0;
    const std::size_t lo = centre > half ? centre - half : 0;
    const std::size_t hi = std::min(y.size() - 1, centre + half);
    const auto it = std::max_element(y.begin() + static_cast<std::ptrdiff_t>(lo),
                                     y.begin() + static_cast<std::ptrdiff_t>(hi) + 1);
    const auto apex = static_cast<std::size_t>(it - y.begin());

    // two events refining onto nearby apexes keep the taller one
    if (!apexes.empty() && apex - std::min(apex, apexes.back()) < refractory) {
      if (apex <= apexes.back()) continue;
      if (y[apex] > y[apexes.back()]) apexes.back() = apex;
      continue;
    }
    apexes.push_back(apex);
  }

  BeatSeries out;
  out.kind = kind;
  for (std::size_t a : apexes) {
    const double pos = static_cast<double>(a) + apex_offset(y, a, fit_half);
    out.times.push_back(filtered.t0() + pos / fs);
    out.amplitudes.push_back(y[a]);
  }
  return out;
}

}  // namespace detail

// Pan-Tompkins style R-peak detection on a preprocessed ECG.
inline BeatSeries detect_qrs(const PreprocessedSignal& p,
                             const DetectorConfig& cfg = DetectorConfig::ecg()) {
  if (p.modality != Modality::ecg) {
    throw Error(ErrorKind::parameter, "detect_qrs expects a preprocessed ECG");
  }
  return detail::detect_beats(p, cfg, BeatKind::ecg_r);
}

// J-peak detection: the same adaptive engine on the BCG envelope, refined to
// the largest positive deflection of the conditioned BCG.
inline BeatSeries detect_j_peaks(const PreprocessedSignal& p,
                                 const DetectorConfig& cfg = DetectorConfig::bcg()) {
  if (p.modality != Modality::bcg) {
    throw Error(ErrorKind::parameter, "detect_j_peaks expects a preprocessed BCG");
  }
  return detail::detect_beats(p, cfg, BeatKind::bcg_j);
}

}  // namespace hrvkit
