#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hrvkit/error.hpp"
#include "hrvkit/hrv.hpp"

namespace hrvkit {

// Indices computed for one modality of one recording session.
struct ModalityIndices {
  TimeDomainIndices time;
  std::optional<FreqDomainIndices> freq;
};

struct SubjectResult {
  std::string subject_id;
  ModalityIndices ecg;
  ModalityIndices bcg;
};

// Index names carry their unit so serialized maps are self-describing.
using IndexMap = std::map<std::string, double>;

inline IndexMap to_index_map(const ModalityIndices& m) {
  IndexMap out{
      {"mean_hr_bpm", m.time.mean_hr},
      {"sdnn_ms", m.time.sdnn},
      {"rmssd_ms", m.time.rmssd},
      {"pnn50_percent", m.time.pnn50},
  };
  if (m.freq) {
    out["vlf_power_ms2"] = m.freq->vlf_power;
    out["lf_power_ms2"] = m.freq->lf_power;
    out["hf_power_ms2"] = m.freq->hf_power;
    out["total_power_ms2"] = m.freq->total_power;
    if (m.freq->lf_hf_ratio) out["lf_hf_ratio"] = *m.freq->lf_hf_ratio;
  }
  return out;
}

struct IndexDiffs {
  IndexMap signed_diff;  // ecg - bcg
  IndexMap abs_diff;
  std::map<std::string, std::optional<double>> rel_diff;  // abs / |ecg|; absent when ecg == 0
};

inline IndexDiffs compare_index_maps(const IndexMap& ecg, const IndexMap& bcg) {
  IndexDiffs out;
  for (const auto& [name, e] : ecg) {
    const auto it = bcg.find(name);
    if (it == bcg.end()) throw Error(ErrorKind::schema, "index '" + name + "' missing on BCG side");
    const double d = e - it->second;
    out.signed_diff[name] = d;
    out.abs_diff[name] = std::abs(d);
    out.rel_diff[name] =
        e == 0.0 ? std::nullopt : std::optional<double>(std::abs(d) / std::abs(e));
  }
  for (const auto& [name, unused] : bcg) {
    if (!ecg.contains(name)) throw Error(ErrorKind::schema, "index '" + name + "' missing on ECG side");
  }
  return out;
}

inline IndexDiffs compare_indices(const ModalityIndices& ecg, const ModalityIndices& bcg) {
  return compare_index_maps(to_index_map(ecg), to_index_map(bcg));
}

namespace detail {

inline std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> paired_columns(
    const std::vector<SubjectResult>& results) {
  std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> cols;
  std::optional<std::vector<std::string>> names;
  for (const auto& r : results) {
    const IndexMap e = to_index_map(r.ecg);
    const IndexMap b = to_index_map(r.bcg);
    compare_index_maps(e, b);  // schema check
    std::vector<std::string> these;
    for (const auto& [name, unused] : e) these.push_back(name);
    if (!names) {
      names = these;
    } else if (*names != these) {
      throw Error(ErrorKind::schema, "subject '" + r.subject_id + "' has a different index set");
    }
    for (const auto& [name, v] : e) {
      cols[name].first.push_back(v);
      cols[name].second.push_back(b.at(name));
    }
  }
  return cols;
}

inline double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace detail

// Pearson r of ECG vs BCG per index; absent when either side has no spread.
inline std::optional<double> pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double mx = detail::mean_of(x);
  const double my = detail::mean_of(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0.0) || !(syy > 0.0)) return std::nullopt;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

inline std::map<std::string, std::optional<double>> correlate_cohort(
    const std::vector<SubjectResult>& results) {
  if (results.size() < 3) {
    throw Error(ErrorKind::insufficient_cohort, "correlation needs >= 3 subjects, got " +
                                                    std::to_string(results.size()));
  }
  std::map<std::string, std::optional<double>> out;
  for (const auto& [name, cols] : detail::paired_columns(results)) {
    out[name] = pearson(cols.first, cols.second);
  }
  return out;
}

struct BlandAltman {
  double bias = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

inline BlandAltman bland_altman_stats(const std::vector<double>& ecg, const std::vector<double>& bcg) {
  if (ecg.size() < 2 || ecg.size() != bcg.size()) {
    throw Error(ErrorKind::insufficient_cohort, "Bland-Altman needs >= 2 paired values");
  }
  std::vector<double> d(ecg.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = ecg[i] - bcg[i];
  const double bias = detail::mean_of(d);
  double ss = 0.0;
  for (double v : d) ss += (v - bias) * (v - bias);
  const double sd = std::sqrt(ss / static_cast<double>(d.size() - 1));
  return {bias, bias - 1.96 * sd, bias + 1.96 * sd};
}

inline std::map<std::string, BlandAltman> bland_altman(const std::vector<SubjectResult>& results) {
  if (results.size() < 2) {
    throw Error(ErrorKind::insufficient_cohort, "Bland-Altman needs >= 2 subjects, got " +
                                                    std::to_string(results.size()));
  }
  std::map<std::string, BlandAltman> out;
  for (const auto& [name, cols] : detail::paired_columns(results)) {
    out[name] = bland_altman_stats(cols.first, cols.second);
  }
  return out;
}

struct ComparisonReport {
  std::map<std::string, IndexDiffs> per_subject;  // keyed (and so ordered) by subject id
  std::map<std::string, std::optional<double>> cohort_pearson_r;
  std::map<std::string, BlandAltman> bland_altman;
};

// Per-subject diffs always; cohort statistics once the cohort is large enough
// for them (r needs 3 subjects, limits of agreement need 2).
inline ComparisonReport build_comparison(const std::vector<SubjectResult>& results) {
  ComparisonReport out;
  for (const auto& r : results) {
    if (out.per_subject.contains(r.subject_id)) {
      throw Error(ErrorKind::schema, "duplicate subject id '" + r.subject_id + "'");
    }
    out.per_subject[r.subject_id] = compare_indices(r.ecg, r.bcg);
  }
  if (results.size() >= 2) out.bland_altman = bland_altman(results);
  if (results.size() >= 3) out.cohort_pearson_r = correlate_cohort(results);
  return out;
}

}  // namespace hrvkit
