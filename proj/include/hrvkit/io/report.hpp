#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hrvkit/compare.hpp"
#include "hrvkit/error.hpp"
#include "hrvkit/hrv.hpp"
#include "hrvkit/io/csv.hpp"
#include "json.hpp"

namespace hrvkit::io {

using json = nlohmann::ordered_json;

inline constexpr const char* kSchemaVersion = "1";
inline constexpr const char* kToolVersion = "0.1.0";

struct ModalityReport {
  std::string modality;  // "ecg" or "bcg"
  std::string interval_kind;  // "RR" or "JJ"
  std::size_t beat_count = 0;
  std::size_t interval_count = 0;
  ModalityIndices indices;
  std::vector<std::string> warnings;
};

struct Provenance {
  std::map<std::string, std::string> inputs;
  std::map<std::string, std::string> config;  // effective values
  std::string config_hash;
  std::string tool_version = kToolVersion;
  std::string generated_at;  // the only field allowed to differ between identical runs
};

struct ReportDocument {
  std::string schema_version = kSchemaVersion;
  std::string subject_id;
  ModalityReport ecg;
  ModalityReport bcg;
  IndexDiffs comparison;
  Provenance provenance;
};

// Single-modality output of the `hrv` command.
struct HrvDocument {
  std::string schema_version = kSchemaVersion;
  ModalityReport result;
  Provenance provenance;
};

namespace detail {

inline double finite_or_throw(double v, const char* what) {
  if (!std::isfinite(v)) throw Error(ErrorKind::schema, std::string("non-finite value for ") + what);
  return v;
}

inline const json& member(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw Error(ErrorKind::schema, std::string("missing field '") + key + "'");
  }
  return j.at(key);
}

inline double number(const json& j, const char* key) {
  const json& v = member(j, key);
  if (!v.is_number()) throw Error(ErrorKind::schema, std::string("field '") + key + "' is not a number");
  return v.get<double>();
}

inline std::string text(const json& j, const char* key) {
  const json& v = member(j, key);
  if (!v.is_string()) throw Error(ErrorKind::schema, std::string("field '") + key + "' is not a string");
  return v.get<std::string>();
}

}  // namespace detail

inline json to_json(const TimeDomainIndices& t) {
  return {
      {"mean_hr_bpm", detail::finite_or_throw(t.mean_hr, "mean_hr")},
      {"sdnn_ms", detail::finite_or_throw(t.sdnn, "sdnn")},
      {"rmssd_ms", detail::finite_or_throw(t.rmssd, "rmssd")},
      {"pnn50_percent", detail::finite_or_throw(t.pnn50, "pnn50")},
  };
}

inline json to_json(const FreqDomainIndices& f) {
  json j = {
      {"vlf_power_ms2", detail::finite_or_throw(f.vlf_power, "vlf_power")},
      {"lf_power_ms2", detail::finite_or_throw(f.lf_power, "lf_power")},
      {"hf_power_ms2", detail::finite_or_throw(f.hf_power, "hf_power")},
      {"total_power_ms2", detail::finite_or_throw(f.total_power, "total_power")},
  };
  j["lf_hf_ratio"] = f.lf_hf_ratio ? json(detail::finite_or_throw(*f.lf_hf_ratio, "lf_hf_ratio")) : json(nullptr);
  return j;
}

inline json to_json(const ModalityReport& m) {
  json j = {
      {"modality", m.modality},
      {"interval_kind", m.interval_kind},
      {"beat_count", m.beat_count},
      {"interval_count", m.interval_count},
      {"time_domain", to_json(m.indices.time)},
  };
  j["freq_domain"] = m.indices.freq ? to_json(*m.indices.freq) : json(nullptr);
  j["warnings"] = m.warnings;
  return j;
}

inline json to_json(const IndexDiffs& d) {
  json abs = json::object(), rel = json::object(), sgn = json::object();
  for (const auto& [k, v] : d.abs_diff) abs[k] = detail::finite_or_throw(v, "abs_diff");
  for (const auto& [k, v] : d.signed_diff) sgn[k] = detail::finite_or_throw(v, "signed_diff");
  for (const auto& [k, v] : d.rel_diff) rel[k] = v ? json(detail::finite_or_throw(*v, "rel_diff")) : json(nullptr);
  return {{"abs_diff", abs}, {"rel_diff", rel}, {"signed_diff", sgn}};
}

inline json to_json(const Provenance& p) {
  return {
      {"inputs", p.inputs},
      {"config", p.config},
      {"config_hash", p.config_hash},
      {"tool_version", p.tool_version},
      {"generated_at", p.generated_at},
  };
}

inline json to_json(const ReportDocument& r) {
  return {
      {"schema_version", r.schema_version},
      {"subject_id", r.subject_id},
      {"ecg", to_json(r.ecg)},
      {"bcg", to_json(r.bcg)},
      {"comparison", to_json(r.comparison)},
      {"provenance", to_json(r.provenance)},
  };
}

inline json to_json(const HrvDocument& h) {
  return {
      {"schema_version", h.schema_version},
      {"result", to_json(h.result)},
      {"provenance", to_json(h.provenance)},
  };
}

inline json to_json(const ComparisonReport& c) {
  json subjects = json::object();
  for (const auto& [id, d] : c.per_subject) subjects[id] = to_json(d);
  json r = json::object();
  for (const auto& [k, v] : c.cohort_pearson_r) r[k] = v ? json(*v) : json(nullptr);
  json ba = json::object();
  for (const auto& [k, v] : c.bland_altman) {
    ba[k] = {{"bias", v.bias}, {"lower_limit", v.lower}, {"upper_limit", v.upper}};
  }
  return {
      {"schema_version", kSchemaVersion},
      {"per_subject", subjects},
      {"cohort_pearson_r", r},
      {"bland_altman", ba},
  };
}

inline TimeDomainIndices time_domain_from_json(const json& j) {
  return {detail::number(j, "mean_hr_bpm"), detail::number(j, "sdnn_ms"),
          detail::number(j, "rmssd_ms"), detail::number(j, "pnn50_percent")};
}

inline FreqDomainIndices freq_domain_from_json(const json& j) {
  FreqDomainIndices f{detail::number(j, "vlf_power_ms2"), detail::number(j, "lf_power_ms2"),
                      detail::number(j, "hf_power_ms2"), detail::number(j, "total_power_ms2"),
                      std::nullopt};
  const json& ratio = detail::member(j, "lf_hf_ratio");
  if (!ratio.is_null()) f.lf_hf_ratio = ratio.get<double>();
  return f;
}

inline ModalityReport modality_from_json(const json& j) {
  ModalityReport m;
  m.modality = detail::text(j, "modality");
  m.interval_kind = detail::text(j, "interval_kind");
  m.beat_count = detail::member(j, "beat_count").get<std::size_t>();
  m.interval_count = detail::member(j, "interval_count").get<std::size_t>();
  m.indices.time = time_domain_from_json(detail::member(j, "time_domain"));
  const json& f = detail::member(j, "freq_domain");
  if (!f.is_null()) m.indices.freq = freq_domain_from_json(f);
  m.warnings = detail::member(j, "warnings").get<std::vector<std::string>>();
  return m;
}

inline IndexDiffs diffs_from_json(const json& j) {
  IndexDiffs d;
  for (const auto& [k, v] : detail::member(j, "abs_diff").items()) d.abs_diff[k] = v.get<double>();
  for (const auto& [k, v] : detail::member(j, "signed_diff").items()) d.signed_diff[k] = v.get<double>();
  for (const auto& [k, v] : detail::member(j, "rel_diff").items()) {
    d.rel_diff[k] = v.is_null() ? std::nullopt : std::optional<double>(v.get<double>());
  }
  return d;
}

inline Provenance provenance_from_json(const json& j) {
  Provenance p;
  p.inputs = detail::member(j, "inputs").get<std::map<std::string, std::string>>();
  p.config = detail::member(j, "config").get<std::map<std::string, std::string>>();
  p.config_hash = detail::text(j, "config_hash");
  p.tool_version = detail::text(j, "tool_version");
  p.generated_at = detail::text(j, "generated_at");
  return p;
}

inline void check_schema_version(const json& j) {
  const std::string v = detail::text(j, "schema_version");
  if (v != kSchemaVersion) throw Error(ErrorKind::schema, "unsupported schema_version '" + v + "'");
}

namespace detail {

// Type mismatches inside nlohmann surface as schema errors.
template <class F>
auto schema_guard(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::schema, e.what());
  }
}

}  // namespace detail

inline ReportDocument report_from_json(const json& j) {
  return detail::schema_guard([&] {
  check_schema_version(j);
  ReportDocument r;
  r.subject_id = detail::text(j, "subject_id");
  r.ecg = modality_from_json(detail::member(j, "ecg"));
  r.bcg = modality_from_json(detail::member(j, "bcg"));
  r.comparison = diffs_from_json(detail::member(j, "comparison"));
  r.provenance = provenance_from_json(detail::member(j, "provenance"));
  return r;
  });
}

inline HrvDocument hrv_from_json(const json& j) {
  return detail::schema_guard([&] {
    check_schema_version(j);
    return HrvDocument{kSchemaVersion, modality_from_json(detail::member(j, "result")),
                       provenance_from_json(detail::member(j, "provenance"))};
  });
}

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

inline json read_json(const std::filesystem::path& path) {
  auto in = detail::open_input(path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::format, path.string() + ": " + e.what());
  }
}

inline void write_json(const std::filesystem::path& path, const json& j) {
  auto out = detail::open_output(path);
  out << dump(j);
  if (!out) throw Error(ErrorKind::io, "failed writing '" + path.string() + "'");
}

// Report text with the generation timestamp blanked; identical runs compare
// equal under this view.
inline std::string canonical_text(json j) {
  if (j.contains("provenance")) j["provenance"]["generated_at"] = "";
  return dump(j);
}

}  // namespace hrvkit::io
