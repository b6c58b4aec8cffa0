#pragma once

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "hrvkit/error.hpp"
#include "hrvkit/intervals.hpp"
#include "hrvkit/signal.hpp"

namespace hrvkit::io {

enum class SignalFormat {
  timed,    // "t,value" rows, fs inferred from the timestamps
  sampled,  // one value per row, fs supplied by the caller
};

inline SignalFormat parse_signal_format(std::string_view s) {
  if (s == "timed" || s == "csv_timed") return SignalFormat::timed;
  if (s == "sampled" || s == "csv_sampled") return SignalFormat::sampled;
  throw Error(ErrorKind::usage, "unknown signal format '" + std::string(s) + "'");
}

// 17 significant digits: enough for any double to read back bit-exact.
inline std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

inline std::optional<double> parse_number(std::string_view field) {
  if (field.empty()) return std::nullopt;
  const std::string owned(field);
  char* end = nullptr;
  const double v = std::strtod(owned.c_str(), &end);
  if (end != owned.c_str() + owned.size()) return std::nullopt;
  return v;
}

// Numeric rows of a CSV stream; a non-numeric first line is a header. Row
// numbers in errors are 1-based file line numbers.
struct Rows {
  std::vector<std::vector<double>> values;
  std::vector<std::size_t> lines;
};

inline Rows read_rows(std::istream& in, std::size_t columns, const std::string& source) {
  Rows rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto text = trim(line);
    if (text.empty() || text.front() == '#') continue;
    const auto fields = split(text);
    if (rows.values.empty() && line_no == 1 && !parse_number(fields.front())) continue;
    if (fields.size() != columns) {
      throw Error(ErrorKind::format, source + ": row " + std::to_string(line_no) + " has " +
                                         std::to_string(fields.size()) + " columns, expected " +
                                         std::to_string(columns));
    }
    std::vector<double> row;
    for (const auto f : fields) {
      const auto v = parse_number(f);
      if (!v || !std::isfinite(*v)) {
        throw Error(ErrorKind::format, source + ": row " + std::to_string(line_no) +
                                           " has a missing or non-finite value '" +
                                           std::string(f) + "'");
      }
      row.push_back(*v);
    }
    rows.values.push_back(std::move(row));
    rows.lines.push_back(line_no);
  }
  if (rows.values.empty()) throw Error(ErrorKind::empty_input, source + ": no data rows");
  return rows;
}

inline std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open '" + path.string() + "'");
  return in;
}

inline std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorKind::io, "cannot write '" + path.string() + "'");
  return out;
}

}  // namespace detail

inline constexpr double kUniformSpacingTolerance = 1e-6;

inline Signal read_signal(std::istream& in, SignalFormat format, std::optional<double> fs = {},
                          const std::string& source = "<stream>") {
  if (format == SignalFormat::sampled) {
    if (!fs) throw Error(ErrorKind::usage, source + ": sampled CSV needs --fs");
    const auto rows = detail::read_rows(in, 1, source);
    std::vector<double> v;
    v.reserve(rows.values.size());
    for (const auto& r : rows.values) v.push_back(r[0]);
    return Signal(std::move(v), *fs);
  }

  const auto rows = detail::read_rows(in, 2, source);
  const std::size_t n = rows.values.size();
  if (n < 2) throw Error(ErrorKind::format, source + ": timed CSV needs >= 2 rows to infer fs");
  const double t0 = rows.values.front()[0];
  const double dt = (rows.values.back()[0] - t0) / static_cast<double>(n - 1);
  if (!(dt > 0.0)) {
    throw Error(ErrorKind::format, source + ": timestamps must be strictly increasing");
  }
  std::vector<double> v;
  v.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) {
      const double step = rows.values[i][0] - rows.values[i - 1][0];
      if (!(step > 0.0) || std::abs(step - dt) > kUniformSpacingTolerance * dt) {
        throw Error(ErrorKind::format, source + ": non-uniform timestamp at row " +
                                           std::to_string(rows.lines[i]));
      }
    }
    v.push_back(rows.values[i][1]);
  }
  if (fs && std::abs(*fs - 1.0 / dt) > 1e-6 * *fs) {
    throw Error(ErrorKind::format, source + ": timestamps imply fs " + format_number(1.0 / dt) +
                                       " Hz, not the requested " + format_number(*fs));
  }
  return Signal(std::move(v), 1.0 / dt, t0);
}

inline Signal read_signal(const std::filesystem::path& path, SignalFormat format,
                          std::optional<double> fs = {}) {
  auto in = detail::open_input(path);
  return read_signal(in, format, fs, path.string());
}

inline void write_signal(std::ostream& out, const Signal& x, SignalFormat format) {
  if (format == SignalFormat::timed) {
    out << "t,value\n";
    for (std::size_t i = 0; i < x.size(); ++i) {
      out << format_number(x.time_at(i)) << ',' << format_number(x[i]) << '\n';
    }
  } else {
    out << "value\n";
    for (double v : x.samples()) out << format_number(v) << '\n';
  }
}

inline void write_signal(const std::filesystem::path& path, const Signal& x, SignalFormat format) {
  auto out = detail::open_output(path);
  write_signal(out, x, format);
  if (!out) throw Error(ErrorKind::io, "failed writing '" + path.string() + "'");
}

inline constexpr std::string_view kBeatsHeader = "t_seconds,amplitude";

inline void write_beats(std::ostream& out, const BeatSeries& b) {
  out << kBeatsHeader << '\n';
  for (std::size_t i = 0; i < b.size(); ++i) {
    out << format_number(b.times[i]) << ',' << format_number(b.amplitudes[i]) << '\n';
  }
}

inline void write_beats(const std::filesystem::path& path, const BeatSeries& b) {
  auto out = detail::open_output(path);
  write_beats(out, b);
  if (!out) throw Error(ErrorKind::io, "failed writing '" + path.string() + "'");
}

inline BeatSeries read_beats(std::istream& in, BeatKind kind, const std::string& source = "<stream>") {
  const auto rows = detail::read_rows(in, 2, source);
  BeatSeries b;
  b.kind = kind;
  for (std::size_t i = 0; i < rows.values.size(); ++i) {
    const double t = rows.values[i][0];
    if (!b.times.empty() && !(t > b.times.back())) {
      throw Error(ErrorKind::format, source + ": beat times not increasing at row " +
                                         std::to_string(rows.lines[i]));
    }
    b.times.push_back(t);
    b.amplitudes.push_back(rows.values[i][1]);
  }
  return b;
}

inline BeatSeries read_beats(const std::filesystem::path& path, BeatKind kind) {
  auto in = detail::open_input(path);
  return read_beats(in, kind, path.string());
}

// True when the file's first line is the beats CSV header.
inline bool looks_like_beats_file(const std::filesystem::path& path) {
  auto in = detail::open_input(path);
  std::string first;
  std::getline(in, first);
  return detail::trim(first) == kBeatsHeader;
}

}  // namespace hrvkit::io
