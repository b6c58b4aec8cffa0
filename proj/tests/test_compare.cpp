#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "support.hpp"

using namespace hrvkit;
using Catch::Approx;

namespace {

ModalityIndices indices(double hr, double sdnn, double rmssd, double pnn50) {
  return {{hr, sdnn, rmssd, pnn50}, std::nullopt};
}

ModalityIndices with_freq(ModalityIndices m, double vlf, double lf, double hf) {
  m.freq = FreqDomainIndices{vlf, lf, hf, vlf + lf + hf, hf > 0 ? std::optional<double>(lf / hf) : std::nullopt};
  return m;
}

// Covariance and standard deviations accumulated separately, each over its
// own pass after the means.
double oracle_r(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) mx += x[i] / n, my += y[i] / n;
  double cov = 0;
  for (std::size_t i = 0; i < x.size(); ++i) cov += (x[i] - mx) * (y[i] - my) / (n - 1);
  double vx = 0, vy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    vx += (x[i] - mx) * (x[i] - mx) / (n - 1);
    vy += (y[i] - my) * (y[i] - my) / (n - 1);
  }
  return cov / (std::sqrt(vx) * std::sqrt(vy));
}

std::vector<SubjectResult> noisy_cohort(std::size_t n, double rel_noise, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> hr(55, 95), sd(20, 150), rm(15, 90), pn(0, 40);
  std::uniform_real_distribution<double> vlf(100, 1500), lf(200, 2500), hf(100, 2000);
  std::normal_distribution<double> noise(0.0, rel_noise);
  std::vector<SubjectResult> out;
  for (std::size_t i = 0; i < n; ++i) {
    const auto e = with_freq(indices(hr(rng), sd(rng), rm(rng), pn(rng)), vlf(rng), lf(rng), hf(rng));
    auto jiggle = [&](double v) { return v * (1.0 + noise(rng)); };
    const auto b = with_freq(indices(jiggle(e.time.mean_hr), jiggle(e.time.sdnn), jiggle(e.time.rmssd),
                                     jiggle(e.time.pnn50)),
                             jiggle(e.freq->vlf_power), jiggle(e.freq->lf_power), jiggle(e.freq->hf_power));
    out.push_back({"s" + std::to_string(100 + i), e, b});
  }
  return out;
}

}  // namespace

TEST_CASE("compare_indices on identical inputs", "[compare]") {
  const auto m = with_freq(indices(70, 50, 40, 12), 300, 800, 600);
  const auto d = compare_indices(m, m);
  CHECK(d.abs_diff.size() == 9);
  for (const auto& [k, v] : d.abs_diff) CHECK(v == 0.0);
  for (const auto& [k, v] : d.rel_diff) CHECK(v == 0.0);
}

TEST_CASE("compare_indices on the reported single-subject values", "[compare]") {
  const auto ecg = indices(74.924, 133.851, 39.197, 9.737);
  const auto bcg = indices(74.673, 132.568, 40.19, 9.756);
  const auto d = compare_indices(ecg, bcg);
  CHECK(d.abs_diff.at("sdnn_ms") == Approx(1.283).margin(1e-9));
  CHECK(*d.rel_diff.at("sdnn_ms") * 100.0 == Approx(0.96).margin(0.005));
  CHECK(*d.rel_diff.at("rmssd_ms") * 100.0 == Approx(2.53).margin(0.005));
  CHECK(d.abs_diff.at("pnn50_percent") == Approx(0.019).margin(1e-9));
  CHECK(d.abs_diff.at("mean_hr_bpm") == Approx(0.251).margin(1e-9));
  CHECK(d.signed_diff.at("rmssd_ms") == Approx(39.197 - 40.19).margin(1e-12));
}

TEST_CASE("relative difference is absent for a zero reference", "[compare]") {
  const auto d = compare_indices(indices(70, 0, 40, 0), indices(70, 5, 40, 1));
  CHECK_FALSE(d.rel_diff.at("sdnn_ms"));
  CHECK(d.abs_diff.at("sdnn_ms") == 5.0);
  CHECK_FALSE(d.rel_diff.at("pnn50_percent"));
  CHECK(d.rel_diff.at("rmssd_ms"));
}

TEST_CASE("mismatched index sets are a schema error", "[compare][errors]") {
  const auto time_only = indices(70, 50, 40, 10);
  const auto full = with_freq(time_only, 1, 2, 3);
  try {
    compare_indices(time_only, full);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::schema);
  }
  CHECK_THROWS_AS(compare_indices(full, time_only), Error);
}

TEST_CASE("correlate_cohort examples", "[compare]") {
  auto cohort = noisy_cohort(6, 0.0, 1);
  for (const auto& [k, r] : correlate_cohort(cohort)) {
    REQUIRE(r);
    CHECK(*r == Approx(1.0).epsilon(1e-12));
  }
  for (auto& s : cohort) {
    auto& t = s.bcg.time;
    t.mean_hr = 2 * s.ecg.time.mean_hr + 5;
    t.sdnn = 2 * s.ecg.time.sdnn + 5;
  }
  const auto r = correlate_cohort(cohort);
  CHECK(*r.at("mean_hr_bpm") == Approx(1.0).epsilon(1e-12));
  CHECK(*r.at("sdnn_ms") == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("correlate_cohort on a 2% noise cohort agrees with the covariance oracle", "[compare][oracle]") {
  const auto cohort = noisy_cohort(20, 0.02, 42);
  const auto r = correlate_cohort(cohort);
  for (const auto& [name, value] : r) {
    REQUIRE(value);
    std::vector<double> x, y;
    for (const auto& s : cohort) {
      x.push_back(to_index_map(s.ecg).at(name));
      y.push_back(to_index_map(s.bcg).at(name));
    }
    CHECK(*value == Approx(oracle_r(x, y)).epsilon(1e-12));
    CHECK(*value > 0.95);
    CHECK(*value <= 1.0);
  }
}

TEST_CASE("correlation is absent without spread", "[compare]") {
  std::vector<SubjectResult> cohort;
  for (int i = 0; i < 4; ++i) {
    cohort.push_back({"s" + std::to_string(i), indices(70, 50 + i, 40, 0), indices(71, 51 + i, 41 + i, 0)});
  }
  const auto r = correlate_cohort(cohort);
  CHECK_FALSE(r.at("mean_hr_bpm"));
  CHECK_FALSE(r.at("pnn50_percent"));
  CHECK(r.at("sdnn_ms"));
}

TEST_CASE("cohort size preconditions", "[compare][errors]") {
  const auto two = noisy_cohort(2, 0.02, 3);
  try {
    correlate_cohort(two);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::insufficient_cohort);
  }
  CHECK_NOTHROW(bland_altman(two));
  CHECK_THROWS_AS(bland_altman(noisy_cohort(1, 0.02, 3)), Error);
  const auto report = build_comparison(noisy_cohort(1, 0.02, 3));
  CHECK(report.per_subject.size() == 1);
  CHECK(report.cohort_pearson_r.empty());
  CHECK(report.bland_altman.empty());
}

TEST_CASE("bland_altman examples", "[compare]") {
  const auto equal = bland_altman_stats({1, 2, 3}, {1, 2, 3});
  CHECK(equal.bias == 0.0);
  CHECK(equal.lower == 0.0);
  CHECK(equal.upper == 0.0);

  const auto spread = bland_altman_stats({10, 10}, {8, 12});
  CHECK(spread.bias == 0.0);
  CHECK(spread.upper == Approx(1.96 * std::sqrt(8.0)).epsilon(1e-12));
  CHECK(spread.upper == Approx(5.544).margin(5e-4));
  CHECK(spread.lower == Approx(-5.544).margin(5e-4));

  const auto offset = bland_altman_stats({5, 6, 7, 8}, {4, 5, 6, 7});
  CHECK(offset.bias == Approx(1.0).epsilon(1e-15));
  CHECK(offset.lower == Approx(1.0).epsilon(1e-15));
  CHECK(offset.upper == Approx(1.0).epsilon(1e-15));
}

TEST_CASE("swapping ECG and BCG negates signed quantities", "[compare][invariant]") {
  auto cohort = noisy_cohort(10, 0.05, 9);
  auto swapped = cohort;
  for (auto& s : swapped) std::swap(s.ecg, s.bcg);
  const auto a = build_comparison(cohort);
  const auto b = build_comparison(swapped);
  for (const auto& [id, d] : a.per_subject) {
    for (const auto& [name, v] : d.signed_diff) {
      CHECK(b.per_subject.at(id).signed_diff.at(name) == -v);
      CHECK(b.per_subject.at(id).abs_diff.at(name) == d.abs_diff.at(name));
    }
  }
  for (const auto& [name, ba] : a.bland_altman) {
    CHECK(b.bland_altman.at(name).bias == Approx(-ba.bias).margin(1e-12));
    CHECK(b.bland_altman.at(name).upper == Approx(-ba.lower).margin(1e-9));
  }
  for (const auto& [name, r] : a.cohort_pearson_r) {
    CHECK(std::abs(*b.cohort_pearson_r.at(name)) == Approx(std::abs(*r)).epsilon(1e-12));
  }
}

TEST_CASE("duplicate subject ids are rejected", "[compare][errors]") {
  auto cohort = noisy_cohort(3, 0.02, 5);
  cohort[2].subject_id = cohort[0].subject_id;
  CHECK_THROWS_AS(build_comparison(cohort), Error);
}
