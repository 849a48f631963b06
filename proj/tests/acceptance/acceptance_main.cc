// Copyright 2026 The Earsim Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any fails.

#include <sys/resource.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "earsim/cochlea.h"
#include "earsim/compare.h"
#include "earsim/eval.h"
#include "earsim/spectrogram.h"
#include "test_signals.h"

namespace earsim {
namespace {

namespace ts = earsim::testing;
using Clock = std::chrono::steady_clock;

int failures = 0;

void Report(const char* name, bool ok, const std::string& detail) {
  std::printf("%s  %-24s %s\n", ok ? "PASS" : "FAIL", name, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string Format(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), fmt, args...);
  return buf;
}

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

double PeakRssMib() {
  rusage usage{};
  getrusage(RUSAGE_SELF, &usage);
  return static_cast<double>(usage.ru_maxrss) / 1024.0;
}

void RuntimeEnvelope() {
  const AudioBuffer ref = ts::Mono48k(ts::SpeechLike(10.0, 77, 0.5));
  const AudioBuffer deg =
      ts::Mono48k(ts::AddNoiseAtSnr(ts::SpeechLike(10.0, 77, 0.5), 20, 78));
  const auto start = Clock::now();
  const SimilarityResult r = CompareChannels(ref, deg);
  const double elapsed = Seconds(start);
  const double peak = PeakRssMib();
  Report("runtime_envelope", elapsed <= 3.0 && peak <= 512.0,
         Format("10 s mono in %.3f s (limit 3), peak RSS %.1f MiB (limit 512), "
                "kernels %s, similarity %.6f",
                elapsed, peak, std::string(ActiveKernels().name).c_str(),
                r.per_channel_similarity[0]));
}

void IdentitySuite() {
  std::vector<std::pair<std::string, std::vector<float>>> signals;
  signals.emplace_back("tone 440 Hz", ts::Sine(440, 1.0, 0.5));
  signals.emplace_back("tone 3 kHz", ts::Sine(3000, 2.0, 0.2));
  signals.emplace_back("tone 80 Hz", ts::Sine(80, 3.0, 0.8));
  signals.emplace_back("white noise", ts::WhiteNoise(4 * 48000, 0.2, 1));
  signals.emplace_back("quiet noise", ts::WhiteNoise(5 * 48000, 0.001, 2));
  signals.emplace_back("chirp", ts::Chirp(50, 15000, 6.0));
  signals.emplace_back("chirp down", ts::Chirp(8000, 100, 7.0, 0.3));
  signals.emplace_back("speech-shaped noise", ts::SpeechShapedNoise(8.0, 3));
  signals.emplace_back("speech-like", ts::SpeechLike(9.0, 4, 0.7));
  signals.emplace_back("speech-shaped noise 10s", ts::SpeechShapedNoise(10.0, 5));
  const auto start = Clock::now();
  double worst = 0;
  std::string worst_name;
  for (const auto& [name, x] : signals) {
    const AudioBuffer a = ts::Mono48k(x);
    const SimilarityResult r = CompareChannels(a, a);
    const double err = std::max(std::abs(1.0 - r.per_channel_similarity[0]),
                                std::abs(r.aggregate_distance));
    if (err >= worst) {
      worst = err;
      worst_name = name;
    }
  }
  const double elapsed = Seconds(start);
  Report("identity_suite", worst <= 1e-6 && elapsed < 60.0,
         Format("10 signals 1-10 s, max |1 - sim|, |dist| = %.3g (%s), %.1f s "
                "total (limit 60)",
                worst, worst_name.c_str(), elapsed));
}

void MonotoneDegradation() {
  const std::vector<float> ref = ts::SpeechLike(3.0, 11, 1.0);
  const AudioBuffer ref_audio = ts::Mono48k(ref);
  auto similarity = [&](const std::vector<float>& deg) {
    return CompareChannels(ref_audio, ts::Mono48k(deg)).per_channel_similarity[0];
  };
  std::string detail = "noise";
  bool ok = true;
  double prev = 1.0;
  for (double snr : {40.0, 30.0, 20.0, 10.0}) {
    const double s = similarity(ts::AddNoiseAtSnr(ref, snr, 12));
    detail += Format(" %gdB=%.4f", snr, s);
    ok &= s < prev;
    prev = s;
  }
  detail += "; clip";
  prev = 1.0;
  for (double threshold : {0.9, 0.5, 0.25, 0.1}) {
    const double s = similarity(ts::HardClip(ref, threshold));
    detail += Format(" %g=%.4f", threshold, s);
    ok &= s < prev;
    prev = s;
  }
  Report("monotone_degradation", ok, detail);
}

using Vec = std::vector<double>;

long double OraclePearson(const Vec& x, const Vec& y) {
  long double mx = 0, my = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= x.size();
  my /= y.size();
  long double sxy = 0, sxx = 0, syy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

Vec OracleRanks(const Vec& v) {
  Vec r(v.size());
  for (size_t i = 0; i < v.size(); ++i) {
    double less = 0, equal = 0;
    for (double w : v) {
      less += w < v[i];
      equal += w == v[i];
    }
    r[i] = 1 + less + (equal - 1) / 2;
  }
  return r;
}

long double OracleKendall(const Vec& x, const Vec& y) {
  long double s = 0;
  const size_t n = x.size();
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i + 1; j < n; ++j) {
      const double p = (x[i] - x[j]) * (y[i] - y[j]);
      s += (p > 0) - (p < 0);
    }
  }
  return 2 * s / (n * (n - 1.0L));
}

void CorrelationOracle() {
  std::mt19937 rng(2024);
  std::uniform_int_distribution<size_t> len(2, 20);
  std::uniform_int_distribution<int> coarse(0, 4);
  std::normal_distribution<double> fine(0, 1);
  double worst = 0;
  size_t compared = 0;
  size_t with_ties = 0;
  bool degenerate_ok = true;
  for (int trial = 0; trial < 1000; ++trial) {
    const size_t n = len(rng);
    Vec x(n), y(n);
    const bool ties = trial % 2 == 0;
    for (size_t i = 0; i < n; ++i) {
      x[i] = ties ? coarse(rng) : fine(rng);
      y[i] = ties ? coarse(rng) : fine(rng);
    }
    Vec sorted = x;
    std::sort(sorted.begin(), sorted.end());
    with_ties += std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end();
    auto constant = [](const Vec& v) {
      return std::all_of(v.begin(), v.end(), [&](double a) { return a == v[0]; });
    };
    worst = std::max(worst, std::abs(Krcc(x, y) - (double)OracleKendall(x, y)));
    if (constant(x) || constant(y)) {
      try {
        Plcc(x, y);
        degenerate_ok = false;
      } catch (const Error& e) {
        degenerate_ok &= e.code() == ErrorCode::kDegenerateInput;
      }
      continue;
    }
    worst = std::max(worst, std::abs(Plcc(x, y) - (double)OraclePearson(x, y)));
    worst = std::max(worst, std::abs(Srcc(x, y) - (double)OraclePearson(
                                                      OracleRanks(x), OracleRanks(y))));
    ++compared;
  }
  const Vec hx{1, 2, 3, 4};
  const Vec hy{1, 3, 2, 4};
  const double r = Plcc(hx, hy);
  const double rho = Srcc(hx, hy);
  const double tau = Krcc(hx, hy);
  // Hand evaluation: r = 4 / 5, rho = 1 - 6 * 2 / 60, tau = (5 - 1) / 6.
  const bool hand = std::abs(r - 0.8) <= 1e-15 && std::abs(rho - 0.8) <= 1e-15 &&
                    std::abs(tau - 2.0 / 3.0) <= 1e-15;
  Report("correlation_oracle", worst <= 1e-12 && hand && degenerate_ok,
         Format("1000 vectors (%zu with x ties, %zu fully compared), max dev "
                "%.3g; hand example r=%.15g rho=%.15g tau=%.15g",
                with_ties, compared, worst, r, rho, tau));
}

PerceptualSpectrogram RandomSpec(size_t frames, size_t bins, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-90, 10);
  PerceptualSpectrogram s;
  s.frames.Resize(frames, bins);
  for (double& v : s.frames.data()) v = u(rng);
  return s;
}

long double Distance(const PerceptualSpectrogram& a, size_t i,
                     const PerceptualSpectrogram& b, size_t j) {
  long double sum = 0;
  for (size_t k = 0; k < a.num_bins(); ++k) {
    const long double d = (long double)a.frames(i, k) - b.frames(j, k);
    sum += d * d;
  }
  return std::sqrt(sum);
}

void DtwOracle() {
  std::mt19937 rng(99);
  std::uniform_int_distribution<size_t> len8(1, 8);
  double worst_rel = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const PerceptualSpectrogram a = RandomSpec(len8(rng), 16, rng);
    const PerceptualSpectrogram b = RandomSpec(len8(rng), 16, rng);
    const size_t n = a.num_frames(), m = b.num_frames();
    const long double inf = std::numeric_limits<long double>::infinity();
    std::vector<std::vector<long double>> dp(n + 1, std::vector<long double>(m + 1, inf));
    dp[0][0] = 0;
    for (size_t i = 1; i <= n; ++i) {
      for (size_t j = 1; j <= m; ++j) {
        dp[i][j] = Distance(a, i - 1, b, j - 1) +
                   std::min({dp[i - 1][j], dp[i][j - 1], dp[i - 1][j - 1]});
      }
    }
    const WarpPath path = DtwAlign(a, b, 1.0);
    ValidatePath(path, n, m);
    const double got = PathCost(a, b, path, 1.0);
    worst_rel = std::max(worst_rel, std::abs(got - (double)dp[n][m]) / (double)dp[n][m]);
  }

  std::uniform_int_distribution<size_t> len5(1, 5);
  size_t paths_checked = 0;
  double worst_excess = -std::numeric_limits<double>::infinity();
  for (int trial = 0; trial < 200; ++trial) {
    const PerceptualSpectrogram a = RandomSpec(len5(rng), 8, rng);
    const PerceptualSpectrogram b = RandomSpec(len5(rng), 8, rng);
    const size_t n = a.num_frames(), m = b.num_frames();
    const WarpPath path = DtwAlign(a, b, 0.5);
    ValidatePath(path, n, m);
    const long double got = PathCost(a, b, path, 0.5);
    std::function<void(size_t, size_t, long double)> walk =
        [&](size_t i, size_t j, long double cost) {
          cost += std::sqrt(Distance(a, i, b, j));
          if (i == n - 1 && j == m - 1) {
            ++paths_checked;
            // Allow only rounding: returned cost must not exceed any path.
            worst_excess = std::max(worst_excess, (double)((got - cost) / cost));
            return;
          }
          if (i + 1 < n) walk(i + 1, j, cost);
          if (j + 1 < m) walk(i, j + 1, cost);
          if (i + 1 < n && j + 1 < m) walk(i + 1, j + 1, cost);
        };
    walk(0, 0, 0);
  }
  Report("dtw_oracle", worst_rel <= 1e-12 && worst_excess <= 1e-12,
         Format("exp 1: 500 instances, max rel dev %.3g; exp 0.5: %zu paths "
                "enumerated, max (returned - path) / path = %.3g",
                worst_rel, paths_checked, worst_excess));
}

void FilterbankSelectivity() {
  const FilterbankConfig config = FilterbankConfig::Create();
  bool ok = true;
  std::string detail;
  for (double hz : {125.0, 500.0, 1000.0, 4000.0, 8000.0}) {
    const ChannelEnergies e =
        GammatoneAnalyze(ts::Mono48k(ts::Sine(hz, 0.5, 0.5)), config);
    std::vector<double> mean(config.n_bins, 0.0);
    for (size_t t = 4800; t < e.energies.rows(); ++t) {
      for (size_t b = 0; b < config.n_bins; ++b) mean[b] += e.energies(t, b);
    }
    const size_t k = static_cast<size_t>(
        std::max_element(mean.begin(), mean.end()) - mean.begin());
    const double center = config.centers[k];
    // Local Hz width of one ERB grid step around the tone.
    const double e_tone = HzToErbNumber(hz);
    const double step_erb = HzToErbNumber(config.centers[1]) - HzToErbNumber(config.centers[0]);
    const double step_hz = ErbNumberToHz(e_tone + step_erb / 2) - ErbNumberToHz(e_tone - step_erb / 2);
    const bool within = std::abs(center - hz) <= step_hz;
    ok &= within;
    detail += Format("%g->bin %zu (%.1f Hz, step %.1f)%s ", hz, k, center, step_hz,
                     within ? "" : " OUT");
  }
  Report("filterbank_selectivity", ok, detail);
}

void CoefficientFormula() {
  const double c = IntegrationCoefficient(100.0);
  Report("coefficient_formula", std::abs(c - 0.971127) <= 1e-5,
         Format("C(100) = %.10f (target 0.971127 +- 1e-5)", c));
}

void Normalization() {
  std::mt19937 rng(5);
  double worst_gap = 0;
  double worst_diff = 0;
  for (int trial = 0; trial < 200; ++trial) {
    PerceptualSpectrogram ref = RandomSpec(20, 32, rng);
    PerceptualSpectrogram deg = RandomSpec(25, 32, rng);
    const double offset = std::uniform_real_distribution<double>(-60, 60)(rng);
    for (double& v : deg.frames.data()) v += offset;
    const double g = ref.Max() - deg.Max();
    const auto [r, d] = NormalizePair(ref, deg, 0.82);
    worst_gap = std::max(worst_gap, std::abs((r.Max() - d.Max()) - 0.18 * g));
    for (const auto& [o, v] : {std::pair{&ref, &r}, std::pair{&deg, &d}}) {
      const auto& od = o->frames.data();
      const auto& vd = v->frames.data();
      for (size_t k = 1; k < od.size(); ++k) {
        worst_diff = std::max(worst_diff, std::abs((vd[k] - vd[k - 1]) - (od[k] - od[k - 1])));
      }
    }
  }
  Report("normalization", worst_gap <= 1e-9 && worst_diff <= 1e-12,
         Format("200 pairs, max |gap - 0.18 g| = %.3g, max diff change = %.3g",
                worst_gap, worst_diff));
}

}  // namespace
}  // namespace earsim

int main() {
  using namespace earsim;
  const std::pair<const char*, void (*)()> checks[] = {
      {"runtime_envelope", RuntimeEnvelope},
      {"identity_suite", IdentitySuite},
      {"monotone_degradation", MonotoneDegradation},
      {"correlation_oracle", CorrelationOracle},
      {"dtw_oracle", DtwOracle},
      {"filterbank_selectivity", FilterbankSelectivity},
      {"coefficient_formula", CoefficientFormula},
      {"normalization", Normalization},
  };
  for (const auto& [name, check] : checks) {
    try {
      check();
    } catch (const std::exception& e) {
      Report(name, false, std::string("threw: ") + e.what());
    }
  }
  std::printf("%d failure(s)\n", failures);
  return failures == 0 ? 0 : 1;
}
