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

#include "earsim/eval.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <istream>
#include <numeric>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "earsim/audio.h"
#include "earsim/error.h"

namespace earsim {

namespace {

void CheckPaired(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) {
    throw Error(ErrorCode::kDegenerateInput,
                "score sequences differ in length");
  }
  if (xs.size() < 2) {
    throw Error(ErrorCode::kDegenerateInput, "need at least two scores");
  }
}

bool HasTies(std::span<const double> values) {
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  return std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end();
}

}  // namespace

double Plcc(std::span<const double> xs, std::span<const double> ys) {
  CheckPaired(xs, ys);
  const double n = static_cast<double>(xs.size());
  const double mean_x = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double mean_y = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mean_x;
    const double dy = ys[i] - mean_y;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw Error(ErrorCode::kDegenerateInput,
                "PLCC undefined for a constant sequence");
  }
  return std::clamp(sxy / (std::sqrt(sxx) * std::sqrt(syy)), -1.0, 1.0);
}

std::vector<double> AverageRanks(std::span<const double> values) {
  std::vector<size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return values[a] < values[b];
  });
  std::vector<double> ranks(values.size());
  size_t i = 0;
  while (i < order.size()) {
    size_t j = i + 1;
    while (j < order.size() && values[order[j]] == values[order[i]]) ++j;
    // Positions i..j-1 hold equal values; ranks are 1-based.
    const double rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (size_t k = i; k < j; ++k) ranks[order[k]] = rank;
    i = j;
  }
  return ranks;
}

double Srcc(std::span<const double> xs, std::span<const double> ys) {
  CheckPaired(xs, ys);
  const std::vector<double> rx = AverageRanks(xs);
  const std::vector<double> ry = AverageRanks(ys);
  if (HasTies(xs) || HasTies(ys)) {
    try {
      return Plcc(rx, ry);
    } catch (const Error&) {
      throw Error(ErrorCode::kDegenerateInput,
                  "SRCC undefined when every value is tied");
    }
  }
  double sum_d2 = 0.0;
  for (size_t i = 0; i < rx.size(); ++i) {
    const double d = rx[i] - ry[i];
    sum_d2 += d * d;
  }
  const double n = static_cast<double>(xs.size());
  return 1.0 - 6.0 * sum_d2 / (n * (n * n - 1.0));
}

double Krcc(std::span<const double> xs, std::span<const double> ys) {
  CheckPaired(xs, ys);
  const size_t n = xs.size();
  long long sum = 0;
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i + 1; j < n; ++j) {
      const double p = (xs[i] - xs[j]) * (ys[i] - ys[j]);
      sum += (p > 0) - (p < 0);
    }
  }
  return 2.0 * static_cast<double>(sum) /
         (static_cast<double>(n) * static_cast<double>(n - 1));
}

CorrelationReport Correlate(std::span<const double> xs,
                            std::span<const double> ys) {
  CorrelationReport report;
  report.n = xs.size();
  auto fill = [&](Coefficient& c, double (*fn)(std::span<const double>,
                                                std::span<const double>)) {
    try {
      c.value = fn(xs, ys);
    } catch (const Error& e) {
      c.error = std::string(ErrorCodeName(e.code())) + ": " + e.what();
    }
  };
  fill(report.plcc, Plcc);
  fill(report.srcc, Srcc);
  fill(report.krcc, Krcc);
  return report;
}

namespace {

std::string Trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

// RFC 4180 style: quoted fields may contain commas and doubled quotes.
std::vector<std::string> SplitCsvLine(const std::string& line, size_t line_no) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(Trim(field));
      field.clear();
    } else {
      field += c;
    }
  }
  if (quoted) {
    throw Error(ErrorCode::kManifestParse,
                "line " + std::to_string(line_no) + ": unterminated quote");
  }
  fields.push_back(Trim(field));
  return fields;
}

}  // namespace

std::vector<RatedPair> ParseManifest(std::istream& in,
                                     const std::filesystem::path& base_dir) {
  std::vector<RatedPair> pairs;
  std::string line;
  size_t line_no = 0;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
    if (Trim(line).empty()) continue;
    const std::vector<std::string> fields = SplitCsvLine(line, line_no);
    auto fail = [&](const std::string& what) {
      throw Error(ErrorCode::kManifestParse,
                  "line " + std::to_string(line_no) + ": " + what);
    };
    if (!saw_header) {
      if (fields != std::vector<std::string>{"reference", "degraded", "score"}) {
        fail("expected header 'reference,degraded,score'");
      }
      saw_header = true;
      continue;
    }
    if (fields.size() != 3) fail("expected 3 fields");
    if (fields[0].empty() || fields[1].empty()) fail("empty path");
    char* end = nullptr;
    const double score = std::strtod(fields[2].c_str(), &end);
    if (fields[2].empty() || *end != '\0' || !std::isfinite(score)) {
      fail("score '" + fields[2] + "' is not a finite number");
    }
    auto resolve = [&](const std::string& p) {
      std::filesystem::path path(p);
      return path.is_absolute() ? path : base_dir / path;
    };
    pairs.push_back({resolve(fields[0]), resolve(fields[1]), score});
  }
  if (!saw_header) {
    throw Error(ErrorCode::kEmptyManifest, "empty manifest");
  }
  return pairs;
}

std::vector<RatedPair> ReadManifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::kFileNotFound, "cannot open " + path.string());
  }
  return ParseManifest(in, path.parent_path());
}

PairScorer DefaultScorer(const ComparisonConfig& config,
                         const SpectrogramConfig& spectrogram) {
  return [config, spectrogram](const RatedPair& pair) {
    const AudioBuffer ref = LoadWav(pair.reference_path);
    const AudioBuffer deg = LoadWav(pair.degraded_path);
    return CompareChannels(ref, deg, config, spectrogram);
  };
}

EvaluationReport EvaluateDataset(const std::vector<RatedPair>& manifest,
                                 const PairScorer& scorer, size_t jobs) {
  if (manifest.empty()) {
    throw Error(ErrorCode::kEmptyManifest, "empty manifest");
  }
  EvaluationReport report;
  report.pairs.resize(manifest.size());
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i = next++; i < manifest.size(); i = next++) {
      PairScore& out = report.pairs[i];
      out.pair = manifest[i];
      try {
        out.result = scorer(manifest[i]);
        out.metric_score = out.result->NormalizedSimilarity();
      } catch (const Error& e) {
        out.error = std::string(ErrorCodeName(e.code())) + ": " + e.what();
      } catch (const std::exception& e) {
        out.error = e.what();
      }
    }
  };
  const size_t threads = std::clamp<size_t>(jobs, 1, manifest.size());
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  std::vector<double> xs;
  std::vector<double> ys;
  for (const PairScore& p : report.pairs) {
    if (p.metric_score) {
      xs.push_back(*p.metric_score);
      ys.push_back(p.pair.human_score);
    } else {
      ++report.excluded;
    }
  }
  if (xs.empty()) {
    throw Error(ErrorCode::kAllPairsFailed,
                "every pair failed: " + report.pairs.front().error);
  }
  report.correlations = Correlate(xs, ys);
  return report;
}

}  // namespace earsim
