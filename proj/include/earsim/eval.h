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

#ifndef EARSIM_EVAL_H_
#define EARSIM_EVAL_H_

#include <cstddef>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "earsim/compare.h"
#include "earsim/error.h"

namespace earsim {

struct RatedPair {
  std::filesystem::path reference_path;
  std::filesystem::path degraded_path;
  double human_score = 0;
};

// Pearson linear correlation. Throws kDegenerateInput for mismatched or
// short inputs or a constant sequence.
double Plcc(std::span<const double> xs, std::span<const double> ys);

// Spearman rank correlation. Without ties this is 1 - 6 sum(d^2) /
// (n (n^2 - 1)); with ties it is the Pearson correlation of average ranks.
// Throws kDegenerateInput when either sequence is all-tied.
double Srcc(std::span<const double> xs, std::span<const double> ys);

// Kendall tau-a: 2 / (n (n - 1)) * sum_{i<j} sgn((x_i - x_j)(y_i - y_j)).
// Throws kDegenerateInput for n < 2.
double Krcc(std::span<const double> xs, std::span<const double> ys);

// 1-based ranks, ties share the mean of the ranks they span.
std::vector<double> AverageRanks(std::span<const double> values);

// A coefficient or the reason it could not be computed.
struct Coefficient {
  std::optional<double> value;
  std::string error;
};

struct CorrelationReport {
  Coefficient plcc;
  Coefficient srcc;
  Coefficient krcc;
  size_t n = 0;
};

CorrelationReport Correlate(std::span<const double> xs,
                            std::span<const double> ys);

struct PairScore {
  RatedPair pair;
  std::optional<double> metric_score;
  std::optional<SimilarityResult> result;
  std::string error;
};

struct EvaluationReport {
  CorrelationReport correlations;
  std::vector<PairScore> pairs;  // manifest order
  size_t excluded = 0;
};

// CSV with header `reference,degraded,score`. Relative paths resolve against
// `base_dir`. Throws kManifestParse with the offending line number.
std::vector<RatedPair> ParseManifest(std::istream& in,
                                     const std::filesystem::path& base_dir);
std::vector<RatedPair> ReadManifest(const std::filesystem::path& path);

// Scores one pair; higher means more similar. Throws earsim::Error on
// failure, which excludes the pair.
using PairScorer = std::function<SimilarityResult(const RatedPair&)>;

// Loads both files and runs CompareChannels.
PairScorer DefaultScorer(const ComparisonConfig& config = {},
                         const SpectrogramConfig& spectrogram = {});

// Scores every pair on up to `jobs` threads, then correlates the
// normalized similarities with the human scores. Throws kEmptyManifest or
// kAllPairsFailed.
EvaluationReport EvaluateDataset(const std::vector<RatedPair>& manifest,
                                 const PairScorer& scorer, size_t jobs = 1);

}  // namespace earsim

#endif  // EARSIM_EVAL_H_
