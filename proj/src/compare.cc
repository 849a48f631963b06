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

#include "earsim/compare.h"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "earsim/error.h"

namespace earsim {

void ComparisonConfig::Validate() const {
  auto fail = [](const std::string& what) {
    throw Error(ErrorCode::kInvalidInput, "comparison config: " + what);
  };
  if (!(normalization_fraction >= 0 && normalization_fraction <= 1)) {
    fail("normalization fraction must lie in [0, 1]");
  }
  if (!(dtw_cost_exponent > 0 && dtw_cost_exponent <= 1)) {
    fail("DTW cost exponent must lie in (0, 1]");
  }
  if (nsim_window_frames < 1 || nsim_window_bins < 1) {
    fail("NSIM window extents must be at least 1");
  }
  if (!(nsim_c1 > 0) || !(nsim_c2 > 0)) fail("NSIM constants must be > 0");
  if (!(nsim_exponent > 0)) fail("NSIM exponent must be > 0");
  if (!(mos_steepness > 0)) fail("MOS steepness must be > 0");
}

double SimilarityResult::NormalizedSimilarity() const {
  if (per_channel_distance.empty()) return 1.0;
  const double n = static_cast<double>(per_channel_distance.size());
  return std::clamp(1.0 - aggregate_distance / std::sqrt(n), 0.0, 1.0);
}

std::pair<PerceptualSpectrogram, PerceptualSpectrogram> NormalizePair(
    const PerceptualSpectrogram& ref, const PerceptualSpectrogram& deg,
    double fraction) {
  if (ref.num_bins() != deg.num_bins()) {
    throw Error(ErrorCode::kBinMismatch,
                "spectrograms have " + std::to_string(ref.num_bins()) +
                    " and " + std::to_string(deg.num_bins()) + " bins");
  }
  std::pair<PerceptualSpectrogram, PerceptualSpectrogram> out{ref, deg};
  if (ref.frames.empty() || deg.frames.empty()) return out;
  const double gap = ref.Max() - deg.Max();
  const double shift = fraction * gap / 2.0;
  if (shift == 0.0) return out;
  for (double& v : out.first.frames.data()) v -= shift;
  for (double& v : out.second.frames.data()) v += shift;
  return out;
}

namespace {

double CellCost(const Kernels& kernels, const PerceptualSpectrogram& ref,
                size_t i, const PerceptualSpectrogram& deg, size_t j,
                double exponent) {
  const double sq = kernels.squared_distance(
      ref.frames.row(i).data(), deg.frames.row(j).data(), ref.num_bins());
  const double d = std::sqrt(sq);
  return exponent == 1.0 ? d : std::pow(d, exponent);
}

}  // namespace

WarpPath DtwAlign(const PerceptualSpectrogram& ref,
                  const PerceptualSpectrogram& deg, double exponent,
                  const Kernels& kernels) {
  if (ref.frames.empty() || deg.frames.empty()) {
    throw Error(ErrorCode::kEmptyInput, "DTW needs non-empty spectrograms");
  }
  if (ref.num_bins() != deg.num_bins()) {
    throw Error(ErrorCode::kBinMismatch, "DTW inputs differ in bin count");
  }
  if (!(exponent > 0 && exponent <= 1)) {
    throw Error(ErrorCode::kInvalidInput, "DTW exponent must lie in (0, 1]");
  }
  const size_t n = ref.num_frames();
  const size_t m = deg.num_frames();
  Matrix<double> acc(n, m);
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < m; ++j) {
      const double cost = CellCost(kernels, ref, i, deg, j, exponent);
      double best;
      if (i == 0 && j == 0) {
        best = 0.0;
      } else if (i == 0) {
        best = acc(0, j - 1);
      } else if (j == 0) {
        best = acc(i - 1, 0);
      } else {
        best = std::min({acc(i - 1, j - 1), acc(i - 1, j), acc(i, j - 1)});
      }
      acc(i, j) = best + cost;
    }
  }

  WarpPath path;
  size_t i = n - 1;
  size_t j = m - 1;
  path.pairs.emplace_back(i, j);
  while (i > 0 || j > 0) {
    if (i == 0) {
      --j;
    } else if (j == 0) {
      --i;
    } else {
      const double diag = acc(i - 1, j - 1);
      const double up = acc(i - 1, j);
      const double left = acc(i, j - 1);
      if (diag <= up && diag <= left) {
        --i;
        --j;
      } else if (up <= left) {
        --i;
      } else {
        --j;
      }
    }
    path.pairs.emplace_back(i, j);
  }
  std::reverse(path.pairs.begin(), path.pairs.end());
  return path;
}

double PathCost(const PerceptualSpectrogram& ref,
                const PerceptualSpectrogram& deg, const WarpPath& path,
                double exponent) {
  double total = 0.0;
  for (const auto& [i, j] : path.pairs) {
    total += CellCost(ScalarKernels(), ref, i, deg, j, exponent);
  }
  return total;
}

void ValidatePath(const WarpPath& path, size_t n_ref, size_t n_deg) {
  auto fail = [](const std::string& what) {
    throw Error(ErrorCode::kInvalidPath, "warp path: " + what);
  };
  if (path.pairs.empty() || n_ref == 0 || n_deg == 0) fail("empty");
  if (path.pairs.front() != std::pair<size_t, size_t>{0, 0}) {
    fail("must start at (0, 0)");
  }
  if (path.pairs.back() != std::pair<size_t, size_t>{n_ref - 1, n_deg - 1}) {
    fail("must end at the last frame of both inputs");
  }
  for (size_t k = 1; k < path.pairs.size(); ++k) {
    const auto [pi, pj] = path.pairs[k - 1];
    const auto [ci, cj] = path.pairs[k];
    const bool ok = (ci == pi || ci == pi + 1) && (cj == pj || cj == pj + 1) &&
                    (ci != pi || cj != pj);
    if (!ok) fail("invalid step at index " + std::to_string(k));
  }
}

double Nsim(const PerceptualSpectrogram& ref, const PerceptualSpectrogram& deg,
            const WarpPath& path, const ComparisonConfig& config) {
  if (ref.num_bins() != deg.num_bins()) {
    throw Error(ErrorCode::kBinMismatch, "NSIM inputs differ in bin count");
  }
  ValidatePath(path, ref.num_frames(), deg.num_frames());
  const size_t len = path.size();
  const size_t bins = ref.num_bins();
  if (bins == 0) return 1.0;
  const size_t wt = std::min(config.nsim_window_frames, len);
  const size_t wf = std::min(config.nsim_window_bins, bins);
  const double count = static_cast<double>(wt * wf);

  // Rows of both spectrograms in path order.
  std::vector<const double*> rows_r(len);
  std::vector<const double*> rows_d(len);
  for (size_t k = 0; k < len; ++k) {
    rows_r[k] = ref.frames.row(path.pairs[k].first).data();
    rows_d[k] = deg.frames.row(path.pairs[k].second).data();
  }

  double total = 0.0;
  size_t windows = 0;
  for (size_t t0 = 0; t0 + wt <= len; ++t0) {
    for (size_t f0 = 0; f0 + wf <= bins; ++f0) {
      double sum_r = 0.0;
      double sum_d = 0.0;
      for (size_t t = t0; t < t0 + wt; ++t) {
        for (size_t f = f0; f < f0 + wf; ++f) {
          sum_r += rows_r[t][f];
          sum_d += rows_d[t][f];
        }
      }
      const double mu_r = sum_r / count;
      const double mu_d = sum_d / count;
      double var_r = 0.0;
      double var_d = 0.0;
      double cov = 0.0;
      for (size_t t = t0; t < t0 + wt; ++t) {
        for (size_t f = f0; f < f0 + wf; ++f) {
          const double a = rows_r[t][f] - mu_r;
          const double b = rows_d[t][f] - mu_d;
          var_r += a * a;
          var_d += b * b;
          cov += a * b;
        }
      }
      var_r /= count;
      var_d /= count;
      cov /= count;
      const double luminance = (2.0 * mu_r * mu_d + config.nsim_c1) /
                               (mu_r * mu_r + mu_d * mu_d + config.nsim_c1);
      const double structure =
          (cov + config.nsim_c2) / (std::sqrt(var_r * var_d) + config.nsim_c2);
      const double score = std::clamp(luminance * structure, 0.0, 1.0);
      total += config.nsim_exponent == 1.0
                   ? score
                   : std::pow(score, config.nsim_exponent);
      ++windows;
    }
  }
  return total / static_cast<double>(windows);
}

double MapToMos(double similarity, double steepness, double midpoint) {
  if (!(similarity >= 0 && similarity <= 1)) {
    throw Error(ErrorCode::kOutOfRange,
                "similarity must lie in [0, 1], got " +
                    std::to_string(similarity));
  }
  auto logistic = [&](double s) {
    return 1.0 / (1.0 + std::exp(-steepness * (s - midpoint)));
  };
  if (similarity == 1.0) return 5.0;
  if (similarity == 0.0) return 1.0;
  const double lo = logistic(0.0);
  const double hi = logistic(1.0);
  return 1.0 + 4.0 * (logistic(similarity) - lo) / (hi - lo);
}

SimilarityResult CompareSpectrograms(
    const std::vector<PerceptualSpectrogram>& ref,
    const std::vector<PerceptualSpectrogram>& deg,
    const ComparisonConfig& config, const Kernels& kernels) {
  config.Validate();
  if (ref.size() != deg.size()) {
    throw Error(ErrorCode::kChannelMismatch,
                "reference has " + std::to_string(ref.size()) +
                    " channels, degraded has " + std::to_string(deg.size()));
  }
  SimilarityResult result;
  double sum_sq = 0.0;
  for (size_t c = 0; c < ref.size(); ++c) {
    if (ref[c].frames.empty() || deg[c].frames.empty()) {
      throw Error(ErrorCode::kTooShort,
                  "input shorter than one spectrogram frame");
    }
    const auto [r, d] =
        NormalizePair(ref[c], deg[c], config.normalization_fraction);
    const WarpPath path = DtwAlign(r, d, config.dtw_cost_exponent, kernels);
    const double similarity = Nsim(r, d, path, config);
    const double distance = 1.0 - similarity;
    result.per_channel_similarity.push_back(similarity);
    result.per_channel_distance.push_back(distance);
    sum_sq += distance * distance;
  }
  result.aggregate_distance = std::sqrt(sum_sq);
  result.mos = MapToMos(result.NormalizedSimilarity(), config.mos_steepness,
                        config.mos_midpoint);
  return result;
}

SimilarityResult CompareChannels(const AudioBuffer& ref,
                                 const AudioBuffer& deg,
                                 const ComparisonConfig& config,
                                 const SpectrogramConfig& spectrogram,
                                 const Kernels& kernels) {
  config.Validate();
  if (ref.num_channels() != deg.num_channels()) {
    throw Error(ErrorCode::kChannelMismatch,
                "reference has " + std::to_string(ref.num_channels()) +
                    " channels, degraded has " +
                    std::to_string(deg.num_channels()));
  }
  if (ref.num_channels() == 0) {
    throw Error(ErrorCode::kEmptyInput, "no channels to compare");
  }
  const AudioBuffer ref48 = Resample(ref, kPipelineSampleRate);
  const AudioBuffer deg48 = Resample(deg, kPipelineSampleRate);
  std::vector<PerceptualSpectrogram> ref_specs;
  std::vector<PerceptualSpectrogram> deg_specs;
  for (size_t c = 0; c < ref48.num_channels(); ++c) {
    ref_specs.push_back(
        ComputeSpectrogram(ref48.ExtractChannel(c), spectrogram, kernels));
    deg_specs.push_back(
        ComputeSpectrogram(deg48.ExtractChannel(c), spectrogram, kernels));
  }
  return CompareSpectrograms(ref_specs, deg_specs, config, kernels);
}

}  // namespace earsim
