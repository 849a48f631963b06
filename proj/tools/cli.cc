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

#include "cli.h"

#include <sys/resource.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "earsim/audio.h"
#include "earsim/compare.h"
#include "earsim/error.h"
#include "earsim/eval.h"
#include "earsim/spectrogram.h"
#include "json.hpp"

namespace earsim {

namespace {

using nlohmann::json;

std::string Fixed(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

struct Overrides {
  std::optional<double> exponent;
  std::optional<double> normalization;
  std::string nsim_window;
  std::string format = "text";
};

void AddOverrides(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--exponent", o.exponent, "DTW cost exponent in (0, 1]");
  cmd->add_option("--normalization", o.normalization,
                  "fraction of the loudness-maximum gap removed, in [0, 1]");
  cmd->add_option("--nsim-window", o.nsim_window,
                  "NSIM window as FRAMESxBINS or a single extent");
  cmd->add_option("--format", o.format, "text or structured")
      ->check(CLI::IsMember({"text", "structured"}));
}

ComparisonConfig BuildConfig(const Overrides& o) {
  ComparisonConfig config;
  if (o.exponent) config.dtw_cost_exponent = *o.exponent;
  if (o.normalization) config.normalization_fraction = *o.normalization;
  if (!o.nsim_window.empty()) {
    const size_t x = o.nsim_window.find('x');
    try {
      size_t used = 0;
      const std::string first = o.nsim_window.substr(0, x);
      const long frames = std::stol(first, &used);
      if (used != first.size()) throw std::invalid_argument("trailing");
      long bins = frames;
      if (x != std::string::npos) {
        const std::string second = o.nsim_window.substr(x + 1);
        bins = std::stol(second, &used);
        if (used != second.size()) throw std::invalid_argument("trailing");
      }
      if (frames < 1 || bins < 1) throw std::invalid_argument("extent");
      config.nsim_window_frames = static_cast<size_t>(frames);
      config.nsim_window_bins = static_cast<size_t>(bins);
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::kInvalidInput,
                  "--nsim-window must look like 8x8, got '" + o.nsim_window +
                      "'");
    }
  }
  config.Validate();
  return config;
}

json ResultJson(const SimilarityResult& r) {
  return json{{"per_channel_similarity", r.per_channel_similarity},
              {"per_channel_distance", r.per_channel_distance},
              {"aggregate_distance", r.aggregate_distance},
              {"mos", r.mos}};
}

AudioBuffer LoadForPipeline(const std::string& path) {
  return Resample(LoadWav(path), kPipelineSampleRate);
}

int RunCompare(const std::string& ref_path, const std::string& deg_path,
               const Overrides& o, std::ostream& out) {
  const ComparisonConfig config = BuildConfig(o);
  const AudioBuffer ref = LoadForPipeline(ref_path);
  const AudioBuffer deg = LoadForPipeline(deg_path);
  const SimilarityResult r = CompareChannels(ref, deg, config);
  if (o.format == "structured") {
    out << ResultJson(r).dump() << '\n';
    return 0;
  }
  for (size_t c = 0; c < r.per_channel_similarity.size(); ++c) {
    out << "channel " << c << " similarity "
        << Fixed(r.per_channel_similarity[c]) << " distance "
        << Fixed(r.per_channel_distance[c]) << '\n';
  }
  out << "aggregate_distance " << Fixed(r.aggregate_distance) << '\n';
  out << "mos " << Fixed(r.mos) << '\n';
  return 0;
}

json CoefficientJson(const Coefficient& c) {
  return c.value ? json(*c.value) : json(nullptr);
}

void WritePerPair(const std::string& path, const EvaluationReport& report) {
  std::ofstream f(path);
  if (!f) throw Error(ErrorCode::kIoError, "cannot write " + path);
  f << "reference,degraded,human_score,metric_score,mos,error\n";
  for (const PairScore& p : report.pairs) {
    f << '"' << p.pair.reference_path.string() << "\",\""
      << p.pair.degraded_path.string() << "\"," << p.pair.human_score << ',';
    if (p.metric_score) {
      f << Fixed(*p.metric_score) << ',' << Fixed(p.result->mos) << ",";
    } else {
      f << ",,\"" << p.error << '"';
    }
    f << '\n';
  }
  if (!f) throw Error(ErrorCode::kIoError, "cannot write " + path);
}

int RunEvaluate(const std::string& manifest_path, const Overrides& o,
                size_t jobs, const std::string& per_pair_out,
                std::ostream& out, std::ostream& err) {
  const ComparisonConfig config = BuildConfig(o);
  const std::vector<RatedPair> manifest = ReadManifest(manifest_path);
  const EvaluationReport report =
      EvaluateDataset(manifest, DefaultScorer(config), jobs);
  for (const PairScore& p : report.pairs) {
    if (!p.metric_score) {
      err << "excluded " << p.pair.degraded_path.string() << ": " << p.error
          << '\n';
    }
  }
  if (!per_pair_out.empty()) WritePerPair(per_pair_out, report);

  const CorrelationReport& c = report.correlations;
  if (o.format == "structured") {
    json j{{"n", c.n},
           {"excluded", report.excluded},
           {"plcc", CoefficientJson(c.plcc)},
           {"srcc", CoefficientJson(c.srcc)},
           {"krcc", CoefficientJson(c.krcc)}};
    for (const auto& [name, coef] :
         {std::pair{"plcc", &c.plcc}, {"srcc", &c.srcc}, {"krcc", &c.krcc}}) {
      if (!coef->value) j[std::string(name) + "_error"] = coef->error;
    }
    out << j.dump() << '\n';
    return 0;
  }
  auto row = [&](const char* name, const Coefficient& coef) {
    out << name << "  "
        << (coef.value ? Fixed(*coef.value) : "undefined (" + coef.error + ")")
        << '\n';
  };
  out << "n         " << c.n << '\n';
  out << "excluded  " << report.excluded << '\n';
  row("PLCC    ", c.plcc);
  row("SRCC    ", c.srcc);
  row("KRCC    ", c.krcc);
  return 0;
}

int RunSpectrogram(const std::string& in_path, const std::string& out_path,
                   bool csv, size_t channel) {
  const AudioBuffer audio = LoadForPipeline(in_path);
  if (channel >= audio.num_channels()) {
    throw Error(ErrorCode::kInvalidInput,
                "channel " + std::to_string(channel) + " out of range");
  }
  const PerceptualSpectrogram spec =
      ComputeSpectrogram(audio.ExtractChannel(channel));
  if (csv) {
    std::ofstream f(out_path);
    WriteSpectrogramCsv(f, spec);
    if (!f) throw Error(ErrorCode::kIoError, "cannot write " + out_path);
  } else {
    WriteSpectrogramBinary(out_path, spec);
  }
  return 0;
}

double PeakMemoryMib() {
  rusage usage{};
  if (getrusage(RUSAGE_SELF, &usage) != 0) return -1;
  return static_cast<double>(usage.ru_maxrss) / 1024.0;  // KiB on Linux
}

int RunBench(const std::string& path, int repetitions, const Overrides& o,
             std::ostream& out) {
  if (repetitions < 1) {
    throw Error(ErrorCode::kInvalidInput, "repetitions must be at least 1");
  }
  const ComparisonConfig config = BuildConfig(o);
  const AudioBuffer audio = LoadForPipeline(path);
  std::vector<double> seconds;
  for (int i = 0; i < repetitions; ++i) {
    const auto start = std::chrono::steady_clock::now();
    CompareChannels(audio, audio, config);
    const std::chrono::duration<double> elapsed =
        std::chrono::steady_clock::now() - start;
    seconds.push_back(elapsed.count());
  }
  double mean = 0;
  for (double s : seconds) mean += s;
  mean /= seconds.size();
  double var = 0;
  for (double s : seconds) var += (s - mean) * (s - mean);
  const double stddev =
      seconds.size() > 1 ? std::sqrt(var / (seconds.size() - 1)) : 0.0;
  const double peak = PeakMemoryMib();
  if (o.format == "structured") {
    json j{{"audio_seconds", audio.duration_seconds()},
           {"repetitions", repetitions},
           {"kernels", std::string(ActiveKernels().name)},
           {"mean_seconds", mean},
           {"stddev_seconds", stddev}};
    j["peak_memory_mib"] = peak >= 0 ? json(peak) : json(nullptr);
    out << j.dump() << '\n';
    return 0;
  }
  out << "audio     " << Fixed(audio.duration_seconds()) << " s, "
      << audio.num_channels() << " channel(s)\n";
  out << "kernels   " << ActiveKernels().name << '\n';
  out << "runtime   " << Fixed(mean) << " s +- " << Fixed(stddev) << " s over "
      << repetitions << " repetition(s)\n";
  if (peak >= 0) out << "peak_mem  " << Fixed(peak) << " MiB\n";
  return 0;
}

}  // namespace

int RunCli(int argc, const char* const* argv, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"Full-reference perceptual audio similarity"};
  app.require_subcommand(1);

  Overrides compare_o;
  std::string ref_path;
  std::string deg_path;
  CLI::App* compare = app.add_subcommand("compare", "compare two WAV files");
  compare->add_option("reference", ref_path)->required();
  compare->add_option("degraded", deg_path)->required();
  AddOverrides(compare, compare_o);

  Overrides eval_o;
  std::string manifest_path;
  size_t jobs = 1;
  std::string per_pair_out;
  CLI::App* evaluate =
      app.add_subcommand("evaluate", "correlate scores with a rated manifest");
  evaluate->add_option("manifest", manifest_path)->required();
  evaluate->add_option("--jobs", jobs, "parallel pair evaluations")
      ->check(CLI::PositiveNumber);
  evaluate->add_option("--per-pair-out", per_pair_out,
                       "write per-pair scores as CSV");
  AddOverrides(evaluate, eval_o);

  std::string spec_in;
  std::string spec_out;
  bool csv = false;
  size_t channel = 0;
  CLI::App* spectrogram =
      app.add_subcommand("spectrogram", "dump a perceptual spectrogram");
  spectrogram->add_option("input", spec_in)->required();
  spectrogram->add_option("output", spec_out)->required();
  spectrogram->add_flag("--csv", csv, "write CSV instead of binary");
  spectrogram->add_option("--channel", channel, "channel to analyze");

  Overrides bench_o;
  std::string bench_path;
  int repetitions = 10;
  CLI::App* bench = app.add_subcommand("bench", "time the full comparison");
  bench->add_option("input", bench_path)->required();
  bench->add_option("--repetitions", repetitions);
  AddOverrides(bench, bench_o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : static_cast<int>(ErrorCode::kUsage);
  }

  try {
    if (compare->parsed()) return RunCompare(ref_path, deg_path, compare_o, out);
    if (evaluate->parsed()) {
      return RunEvaluate(manifest_path, eval_o, jobs, per_pair_out, out, err);
    }
    if (spectrogram->parsed()) {
      return RunSpectrogram(spec_in, spec_out, csv, channel);
    }
    if (bench->parsed()) return RunBench(bench_path, repetitions, bench_o, out);
  } catch (const Error& e) {
    err << "error: " << ErrorCodeName(e.code()) << ": " << e.what() << '\n';
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return static_cast<int>(ErrorCode::kUsage);
}

}  // namespace earsim
