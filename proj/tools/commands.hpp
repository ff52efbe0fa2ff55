/*
 * Copyright 2026 The mtagg Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef MTAGG_TOOLS_COMMANDS_HPP_
#define MTAGG_TOOLS_COMMANDS_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace mtagg::cli {

struct SynthOptions {
  std::uint64_t seed = 0;
  std::filesystem::path out_dir;
  /// "poisson" (two Poisson tasks on intervals) or "surface" (2-D grid).
  std::string kind = "poisson";
};

struct TrainOptions {
  std::vector<std::filesystem::path> data;
  std::filesystem::path config;
  std::filesystem::path out;
  /// Defaults to <out>.trace.csv.
  std::optional<std::filesystem::path> trace;
  /// Overrides train.seed from the config.
  std::optional<std::uint64_t> seed;
};

struct PredictOptions {
  std::filesystem::path model;
  std::filesystem::path test;
  std::filesystem::path out;
  long task = 0;
};

struct EvalOptions {
  std::filesystem::path pred;
  std::filesystem::path truth;
};

/// Each command writes its files and a short report to `log`; errors are
/// thrown as exceptions whose message names the offending file or field.
void run_synth(const SynthOptions &opt, std::ostream &log);
void run_train(const TrainOptions &opt, std::ostream &log);
void run_predict(const PredictOptions &opt, std::ostream &log);
/// Prints `smse,<value>` and `snlp,<value>` lines to `out`.
void run_eval(const EvalOptions &opt, std::ostream &out);

} // namespace mtagg::cli

#endif // MTAGG_TOOLS_COMMANDS_HPP_
