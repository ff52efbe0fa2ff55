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

#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"

int main(int argc, char **argv) {
  namespace cli = mtagg::cli;
  CLI::App app{"Multi-task Gaussian processes over aggregated observations"};
  app.require_subcommand(1);

  cli::SynthOptions synth;
  auto *sc = app.add_subcommand("synth", "Generate a synthetic experiment");
  sc->add_option("--seed", synth.seed, "Random seed");
  sc->add_option("--out-dir", synth.out_dir, "Output directory")->required();
  sc->add_option("--kind", synth.kind, "poisson or surface")
      ->check(CLI::IsMember({"poisson", "surface"}));

  cli::TrainOptions train;
  std::uint64_t train_seed = 0;
  auto *tc = app.add_subcommand("train", "Fit a model to task CSVs");
  tc->add_option("--data", train.data, "Task CSVs, in config task order")
      ->required()
      ->check(CLI::ExistingFile);
  tc->add_option("--config", train.config, "Experiment JSON")
      ->required()
      ->check(CLI::ExistingFile);
  tc->add_option("--out", train.out, "Checkpoint path")->required();
  tc->add_option("--trace", train.trace, "ELBO trace CSV (default <out>.trace.csv)");
  auto *seed_opt = tc->add_option("--seed", train_seed, "Overrides train.seed");

  cli::PredictOptions predict;
  auto *pc = app.add_subcommand("predict", "Predict at the supports of a task CSV");
  pc->add_option("--model", predict.model, "Checkpoint")
      ->required()
      ->check(CLI::ExistingFile);
  pc->add_option("--test", predict.test, "Task CSV")->required()->check(CLI::ExistingFile);
  pc->add_option("--out", predict.out, "Prediction CSV")->required();
  pc->add_option("--task", predict.task, "Task index (default 0)");

  cli::EvalOptions eval;
  auto *ec = app.add_subcommand("eval", "Print SMSE and SNLP");
  ec->add_option("--pred", eval.pred, "Prediction CSV")->required()->check(CLI::ExistingFile);
  ec->add_option("--truth", eval.truth, "Task CSV")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    return app.exit(e);
  }

  try {
    if (sc->parsed()) {
      cli::run_synth(synth, std::cerr);
    } else if (tc->parsed()) {
      if (seed_opt->count() > 0) {
        train.seed = train_seed;
      }
      cli::run_train(train, std::cerr);
    } else if (pc->parsed()) {
      cli::run_predict(predict, std::cerr);
    } else if (ec->parsed()) {
      cli::run_eval(eval, std::cout);
    }
  } catch (const std::exception &e) {
    std::cerr << "mtagg: error: " << e.what() << "\n";
    return EXIT_FAILURE;
  }
  return EXIT_SUCCESS;
}
