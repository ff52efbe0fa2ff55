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

#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "mtagg/io.hpp"
#include "mtagg/predict.hpp"
#include "mtagg/synthetic.hpp"
#include "mtagg/trainer.hpp"

namespace mtagg::cli {

namespace {

namespace fs = std::filesystem;

std::string real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string meta_key(const char *what, std::size_t task) {
  return std::string(what) + "." + std::to_string(task);
}

double meta_real(const Model &model, const std::string &key) {
  const auto it = model.metadata.find(key);
  if (it == model.metadata.end()) {
    throw std::invalid_argument("checkpoint metadata lacks '" + key + "'");
  }
  return std::stod(it->second);
}

std::string poisson_config(bool multi) {
  std::string tasks = R"({"name": "task1", "likelihood": "poisson"})";
  if (multi) {
    tasks += R"(,
    {"name": "task2", "likelihood": "poisson"})";
  }
  return R"({
  "tasks": [
    )" + tasks + R"(
  ],
  "Q": 1,
  "R": 1,
  "M": 50,
  "init_lengthscale": 10.0,
  "train": {"e_steps": 20, "m_steps": 10, "cycles": 200,
            "learning_rate": 0.05, "tolerance": 1e-7, "seed": 0}
}
)";
}

std::string surface_config(bool multi) {
  std::string tasks =
      R"({"name": "points", "likelihood": "gaussian", "noise_variance": 0.05})";
  if (multi) {
    tasks += R"(,
    {"name": "blocks", "likelihood": "gaussian", "noise_variance": 0.05})";
  }
  return R"({
  "tasks": [
    )" + tasks + R"(
  ],
  "Q": 1,
  "R": 1,
  "M": 60,
  "init_lengthscale": 5.0,
  "train": {"e_steps": 20, "m_steps": 10, "cycles": 100,)" +
         std::string(multi ? R"(
            "minibatch_size": 400,)"
                           : "") +
         R"(
            "learning_rate": 0.05, "tolerance": 1e-7, "seed": 0}
}
)";
}

} // namespace

void run_synth(const SynthOptions &opt, std::ostream &log) {
  if (opt.out_dir.empty()) {
    throw std::invalid_argument("--out-dir is required");
  }
  fs::create_directories(opt.out_dir);
  std::map<std::string, std::string> meta;
  if (opt.kind == "poisson") {
    const auto synth = synth_poisson_two_task(opt.seed);
    save_task_csv(opt.out_dir / "task1_train.csv", synth.train[0]);
    save_task_csv(opt.out_dir / "task2_train.csv", synth.train[1]);
    save_task_csv(opt.out_dir / "task1_test.csv", synth.test);
    write_text_file(opt.out_dir / "config_multi.json", poisson_config(true));
    write_text_file(opt.out_dir / "config_single.json", poisson_config(false));
    meta = synth.metadata;
    log << "wrote " << synth.train[0].size() << " + " << synth.train[1].size()
        << " training rows and " << synth.test.size() << " test rows to "
        << opt.out_dir.string() << "\n";
  } else if (opt.kind == "surface") {
    const auto synth = synth_surface(opt.seed);
    save_task_csv(opt.out_dir / "points_train.csv", synth.train_pool);
    save_task_csv(opt.out_dir / "points_test.csv", synth.test);
    save_task_csv(opt.out_dir / "blocks_train.csv", synth.aggregated);
    write_text_file(opt.out_dir / "config_multi.json", surface_config(true));
    write_text_file(opt.out_dir / "config_single.json", surface_config(false));
    meta = synth.metadata;
    log << "wrote " << synth.train_pool.size() << " point rows, "
        << synth.aggregated.size() << " block rows and " << synth.test.size()
        << " test rows to " << opt.out_dir.string() << "\n";
  } else {
    throw std::invalid_argument("--kind must be 'poisson' or 'surface', got '" +
                                opt.kind + "'");
  }
  write_text_file(opt.out_dir / "metadata.json", string_map_to_json(meta));
}

void run_train(const TrainOptions &opt, std::ostream &log) {
  if (opt.data.empty() || opt.config.empty() || opt.out.empty()) {
    throw std::invalid_argument("--data, --config and --out are required");
  }
  ExperimentConfig cfg = load_config(opt.config);
  if (cfg.tasks.size() != opt.data.size()) {
    throw std::invalid_argument(
        opt.config.string() + ": lists " + std::to_string(cfg.tasks.size()) +
        " task(s) but " + std::to_string(opt.data.size()) +
        " --data file(s) were given");
  }
  if (opt.seed) {
    cfg.train.seed = *opt.seed;
  }
  std::vector<TaskDataset> data;
  for (std::size_t d = 0; d < opt.data.size(); ++d) {
    const auto &spec = cfg.tasks[d];
    TaskDataset raw = load_task_csv(opt.data[d], Likelihood::gaussian(1.0), spec.name);
    const Likelihood lik = spec.resolve(raw.targets());
    for (std::size_t i = 0; i < raw.rows.size(); ++i) {
      try {
        lik.check_observation(raw.rows[i].y);
      } catch (const std::invalid_argument &e) {
        throw std::invalid_argument(opt.data[d].string() + ": row " +
                                    std::to_string(i + 1) + ": " + e.what());
      }
    }
    raw.likelihood = lik;
    if (!data.empty() && raw.dimension() != data.front().dimension()) {
      throw std::invalid_argument(opt.data[d].string() +
                                  ": input dimension differs from " +
                                  opt.data.front().string());
    }
    data.push_back(std::move(raw));
  }

  const ModelSpec spec = cfg.model_spec(data.front().dimension());
  FitResult fit_result = fit(data, spec, cfg.train);
  Model &model = fit_result.model;
  for (std::size_t d = 0; d < data.size(); ++d) {
    const Eigen::VectorXd y = data[d].targets();
    const double mean = y.mean();
    const double var = (y.array() - mean).square().mean();
    model.metadata[meta_key("task_name", d)] = data[d].name;
    model.metadata[meta_key("train_mean", d)] = real(mean);
    model.metadata[meta_key("train_variance", d)] = real(var);
  }
  save_model(opt.out, model);

  std::string trace = "cycle,step,elbo\n";
  for (const auto &e : fit_result.trace) {
    trace += std::to_string(e.cycle) + "," + std::to_string(e.step) + "," +
             real(e.elbo) + "\n";
  }
  const fs::path trace_path =
      opt.trace ? *opt.trace : fs::path(opt.out.string() + ".trace.csv");
  write_text_file(trace_path, trace);
  log << "trained " << fit_result.trace.size() - 1 << " cycle(s), final ELBO "
      << real(fit_result.trace.back().elbo)
      << (fit_result.converged ? " (converged)" : "") << "\n";
  if (fit_result.clamped_variances > 0) {
    log << "warning: " << fit_result.clamped_variances
        << " negative q(f) variance(s) were clamped to zero\n";
  }
}

void run_predict(const PredictOptions &opt, std::ostream &log) {
  if (opt.model.empty() || opt.test.empty() || opt.out.empty()) {
    throw std::invalid_argument("--model, --test and --out are required");
  }
  const Model model = load_model(opt.model);
  if (opt.task < 0 || opt.task >= model.num_tasks()) {
    throw std::invalid_argument("--task " + std::to_string(opt.task) +
                                " out of range; the model has " +
                                std::to_string(model.num_tasks()) + " task(s)");
  }
  const auto task = static_cast<std::size_t>(opt.task);
  TaskDataset test = load_task_csv(opt.test, model.likelihoods[task]);
  if (test.dimension() != model.lmc.input_dim()) {
    throw std::invalid_argument(opt.test.string() + ": input dimension " +
                                std::to_string(test.dimension()) +
                                " does not match the model (" +
                                std::to_string(model.lmc.input_dim()) + ")");
  }
  const YPrediction pred = predict_y(model, opt.task, test);
  const double train_mean = meta_real(model, meta_key("train_mean", task));
  const double train_var = meta_real(model, meta_key("train_variance", task));
  std::string out = "mean,variance,log_density,train_mean,train_variance\n";
  for (Eigen::Index i = 0; i < pred.mean.size(); ++i) {
    out += real(pred.mean[i]) + "," + real(pred.variance[i]) + "," +
           real((*pred.log_density)[i]) + "," + real(train_mean) + "," +
           real(train_var) + "\n";
  }
  write_text_file(opt.out, out);
  log << "wrote " << pred.mean.size() << " prediction(s) to " << opt.out.string()
      << "\n";
}

void run_eval(const EvalOptions &opt, std::ostream &out) {
  if (opt.pred.empty() || opt.truth.empty()) {
    throw std::invalid_argument("--pred and --truth are required");
  }
  std::istringstream in(read_text_file(opt.pred));
  std::string line;
  if (!std::getline(in, line) ||
      line.rfind("mean,variance,log_density,train_mean,train_variance", 0) != 0) {
    throw std::invalid_argument(opt.pred.string() +
                                ": expected a prediction CSV header");
  }
  std::vector<double> mean;
  std::vector<double> logd;
  double train_mean = 0.0;
  double train_var = 0.0;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) {
      continue;
    }
    std::istringstream row(line);
    double v[5];
    char comma = 0;
    row >> v[0];
    for (int k = 1; k < 5 && row; ++k) {
      row >> comma >> v[k];
    }
    if (!row || comma != ',') {
      throw std::invalid_argument(opt.pred.string() + ":" +
                                  std::to_string(lineno) + ": malformed row");
    }
    mean.push_back(v[0]);
    logd.push_back(v[2]);
    train_mean = v[3];
    train_var = v[4];
  }
  const TaskDataset truth = load_task_csv(opt.truth, Likelihood::gaussian(1.0));
  if (truth.rows.size() != mean.size()) {
    throw std::invalid_argument(
        opt.pred.string() + " has " + std::to_string(mean.size()) +
        " rows but " + opt.truth.string() + " has " +
        std::to_string(truth.rows.size()));
  }
  const Eigen::VectorXd y = truth.targets();
  const Eigen::Map<const Eigen::VectorXd> m(mean.data(), y.size());
  const Eigen::Map<const Eigen::VectorXd> ld(logd.data(), y.size());
  std::ostringstream s;
  s.precision(17);
  s << "smse," << smse(y, m) << "\n";
  s << "snlp," << snlp(ld, y, train_mean, train_var) << "\n";
  out << s.str();
}

} // namespace mtagg::cli
