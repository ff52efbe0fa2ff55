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

#include "mtagg/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string_view>

#include <nlohmann/json.hpp>

namespace mtagg {

using nlohmann::json;

namespace {

constexpr int kCheckpointVersion = 1;

std::vector<std::string> split_fields(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    std::string_view f = line.substr(start, comma - start);
    while (!f.empty() && (f.front() == ' ' || f.front() == '\t')) {
      f.remove_prefix(1);
    }
    while (!f.empty() && (f.back() == ' ' || f.back() == '\t' || f.back() == '\r')) {
      f.remove_suffix(1);
    }
    out.emplace_back(f);
    if (comma == std::string_view::npos) {
      break;
    }
    start = comma + 1;
  }
  return out;
}

double parse_real(const std::string &field) {
  double v = 0.0;
  const char *end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, v);
  if (ec != std::errc() || ptr != end || field.empty()) {
    throw std::invalid_argument("'" + field + "' is not a number");
  }
  return v;
}

std::string csv_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string real_text(double v) {
  if (!std::isfinite(v)) {
    throw std::invalid_argument("cannot serialise a non-finite real");
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

// nlohmann's dump prints the shortest round-trip form; checkpoints need a
// fixed 17 significant digits, so floats are emitted by hand.
void emit(const json &j, std::string &out, int indent) {
  const std::string pad(static_cast<std::size_t>(indent + 2), ' ');
  const std::string close(static_cast<std::size_t>(indent), ' ');
  switch (j.type()) {
  case json::value_t::object: {
    if (j.empty()) {
      out += "{}";
      return;
    }
    out += "{\n";
    bool first = true;
    for (const auto &[k, v] : j.items()) {
      if (!first) {
        out += ",\n";
      }
      first = false;
      out += pad + json(k).dump() + ": ";
      emit(v, out, indent + 2);
    }
    out += "\n" + close + "}";
    return;
  }
  case json::value_t::array: {
    bool scalars = true;
    for (const auto &v : j) {
      scalars = scalars && !v.is_structured();
    }
    out += "[";
    for (std::size_t i = 0; i < j.size(); ++i) {
      if (i > 0) {
        out += scalars ? ", " : ",";
      }
      if (!scalars) {
        out += "\n" + pad;
      }
      emit(j[i], out, indent + 2);
    }
    if (!scalars && !j.empty()) {
      out += "\n" + close;
    }
    out += "]";
    return;
  }
  case json::value_t::number_float:
    out += real_text(j.get<double>());
    return;
  default:
    out += j.dump();
    return;
  }
}

json reals(const Eigen::Ref<const Eigen::VectorXd> &v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    a.push_back(v[i]);
  }
  return a;
}

json reals_row_major(const Eigen::MatrixXd &m) {
  json a = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      a.push_back(m(r, c));
    }
  }
  return a;
}

const json &field(const json &j, const char *key) {
  if (!j.is_object() || !j.contains(key)) {
    throw std::invalid_argument(std::string("missing field '") + key + "'");
  }
  return j.at(key);
}

Eigen::VectorXd read_reals(const json &j, const char *key, Eigen::Index expected) {
  const json &a = field(j, key);
  if (!a.is_array() || static_cast<Eigen::Index>(a.size()) != expected) {
    throw std::invalid_argument(std::string("field '") + key + "' must hold " +
                                std::to_string(expected) + " numbers");
  }
  Eigen::VectorXd v(expected);
  for (Eigen::Index i = 0; i < expected; ++i) {
    const json &x = a[static_cast<std::size_t>(i)];
    if (!x.is_number()) {
      throw std::invalid_argument(std::string("field '") + key +
                                  "' holds a non-number");
    }
    v[i] = x.get<double>();
  }
  return v;
}

Eigen::MatrixXd read_row_major(const json &j, const char *key, Eigen::Index rows,
                               Eigen::Index cols) {
  const Eigen::VectorXd flat = read_reals(j, key, rows * cols);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      m(r, c) = flat[r * cols + c];
    }
  }
  return m;
}

template <class T> T read_int(const json &j, const char *key) {
  const json &v = field(j, key);
  if (!v.is_number_integer()) {
    throw std::invalid_argument(std::string("field '") + key +
                                "' must be an integer");
  }
  return v.get<T>();
}

std::string line_error(const std::filesystem::path &path, std::size_t line,
                       const std::string &msg) {
  return path.string() + ":" + std::to_string(line) + ": " + msg;
}

void check_keys(const json &j, const std::set<std::string> &allowed,
                const std::string &where) {
  if (!j.is_object()) {
    throw std::invalid_argument(where + " must be a JSON object");
  }
  for (const auto &[k, v] : j.items()) {
    if (!allowed.contains(k)) {
      throw std::invalid_argument("unknown field '" + k + "' in " + where);
    }
  }
}

double positive_real(const json &j, const char *key, const std::string &where) {
  const json &v = j.at(key);
  if (!v.is_number() || !(v.get<double>() > 0.0)) {
    throw std::invalid_argument(where + "." + key + " must be a positive number");
  }
  return v.get<double>();
}

std::size_t positive_count(const json &j, const char *key,
                           const std::string &where) {
  const json &v = j.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 1) {
    throw std::invalid_argument(where + "." + key +
                                " must be a positive integer");
  }
  return v.get<std::size_t>();
}

} // namespace

std::string string_map_to_json(const std::map<std::string, std::string> &m) {
  return json(m).dump(2) + "\n";
}

std::string read_text_file(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open " + path.string());
  }
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_text_file(const std::filesystem::path &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write " + path.string());
  }
  out << text;
  if (!out) {
    throw std::runtime_error("error while writing " + path.string());
  }
}

std::filesystem::path polytope_companion(const std::filesystem::path &csv) {
  return std::filesystem::path(csv.string() + ".polytopes.json");
}

TaskDataset load_task_csv(const std::filesystem::path &path,
                          const Likelihood &likelihood, std::string name) {
  std::istringstream in(read_text_file(path));
  TaskDataset data;
  data.name = name.empty() ? path.stem().string() : std::move(name);
  data.likelihood = likelihood;

  std::string line;
  std::size_t lineno = 0;
  Eigen::Index p = -1;
  std::optional<json> rings;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      continue;
    }
    const auto f = split_fields(line);
    if (p < 0) {
      if (f.size() < 3 || f.front() != "kind" || f.back() != "y") {
        throw std::invalid_argument(line_error(
            path, lineno, "header must read kind,<coordinates...>,y"));
      }
      p = static_cast<Eigen::Index>(f.size()) - 2;
      continue;
    }
    try {
      const std::string &kind = f.front();
      const double y = parse_real(f.back());
      if (kind == "point") {
        if (static_cast<Eigen::Index>(f.size()) != p + 2) {
          throw std::invalid_argument("point row needs " + std::to_string(p) +
                                      " coordinates");
        }
        Eigen::VectorXd x(p);
        for (Eigen::Index i = 0; i < p; ++i) {
          x[i] = parse_real(f[static_cast<std::size_t>(i + 1)]);
        }
        data.rows.push_back({Support::point(std::move(x)), y});
      } else if (kind == "box") {
        if (static_cast<Eigen::Index>(f.size()) != 2 * p + 2) {
          throw std::invalid_argument("box row needs " + std::to_string(p) +
                                      " lower and " + std::to_string(p) +
                                      " upper bounds");
        }
        Eigen::VectorXd lo(p);
        Eigen::VectorXd hi(p);
        for (Eigen::Index i = 0; i < p; ++i) {
          lo[i] = parse_real(f[static_cast<std::size_t>(i + 1)]);
          hi[i] = parse_real(f[static_cast<std::size_t>(p + i + 1)]);
        }
        data.rows.push_back({Support::box(std::move(lo), std::move(hi)), y});
      } else if (kind == "polytope") {
        if (p != 2 || f.size() != 3) {
          throw std::invalid_argument(
              "polytope rows need 2-D inputs and the form polytope,<id>,y");
        }
        if (!rings) {
          const auto companion = polytope_companion(path);
          try {
            rings = json::parse(read_text_file(companion));
          } catch (const std::exception &e) {
            throw std::invalid_argument("cannot read " + companion.string() +
                                        ": " + e.what());
          }
        }
        if (!rings->is_object() || !rings->contains(f[1])) {
          throw std::invalid_argument("polytope id '" + f[1] +
                                      "' not found in companion file");
        }
        std::vector<Eigen::Vector2d> ring;
        for (const auto &v : rings->at(f[1])) {
          if (!v.is_array() || v.size() != 2 || !v[0].is_number() ||
              !v[1].is_number()) {
            throw std::invalid_argument("polytope '" + f[1] +
                                        "' vertices must be [x, y] pairs");
          }
          ring.emplace_back(v[0].get<double>(), v[1].get<double>());
        }
        data.rows.push_back({Support::polygon(std::move(ring)), y});
      } else {
        throw std::invalid_argument("unknown row kind '" + kind + "'");
      }
      likelihood.check_observation(y);
    } catch (const std::invalid_argument &e) {
      throw std::invalid_argument(line_error(path, lineno, e.what()));
    }
  }
  if (p < 0) {
    throw std::invalid_argument(path.string() + ": empty file, header expected");
  }
  return data;
}

void save_task_csv(const std::filesystem::path &path, const TaskDataset &data) {
  const Eigen::Index p = data.dimension();
  std::string out = "kind";
  for (Eigen::Index i = 0; i < std::max<Eigen::Index>(p, 1); ++i) {
    out += ",x" + std::to_string(i + 1);
  }
  out += ",y\n";
  json rings = json::object();
  for (std::size_t r = 0; r < data.rows.size(); ++r) {
    const auto &obs = data.rows[r];
    const auto &s = obs.support;
    if (s.is_point()) {
      out += "point";
      for (Eigen::Index i = 0; i < p; ++i) {
        out += "," + csv_real(s.as_point().coords[i]);
      }
    } else if (s.is_box()) {
      out += "box";
      for (Eigen::Index i = 0; i < p; ++i) {
        out += "," + csv_real(s.as_box().lower[i]);
      }
      for (Eigen::Index i = 0; i < p; ++i) {
        out += "," + csv_real(s.as_box().upper[i]);
      }
    } else if (s.is_polygon()) {
      const std::string id = std::to_string(r);
      json ring = json::array();
      for (const auto &v : s.as_polygon().vertices) {
        ring.push_back({v.x(), v.y()});
      }
      rings[id] = std::move(ring);
      out += "polytope," + id;
    } else {
      throw std::invalid_argument("bag supports cannot be written to a task CSV");
    }
    out += "," + csv_real(obs.y) + "\n";
  }
  write_text_file(path, out);
  if (!rings.empty()) {
    std::string text;
    emit(rings, text, 0);
    write_text_file(polytope_companion(path), text + "\n");
  }
}

std::string model_to_json(const Model &model) {
  model.validate();
  json j;
  j["version"] = kCheckpointVersion;
  j["p"] = model.lmc.input_dim();
  j["Q"] = model.lmc.num_latents();
  json ranks = json::array();
  json lengthscales = json::array();
  json mixing = json::array();
  for (const auto &l : model.lmc.latents) {
    ranks.push_back(l.rank());
    lengthscales.push_back(reals(l.kernel.lengthscales));
    mixing.push_back(reals_row_major(l.mixing));
  }
  j["R_q"] = ranks;
  j["J"] = model.lmc.num_slots();
  j["lengthscales"] = lengthscales;
  j["A"] = mixing;
  json liks = json::array();
  for (const auto &lik : model.likelihoods) {
    json e{{"kind", std::string(to_string(lik.kind))}};
    if (lik.has_noise_parameter()) {
      e["noise_variance"] = lik.noise_variance;
    }
    liks.push_back(e);
  }
  j["likelihoods"] = liks;
  j["M"] = model.inducing.size();
  j["Z"] = reals_row_major(model.inducing.points);
  j["mu"] = reals(model.q.mean);
  json lower = json::array();
  for (Eigen::Index r = 0; r < model.q.chol.rows(); ++r) {
    for (Eigen::Index c = 0; c <= r; ++c) {
      lower.push_back(model.q.chol(r, c));
    }
  }
  j["L"] = lower;
  j["options"] = {{"quad_resolution", model.options.quad_resolution},
                  {"jitter", model.options.jitter},
                  {"hermite_order", model.options.hermite_order}};
  j["seed"] = model.seed;
  j["metadata"] = model.metadata;
  std::string out;
  emit(j, out, 0);
  return out + "\n";
}

Model model_from_json(const std::string &text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error &e) {
    throw std::invalid_argument(std::string("checkpoint is not valid JSON: ") +
                                e.what());
  }
  if (read_int<int>(j, "version") != kCheckpointVersion) {
    throw std::invalid_argument("unsupported checkpoint version");
  }
  Model m;
  const auto p = read_int<Eigen::Index>(j, "p");
  const auto q = read_int<Eigen::Index>(j, "Q");
  const auto jslots = read_int<Eigen::Index>(j, "J");
  const json &ranks = field(j, "R_q");
  const json &ls = field(j, "lengthscales");
  const json &mix = field(j, "A");
  if (p < 1 || q < 1 || jslots < 1 || !ranks.is_array() ||
      static_cast<Eigen::Index>(ranks.size()) != q || !ls.is_array() ||
      ls.size() != ranks.size() || !mix.is_array() || mix.size() != ranks.size()) {
    throw std::invalid_argument("checkpoint latent structure is inconsistent");
  }
  for (std::size_t k = 0; k < ranks.size(); ++k) {
    if (!ranks[k].is_number_integer() || ranks[k].get<long long>() < 1) {
      throw std::invalid_argument("checkpoint R_q entries must be positive");
    }
    const auto r = ranks[k].get<Eigen::Index>();
    const json lj{{"l", ls[k]}, {"a", mix[k]}};
    LatentKernel latent;
    latent.kernel.lengthscales = read_reals(lj, "l", p);
    latent.mixing = read_row_major(lj, "a", jslots, r);
    m.lmc.latents.push_back(std::move(latent));
  }
  for (const auto &e : field(j, "likelihoods")) {
    const auto kind = parse_likelihood_kind(field(e, "kind").get<std::string>());
    m.likelihoods.push_back(kind == LikelihoodKind::Gaussian
                                ? Likelihood::gaussian(
                                      field(e, "noise_variance").get<double>())
                                : Likelihood{kind, 1.0});
  }
  m.rebuild_index_map();
  const auto nm = read_int<Eigen::Index>(j, "M");
  m.inducing.points = read_row_major(j, "Z", nm, p);
  const Eigen::Index t = nm * m.lmc.total_rank();
  m.q.mean = read_reals(j, "mu", t);
  const Eigen::VectorXd lower = read_reals(j, "L", t * (t + 1) / 2);
  m.q.chol = Eigen::MatrixXd::Zero(t, t);
  Eigen::Index k = 0;
  for (Eigen::Index r = 0; r < t; ++r) {
    for (Eigen::Index c = 0; c <= r; ++c) {
      m.q.chol(r, c) = lower[k++];
    }
  }
  const json &opt = field(j, "options");
  m.options.quad_resolution = read_int<std::size_t>(opt, "quad_resolution");
  m.options.jitter = field(opt, "jitter").get<double>();
  m.options.hermite_order = read_int<std::size_t>(opt, "hermite_order");
  m.seed = read_int<std::uint64_t>(j, "seed");
  m.metadata = field(j, "metadata").get<std::map<std::string, std::string>>();
  m.validate();
  return m;
}

void save_model(const std::filesystem::path &path, const Model &model) {
  write_text_file(path, model_to_json(model));
}

Model load_model(const std::filesystem::path &path) {
  try {
    return model_from_json(read_text_file(path));
  } catch (const std::invalid_argument &e) {
    throw std::invalid_argument(path.string() + ": " + e.what());
  } catch (const json::exception &e) {
    throw std::invalid_argument(path.string() + ": " + e.what());
  }
}

Likelihood TaskSpec::resolve(const Eigen::VectorXd &targets) const {
  switch (likelihood) {
  case LikelihoodKind::Gaussian: {
    if (noise_variance) {
      return Likelihood::gaussian(*noise_variance);
    }
    double v = 0.0;
    if (targets.size() > 1) {
      v = (targets.array() - targets.mean()).square().sum() /
          static_cast<double>(targets.size() - 1);
    }
    return Likelihood::gaussian(v > 0.0 ? 0.1 * v : 1.0);
  }
  case LikelihoodKind::Poisson:
    return Likelihood::poisson();
  case LikelihoodKind::HetGaussian:
    return Likelihood::het_gaussian();
  }
  return Likelihood::poisson();
}

ModelSpec ExperimentConfig::model_spec(Eigen::Index p) const {
  ModelSpec spec = model;
  if (init_lengthscale.empty()) {
    return spec;
  }
  Eigen::VectorXd l(p);
  if (init_lengthscale.size() == 1) {
    l.setConstant(init_lengthscale.front());
  } else if (static_cast<Eigen::Index>(init_lengthscale.size()) == p) {
    for (Eigen::Index i = 0; i < p; ++i) {
      l[i] = init_lengthscale[static_cast<std::size_t>(i)];
    }
  } else {
    throw std::invalid_argument("init_lengthscale must have 1 or " +
                                std::to_string(p) + " entries");
  }
  spec.init_lengthscales.assign(spec.ranks.size(), l);
  return spec;
}

ExperimentConfig parse_config(const std::string &text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error &e) {
    throw std::invalid_argument(std::string("config is not valid JSON: ") +
                                e.what());
  }
  check_keys(j,
             {"tasks", "Q", "R", "M", "quad_resolution", "jitter",
              "hermite_order", "init_lengthscale", "train"},
             "config");
  ExperimentConfig cfg;
  if (!j.contains("tasks") || !j["tasks"].is_array() || j["tasks"].empty()) {
    throw std::invalid_argument("config.tasks must be a non-empty array");
  }
  for (std::size_t i = 0; i < j["tasks"].size(); ++i) {
    const json &t = j["tasks"][i];
    const std::string where = "config.tasks[" + std::to_string(i) + "]";
    check_keys(t, {"name", "likelihood", "noise_variance"}, where);
    TaskSpec spec;
    spec.name = t.value("name", "task" + std::to_string(i + 1));
    if (!t.contains("likelihood") || !t["likelihood"].is_string()) {
      throw std::invalid_argument(where + ".likelihood must be a string");
    }
    spec.likelihood = parse_likelihood_kind(t["likelihood"].get<std::string>());
    if (t.contains("noise_variance")) {
      spec.noise_variance = positive_real(t, "noise_variance", where);
    }
    cfg.tasks.push_back(std::move(spec));
  }

  std::size_t nq = 1;
  if (j.contains("Q")) {
    nq = positive_count(j, "Q", "config");
  }
  std::vector<Eigen::Index> ranks(nq, 1);
  if (j.contains("R")) {
    const json &r = j["R"];
    if (r.is_number_integer()) {
      ranks.assign(nq, static_cast<Eigen::Index>(positive_count(j, "R", "config")));
    } else if (r.is_array() && r.size() == nq) {
      for (std::size_t q = 0; q < nq; ++q) {
        if (!r[q].is_number_integer() || r[q].get<long long>() < 1) {
          throw std::invalid_argument("config.R entries must be positive integers");
        }
        ranks[q] = r[q].get<Eigen::Index>();
      }
    } else {
      throw std::invalid_argument(
          "config.R must be a positive integer or an array of Q of them");
    }
  }
  cfg.model.ranks = ranks;
  if (j.contains("M")) {
    cfg.model.num_inducing = static_cast<Eigen::Index>(positive_count(j, "M", "config"));
  }
  if (j.contains("quad_resolution")) {
    cfg.model.options.quad_resolution = positive_count(j, "quad_resolution", "config");
  }
  if (j.contains("hermite_order")) {
    cfg.model.options.hermite_order = positive_count(j, "hermite_order", "config");
  }
  if (j.contains("jitter")) {
    cfg.model.options.jitter = positive_real(j, "jitter", "config");
  }
  if (j.contains("init_lengthscale")) {
    const json &l = j["init_lengthscale"];
    if (l.is_number()) {
      cfg.init_lengthscale = {positive_real(j, "init_lengthscale", "config")};
    } else if (l.is_array() && !l.empty()) {
      for (const auto &v : l) {
        if (!v.is_number() || !(v.get<double>() > 0.0)) {
          throw std::invalid_argument(
              "config.init_lengthscale entries must be positive numbers");
        }
        cfg.init_lengthscale.push_back(v.get<double>());
      }
    } else {
      throw std::invalid_argument(
          "config.init_lengthscale must be a number or an array of numbers");
    }
  }

  if (j.contains("train")) {
    const json &t = j["train"];
    const std::string where = "config.train";
    check_keys(t,
               {"minibatch_size", "e_steps", "m_steps", "cycles",
                "learning_rate", "beta1", "beta2", "epsilon", "tolerance",
                "seed"},
               where);
    auto &tc = cfg.train;
    if (t.contains("minibatch_size") && !t["minibatch_size"].is_null()) {
      tc.minibatch_size = positive_count(t, "minibatch_size", where);
    }
    if (t.contains("e_steps")) {
      tc.e_steps = positive_count(t, "e_steps", where);
    }
    if (t.contains("m_steps")) {
      tc.m_steps = positive_count(t, "m_steps", where);
    }
    if (t.contains("cycles")) {
      tc.cycles = positive_count(t, "cycles", where);
    }
    if (t.contains("learning_rate")) {
      tc.e_adam.learning_rate = tc.m_adam.learning_rate =
          positive_real(t, "learning_rate", where);
    }
    if (t.contains("beta1")) {
      tc.e_adam.beta1 = tc.m_adam.beta1 = t["beta1"].get<double>();
    }
    if (t.contains("beta2")) {
      tc.e_adam.beta2 = tc.m_adam.beta2 = t["beta2"].get<double>();
    }
    if (t.contains("epsilon")) {
      tc.e_adam.epsilon = tc.m_adam.epsilon = positive_real(t, "epsilon", where);
    }
    if (t.contains("tolerance")) {
      const json &v = t["tolerance"];
      if (!v.is_number() || v.get<double>() < 0.0) {
        throw std::invalid_argument(where + ".tolerance must be non-negative");
      }
      tc.tolerance = v.get<double>();
    }
    if (t.contains("seed")) {
      if (!t["seed"].is_number_unsigned()) {
        throw std::invalid_argument(where + ".seed must be a non-negative integer");
      }
      tc.seed = t["seed"].get<std::uint64_t>();
    }
    tc.e_adam.validate();
    tc.m_adam.validate();
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path &path) {
  try {
    return parse_config(read_text_file(path));
  } catch (const std::invalid_argument &e) {
    throw std::invalid_argument(path.string() + ": " + e.what());
  } catch (const json::exception &e) {
    throw std::invalid_argument(path.string() + ": " + e.what());
  }
}

} // namespace mtagg
