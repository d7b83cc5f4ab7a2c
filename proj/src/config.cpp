// SPDX-License-Identifier: Apache-2.0
#include "corm/config.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <stdexcept>

#include <json.hpp>

namespace corm {

namespace {

void check_known_keys(const nlohmann::json& obj, const std::set<std::string>& known,
                      const std::string& where) {
  for (const auto& [key, _] : obj.items()) {
    if (!known.count(key)) {
      throw std::invalid_argument("config: unknown key '" + key + "' in " + where);
    }
  }
}

/// Input paths in a config file are relative to the file's directory.
std::string resolve(const std::filesystem::path& base, const std::string& p) {
  if (p.empty()) return p;
  std::filesystem::path fp(p);
  if (fp.is_absolute()) return p;
  return (base / fp).lexically_normal().string();
}

}  // namespace

void PipelineConfig::validate() const {
  auto fail = [](const std::string& field, const std::string& why) {
    throw std::invalid_argument("config: " + field + " " + why);
  };
  if (perturb.k < 1) fail("perturb.k", "must be >= 1");
  if (distill.m < 1) fail("distill.m", "must be >= 1");
  if (distill.backend != "sim" && distill.backend != "remote") {
    fail("distill.backend", "must be 'sim' or 'remote'");
  }
  if (train.epochs < 1) fail("train.epochs", "must be >= 1");
  if (train.batch < 1) fail("train.batch", "must be >= 1");
  if (train.lr <= 0.0) fail("train.lr", "must be > 0");
  if (train.tau <= 0.0) fail("train.tau", "must be > 0");
  if (train.lambda < 0.0) fail("train.lambda", "must be >= 0");
  if (train.weight_decay < 0.0) fail("train.weight_decay", "must be >= 0");
  if (train.optimizer != "adamw" && train.optimizer != "sgd") {
    fail("train.optimizer", "must be 'adamw' or 'sgd'");
  }
  if (train.hash_bits < 1 || train.hash_bits > 24) fail("train.hash_bits", "must be in [1,24]");
  if (infer.c < 1) fail("infer.c", "must be >= 1");
  if (infer.m < infer.c) fail("infer.m", "must be >= infer.c");
  if (infer.gamma < 0.0 || infer.gamma > 1.0) fail("infer.gamma", "must be in [0,1]");
  if (eval.ks.empty()) fail("eval.ks", "must be non-empty");
  for (auto k : eval.ks) {
    if (k < 1) fail("eval.ks", "entries must be >= 1");
  }
  if (eval.coverage_grid.empty()) fail("eval.coverage_grid", "must be non-empty");
  for (double c : eval.coverage_grid) {
    if (c <= 0.0 || c > 1.0) fail("eval.coverage_grid", "entries must lie in (0,1]");
  }
}

PipelineConfig load_config(const std::string& path, const ConfigOverrides& overrides) {
  PipelineConfig cfg;
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw std::invalid_argument("config file " + path + ": parse error: " + e.what());
    }
    std::filesystem::path base = std::filesystem::path(path).parent_path();
    check_known_keys(j, {"paths", "perturb", "distill", "train", "infer", "eval", "remote"},
                     "top level");
    try {
      if (j.contains("paths")) {
        const auto& p = j.at("paths");
        check_known_keys(p,
                         {"corpus", "qa", "index", "perturbations", "dataset", "params",
                          "train_log", "report_dir", "templates", "distractors"},
                         "'paths'");
        cfg.paths.corpus = resolve(base, p.value("corpus", ""));
        cfg.paths.qa = resolve(base, p.value("qa", ""));
        cfg.paths.index = resolve(base, p.value("index", ""));
        cfg.paths.perturbations = resolve(base, p.value("perturbations", ""));
        cfg.paths.dataset = resolve(base, p.value("dataset", ""));
        cfg.paths.params = resolve(base, p.value("params", ""));
        cfg.paths.train_log = resolve(base, p.value("train_log", ""));
        cfg.paths.report_dir = resolve(base, p.value("report_dir", ""));
        cfg.paths.templates = resolve(base, p.value("templates", ""));
        cfg.paths.distractors = resolve(base, p.value("distractors", ""));
      }
      if (j.contains("perturb")) {
        const auto& p = j.at("perturb");
        check_known_keys(p, {"k", "seed", "banned_words"}, "'perturb'");
        cfg.perturb.k = p.value("k", cfg.perturb.k);
        cfg.perturb.seed = p.value("seed", cfg.perturb.seed);
        if (p.contains("banned_words")) {
          cfg.perturb.banned_words = p.at("banned_words").get<std::vector<std::string>>();
        }
      }
      if (j.contains("distill")) {
        const auto& p = j.at("distill");
        check_known_keys(p, {"m", "n_neg", "seed", "backend"}, "'distill'");
        cfg.distill.m = p.value("m", cfg.distill.m);
        cfg.distill.n_neg = p.value("n_neg", cfg.distill.n_neg);
        cfg.distill.seed = p.value("seed", cfg.distill.seed);
        cfg.distill.backend = p.value("backend", cfg.distill.backend);
      }
      if (j.contains("train")) {
        const auto& p = j.at("train");
        check_known_keys(p,
                         {"epochs", "batch", "lr", "tau", "lambda", "weight_decay", "seed",
                          "optimizer", "hash_bits"},
                         "'train'");
        cfg.train.epochs = p.value("epochs", cfg.train.epochs);
        cfg.train.batch = p.value("batch", cfg.train.batch);
        cfg.train.lr = p.value("lr", cfg.train.lr);
        cfg.train.tau = p.value("tau", cfg.train.tau);
        cfg.train.lambda = p.value("lambda", cfg.train.lambda);
        cfg.train.weight_decay = p.value("weight_decay", cfg.train.weight_decay);
        cfg.train.seed = p.value("seed", cfg.train.seed);
        cfg.train.optimizer = p.value("optimizer", cfg.train.optimizer);
        cfg.train.hash_bits = p.value("hash_bits", cfg.train.hash_bits);
      }
      if (j.contains("infer")) {
        const auto& p = j.at("infer");
        check_known_keys(p, {"m", "c", "gamma"}, "'infer'");
        cfg.infer.m = p.value("m", cfg.infer.m);
        cfg.infer.c = p.value("c", cfg.infer.c);
        cfg.infer.gamma = p.value("gamma", cfg.infer.gamma);
      }
      if (j.contains("eval")) {
        const auto& p = j.at("eval");
        check_known_keys(p, {"ks", "coverage_grid"}, "'eval'");
        if (p.contains("ks")) cfg.eval.ks = p.at("ks").get<std::vector<std::size_t>>();
        if (p.contains("coverage_grid")) {
          cfg.eval.coverage_grid = p.at("coverage_grid").get<std::vector<double>>();
        }
      }
      if (j.contains("remote")) {
        const auto& p = j.at("remote");
        check_known_keys(p, {"base_url", "model", "timeout_seconds", "max_parallel"}, "'remote'");
        cfg.remote.base_url = p.value("base_url", cfg.remote.base_url);
        cfg.remote.model = p.value("model", cfg.remote.model);
        cfg.remote.timeout_seconds = p.value("timeout_seconds", cfg.remote.timeout_seconds);
        cfg.remote.max_parallel = p.value("max_parallel", cfg.remote.max_parallel);
      }
    } catch (const nlohmann::json::exception& e) {
      throw std::invalid_argument("config file " + path + ": " + e.what());
    }
  }
  apply_overrides(cfg, overrides);
  cfg.validate();
  return cfg;
}

void apply_overrides(PipelineConfig& cfg, const ConfigOverrides& o) {
  if (o.corpus) cfg.paths.corpus = *o.corpus;
  if (o.qa) cfg.paths.qa = *o.qa;
  if (o.index) cfg.paths.index = *o.index;
  if (o.perturbations) cfg.paths.perturbations = *o.perturbations;
  if (o.dataset) cfg.paths.dataset = *o.dataset;
  if (o.params) cfg.paths.params = *o.params;
  if (o.train_log) cfg.paths.train_log = *o.train_log;
  if (o.report_dir) cfg.paths.report_dir = *o.report_dir;
  if (o.templates) cfg.paths.templates = *o.templates;
  if (o.distractors) cfg.paths.distractors = *o.distractors;
  if (o.k) cfg.perturb.k = *o.k;
  if (o.seed) {
    cfg.perturb.seed = *o.seed;
    cfg.distill.seed = *o.seed;
    cfg.train.seed = *o.seed;
  }
  if (o.distill_m) cfg.distill.m = *o.distill_m;
  if (o.n_neg) cfg.distill.n_neg = *o.n_neg;
  if (o.epochs) cfg.train.epochs = *o.epochs;
  if (o.batch) cfg.train.batch = *o.batch;
  if (o.hash_bits) cfg.train.hash_bits = *o.hash_bits;
  if (o.lr) cfg.train.lr = *o.lr;
  if (o.tau) cfg.train.tau = *o.tau;
  if (o.lambda) cfg.train.lambda = *o.lambda;
  if (o.weight_decay) cfg.train.weight_decay = *o.weight_decay;
  if (o.infer_m) cfg.infer.m = *o.infer_m;
  if (o.c) cfg.infer.c = *o.c;
  if (o.gamma) cfg.infer.gamma = *o.gamma;
  if (o.backend) cfg.distill.backend = *o.backend;
  if (o.optimizer) cfg.train.optimizer = *o.optimizer;
  if (o.ks) cfg.eval.ks = *o.ks;
  if (o.coverage_grid) cfg.eval.coverage_grid = *o.coverage_grid;
  if (o.remote_url) cfg.remote.base_url = *o.remote_url;
  if (o.remote_model) cfg.remote.model = *o.remote_model;
}

}  // namespace corm
