// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace corm {

struct PipelineConfig {
  struct Paths {
    std::string corpus;
    std::string qa;
    std::string index;
    std::string perturbations;
    std::string dataset;
    std::string params;
    std::string train_log;
    std::string report_dir;
    std::string templates;    // empty -> compiled-in tables
    std::string distractors;  // empty -> compiled-in inventory
  } paths;

  struct Perturb {
    std::size_t k = 5;
    std::uint64_t seed = 42;
    std::vector<std::string> banned_words;  // empty -> table default
  } perturb;

  struct Distill {
    std::size_t m = 25;
    std::size_t n_neg = 10;
    std::uint64_t seed = 42;
    std::string backend = "sim";  // "sim" or "remote"
  } distill;

  struct Train {
    int epochs = 3;
    int batch = 32;
    double lr = 0.1;
    double tau = 1.0;
    double lambda = 1.0;
    double weight_decay = 0.0;
    std::uint64_t seed = 42;
    std::string optimizer = "adamw";
    int hash_bits = 14;
  } train;

  struct Infer {
    std::size_t m = 100;
    std::size_t c = 3;
    double gamma = 0.0;
  } infer;

  struct Eval {
    std::vector<std::size_t> ks = {1, 3, 5, 10};
    std::vector<double> coverage_grid = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  } eval;

  struct Remote {
    std::string base_url;
    std::string model;
    int timeout_seconds = 30;
    int max_parallel = 4;
  } remote;

  /// Throws std::invalid_argument naming the offending field, e.g.
  /// "infer.gamma".
  void validate() const;
};

/// Flag-level overrides; set fields win over file values.
struct ConfigOverrides {
  std::optional<std::string> corpus, qa, index, perturbations, dataset, params, train_log,
      report_dir, templates, distractors;
  std::optional<std::size_t> k;
  std::optional<std::uint64_t> seed;  // sets perturb/distill/train seeds
  std::optional<std::size_t> distill_m, n_neg;
  std::optional<int> epochs, batch, hash_bits;
  std::optional<double> lr, tau, lambda, weight_decay;
  std::optional<std::size_t> infer_m, c;
  std::optional<double> gamma;
  std::optional<std::string> backend, optimizer;
  std::optional<std::vector<std::size_t>> ks;
  std::optional<std::vector<double>> coverage_grid;
  std::optional<std::string> remote_url, remote_model;
};

/// Parses the JSON config (strict: unknown keys are errors, locations
/// reported), applies overrides (flags win), validates. Empty path = defaults
/// plus overrides.
PipelineConfig load_config(const std::string& path, const ConfigOverrides& overrides);

void apply_overrides(PipelineConfig& cfg, const ConfigOverrides& overrides);

}  // namespace corm
