// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "corm/config.hpp"
#include "corm/critic.hpp"
#include "corm/distill.hpp"
#include "corm/evaluation.hpp"
#include "corm/inference.hpp"
#include "corm/perturbation.hpp"

namespace corm {

/// Stage drivers shared by the CLI, the sweep runner and the demo. Every
/// stage is a pure function of its file inputs + config, so reruns with the
/// same seeds write byte-identical artifacts.

void run_ingest(const PipelineConfig& cfg);

std::vector<PerturbationSet> run_perturb(const PipelineConfig& cfg);

DistillDataset run_distill(const PipelineConfig& cfg);

CriticParams run_train(const PipelineConfig& cfg);

struct SystemEval {
  std::string system;  // "critic" or "bm25"
  EvalReport report;
  std::vector<EvalRecord> records;
};

/// Evaluates the critic-reranked pipeline and the BM25-order baseline (a
/// zero critic: every sigma(0) = 0.5 tie falls back to retrieval order) on
/// the clean and biased conditions. Biased condition: member (i mod 3) of
/// each query's perturbation set, which is exactly balanced over the three
/// types.
struct EvalOutput {
  SystemEval critic;
  SystemEval baseline;
};

EvalOutput run_eval(const PipelineConfig& cfg);

/// End-to-end toy run: ingest, perturb, distill, train, eval; writes all
/// artifacts plus a comparison summary. Returns the eval output.
EvalOutput run_demo(const PipelineConfig& cfg);

struct SweepRow {
  std::string parameter;
  double value = 0.0;
  double acc_clean = 0.0;
  double acc_biased = 0.0;
  double robustness_gap = 0.0;
};

/// Retrains per value for k and tau; reuses one trained critic for m and
/// gamma (inference-time knobs). Writes <report_dir>/sweep.csv.
std::vector<SweepRow> run_sweep(const PipelineConfig& cfg, const std::string& parameter,
                                const std::vector<double>& values);

struct InferRequest {
  std::string query;
  std::vector<std::string> gold_hint;  // simulator only
  std::string payload_hint;            // simulator only
};

InferenceOutcome run_infer(const PipelineConfig& cfg, const InferRequest& request);

GeneratorBackend backend_from_config(const PipelineConfig& cfg);

}  // namespace corm
