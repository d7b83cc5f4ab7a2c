// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace corm {

struct EvalRecord {
  std::string query_id;
  std::string condition;             // "clean" or "biased"
  std::optional<std::string> ptype;  // perturbation type for biased records
  double confidence = 0.0;
  bool correct = false;
  bool abstained = false;
  /// system name -> rank of the highest-placed gold passage; absent when the
  /// pool holds no gold doc.
  std::map<std::string, std::size_t> gold_ranks;
};

struct RiskCoveragePoint {
  double coverage = 0.0;
  double selective_accuracy = 0.0;
  double threshold = 0.0;  // confidence of the last admitted record
};

struct PairedRankFractions {
  double win_b = 0.0;
  double tie = 0.0;
  double win_a = 0.0;
};

struct EvalReport {
  double acc_clean = 0.0;
  double acc_biased = 0.0;
  double robustness_gap = 0.0;
  std::map<std::string, double> per_type_accuracy;  // empty when no biased records
  std::map<std::size_t, double> recall_at_k;
  std::optional<PairedRankFractions> paired;
  std::vector<RiskCoveragePoint> risk_coverage;
};

/// Fraction correct over all records; abstentions count as incorrect
/// (forced-generation convention at full coverage).
double accuracy(const std::vector<EvalRecord>& records);

/// clean - biased; units must match.
double robustness_gap(double clean_acc, double biased_acc);

/// Sorts by confidence descending (ties by query_id ascending) and reports
/// accuracy over the top ceil(c * n) records for each coverage level c.
std::vector<RiskCoveragePoint> risk_coverage_curve(const std::vector<EvalRecord>& records,
                                                   const std::vector<double>& grid);

/// pools: per-query ranked doc-id lists; has_gold keyed by (query ordinal,
/// doc id). Every pool must contain at least one gold doc (pre-filter
/// contract); violations throw.
std::map<std::size_t, double> recall_at_k(
    const std::vector<std::vector<std::string>>& pools,
    const std::map<std::pair<std::size_t, std::string>, bool>& has_gold,
    const std::vector<std::size_t>& ks);

/// Gold-rank comparison over the same query set: win_b counts queries where
/// system b places gold strictly higher (smaller rank).
PairedRankFractions paired_rank_comparison(const std::vector<std::size_t>& ranks_a,
                                           const std::vector<std::size_t>& ranks_b);

/// report.json plus plot-ready CSVs (risk_coverage.csv, recall_at_k.csv,
/// paired CSV is written by the pipeline which owns the per-query pairs).
void emit_report(const EvalReport& report, const std::string& dir);
EvalReport read_report(const std::string& path);

void write_records(const std::vector<EvalRecord>& records, const std::string& path);
std::vector<EvalRecord> read_records(const std::string& path);

}  // namespace corm
