// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "corm/bm25.hpp"
#include "corm/corpus.hpp"
#include "corm/distill.hpp"

namespace corm {

inline constexpr std::size_t kDenseFeatureCount = 6;

struct FeatureVector {
  std::array<double, kDenseFeatureCount> dense{};
  std::vector<std::pair<std::uint32_t, double>> hashed;  // bucket -> signed count, sorted
  std::string version;
};

/// Query/document feature extraction over corpus statistics. Dense features,
/// fixed order:
///   f0 BM25 score against the query (index idf/length stats)
///   f1 unigram overlap fraction of the query
///   f2 idf-weighted overlap fraction
///   f3 bigram overlap fraction
///   f4 ln(1 + doc token count)
///   f5 fraction of query content tokens absent from the doc
/// plus signed feature hashing of intersection unigrams and bigrams into
/// 2^hash_bits buckets.
class Featurizer {
 public:
  explicit Featurizer(const Bm25Index& index, int hash_bits = 14);

  FeatureVector operator()(const std::string& query_text, const Document& doc) const;

  const std::string& version() const { return version_; }
  int hash_bits() const { return hash_bits_; }
  std::size_t weight_count() const { return kDenseFeatureCount + (std::size_t{1} << hash_bits_); }

 private:
  const Bm25Index* index_;
  int hash_bits_;
  std::string version_;
};

struct CriticParams {
  std::vector<double> weights;  // kDenseFeatureCount + 2^H
  double bias = 0.0;
  std::string version;  // feature-map version this vector is valid for

  static CriticParams zeros(const Featurizer& featurizer);

  void save(const std::string& path) const;
  static CriticParams load(const std::string& path);
};

/// z = weights . fv + bias. Throws on feature-map version mismatch.
double score(const CriticParams& params, const FeatureVector& fv);

double sigmoid(double z);

struct GroupLogits {
  std::vector<double> z;
  std::vector<double> targets;  // robustness scores s in [0,1]
  double tau = 1.0;
};

/// Listwise soft cross-entropy: targets normalized to a distribution, student
/// distribution = softmax(z / tau), computed with max subtraction.
/// Requires sum(targets) > 0; degenerate groups must be masked by the caller.
double rank_loss(const GroupLogits& g);

/// Pointwise binary cross-entropy of sigma(z) against the soft target,
/// in the stable max(z,0) - s*z + log1p(exp(-|z|)) form. Sum over the group.
double conf_loss(const GroupLogits& g);

/// A listwise group materialized as feature vectors + targets.
struct TrainGroup {
  std::vector<FeatureVector> docs;
  std::vector<double> targets;
};

struct LossBreakdown {
  double total = 0.0;
  double rank = 0.0;
  double conf = 0.0;
  std::size_t contributing_groups = 0;
};

/// Mean over contributing (sum targets > 0) groups of rank + lambda * conf,
/// with the analytic gradient assembled through the linear scorer. Gradient
/// buffers must be sized weights.size() and are overwritten. Throws if every
/// group in the batch is masked.
LossBreakdown total_loss_and_grad(const CriticParams& params, std::span<const TrainGroup> batch,
                                  double tau, double lambda, std::vector<double>& grad_weights,
                                  double& grad_bias);

/// Same, resolving ListwiseGroups against the corpus via the featurizer.
LossBreakdown total_loss_and_grad(const CriticParams& params,
                                  const std::vector<ListwiseGroup>& batch, const Corpus& corpus,
                                  const Featurizer& featurizer, double tau, double lambda,
                                  std::vector<double>& grad_weights, double& grad_bias);

enum class Optimizer { AdamW, Sgd };

struct TrainConfig {
  int epochs = 3;
  int batch_size = 32;
  double learning_rate = 0.1;  // tuned for the linear scorer
  double tau = 1.0;
  double lambda = 1.0;
  double weight_decay = 0.0;
  std::uint64_t seed = 42;
  Optimizer optimizer = Optimizer::AdamW;
};

struct EpochStats {
  int epoch = 0;
  double mean_rank_loss = 0.0;
  double mean_conf_loss = 0.0;
  double mean_total_loss = 0.0;
};

struct TrainLog {
  std::vector<EpochStats> epochs;
  std::size_t groups_used = 0;
  std::size_t groups_masked = 0;

  void save_csv(const std::string& path) const;
};

/// Deterministic training loop: seeded shuffle per epoch, optimizer step per
/// batch. Same (dataset, config) twice gives bitwise-identical parameters.
/// Aborts with diagnostics on non-finite loss.
CriticParams train(const DistillDataset& ds, const Corpus& corpus, const Featurizer& featurizer,
                   const TrainConfig& cfg, TrainLog* log = nullptr);

/// sigma(f_theta(query, doc)), always in (0, 1).
double predict_robustness(const CriticParams& params, const Featurizer& featurizer,
                          const std::string& query_text, const Document& doc);

}  // namespace corm
