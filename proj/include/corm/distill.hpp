// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "corm/bm25.hpp"
#include "corm/corpus.hpp"
#include "corm/generation.hpp"
#include "corm/perturbation.hpp"

namespace corm {

/// K+1 retrievals for one example: the clean pool plus one pool per
/// perturbation.
struct CandidatePools {
  std::string query_id;
  std::vector<RankedCandidate> clean_pool;
  std::vector<std::vector<RankedCandidate>> perturbed_pools;  // size K
  std::size_t m = 0;
};

/// Empirical robustness of one (query, document) pair over the K
/// perturbations: score = (# correct outcomes) / K.
struct RobustnessLabel {
  std::string query_id;
  std::string doc_id;
  double score = 0.0;
  std::vector<bool> per_perturbation;
};

struct ScoredDoc {
  std::string doc_id;
  double score = 0.0;
};

/// One positive anchor plus up to N zero-score hard negatives for a single
/// (query, perturbation) pair.
struct ListwiseGroup {
  std::string query_id;
  std::size_t k_index = 0;  // 1..K
  std::string perturbed_text;
  std::vector<ScoredDoc> docs;  // anchor at anchor_index, rest negatives
  std::size_t anchor_index = 0;
};

struct DistillProvenance {
  std::size_t queries = 0;
  std::size_t skipped_groups = 0;  // empty positive pool
  std::string config_hash;
};

struct DistillDataset {
  std::vector<ListwiseGroup> groups;
  std::size_t k = 0;
  std::size_t n_neg = 0;
  std::uint64_t seed = 0;
  DistillProvenance provenance;
};

CandidatePools build_candidate_pools(const QaExample& example, const PerturbationSet& pset,
                                     const Bm25Index& index, std::size_t m);

/// Teacher evaluation under every perturbation with a single-document
/// context, aggregated per Eq.-of-robustness: mean of K binary outcomes.
RobustnessLabel label_robustness(const QaExample& example, const PerturbationSet& pset,
                                 const Document& doc, const GeneratorBackend& backend);

/// Label lookup keyed by doc id (labels are per query).
using LabelMap = std::map<std::string, RobustnessLabel>;

/// Labels for every doc appearing in any pool of `pools`, computed once per
/// (query, doc) pair.
LabelMap label_pools(const QaExample& example, const PerturbationSet& pset,
                     const CandidatePools& pools, const Corpus& corpus,
                     const GeneratorBackend& backend);

/// Per perturbation k: anchor sampled uniformly from the surviving subset of
/// the clean pool (score > 0), negatives sampled without replacement from the
/// zero-score docs of pool k. Groups with an empty positive pool are skipped
/// (counted by the caller via the return size).
std::vector<ListwiseGroup> build_listwise_groups(const CandidatePools& pools,
                                                 const PerturbationSet& pset,
                                                 const LabelMap& labels, std::size_t n_neg,
                                                 std::uint64_t seed);

/// JSON-lines dataset: header {version:"CORMDS1", k, n_neg, seed, config_hash}
/// then one group per line. Doc texts are not duplicated; the corpus file is
/// the source of truth.
void write_dataset(const DistillDataset& ds, const std::string& path);
DistillDataset read_dataset(const std::string& path);

}  // namespace corm
