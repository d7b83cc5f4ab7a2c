// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "corm/bm25.hpp"
#include "corm/corpus.hpp"
#include "corm/critic.hpp"
#include "corm/generation.hpp"

namespace corm {

struct InferenceConfig {
  std::size_t m = 100;  // top-M pool
  std::size_t c = 3;    // max context size
  double gamma = 0.0;   // safety threshold; 0 = forced generation

  void validate() const;
};

struct ScoredCandidate {
  std::string doc_id;
  double robustness = 0.0;  // sigma(f_theta), in (0,1)
  std::size_t retrieval_rank = 0;
};

enum class InferenceStatus { Answered, Abstained };

struct InferenceOutcome {
  InferenceStatus status = InferenceStatus::Abstained;
  std::optional<std::string> answer;
  double confidence = 0.0;  // top robustness score
  std::vector<std::string> context_ids;
};

/// Scores every candidate with the critic and sorts by robustness descending,
/// ties broken by ascending retrieval rank.
std::vector<ScoredCandidate> rerank(const CriticParams& params, const Featurizer& featurizer,
                                    const std::string& query,
                                    const std::vector<RankedCandidate>& candidates,
                                    const Corpus& corpus);

struct Decision {
  bool abstain = false;
  std::vector<std::string> context_ids;
};

/// Abstains when the best candidate falls below gamma; otherwise admits docs
/// in score order while rank < C and score >= gamma (short-circuit at the
/// first sub-threshold score, since the array is sorted).
Decision decide(const std::vector<ScoredCandidate>& scored, const InferenceConfig& cfg);

/// Retrieve -> rerank -> decide -> generate. `hints` carries the simulator's
/// out-of-band gold aliases / bias payload; remote backends ignore it.
InferenceOutcome answer_pipeline(const std::string& query, const Bm25Index& index,
                                 const Corpus& corpus, const CriticParams& params,
                                 const Featurizer& featurizer, const GeneratorBackend& backend,
                                 const InferenceConfig& cfg, const SimHints& hints = {});

std::string to_string(InferenceStatus status);

/// Outcome serialization: {query_id, status, answer, confidence, context_ids,
/// gamma, c, m}.
std::string outcome_to_json(const std::string& query_id, const InferenceOutcome& outcome,
                            const InferenceConfig& cfg);

/// Remote scorer contract: POST {query, document} -> {logit}. Lets a real
/// cross-encoder stand in for the linear critic without touching the
/// pipeline.
double remote_score(const RemoteEndpoint& endpoint, const std::string& query,
                    const std::string& document);

std::vector<ScoredCandidate> rerank_remote(const RemoteEndpoint& endpoint,
                                           const std::string& query,
                                           const std::vector<RankedCandidate>& candidates,
                                           const Corpus& corpus);

}  // namespace corm
