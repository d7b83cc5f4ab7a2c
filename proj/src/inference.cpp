// SPDX-License-Identifier: Apache-2.0
#include "corm/inference.hpp"

#include <algorithm>
#include <stdexcept>

#include <httplib.h>
#include <json.hpp>

namespace corm {

void InferenceConfig::validate() const {
  if (c < 1) throw std::invalid_argument("max context size C must be >= 1");
  if (m < c) throw std::invalid_argument("top-M must be >= max context size C");
  if (gamma < 0.0 || gamma > 1.0) throw std::invalid_argument("gamma must be in [0,1]");
}

std::vector<ScoredCandidate> rerank(const CriticParams& params, const Featurizer& featurizer,
                                    const std::string& query,
                                    const std::vector<RankedCandidate>& candidates,
                                    const Corpus& corpus) {
  if (candidates.empty()) throw std::invalid_argument("rerank on an empty candidate list");
  std::vector<ScoredCandidate> scored;
  scored.reserve(candidates.size());
  for (const auto& c : candidates) {
    const Document* doc = corpus.find(c.doc_id);
    if (!doc) throw std::runtime_error("candidate references unknown doc id: " + c.doc_id);
    scored.push_back({c.doc_id, predict_robustness(params, featurizer, query, *doc),
                      c.retrieval_rank});
  }
  std::sort(scored.begin(), scored.end(), [](const ScoredCandidate& a, const ScoredCandidate& b) {
    if (a.robustness != b.robustness) return a.robustness > b.robustness;
    return a.retrieval_rank < b.retrieval_rank;
  });
  return scored;
}

Decision decide(const std::vector<ScoredCandidate>& scored, const InferenceConfig& cfg) {
  cfg.validate();
  if (scored.empty()) throw std::invalid_argument("decide on an empty candidate list");
  Decision d;
  if (scored[0].robustness < cfg.gamma) {
    d.abstain = true;  // the entire pool is fragile; skip generation
    return d;
  }
  for (std::size_t i = 0; i < scored.size() && i < cfg.c; ++i) {
    if (scored[i].robustness < cfg.gamma) break;  // sorted: nothing further qualifies
    d.context_ids.push_back(scored[i].doc_id);
  }
  return d;
}

InferenceOutcome answer_pipeline(const std::string& query, const Bm25Index& index,
                                 const Corpus& corpus, const CriticParams& params,
                                 const Featurizer& featurizer, const GeneratorBackend& backend,
                                 const InferenceConfig& cfg, const SimHints& hints) {
  cfg.validate();
  auto candidates = index.retrieve_top_m(query, cfg.m);
  auto scored = rerank(params, featurizer, query, candidates, corpus);
  Decision decision = decide(scored, cfg);

  InferenceOutcome outcome;
  outcome.confidence = scored[0].robustness;
  if (decision.abstain) {
    outcome.status = InferenceStatus::Abstained;
    return outcome;
  }
  GenerationRequest request;
  request.query_text = query;
  for (const auto& id : decision.context_ids) {
    request.context_docs.push_back(*corpus.find(id));
  }
  outcome.status = InferenceStatus::Answered;
  outcome.answer = generate_answer(backend, request, hints);
  outcome.context_ids = decision.context_ids;
  return outcome;
}

std::string to_string(InferenceStatus status) {
  return status == InferenceStatus::Answered ? "answered" : "abstained";
}

std::string outcome_to_json(const std::string& query_id, const InferenceOutcome& outcome,
                            const InferenceConfig& cfg) {
  nlohmann::ordered_json j;
  j["query_id"] = query_id;
  j["status"] = to_string(outcome.status);
  if (outcome.answer) {
    j["answer"] = *outcome.answer;
  } else {
    j["answer"] = nullptr;
  }
  j["confidence"] = outcome.confidence;
  j["context_ids"] = outcome.context_ids;
  j["gamma"] = cfg.gamma;
  j["c"] = cfg.c;
  j["m"] = cfg.m;
  return j.dump();
}

double remote_score(const RemoteEndpoint& endpoint, const std::string& query,
                    const std::string& document) {
  httplib::Client client(endpoint.base_url);
  client.set_connection_timeout(endpoint.timeout_seconds, 0);
  client.set_read_timeout(endpoint.timeout_seconds, 0);
  nlohmann::json body;
  body["query"] = query;
  body["document"] = document;
  auto res = client.Post(endpoint.path, body.dump(), "application/json");
  if (!res) {
    throw std::runtime_error("remote scorer transport failure: " +
                             httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw std::runtime_error("remote scorer failed with HTTP " + std::to_string(res->status));
  }
  try {
    return nlohmann::json::parse(res->body).at("logit").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("malformed remote scorer response: ") + e.what());
  }
}

std::vector<ScoredCandidate> rerank_remote(const RemoteEndpoint& endpoint,
                                           const std::string& query,
                                           const std::vector<RankedCandidate>& candidates,
                                           const Corpus& corpus) {
  if (candidates.empty()) throw std::invalid_argument("rerank on an empty candidate list");
  std::vector<ScoredCandidate> scored;
  scored.reserve(candidates.size());
  for (const auto& c : candidates) {
    const Document* doc = corpus.find(c.doc_id);
    if (!doc) throw std::runtime_error("candidate references unknown doc id: " + c.doc_id);
    scored.push_back(
        {c.doc_id, sigmoid(remote_score(endpoint, query, doc->text)), c.retrieval_rank});
  }
  std::sort(scored.begin(), scored.end(), [](const ScoredCandidate& a, const ScoredCandidate& b) {
    if (a.robustness != b.robustness) return a.robustness > b.robustness;
    return a.retrieval_rank < b.retrieval_rank;
  });
  return scored;
}

}  // namespace corm
