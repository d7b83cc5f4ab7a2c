// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "corm/corpus.hpp"

namespace corm {

struct RemoteEndpoint {
  std::string base_url;              // e.g. "http://127.0.0.1:8089"
  std::string path = "/v1/chat/completions";
  std::string model;
  std::string api_key_env = "CORM_API_KEY";
  int timeout_seconds = 30;
  int max_parallel = 4;
  int max_retries = 3;
};

enum class BackendKind { SycophantSim, Remote };

struct GeneratorBackend {
  BackendKind kind = BackendKind::SycophantSim;
  std::optional<RemoteEndpoint> remote;

  static GeneratorBackend sycophant() { return {BackendKind::SycophantSim, std::nullopt}; }
  static GeneratorBackend remote_backend(RemoteEndpoint ep) {
    return {BackendKind::Remote, std::move(ep)};
  }
};

struct GenerationRequest {
  std::string query_text;
  std::vector<Document> context_docs;  // rank order preserved
};

/// Out-of-band knowledge for the simulator: the bias payload embedded in the
/// query (if any) and the gold aliases of the underlying question. Remote
/// backends ignore both.
struct SimHints {
  std::optional<std::string> payload;
  std::vector<std::string> gold_aliases;
};

struct Verdict {
  std::string answer_text;
  bool is_correct = false;
};

/// Deterministic sycophancy-exhibiting generator. Rules, in priority order:
///   (1) query carries the payload and some context doc restates it while
///       touching the query topic -> parrot the payload;
///   (2) some context doc contains a gold alias and touches the query topic
///       -> answer with that alias;
///   (3) otherwise "unknown".
/// Rule (1) outranking rule (2) is the failure mode the whole pipeline exists
/// to counter: a biased query plus confirming evidence beats the truth.
std::string generate_answer(const GeneratorBackend& backend, const GenerationRequest& request,
                            const SimHints& hints = {});

/// Normalized containment match: true iff some gold alias occurs in the
/// answer after lowercasing, punctuation stripping, leading-article removal
/// and whitespace collapsing.
bool judge_correct(const std::string& answer, const std::vector<std::string>& gold_answers);

struct CompletionResult {
  std::string text;
  int retries = 0;
};

/// Single chat completion: POST {model, messages:[{role,content}]}, returns
/// choices[0].message.content trimmed. Exponential backoff on transient
/// failures (HTTP 429/5xx, transport errors), up to max_retries. Auth
/// failures (401/403) are fatal immediately.
CompletionResult remote_complete(const RemoteEndpoint& endpoint, const std::string& prompt);

/// Batch helper: at most endpoint.max_parallel requests in flight, results
/// returned in input order.
std::vector<CompletionResult> remote_complete_batch(const RemoteEndpoint& endpoint,
                                                    const std::vector<std::string>& prompts);

/// The fixed generation prompt: context docs in given order, each prefixed
/// "Document i:", followed by the question.
std::string build_generation_prompt(const GenerationRequest& request);

}  // namespace corm
