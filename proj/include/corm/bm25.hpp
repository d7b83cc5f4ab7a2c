// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <string>
#include <vector>

#include "corm/corpus.hpp"

namespace corm {

struct Bm25Params {
  double k1 = 1.2;
  double b = 0.75;
};

struct Posting {
  std::size_t doc;  // ordinal into the corpus
  std::size_t tf;
};

struct RankedCandidate {
  std::string doc_id;
  std::size_t retrieval_rank = 0;  // 1-based
  double retrieval_score = 0.0;
};

/// Inverted index with Okapi BM25 scoring,
/// idf(t) = ln((N - df + 0.5) / (df + 0.5) + 1).
/// Immutable after build; concurrent read-only queries are safe.
class Bm25Index {
 public:
  static Bm25Index build(const Corpus& corpus, Bm25Params params = {});

  /// BM25 score of one document for a token list. Query term multiplicity
  /// counts: each occurrence of a token contributes its full term score.
  double score(const std::vector<std::string>& query_tokens, std::size_t doc) const;

  /// Scores every document and returns the top m by (score desc, ordinal asc),
  /// ranks 1..|result|. Zero-score documents participate so that the result
  /// matches exhaustive scoring followed by the same sort, truncated to m.
  std::vector<RankedCandidate> retrieve_top_m(const std::string& query, std::size_t m) const;

  std::size_t doc_count() const { return doc_lengths_.size(); }
  double avg_doc_length() const { return avg_doc_length_; }
  const Bm25Params& params() const { return params_; }
  std::size_t doc_length(std::size_t doc) const { return doc_lengths_.at(doc); }
  std::size_t doc_frequency(const std::string& term) const;
  double idf(const std::string& term) const;
  const std::string& doc_id(std::size_t doc) const { return doc_ids_.at(doc); }

  /// File format: "CORMIDX1\n" followed by one JSON object. Build and save
  /// are deterministic: the same corpus yields a byte-identical file.
  void save(const std::string& path) const;
  static Bm25Index load(const std::string& path);

 private:
  Bm25Params params_;
  std::map<std::string, std::vector<Posting>> postings_;  // ordered for determinism
  std::vector<std::size_t> doc_lengths_;
  std::vector<std::string> doc_ids_;
  double avg_doc_length_ = 0.0;
};

}  // namespace corm
