// SPDX-License-Identifier: Apache-2.0
#include "corm/bm25.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <unordered_map>

#include <json.hpp>

#include "corm/text.hpp"

namespace corm {

namespace {
constexpr const char* kIndexMagic = "CORMIDX1";
}

Bm25Index Bm25Index::build(const Corpus& corpus, Bm25Params params) {
  if (params.k1 <= 0.0) throw std::invalid_argument("k1 must be > 0");
  if (params.b < 0.0 || params.b > 1.0) throw std::invalid_argument("b must be in [0,1]");
  Bm25Index index;
  index.params_ = params;
  index.doc_lengths_.reserve(corpus.doc_count());
  index.doc_ids_.reserve(corpus.doc_count());
  std::size_t total_len = 0;
  for (std::size_t d = 0; d < corpus.doc_count(); ++d) {
    const Document& doc = corpus.at(d);
    std::unordered_map<std::string, std::size_t> tf;
    auto tokens = tokenize(doc.text);
    for (auto& t : tokens) ++tf[t];
    for (auto& [term, count] : tf) {
      index.postings_[term].push_back({d, count});
    }
    index.doc_lengths_.push_back(tokens.size());
    index.doc_ids_.push_back(doc.id);
    total_len += tokens.size();
  }
  // Postings were appended in ascending ordinal order already.
  index.avg_doc_length_ =
      corpus.doc_count() ? static_cast<double>(total_len) / corpus.doc_count() : 0.0;
  return index;
}

std::size_t Bm25Index::doc_frequency(const std::string& term) const {
  auto it = postings_.find(term);
  return it == postings_.end() ? 0 : it->second.size();
}

double Bm25Index::idf(const std::string& term) const {
  double n = static_cast<double>(doc_count());
  double df = static_cast<double>(doc_frequency(term));
  return std::log((n - df + 0.5) / (df + 0.5) + 1.0);
}

double Bm25Index::score(const std::vector<std::string>& query_tokens, std::size_t doc) const {
  if (doc >= doc_count()) {
    throw std::out_of_range("document ordinal " + std::to_string(doc) + " out of range");
  }
  double dl = static_cast<double>(doc_lengths_[doc]);
  double norm = avg_doc_length_ > 0.0 ? dl / avg_doc_length_ : 0.0;
  double total = 0.0;
  for (const auto& term : query_tokens) {
    auto it = postings_.find(term);
    if (it == postings_.end()) continue;
    const auto& plist = it->second;
    auto pit = std::lower_bound(plist.begin(), plist.end(), doc,
                                [](const Posting& p, std::size_t d) { return p.doc < d; });
    if (pit == plist.end() || pit->doc != doc) continue;
    double tf = static_cast<double>(pit->tf);
    double sat = tf * (params_.k1 + 1.0) /
                 (tf + params_.k1 * (1.0 - params_.b + params_.b * norm));
    total += idf(term) * sat;
  }
  return total;
}

std::vector<RankedCandidate> Bm25Index::retrieve_top_m(const std::string& query,
                                                       std::size_t m) const {
  if (m < 1) throw std::invalid_argument("m must be >= 1");
  if (doc_count() == 0) throw std::runtime_error("retrieval over an empty index");
  auto query_tokens = tokenize(query);

  // Exhaustive scoring through score() so the result is float-identical to
  // the brute-force definition (score, then sort, then truncate).
  std::vector<double> scores(doc_count(), 0.0);
  for (std::size_t d = 0; d < doc_count(); ++d) {
    scores[d] = score(query_tokens, d);
  }

  std::vector<std::size_t> order(doc_count());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a < b;
  });

  std::size_t take = std::min(m, order.size());
  std::vector<RankedCandidate> out;
  out.reserve(take);
  for (std::size_t r = 0; r < take; ++r) {
    out.push_back({doc_ids_[order[r]], r + 1, scores[order[r]]});
  }
  return out;
}

void Bm25Index::save(const std::string& path) const {
  nlohmann::ordered_json j;
  j["k1"] = params_.k1;
  j["b"] = params_.b;
  j["avg_doc_length"] = avg_doc_length_;
  j["doc_ids"] = doc_ids_;
  j["doc_lengths"] = doc_lengths_;
  nlohmann::ordered_json post = nlohmann::ordered_json::object();
  for (const auto& [term, plist] : postings_) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const Posting& p : plist) arr.push_back({p.doc, p.tf});
    post[term] = std::move(arr);
  }
  j["postings"] = std::move(post);
  std::ofstream out(path, std::ios::trunc | std::ios::binary);
  if (!out) throw std::runtime_error("cannot write index file: " + path);
  out << kIndexMagic << "\n" << j.dump() << "\n";
  if (!out) throw std::runtime_error("I/O error writing index file: " + path);
}

Bm25Index Bm25Index::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open index file: " + path);
  std::string magic;
  std::getline(in, magic);
  if (magic != kIndexMagic) {
    throw std::runtime_error("index file " + path + ": bad magic '" + magic +
                             "' (expected " + kIndexMagic + ")");
  }
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("index file " + path + ": " + e.what());
  }
  Bm25Index index;
  index.params_.k1 = j.at("k1").get<double>();
  index.params_.b = j.at("b").get<double>();
  index.avg_doc_length_ = j.at("avg_doc_length").get<double>();
  index.doc_ids_ = j.at("doc_ids").get<std::vector<std::string>>();
  index.doc_lengths_ = j.at("doc_lengths").get<std::vector<std::size_t>>();
  for (const auto& [term, arr] : j.at("postings").items()) {
    std::vector<Posting> plist;
    plist.reserve(arr.size());
    for (const auto& pair : arr) {
      plist.push_back({pair.at(0).get<std::size_t>(), pair.at(1).get<std::size_t>()});
    }
    index.postings_[term] = std::move(plist);
  }
  for (const auto& [term, plist] : index.postings_) {
    for (const Posting& p : plist) {
      if (p.doc >= index.doc_ids_.size()) {
        throw std::runtime_error("index file " + path + ": posting for '" + term +
                                 "' references doc ordinal out of range");
      }
    }
  }
  return index;
}

}  // namespace corm
