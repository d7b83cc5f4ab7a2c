// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace corm {

struct Document {
  std::string id;
  std::string title;
  std::string text;
};

/// Document store with deterministic (insertion) iteration order.
class Corpus {
 public:
  Corpus() = default;

  /// Throws std::invalid_argument on duplicate id or empty text.
  void add(Document doc);

  std::size_t doc_count() const { return docs_.size(); }
  const std::vector<Document>& documents() const { return docs_; }
  const Document& at(std::size_t ordinal) const;

  std::optional<std::size_t> ordinal_of(const std::string& id) const;
  const Document* find(const std::string& id) const;

 private:
  std::vector<Document> docs_;
  std::unordered_map<std::string, std::size_t> by_id_;
};

/// Reads a JSON-lines corpus file ({"id","title","text"} per line).
/// Malformed lines are reported with their 1-based line number.
Corpus ingest_corpus(const std::string& path);

void write_corpus(const Corpus& corpus, const std::string& path);

}  // namespace corm
