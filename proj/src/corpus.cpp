// SPDX-License-Identifier: Apache-2.0
#include "corm/corpus.hpp"

#include <cctype>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace corm {

namespace {

bool blank(const std::string& s) {
  for (unsigned char c : s) {
    if (!std::isspace(c)) return false;
  }
  return true;
}

}  // namespace

void Corpus::add(Document doc) {
  if (blank(doc.text)) {
    throw std::invalid_argument("document '" + doc.id + "' has empty text");
  }
  auto [it, inserted] = by_id_.emplace(doc.id, docs_.size());
  if (!inserted) {
    throw std::invalid_argument("duplicate document id '" + doc.id + "'");
  }
  docs_.push_back(std::move(doc));
}

const Document& Corpus::at(std::size_t ordinal) const {
  if (ordinal >= docs_.size()) {
    throw std::out_of_range("document ordinal " + std::to_string(ordinal) +
                            " out of range (corpus has " + std::to_string(docs_.size()) +
                            " docs)");
  }
  return docs_[ordinal];
}

std::optional<std::size_t> Corpus::ordinal_of(const std::string& id) const {
  auto it = by_id_.find(id);
  if (it == by_id_.end()) return std::nullopt;
  return it->second;
}

const Document* Corpus::find(const std::string& id) const {
  auto ord = ordinal_of(id);
  return ord ? &docs_[*ord] : nullptr;
}

Corpus ingest_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open corpus file: " + path);
  Corpus corpus;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (blank(line)) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": malformed corpus line: " + e.what());
    }
    if (!j.is_object() || !j.contains("id") || !j.contains("text")) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": corpus line must be an object with id, title, text");
    }
    Document doc;
    try {
      doc.id = j.at("id").get<std::string>();
      doc.title = j.value("title", std::string{});
      doc.text = j.at("text").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": malformed corpus field: " + e.what());
    }
    try {
      corpus.add(std::move(doc));
    } catch (const std::invalid_argument& e) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return corpus;
}

void write_corpus(const Corpus& corpus, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write corpus file: " + path);
  for (const auto& d : corpus.documents()) {
    nlohmann::ordered_json j;
    j["id"] = d.id;
    j["title"] = d.title;
    j["text"] = d.text;
    out << j.dump() << "\n";
  }
  if (!out) throw std::runtime_error("I/O error writing corpus file: " + path);
}

}  // namespace corm
