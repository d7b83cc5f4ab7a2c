// SPDX-License-Identifier: Apache-2.0
#include "corm/text.hpp"

#include <algorithm>
#include <cctype>

namespace corm {

namespace {

bool is_word_byte(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}

char lower_byte(unsigned char c) {
  return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : static_cast<char>(c);
}

const std::unordered_set<std::string>& wh_words() {
  static const std::unordered_set<std::string> kWh = {
      "who", "whom", "whose", "what", "which", "when", "where", "why", "how"};
  return kWh;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (unsigned char c : text) {
    if (is_word_byte(c)) {
      cur.push_back(lower_byte(c));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

const std::unordered_set<std::string>& stopwords() {
  static const std::unordered_set<std::string> kStop = {
      "a",   "an",  "the",  "is",   "are", "was",  "were", "be",   "been", "of",
      "in",  "on",  "at",   "to",   "for", "with", "by",   "from", "as",   "and",
      "or",  "but", "that", "this", "it",  "its",  "has",  "have", "do",   "did"};
  return kStop;
}

bool is_stopword(const std::string& token) { return stopwords().count(token) != 0; }

std::vector<std::string> content_tokens(std::string_view text) {
  std::vector<std::string> out;
  for (auto& t : tokenize(text)) {
    if (!is_stopword(t)) out.push_back(std::move(t));
  }
  return out;
}

bool is_wh_word(const std::string& token) { return wh_words().count(token) != 0; }

std::string wh_word_of(std::string_view text) {
  for (const auto& t : tokenize(text)) {
    if (is_wh_word(t)) return t;
  }
  return {};
}

std::string normalize_answer(std::string_view text) {
  std::vector<std::string> toks = tokenize(text);
  size_t start = 0;
  while (start < toks.size() &&
         (toks[start] == "a" || toks[start] == "an" || toks[start] == "the")) {
    ++start;
  }
  // A bare article is better than nothing; keep it.
  if (start == toks.size() && !toks.empty()) start = toks.size() - 1;
  std::string out;
  for (size_t i = start; i < toks.size(); ++i) {
    if (!out.empty()) out.push_back(' ');
    out += toks[i];
  }
  return out;
}

bool contains_normalized(std::string_view haystack, std::string_view needle) {
  std::string n = normalize_answer(needle);
  if (n.empty()) return false;
  std::string h = " " + normalize_answer(haystack) + " ";
  return h.find(" " + n + " ") != std::string::npos;
}

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string join(const std::vector<std::string>& tokens, std::string_view sep) {
  std::string out;
  for (size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += sep;
    out += tokens[i];
  }
  return out;
}

std::string lower_ascii(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return lower_byte(c); });
  return out;
}

}  // namespace corm
