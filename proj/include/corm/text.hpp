// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace corm {

/// Lowercased, punctuation-stripped, whitespace-split tokens. Any byte that
/// is not ASCII alphanumeric acts as a separator, so "who's" -> [who, s].
std::vector<std::string> tokenize(std::string_view text);

/// The 30-word stopword list used to decide what counts as a content token.
const std::unordered_set<std::string>& stopwords();

bool is_stopword(const std::string& token);

/// Tokens of `text` that are not stopwords, in order, duplicates kept.
std::vector<std::string> content_tokens(std::string_view text);

/// First wh-word token of `text`, or empty string if none.
std::string wh_word_of(std::string_view text);

bool is_wh_word(const std::string& token);

/// Answer normalization for judging: lowercase, punctuation to spaces,
/// leading articles {a, an, the} dropped, whitespace collapsed.
std::string normalize_answer(std::string_view text);

/// True iff normalized `needle` occurs in normalized `haystack` on token
/// boundaries. Empty needle never matches.
bool contains_normalized(std::string_view haystack, std::string_view needle);

/// FNV-1a 64-bit. Stable across platforms, unlike std::hash.
std::uint64_t fnv1a64(std::string_view s);

std::string join(const std::vector<std::string>& tokens, std::string_view sep);

std::string lower_ascii(std::string_view s);

}  // namespace corm
