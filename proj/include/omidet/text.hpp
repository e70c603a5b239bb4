#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace omidet {

std::string trim(std::string_view s);
std::string to_lower(std::string_view s);

/// Tokens of a UTF-8 string: ASCII alphanumeric runs are lowercased tokens,
/// every non-ASCII code point is a token of its own (CJK text has no spaces).
std::vector<std::string> tokenize(std::string_view text);

std::set<std::string> token_set(std::string_view text);

/// Jaccard overlap between the token sets of two strings.
double token_jaccard(std::string_view a, std::string_view b);

/// Tokens considered content-bearing: length >= 3 and not a stopword.
std::vector<std::string> content_tokens(std::string_view text);

/// Whitespace-delimited pieces plus standalone punctuation marks. This is a
/// coarse token-count approximation used for stub-client cost accounting; it
/// is never compared against counts reported by a remote model.
std::size_t approx_token_count(std::string_view text);

std::uint64_t fnv1a64(std::string_view data);

/// Hex-encoded SHA-256 digest.
std::string sha256_hex(std::string_view data);

}  // namespace omidet
