#include "omidet/text.hpp"

#include <openssl/evp.h>

#include <array>
#include <cctype>
#include <stdexcept>

namespace omidet {

namespace {

bool is_ascii_alnum(unsigned char c) {
    return std::isalnum(c) != 0;
}

bool is_ascii_punct(unsigned char c) {
    return std::ispunct(c) != 0;
}

// Number of bytes in the UTF-8 sequence starting at `c`. Invalid lead bytes
// are treated as single-byte characters so malformed input cannot loop.
int utf8_len(unsigned char c) {
    if (c < 0x80) return 1;
    if ((c & 0xE0) == 0xC0) return 2;
    if ((c & 0xF0) == 0xE0) return 3;
    if ((c & 0xF8) == 0xF0) return 4;
    return 1;
}

const std::set<std::string>& stopwords() {
    static const std::set<std::string> kStop = {
        "the", "and", "for", "that", "with", "this", "from", "have", "has",
        "are", "was", "were", "not", "but", "his", "her", "its", "their",
        "they", "them", "you", "your", "will", "would", "can", "could",
        "been", "than", "then", "when", "what", "where", "which", "who",
        "why", "how", "all", "any", "each", "into", "over", "out", "own",
        "same", "some", "such", "only", "very", "just", "also", "more",
        "most", "other", "about", "after", "before", "because", "said"};
    return kStop;
}

}  // namespace

std::string trim(std::string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

std::string to_lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) {
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return out;
}

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    std::size_t i = 0;
    while (i < text.size()) {
        const auto c = static_cast<unsigned char>(text[i]);
        if (c < 0x80) {
            if (is_ascii_alnum(c)) {
                current.push_back(static_cast<char>(std::tolower(c)));
            } else if (!current.empty()) {
                tokens.push_back(current);
                current.clear();
            }
            ++i;
        } else {
            if (!current.empty()) {
                tokens.push_back(current);
                current.clear();
            }
            const int n = utf8_len(c);
            tokens.emplace_back(text.substr(i, static_cast<std::size_t>(n)));
            i += static_cast<std::size_t>(n);
        }
    }
    if (!current.empty()) tokens.push_back(current);
    return tokens;
}

std::set<std::string> token_set(std::string_view text) {
    auto tokens = tokenize(text);
    return {tokens.begin(), tokens.end()};
}

double token_jaccard(std::string_view a, std::string_view b) {
    const auto sa = token_set(a);
    const auto sb = token_set(b);
    if (sa.empty() && sb.empty()) return 1.0;
    std::size_t inter = 0;
    for (const auto& t : sa) {
        if (sb.count(t) != 0) ++inter;
    }
    const std::size_t uni = sa.size() + sb.size() - inter;
    return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

std::vector<std::string> content_tokens(std::string_view text) {
    std::vector<std::string> out;
    for (auto& t : tokenize(text)) {
        if (t.size() >= 3 && stopwords().count(t) == 0) {
            out.push_back(std::move(t));
        }
    }
    return out;
}

std::size_t approx_token_count(std::string_view text) {
    std::size_t count = 0;
    bool in_word = false;
    for (const char ch : text) {
        const auto c = static_cast<unsigned char>(ch);
        if (c < 0x80 && std::isspace(c)) {
            in_word = false;
        } else if (c < 0x80 && is_ascii_punct(c)) {
            ++count;  // every punctuation mark counts on its own
            in_word = false;
        } else if (!in_word) {
            ++count;
            in_word = true;
        }
    }
    return count;
}

std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 14695981039346656037ull;
    for (const char c : data) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ull;
    }
    return h;
}

std::string sha256_hex(std::string_view data) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest.data(), &len,
                   EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("sha256: digest computation failed");
    }
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xF]);
    }
    return out;
}

}  // namespace omidet
