#include "omidet/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "omidet/params.hpp"

namespace omidet {

namespace {

constexpr std::int64_t kBaseTime = 1700000000;  // fixed era start
constexpr std::int64_t kDay = 86400;
constexpr int kTopicTokens = 3;
constexpr int kCausalTokens = 3;

// Readable pseudo-word for a vocabulary index: three consonant-vowel
// syllables in mixed radix, unique per index.
std::string vocab_word(int index) {
    static const std::string consonants = "bdfgklmnprstvz";
    static const std::string vowels = "aeiou";
    std::string word;
    int x = index;
    for (int s = 0; s < 3; ++s) {
        word += consonants[static_cast<std::size_t>(x % 14)];
        x /= 14;
        word += vowels[static_cast<std::size_t>(x % 5)];
        x /= 5;
    }
    return word;
}

std::string join_and(const std::vector<std::string>& words) {
    std::string out;
    for (std::size_t i = 0; i < words.size(); ++i) {
        if (i > 0) out += (i + 1 == words.size()) ? " and " : ", ";
        out += words[i];
    }
    return out;
}

std::string target_text(const std::vector<std::string>& topic,
                        const std::vector<std::string>& causal_or_filler) {
    return "Officials reviewed the " + topic[0] + " " + topic[1] +
           " situation in " + topic[2] + ". Reports confirm " +
           causal_or_filler[0] + " and " + causal_or_filler[1] +
           " as driving factors. Analysts also cite " + causal_or_filler[2] +
           " in the final assessment.";
}

// Context wording draws only on words the target template also uses, so
// the stub annotator's shared-but-absent-token rule can fire solely on
// causal tokens a fake target omitted — never on template scaffolding.
std::string context_text(const std::vector<std::string>& topic,
                         const std::vector<std::string>& facts) {
    std::string out = "Officials reviewed the " + topic[0] + " " + topic[1] +
                      " situation in " + topic[2] + ". ";
    if (facts.empty()) {
        out += "Analysts also reviewed the final assessment.";
    } else {
        out += "Reports confirm " + join_and(facts) + " as driving factors.";
    }
    return out;
}

}  // namespace

SyntheticCorpora generate_synthetic(const SyntheticSpec& spec) {
    if (spec.n_events <= 0 || spec.items_per_event <= 0) {
        throw std::invalid_argument("generate_synthetic: counts must be positive");
    }
    if (spec.omission_rate <= 0.0 || spec.omission_rate > 1.0) {
        throw std::invalid_argument(
            "generate_synthetic: omission_rate must be in (0, 1]");
    }
    if (spec.label_rule != "parity") {
        throw std::invalid_argument("generate_synthetic: unknown label_rule '" +
                                    spec.label_rule + "'");
    }
    const int words_per_event = kTopicTokens + kCausalTokens;
    if (spec.fact_vocab < spec.n_events * words_per_event) {
        throw std::invalid_argument(
            "generate_synthetic: fact_vocab too small; need at least " +
            std::to_string(spec.n_events * words_per_event));
    }

    // Seed-dependent assignment of disjoint vocabulary slices to events.
    Rng rng(spec.seed);
    std::vector<int> perm(static_cast<std::size_t>(spec.fact_vocab));
    std::iota(perm.begin(), perm.end(), 0);
    for (std::size_t i = perm.size(); i > 1; --i) {
        std::swap(perm[i - 1], perm[rng.below(i)]);
    }

    const int n_omit = std::clamp(
        static_cast<int>(std::lround(spec.omission_rate * kCausalTokens)), 1,
        kCausalTokens);
    const int n_train = (3 * spec.n_events) / 5;
    const int n_val = spec.n_events / 5;

    SyntheticCorpora out;
    for (int e = 0; e < spec.n_events; ++e) {
        std::vector<std::string> topic, causal;
        for (int i = 0; i < kTopicTokens; ++i) {
            topic.push_back(vocab_word(
                perm[static_cast<std::size_t>(e * words_per_event + i)]));
        }
        for (int i = 0; i < kCausalTokens; ++i) {
            causal.push_back(vocab_word(perm[static_cast<std::size_t>(
                e * words_per_event + kTopicTokens + i)]));
        }

        const std::int64_t target_ts = kBaseTime + std::int64_t(e) * 7 * kDay;
        const bool fake = (e % 2) == 1;

        NewsItem target;
        target.id = "t" + std::to_string(e);
        target.timestamp = target_ts;
        target.label = fake ? 1 : 0;
        target.split = e < n_train            ? Split::Train
                       : e < n_train + n_val  ? Split::Val
                                              : Split::Test;
        if (fake) {
            // Same template, omitted causal tokens swapped for fillers no
            // other item contains.
            std::vector<std::string> slots = causal;
            for (int i = 0; i < n_omit; ++i) {
                slots[static_cast<std::size_t>(i)] =
                    "filler" + std::to_string(e) + "x" + std::to_string(i);
            }
            target.text = target_text(topic, slots);
        } else {
            target.text = target_text(topic, causal);
        }
        out.targets.add(std::move(target));

        for (int i = 0; i < spec.items_per_event; ++i) {
            // Causal token j lands in context items j%m and (j+1)%m, so
            // every token is corroborated by at least two items when m >= 2.
            std::vector<std::string> facts;
            for (int j = 0; j < kCausalTokens; ++j) {
                const int m = spec.items_per_event;
                if (j % m == i || (j + 1) % m == i) {
                    facts.push_back(causal[static_cast<std::size_t>(j)]);
                }
            }
            NewsItem ctx;
            ctx.id = "c" + std::to_string(e) + "-" + std::to_string(i);
            ctx.timestamp = target_ts - std::int64_t(i + 1) * 3600;
            ctx.text = context_text(topic, facts);
            out.context.add(std::move(ctx));
        }
    }
    return out;
}

}  // namespace omidet
