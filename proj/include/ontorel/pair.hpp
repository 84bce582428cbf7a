#pragma once

#include <cstddef>
#include <string>
#include <utility>

#include "ontorel/errors.hpp"

namespace ontorel {

/// Ordered pair of topic surface forms. Casing and internal spacing are
/// preserved verbatim because the strings are substituted into prompts as-is.
struct TopicPair {
    std::string topic_a;
    std::string topic_b;

    TopicPair() = default;
    TopicPair(std::string a, std::string b) : topic_a(std::move(a)), topic_b(std::move(b)) {
        if (topic_a.empty() || topic_b.empty())
            throw UsageError("topic pair members must be non-empty");
    }

    bool operator==(const TopicPair&) const = default;

    /// Canonical key for the unordered pair {a, b}.
    std::pair<std::string, std::string> unordered_key() const {
        return topic_a <= topic_b ? std::make_pair(topic_a, topic_b)
                                  : std::make_pair(topic_b, topic_a);
    }

    TopicPair reversed() const { return TopicPair(topic_b, topic_a); }
};

/// Number of Unicode scalar values in a UTF-8 string (continuation bytes are
/// not counted). This is the "length of the topic's surface form" used by the
/// reconciliation tie-break rules.
inline std::size_t utf8_scalar_count(const std::string& s) {
    std::size_t n = 0;
    for (unsigned char c : s)
        if ((c & 0xC0) != 0x80) ++n;
    return n;
}

struct TopicPairHash {
    std::size_t operator()(const TopicPair& p) const {
        std::size_t h = std::hash<std::string>{}(p.topic_a);
        return h ^ (std::hash<std::string>{}(p.topic_b) + 0x9e3779b9 + (h << 6) + (h >> 2));
    }
};

} // namespace ontorel
