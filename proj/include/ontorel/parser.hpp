#pragma once

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ontorel/label.hpp"

namespace ontorel {

enum class ParseMode { strict, lenient };
enum class ConflictPolicy { first_match, invalid };

/// Fixed per run and recorded in the report header. The default (lenient,
/// conflicts invalid) accepts verbose answers but refuses to guess between
/// contradictory ones.
struct ParsePolicy {
    ParseMode mode = ParseMode::lenient;
    ConflictPolicy on_conflict = ConflictPolicy::invalid;

    bool operator==(const ParsePolicy&) const = default;
};

inline std::string policy_token(const ParsePolicy& policy) {
    std::string out = policy.mode == ParseMode::strict ? "strict" : "lenient";
    out += '/';
    out += policy.on_conflict == ConflictPolicy::first_match ? "first-match" : "invalid";
    return out;
}

inline std::optional<ParsePolicy> policy_from_token(std::string_view token) {
    auto slash = token.find('/');
    std::string_view mode = token.substr(0, slash);
    std::string_view conflict = slash == std::string_view::npos ? "invalid" : token.substr(slash + 1);
    ParsePolicy p;
    if (mode == "strict") p.mode = ParseMode::strict;
    else if (mode == "lenient") p.mode = ParseMode::lenient;
    else return std::nullopt;
    if (conflict == "first-match") p.on_conflict = ConflictPolicy::first_match;
    else if (conflict == "invalid") p.on_conflict = ConflictPolicy::invalid;
    else return std::nullopt;
    return p;
}

namespace detail {

inline bool is_ws(unsigned char c) { return std::isspace(c) != 0; }
inline bool is_alnum(unsigned char c) { return std::isalnum(c) != 0; }

/// Accepts a response whose first non-whitespace character is a digit 1-6
/// standing alone: at end of text, or followed by whitespace, '.' or ')'
/// (after which the statement text may repeat).
inline std::optional<RelationLabel> strict_parse(std::string_view text) {
    std::size_t i = 0;
    while (i < text.size() && is_ws(static_cast<unsigned char>(text[i]))) ++i;
    if (i == text.size()) return std::nullopt;
    char c = text[i];
    if (c < '1' || c > '6') return std::nullopt;
    if (i + 1 < text.size()) {
        char next = text[i + 1];
        if (!is_ws(static_cast<unsigned char>(next)) && next != '.' && next != ')')
            return std::nullopt;
    }
    return statement_to_label(StatementNumber(c - '0'));
}

inline bool contains_ci_at(std::string_view text, std::size_t pos, std::string_view needle) {
    if (pos + needle.size() > text.size()) return false;
    for (std::size_t k = 0; k < needle.size(); ++k)
        if (std::tolower(static_cast<unsigned char>(text[pos + k])) !=
            std::tolower(static_cast<unsigned char>(needle[k])))
            return false;
    return true;
}

} // namespace detail

/// Extracts a prediction from raw model text.
///
/// Strict mode applies only the leading-digit rule. Lenient mode tries strict
/// first, then scans the whole text for the four statement phrases
/// (case-insensitive, read in the topic-A-first sense) and for standalone
/// digits 1-6 (no alphanumeric neighbour). Candidates resolving to a single
/// label yield that label; none yield invalid("no-answer"); several distinct
/// labels yield the earliest one under first-match or invalid("conflict")
/// otherwise.
inline PredictionOutcome parse_response(std::string_view text, const ParsePolicy& policy) {
    if (auto label = detail::strict_parse(text)) return *label;
    if (policy.mode == ParseMode::strict) return PredictionOutcome::invalid("no-answer");

    static const std::pair<std::string_view, RelationLabel> kPhrases[] = {
        {"is-broader-than", RelationLabel::broader},
        {"is-narrower-than", RelationLabel::narrower},
        {"is-same-as-than", RelationLabel::same_as},
        {"is-other-than", RelationLabel::other},
    };

    // label -> earliest position seen
    std::map<RelationLabel, std::size_t> earliest;
    auto record = [&](RelationLabel label, std::size_t pos) {
        auto [it, inserted] = earliest.try_emplace(label, pos);
        if (!inserted) it->second = std::min(it->second, pos);
    };

    for (const auto& [phrase, label] : kPhrases)
        for (std::size_t pos = 0; pos + phrase.size() <= text.size(); ++pos)
            if (detail::contains_ci_at(text, pos, phrase)) record(label, pos);

    for (std::size_t pos = 0; pos < text.size(); ++pos) {
        char c = text[pos];
        if (c < '1' || c > '6') continue;
        bool left_alnum = pos > 0 && detail::is_alnum(static_cast<unsigned char>(text[pos - 1]));
        bool right_alnum = pos + 1 < text.size() &&
                           detail::is_alnum(static_cast<unsigned char>(text[pos + 1]));
        if (left_alnum || right_alnum) continue;
        record(statement_to_label(StatementNumber(c - '0')), pos);
    }

    if (earliest.empty()) return PredictionOutcome::invalid("no-answer");
    if (earliest.size() == 1) return earliest.begin()->first;
    if (policy.on_conflict == ConflictPolicy::invalid) return PredictionOutcome::invalid("conflict");
    auto best = std::min_element(earliest.begin(), earliest.end(),
                                 [](const auto& a, const auto& b) { return a.second < b.second; });
    return best->first;
}

} // namespace ontorel
