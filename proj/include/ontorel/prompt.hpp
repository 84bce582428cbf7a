#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

#include "ontorel/errors.hpp"
#include "ontorel/hash.hpp"
#include "ontorel/pair.hpp"

namespace ontorel {

enum class TemplateKind { standard, cot_phase1, cot_phase2 };

inline std::string_view template_file_name(TemplateKind kind) {
    switch (kind) {
    case TemplateKind::standard: return "standard.txt";
    case TemplateKind::cot_phase1: return "cot_phase1.txt";
    case TemplateKind::cot_phase2: return "cot_phase2.txt";
    }
    return "";
}

inline constexpr std::string_view kTopicAPlaceholder = "[TOPIC-A]";
inline constexpr std::string_view kTopicBPlaceholder = "[TOPIC-B]";
inline constexpr std::string_view kPreviousPlaceholder = "[PREVIOUS-RESPONSE]";

inline std::size_t count_occurrences(std::string_view haystack, std::string_view needle) {
    std::size_t n = 0;
    for (std::size_t pos = haystack.find(needle); pos != std::string_view::npos;
         pos = haystack.find(needle, pos + needle.size()))
        ++n;
    return n;
}

/// A prompt template as loaded from disk. The body is never normalized:
/// rendering reproduces its bytes exactly, with only the placeholders
/// replaced.
struct PromptTemplate {
    TemplateKind kind = TemplateKind::standard;
    std::string body;

    std::size_t placeholder_count() const {
        return count_occurrences(body, kTopicAPlaceholder) +
               count_occurrences(body, kTopicBPlaceholder) +
               count_occurrences(body, kPreviousPlaceholder);
    }

    std::string checksum() const { return sha256_hex(body); }

    void validate() const {
        std::size_t prev = count_occurrences(body, kPreviousPlaceholder);
        bool has_topics = count_occurrences(body, kTopicAPlaceholder) > 0 &&
                          count_occurrences(body, kTopicBPlaceholder) > 0;
        if (kind == TemplateKind::cot_phase2) {
            if (prev != 1)
                throw UsageError("cot-phase2 template must contain " +
                                 std::string(kPreviousPlaceholder) + " exactly once, found " +
                                 std::to_string(prev));
        } else {
            if (!has_topics)
                throw UsageError("template must contain both topic placeholders");
            if (prev != 0)
                throw UsageError("only the cot-phase2 template may reference " +
                                 std::string(kPreviousPlaceholder));
        }
    }
};

struct RenderedPrompt {
    std::string text;
    TopicPair pair;
    TemplateKind kind = TemplateKind::standard;
};

/// Substitutes the topic placeholders (and, for phase 2, the previous
/// response) in one left-to-right pass over the template. Values are inserted
/// verbatim, with no quoting or escaping, and substituted content is never
/// rescanned, so placeholder-shaped bytes inside a topic or a model response
/// pass through untouched.
inline RenderedPrompt render(const PromptTemplate& tmpl, const TopicPair& pair,
                             const std::optional<std::string>& previous = std::nullopt) {
    if ((tmpl.kind == TemplateKind::cot_phase2) != previous.has_value())
        throw UsageError(tmpl.kind == TemplateKind::cot_phase2
                             ? "cot-phase2 rendering requires the phase-1 response"
                             : "previous response is only accepted for cot-phase2 rendering");

    struct Slot {
        std::string_view token;
        const std::string* value;
    };
    std::string prev_value = previous.value_or("");
    std::array<Slot, 3> slots{{{kTopicAPlaceholder, &pair.topic_a},
                               {kTopicBPlaceholder, &pair.topic_b},
                               {kPreviousPlaceholder, &prev_value}}};

    std::string out;
    out.reserve(tmpl.body.size() + prev_value.size());
    std::size_t pos = 0;
    std::size_t substitutions = 0;
    while (pos < tmpl.body.size()) {
        std::size_t best = std::string::npos;
        const Slot* hit = nullptr;
        for (const Slot& s : slots) {
            std::size_t at = tmpl.body.find(s.token, pos);
            if (at < best) {
                best = at;
                hit = &s;
            }
        }
        if (!hit || best == std::string::npos) {
            out.append(tmpl.body, pos, std::string::npos);
            break;
        }
        out.append(tmpl.body, pos, best - pos);
        out.append(*hit->value);
        pos = best + hit->token.size();
        ++substitutions;
    }

    if (substitutions != tmpl.placeholder_count())
        throw Error("template placeholder left unsubstituted");
    return {std::move(out), pair, tmpl.kind};
}

/// The three templates of one experiment family, loaded from a directory
/// holding standard.txt, cot_phase1.txt and cot_phase2.txt (UTF-8, LF line
/// endings, no trailing newline).
struct PromptSet {
    PromptTemplate standard;
    PromptTemplate cot_phase1;
    PromptTemplate cot_phase2;

    const PromptTemplate& get(TemplateKind kind) const {
        switch (kind) {
        case TemplateKind::standard: return standard;
        case TemplateKind::cot_phase1: return cot_phase1;
        case TemplateKind::cot_phase2: return cot_phase2;
        }
        return standard;
    }
};

inline PromptSet load_prompt_set(const std::string& dir) {
    auto load_one = [&](TemplateKind kind) {
        std::string path = dir + "/" + std::string(template_file_name(kind));
        PromptTemplate tmpl{kind, read_file_bytes(path)};
        tmpl.validate();
        return tmpl;
    };
    return {load_one(TemplateKind::standard), load_one(TemplateKind::cot_phase1),
            load_one(TemplateKind::cot_phase2)};
}

} // namespace ontorel
