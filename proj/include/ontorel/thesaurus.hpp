#pragma once

#include <algorithm>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "ontorel/errors.hpp"
#include "ontorel/label.hpp"

namespace ontorel {

/// One term block from the normalized thesaurus text. Relation targets are
/// kept as normalized surface forms; BT/NT carry the hierarchy, USE points a
/// non-preferred term at its preferred form, UF is the reverse pointer, RT
/// is kept for exclusion checks only.
struct ThesaurusEntry {
    std::string term;
    std::set<std::string> broader_terms;   // BT
    std::set<std::string> narrower_terms;  // NT
    std::optional<std::string> use;        // USE
    std::set<std::string> used_for;        // UF
    std::set<std::string> related;         // RT

    bool operator==(const ThesaurusEntry&) const = default;
};

struct RelationTriple {
    std::string subject;
    std::string object;
    RelationLabel label = RelationLabel::other;

    auto tie() const { return std::tie(subject, object, label); }
    bool operator==(const RelationTriple& rhs) const { return tie() == rhs.tie(); }
    bool operator<(const RelationTriple& rhs) const { return tie() < rhs.tie(); }
};

struct ParsedThesaurus {
    std::vector<ThesaurusEntry> entries;  // sorted by term
    std::vector<std::string> warnings;

    /// All entry terms, sorted.
    std::vector<std::string> terms() const {
        std::vector<std::string> out;
        out.reserve(entries.size());
        for (const auto& e : entries) out.push_back(e.term);
        return out;
    }
};

namespace detail {

inline std::string normalize_ws(const std::string& raw) {
    std::string out;
    bool in_space = false;
    for (char c : raw) {
        bool ws = c == ' ' || c == '\t' || c == '\r';
        if (ws) {
            in_space = !out.empty();
        } else {
            if (in_space) out += ' ';
            in_space = false;
            out += c;
        }
    }
    return out;
}

inline bool is_blank(const std::string& line) {
    return line.find_first_not_of(" \t\r") == std::string::npos;
}

inline bool all_upper_alpha(const std::string& s) {
    if (s.empty()) return false;
    return std::all_of(s.begin(), s.end(), [](unsigned char c) { return c >= 'A' && c <= 'Z'; });
}

} // namespace detail

/// Parses the line-oriented thesaurus format: a term line at column zero,
/// followed by indented `<TAG> <term>` relation lines with TAG one of
/// BT, NT, USE, UF, RT (case-sensitive); a blank line or the next term line
/// ends the block. Duplicate relation lines are deduplicated, duplicate term
/// blocks merged with a warning, unknown upper-case tags and self-references
/// are reported as warnings. Malformed lines throw ParseError with the line
/// number.
inline ParsedThesaurus parse_thesaurus(std::istream& in) {
    std::map<std::string, ThesaurusEntry> by_term;
    std::vector<std::string> order_seen;
    std::vector<std::string> warnings;
    ThesaurusEntry* current = nullptr;
    std::string line;
    std::size_t lineno = 0;

    auto warn = [&](std::size_t ln, const std::string& msg) {
        warnings.push_back("line " + std::to_string(ln) + ": " + msg);
    };

    while (std::getline(in, line)) {
        ++lineno;
        if (detail::is_blank(line)) {
            current = nullptr;
            continue;
        }
        bool indented = line[0] == ' ' || line[0] == '\t';
        if (!indented) {
            std::string term = detail::normalize_ws(line);
            auto [it, inserted] = by_term.try_emplace(term, ThesaurusEntry{.term = term});
            if (inserted) order_seen.push_back(term);
            else warn(lineno, "duplicate entry for term '" + term + "' merged");
            current = &it->second;
            continue;
        }
        if (!current)
            throw ParseError("relation line outside of a term block", lineno);

        std::string body = detail::normalize_ws(line);
        auto space = body.find(' ');
        std::string tag = body.substr(0, space);
        std::string target = space == std::string::npos ? "" : body.substr(space + 1);

        bool known = tag == "BT" || tag == "NT" || tag == "USE" || tag == "UF" || tag == "RT";
        if (!known) {
            if (detail::all_upper_alpha(tag)) {
                warn(lineno, "unknown tag '" + tag + "' ignored");
                continue;
            }
            throw ParseError("expected a relation tag (BT/NT/USE/UF/RT), got '" + tag + "'", lineno);
        }
        if (target.empty())
            throw ParseError("missing term after tag " + tag, lineno);
        if (target == current->term) {
            warn(lineno, "term '" + target + "' relates to itself; line dropped");
            continue;
        }

        if (tag == "BT") current->broader_terms.insert(target);
        else if (tag == "NT") current->narrower_terms.insert(target);
        else if (tag == "UF") current->used_for.insert(target);
        else if (tag == "RT") current->related.insert(target);
        else {
            if (current->use && *current->use != target)
                warn(lineno, "entry '" + current->term + "' has multiple USE targets; keeping '" +
                                 *current->use + "'");
            else
                current->use = target;
        }
    }

    ParsedThesaurus out;
    out.warnings = std::move(warnings);
    for (auto& [term, entry] : by_term) {
        if (entry.use && (!entry.broader_terms.empty() || !entry.narrower_terms.empty()))
            out.warnings.push_back("entry '" + term +
                                   "' carries USE together with BT/NT tags");
        out.entries.push_back(std::move(entry));
    }
    return out;
}

struct ExtractionResult {
    std::vector<RelationTriple> triples;  // sorted by (subject, object, label)
    std::vector<std::string> warnings;
};

/// Turns parsed entries into relation triples:
///   A BT B  -> (A, narrower, B)      A NT B  -> (A, broader, B)
///   A USE B / A UF B -> one same-as triple per unordered pair, oriented
///   with the lexicographically smaller term as subject.
/// RT emits nothing (related-term is not a prediction class). Missing
/// reciprocal tags (BT without the matching NT, USE without UF) are reported
/// as warnings, never fatal.
inline ExtractionResult extract_relations(const std::vector<ThesaurusEntry>& entries) {
    ExtractionResult out;
    std::set<RelationTriple> triples;
    std::map<std::string, const ThesaurusEntry*> index;
    for (const auto& e : entries) index.emplace(e.term, &e);

    auto has = [&](const std::string& term) -> const ThesaurusEntry* {
        auto it = index.find(term);
        return it == index.end() ? nullptr : it->second;
    };

    for (const auto& e : entries) {
        for (const auto& parent : e.broader_terms) {
            triples.insert({e.term, parent, RelationLabel::narrower});
            const ThesaurusEntry* p = has(parent);
            if (!p || !p->narrower_terms.count(e.term))
                out.warnings.push_back("'" + e.term + "' BT '" + parent +
                                       "' has no reciprocal NT");
        }
        for (const auto& child : e.narrower_terms) {
            triples.insert({e.term, child, RelationLabel::broader});
            const ThesaurusEntry* c = has(child);
            if (!c || !c->broader_terms.count(e.term))
                out.warnings.push_back("'" + e.term + "' NT '" + child +
                                       "' has no reciprocal BT");
        }
        if (e.use) {
            const auto& [lo, hi] = std::minmax(e.term, *e.use);
            triples.insert({lo, hi, RelationLabel::same_as});
            const ThesaurusEntry* pref = has(*e.use);
            if (!pref || !pref->used_for.count(e.term))
                out.warnings.push_back("'" + e.term + "' USE '" + *e.use +
                                       "' has no reciprocal UF");
        }
        for (const auto& np : e.used_for) {
            const auto& [lo, hi] = std::minmax(e.term, np);
            triples.insert({lo, hi, RelationLabel::same_as});
            const ThesaurusEntry* n = has(np);
            if (!n || !n->use || *n->use != e.term)
                out.warnings.push_back("'" + e.term + "' UF '" + np +
                                       "' has no reciprocal USE");
        }
    }
    out.triples.assign(triples.begin(), triples.end());
    return out;
}

} // namespace ontorel
