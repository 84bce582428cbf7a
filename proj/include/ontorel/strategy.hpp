#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "ontorel/backend.hpp"
#include "ontorel/csv.hpp"
#include "ontorel/errors.hpp"
#include "ontorel/gold.hpp"
#include "ontorel/label.hpp"
#include "ontorel/parser.hpp"
#include "ontorel/prompt.hpp"

namespace ontorel {

enum class Prompting { standard, cot };
enum class Direction { one_way, two_way };

/// One of the four experiments: {standard, cot} x {one-way, two-way}.
struct StrategyKind {
    Prompting prompting = Prompting::standard;
    Direction direction = Direction::one_way;

    bool operator==(const StrategyKind&) const = default;
};

inline std::string strategy_token(StrategyKind kind) {
    std::string out = kind.prompting == Prompting::standard ? "std" : "cot";
    out += kind.direction == Direction::one_way ? "-1w" : "-2w";
    return out;
}

inline std::optional<StrategyKind> strategy_from_token(std::string_view token) {
    StrategyKind kind;
    if (token == "std-1w") kind = {Prompting::standard, Direction::one_way};
    else if (token == "std-2w") kind = {Prompting::standard, Direction::two_way};
    else if (token == "cot-1w") kind = {Prompting::cot, Direction::one_way};
    else if (token == "cot-2w") kind = {Prompting::cot, Direction::two_way};
    else return std::nullopt;
    return kind;
}

inline constexpr std::array<StrategyKind, 4> kAllStrategies = {
    StrategyKind{Prompting::standard, Direction::one_way},
    StrategyKind{Prompting::standard, Direction::two_way},
    StrategyKind{Prompting::cot, Direction::one_way},
    StrategyKind{Prompting::cot, Direction::two_way}};

/// The branch answers of one pair: f reads t_A-to-t_B, s (two-way only)
/// reads t_B-to-t_A.
struct BranchOutcome {
    PredictionOutcome forward;
    std::optional<PredictionOutcome> reverse;
};

struct PairPrediction {
    TopicPair pair;
    StrategyKind strategy;
    BranchOutcome branches;
    PredictionOutcome final;
    std::optional<int> applied_rule;  // set when both branches were valid
};

struct ReconcileResult {
    RelationLabel label = RelationLabel::other;
    int rule = 8;
};

/// Combines the forward and reverse branch labels of a two-way run. The
/// rules form an ordered list biased toward keeping the hierarchical
/// structure; the first match wins and rule 8 falls back to the forward
/// answer. Lengths are Unicode scalar counts of the original surface forms
/// and break ties when both branches agree on a hierarchical label.
inline ReconcileResult reconcile(RelationLabel f, RelationLabel s, std::size_t len_a,
                                 std::size_t len_b) {
    const auto B = RelationLabel::broader;
    const auto N = RelationLabel::narrower;
    const auto S = RelationLabel::same_as;
    const auto O = RelationLabel::other;

    if (f == B && s == N) return {B, 1};
    if (f == N && s == B) return {N, 2};
    bool both_same_hierarchical = (f == N && s == N) || (f == B && s == B);
    if (both_same_hierarchical && len_a <= len_b) return {B, 3};
    if (both_same_hierarchical && len_a > len_b) return {N, 4};
    if (f == S && s == S) return {S, 5};
    if ((f == B && s == O) || (f == O && s == N)) return {B, 6};
    if ((f == N && s == O) || (f == O && s == B)) return {N, 7};
    return {f, 8};
}

/// Runs one branch: renders the prompt(s) for the pair as given, performs
/// the exchange(s), and parses the final answer. CoT is the two-phase
/// interaction: the phase-1 discussion is embedded verbatim into the phase-2
/// prompt, and only the phase-2 answer is parsed.
inline PredictionOutcome run_branch(const TopicPair& pair, Prompting prompting, Backend& backend,
                                    const PromptSet& prompts, const ParsePolicy& policy) {
    if (prompting == Prompting::standard) {
        RenderedPrompt prompt = render(prompts.standard, pair);
        Exchange ex = backend.complete(prompt.text);
        return parse_response(ex.response, policy);
    }
    RenderedPrompt phase1 = render(prompts.cot_phase1, pair);
    Exchange thoughts =
        backend.complete(phase1.text, backend.config().cot_phase1_max_output_tokens);
    RenderedPrompt phase2 = render(prompts.cot_phase2, pair, thoughts.response);
    Exchange answer = backend.complete(phase2.text);
    return parse_response(answer.response, policy);
}

inline PairPrediction run_one_way(const TopicPair& pair, Prompting prompting, Backend& backend,
                                  const PromptSet& prompts, const ParsePolicy& policy) {
    PairPrediction out;
    out.pair = pair;
    out.strategy = {prompting, Direction::one_way};
    out.branches.forward = run_branch(pair, prompting, backend, prompts, policy);
    out.final = out.branches.forward;
    return out;
}

/// Queries both orders and reconciles. When exactly one branch parses, its
/// A-to-B reading is used directly (the reverse label passes through inverse
/// for hierarchical answers) and no rule number is recorded; when both fail
/// the final stays invalid.
inline PairPrediction run_two_way(const TopicPair& pair, Prompting prompting, Backend& backend,
                                  const PromptSet& prompts, const ParsePolicy& policy) {
    PairPrediction out;
    out.pair = pair;
    out.strategy = {prompting, Direction::two_way};
    out.branches.forward = run_branch(pair, prompting, backend, prompts, policy);
    out.branches.reverse = run_branch(pair.reversed(), prompting, backend, prompts, policy);

    const PredictionOutcome& f = out.branches.forward;
    const PredictionOutcome& s = *out.branches.reverse;
    if (f.is_valid() && s.is_valid()) {
        ReconcileResult r = reconcile(f.label(), s.label(), utf8_scalar_count(pair.topic_a),
                                      utf8_scalar_count(pair.topic_b));
        out.final = r.label;
        out.applied_rule = r.rule;
    } else if (f.is_valid()) {
        out.final = f;
    } else if (s.is_valid()) {
        out.final = is_hierarchical(s.label()) ? inverse(s.label()) : s.label();
    } else {
        out.final = PredictionOutcome::invalid("both-branches-invalid");
    }
    return out;
}

inline PairPrediction run_pair(const TopicPair& pair, StrategyKind strategy, Backend& backend,
                               const PromptSet& prompts, const ParsePolicy& policy) {
    return strategy.direction == Direction::one_way
               ? run_one_way(pair, strategy.prompting, backend, prompts, policy)
               : run_two_way(pair, strategy.prompting, backend, prompts, policy);
}

inline constexpr const char* kPredictionsCsvHeader =
    "topic_a,topic_b,gold,strategy,f_label,s_label,final,applied_rule";

/// Writes predictions aligned with their gold records (same order, same
/// length). Absent fields (reverse branch of one-way runs, rule number) stay
/// empty.
inline void write_predictions_csv(std::ostream& os, const std::vector<PairPrediction>& predictions,
                                  const std::vector<GoldRecord>& gold) {
    if (predictions.size() != gold.size())
        throw UsageError("predictions and gold records differ in length");
    os << kPredictionsCsvHeader << '\n';
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const PairPrediction& p = predictions[i];
        if (!(p.pair == gold[i].pair))
            throw UsageError("prediction row " + std::to_string(i) +
                             " is not aligned with its gold record");
        csv_write_row(os, {p.pair.topic_a, p.pair.topic_b,
                           std::string(label_token(gold[i].label)), strategy_token(p.strategy),
                           p.branches.forward.token(),
                           p.branches.reverse ? p.branches.reverse->token() : "",
                           p.final.token(),
                           p.applied_rule ? std::to_string(*p.applied_rule) : ""});
    }
}

struct LoadedPrediction {
    TopicPair pair;
    RelationLabel gold = RelationLabel::other;
    StrategyKind strategy;
    PredictionOutcome final;
};

inline std::vector<LoadedPrediction> load_predictions_csv(std::istream& in) {
    auto rows = csv_read(in);
    std::vector<std::string> header{"topic_a", "topic_b", "gold",  "strategy",
                                    "f_label", "s_label", "final", "applied_rule"};
    if (rows.empty() || rows[0] != header)
        throw ParseError("predictions CSV must start with header '" +
                             std::string(kPredictionsCsvHeader) + "'",
                         1);
    std::vector<LoadedPrediction> out;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& row = rows[i];
        if (row.size() != 8)
            throw ParseError("prediction row must have 8 fields, got " +
                                 std::to_string(row.size()),
                             i + 1);
        LoadedPrediction p;
        p.pair = TopicPair(row[0], row[1]);
        auto gold = label_from_token(row[2]);
        auto strategy = strategy_from_token(row[3]);
        if (!gold) throw ParseError("unknown gold label '" + row[2] + "'", i + 1);
        if (!strategy) throw ParseError("unknown strategy token '" + row[3] + "'", i + 1);
        p.gold = *gold;
        p.strategy = *strategy;
        if (row[6] == "invalid") {
            p.final = PredictionOutcome::invalid("recorded-invalid");
        } else {
            auto final_label = label_from_token(row[6]);
            if (!final_label) throw ParseError("unknown final label '" + row[6] + "'", i + 1);
            p.final = *final_label;
        }
        out.push_back(std::move(p));
    }
    return out;
}

} // namespace ontorel
