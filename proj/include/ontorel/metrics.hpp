#pragma once

#include <array>
#include <cstdio>
#include <map>
#include <numeric>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "ontorel/errors.hpp"
#include "ontorel/gold.hpp"
#include "ontorel/label.hpp"
#include "ontorel/strategy.hpp"

namespace ontorel {

inline constexpr std::size_t kInvalidColumn = 4;

/// 4x5 table: rows are gold labels in canonical order, columns the predicted
/// labels plus a fifth column for unparsable answers. Folding invalids into
/// `other` would silently inflate that class, so they stay separate.
struct ConfusionMatrix {
    std::array<std::array<std::size_t, 5>, 4> counts{};
    std::size_t total = 0;

    std::size_t row_sum(std::size_t gold_row) const {
        const auto& row = counts[gold_row];
        return std::accumulate(row.begin(), row.end(), std::size_t{0});
    }
    std::size_t col_sum(std::size_t pred_col) const {
        std::size_t n = 0;
        for (const auto& row : counts) n += row[pred_col];
        return n;
    }

    bool operator==(const ConfusionMatrix&) const = default;
};

struct ClassScores {
    RelationLabel label = RelationLabel::other;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t support = 0;
    // true when the metric's denominator was zero and 0 was reported
    bool precision_flagged = false;
    bool recall_flagged = false;
};

/// Per-class scores derived from the matrix alone: precision divides true
/// positives by everything predicted as the class, recall by the gold count;
/// zero denominators score 0 and are flagged. Invalid predictions enter no
/// precision denominator but still count against recall.
inline std::array<ClassScores, 4> scores_from_matrix(const ConfusionMatrix& matrix) {
    std::array<ClassScores, 4> out;
    for (std::size_t c = 0; c < 4; ++c) {
        ClassScores& s = out[c];
        s.label = kAllLabels[c];
        s.support = matrix.row_sum(c);
        double tp = static_cast<double>(matrix.counts[c][c]);
        std::size_t predicted = matrix.col_sum(c);
        s.precision_flagged = predicted == 0;
        s.recall_flagged = s.support == 0;
        s.precision = predicted ? tp / static_cast<double>(predicted) : 0.0;
        s.recall = s.support ? tp / static_cast<double>(s.support) : 0.0;
        s.f1 = (s.precision + s.recall) > 0.0
                   ? 2.0 * s.precision * s.recall / (s.precision + s.recall)
                   : 0.0;
    }
    return out;
}

/// The macro convention of the result tables: the unweighted arithmetic mean
/// of the four per-class values, not the metric of pooled counts.
inline double macro_mean(const std::array<double, 4>& values) {
    return std::accumulate(values.begin(), values.end(), 0.0) / 4.0;
}

struct EvalReport {
    std::array<ClassScores, 4> per_class{};
    double macro_precision = 0.0;
    double macro_recall = 0.0;
    double macro_f1 = 0.0;
    ConfusionMatrix matrix;
    StrategyKind strategy;
    std::string model_id = "unknown";
    std::string parse_policy = "unknown";
    std::size_t invalid_count = 0;
    std::string dataset_id;
};

struct ScoreInput {
    TopicPair pair;
    PredictionOutcome final;
};

inline std::vector<ScoreInput> to_score_input(const std::vector<PairPrediction>& predictions) {
    std::vector<ScoreInput> out;
    out.reserve(predictions.size());
    for (const auto& p : predictions) out.push_back({p.pair, p.final});
    return out;
}

inline std::vector<ScoreInput> to_score_input(const std::vector<LoadedPrediction>& predictions) {
    std::vector<ScoreInput> out;
    out.reserve(predictions.size());
    for (const auto& p : predictions) out.push_back({p.pair, p.final});
    return out;
}

namespace detail {

inline std::string list_pairs(const std::vector<TopicPair>& pairs, std::size_t limit = 5) {
    std::string out;
    for (std::size_t i = 0; i < pairs.size() && i < limit; ++i) {
        if (i) out += ", ";
        out += "('" + pairs[i].topic_a + "', '" + pairs[i].topic_b + "')";
    }
    if (pairs.size() > limit) out += ", ... (" + std::to_string(pairs.size()) + " total)";
    return out;
}

} // namespace detail

/// Scores predictions against gold. Predictions must cover the gold pairs
/// exactly once each, matched by ordered pair; anything missing, duplicated
/// or unknown raises a coverage error listing the offenders. Aggregation is
/// pure counting, so prediction order never changes a single reported value.
inline EvalReport score(const std::vector<ScoreInput>& predictions, const GoldDataset& gold,
                        StrategyKind strategy, const std::string& model_id = "unknown",
                        const std::string& parse_policy = "unknown") {
    std::map<std::pair<std::string, std::string>, std::pair<RelationLabel, bool>> expected;
    for (const auto& r : gold.records)
        expected.emplace(std::make_pair(r.pair.topic_a, r.pair.topic_b),
                         std::make_pair(r.label, false));

    EvalReport report;
    std::vector<TopicPair> unknown, duplicated;
    for (const auto& p : predictions) {
        auto it = expected.find(std::make_pair(p.pair.topic_a, p.pair.topic_b));
        if (it == expected.end()) {
            unknown.push_back(p.pair);
            continue;
        }
        if (it->second.second) {
            duplicated.push_back(p.pair);
            continue;
        }
        it->second.second = true;
        std::size_t row = label_index(it->second.first);
        std::size_t col = p.final.is_valid() ? label_index(p.final.label()) : kInvalidColumn;
        ++report.matrix.counts[row][col];
        ++report.matrix.total;
    }
    if (!unknown.empty())
        throw CoverageError("predictions for pairs absent from gold: " +
                            detail::list_pairs(unknown));
    if (!duplicated.empty())
        throw CoverageError("duplicate predictions for pairs: " + detail::list_pairs(duplicated));
    std::vector<TopicPair> missing;
    for (const auto& [key, value] : expected)
        if (!value.second) missing.push_back(TopicPair(key.first, key.second));
    if (!missing.empty())
        throw CoverageError("gold pairs without a prediction: " + detail::list_pairs(missing));

    report.per_class = scores_from_matrix(report.matrix);
    auto pluck = [&](double ClassScores::* member) {
        std::array<double, 4> values{};
        for (std::size_t i = 0; i < 4; ++i) values[i] = report.per_class[i].*member;
        return values;
    };
    report.macro_precision = macro_mean(pluck(&ClassScores::precision));
    report.macro_recall = macro_mean(pluck(&ClassScores::recall));
    report.macro_f1 = macro_mean(pluck(&ClassScores::f1));
    report.invalid_count = report.matrix.col_sum(kInvalidColumn);
    report.strategy = strategy;
    report.model_id = model_id;
    report.parse_policy = parse_policy;
    report.dataset_id = gold.identity();
    return report;
}

struct ReportDiff {
    double macro_f1_delta = 0.0;
    std::array<double, 4> per_class_f1_delta{};
};

/// b minus a, per class and macro. Reports over different gold datasets do
/// not compare.
inline ReportDiff diff_reports(const EvalReport& a, const EvalReport& b) {
    if (a.dataset_id != b.dataset_id)
        throw ComparisonError("reports were computed on different gold datasets (" +
                              a.dataset_id.substr(0, 12) + "... vs " +
                              b.dataset_id.substr(0, 12) + "...)");
    ReportDiff d;
    d.macro_f1_delta = b.macro_f1 - a.macro_f1;
    for (std::size_t i = 0; i < 4; ++i)
        d.per_class_f1_delta[i] = b.per_class[i].f1 - a.per_class[i].f1;
    return d;
}

/// Three decimals, matching the paper's table formatting. Rounding happens
/// in binary round-to-nearest-even, the snprintf default.
inline std::string format_metric(double value) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", value);
    return buf;
}

inline void write_scores_csv(std::ostream& os, const EvalReport& report) {
    os << "class,precision,recall,f1,support\n";
    for (const auto& s : report.per_class)
        csv_write_row(os, {std::string(label_token(s.label)), format_metric(s.precision),
                           format_metric(s.recall), format_metric(s.f1),
                           std::to_string(s.support)});
    csv_write_row(os, {"macro", format_metric(report.macro_precision),
                       format_metric(report.macro_recall), format_metric(report.macro_f1),
                       std::to_string(report.matrix.total)});
}

inline void write_matrix_csv(std::ostream& os, const ConfusionMatrix& matrix) {
    os << "gold,broader,narrower,same-as,other,invalid\n";
    for (std::size_t r = 0; r < 4; ++r) {
        std::vector<std::string> row{std::string(label_token(kAllLabels[r]))};
        for (std::size_t c = 0; c < 5; ++c) row.push_back(std::to_string(matrix.counts[r][c]));
        csv_write_row(os, row);
    }
}

/// Human-readable report mirroring the paper's table layout.
inline void write_report_text(std::ostream& os, const EvalReport& report) {
    os << "model:        " << report.model_id << '\n';
    os << "strategy:     " << strategy_token(report.strategy) << '\n';
    os << "parse policy: " << report.parse_policy << '\n';
    os << "dataset:      " << report.dataset_id << '\n';
    os << "invalid:      " << report.invalid_count << '\n';
    os << '\n';
    char line[128];
    std::snprintf(line, sizeof(line), "%-10s %9s %9s %9s %9s\n", "CLASS", "P", "R", "F1",
                  "SUPPORT");
    os << line;
    bool any_flag = false;
    for (const auto& s : report.per_class) {
        std::string p = format_metric(s.precision) + (s.precision_flagged ? "*" : "");
        std::string r = format_metric(s.recall) + (s.recall_flagged ? "*" : "");
        any_flag = any_flag || s.precision_flagged || s.recall_flagged;
        std::snprintf(line, sizeof(line), "%-10s %9s %9s %9s %9zu\n",
                      std::string(label_token(s.label)).c_str(), p.c_str(), r.c_str(),
                      format_metric(s.f1).c_str(), s.support);
        os << line;
    }
    std::snprintf(line, sizeof(line), "%-10s %9s %9s %9s %9zu\n", "AVG",
                  format_metric(report.macro_precision).c_str(),
                  format_metric(report.macro_recall).c_str(),
                  format_metric(report.macro_f1).c_str(), report.matrix.total);
    os << line;
    os << '\n';
    os << "confusion matrix (rows gold, columns predicted):\n";
    std::snprintf(line, sizeof(line), "%-10s %9s %9s %9s %9s %9s\n", "", "broader", "narrower",
                  "same-as", "other", "invalid");
    os << line;
    for (std::size_t r = 0; r < 4; ++r) {
        std::snprintf(line, sizeof(line), "%-10s %9zu %9zu %9zu %9zu %9zu\n",
                      std::string(label_token(kAllLabels[r])).c_str(), report.matrix.counts[r][0],
                      report.matrix.counts[r][1], report.matrix.counts[r][2],
                      report.matrix.counts[r][3], report.matrix.counts[r][4]);
        os << line;
    }
    if (any_flag) os << "\n* zero-denominator metric, reported as 0\n";
}

inline nlohmann::ordered_json report_to_json(const EvalReport& report) {
    nlohmann::ordered_json j;
    j["strategy"] = strategy_token(report.strategy);
    j["model_id"] = report.model_id;
    j["parse_policy"] = report.parse_policy;
    j["dataset_id"] = report.dataset_id;
    j["invalid_count"] = report.invalid_count;
    j["macro"] = {{"precision", report.macro_precision},
                  {"recall", report.macro_recall},
                  {"f1", report.macro_f1}};
    j["per_class"] = nlohmann::ordered_json::array();
    for (const auto& s : report.per_class) {
        nlohmann::ordered_json c;
        c["label"] = std::string(label_token(s.label));
        c["precision"] = s.precision;
        c["recall"] = s.recall;
        c["f1"] = s.f1;
        c["support"] = s.support;
        c["precision_flagged"] = s.precision_flagged;
        c["recall_flagged"] = s.recall_flagged;
        j["per_class"].push_back(c);
    }
    j["matrix"] = nlohmann::ordered_json::array();
    for (const auto& row : report.matrix.counts)
        j["matrix"].push_back(row);
    j["total"] = report.matrix.total;
    return j;
}

inline EvalReport report_from_json(const nlohmann::json& j) {
    EvalReport report;
    auto strategy = strategy_from_token(j.at("strategy").get<std::string>());
    if (!strategy) throw ParseError("report has unknown strategy token");
    report.strategy = *strategy;
    report.model_id = j.at("model_id").get<std::string>();
    report.parse_policy = j.at("parse_policy").get<std::string>();
    report.dataset_id = j.at("dataset_id").get<std::string>();
    report.invalid_count = j.at("invalid_count").get<std::size_t>();
    report.macro_precision = j.at("macro").at("precision").get<double>();
    report.macro_recall = j.at("macro").at("recall").get<double>();
    report.macro_f1 = j.at("macro").at("f1").get<double>();
    const auto& classes = j.at("per_class");
    for (std::size_t i = 0; i < 4; ++i) {
        const auto& c = classes.at(i);
        ClassScores& s = report.per_class[i];
        auto label = label_from_token(c.at("label").get<std::string>());
        if (!label) throw ParseError("report has unknown class label");
        s.label = *label;
        s.precision = c.at("precision").get<double>();
        s.recall = c.at("recall").get<double>();
        s.f1 = c.at("f1").get<double>();
        s.support = c.at("support").get<std::size_t>();
        s.precision_flagged = c.at("precision_flagged").get<bool>();
        s.recall_flagged = c.at("recall_flagged").get<bool>();
    }
    for (std::size_t r = 0; r < 4; ++r)
        for (std::size_t c = 0; c < 5; ++c)
            report.matrix.counts[r][c] = j.at("matrix").at(r).at(c).get<std::size_t>();
    report.matrix.total = j.at("total").get<std::size_t>();
    return report;
}

} // namespace ontorel
