#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "ontorel/errors.hpp"

namespace ontorel {

/// The four relation classes between a topic pair (t_A, t_B), read A-to-B:
/// broader means t_A is a parent topic of t_B, narrower its inverse, same-as
/// marks interchangeable labels, other the absence of all of these.
enum class RelationLabel { broader, narrower, same_as, other };

inline constexpr std::array<RelationLabel, 4> kAllLabels = {
    RelationLabel::broader, RelationLabel::narrower, RelationLabel::same_as,
    RelationLabel::other};

/// broader and narrower are inverse relationships; same-as and other are
/// symmetric, so they map to themselves.
inline constexpr RelationLabel inverse(RelationLabel label) {
    switch (label) {
    case RelationLabel::broader: return RelationLabel::narrower;
    case RelationLabel::narrower: return RelationLabel::broader;
    case RelationLabel::same_as: return RelationLabel::same_as;
    case RelationLabel::other: return RelationLabel::other;
    }
    return RelationLabel::other; // unreachable
}

inline constexpr bool is_hierarchical(RelationLabel label) {
    return label == RelationLabel::broader || label == RelationLabel::narrower;
}

/// Lowercase serialization tokens: broader, narrower, same-as, other.
inline std::string_view label_token(RelationLabel label) {
    switch (label) {
    case RelationLabel::broader: return "broader";
    case RelationLabel::narrower: return "narrower";
    case RelationLabel::same_as: return "same-as";
    case RelationLabel::other: return "other";
    }
    return "";
}

inline std::optional<RelationLabel> label_from_token(std::string_view token) {
    for (RelationLabel l : kAllLabels)
        if (label_token(l) == token) return l;
    return std::nullopt;
}

inline std::size_t label_index(RelationLabel label) {
    return static_cast<std::size_t>(label);
}

/// One of the six numbered answer statements offered by the prompts.
/// Constructing any value outside [1, 6] is rejected.
class StatementNumber {
public:
    explicit StatementNumber(int value) : value_(value) {
        if (value < 1 || value > 6)
            throw UsageError("statement number must be in [1, 6], got " +
                             std::to_string(value));
    }
    int value() const { return value_; }
    bool operator==(const StatementNumber&) const = default;

private:
    int value_;
};

/// Statement-to-label mapping. Statements 1/2 and 3/4 are paraphrases of the
/// same A-to-B relation: statement 2 phrases broader from t_B's side and
/// statement 4 does the same for narrower.
inline RelationLabel statement_to_label(StatementNumber n) {
    switch (n.value()) {
    case 1:
    case 2: return RelationLabel::broader;
    case 3:
    case 4: return RelationLabel::narrower;
    case 5: return RelationLabel::same_as;
    default: return RelationLabel::other;
    }
}

/// Canonical statement for a label, phrased with t_A as subject (the form a
/// scripted oracle answers with): 1 broader, 3 narrower, 5 same-as, 6 other.
inline StatementNumber label_to_statement(RelationLabel label) {
    switch (label) {
    case RelationLabel::broader: return StatementNumber(1);
    case RelationLabel::narrower: return StatementNumber(3);
    case RelationLabel::same_as: return StatementNumber(5);
    case RelationLabel::other: return StatementNumber(6);
    }
    return StatementNumber(6); // unreachable
}

/// Either a parsed relation label or an explicit invalid state carrying the
/// reason the model answer could not be interpreted. Invalid never compares
/// equal to any label; defaulting unparsable answers to `other` would inflate
/// that class's counts.
class PredictionOutcome {
public:
    PredictionOutcome() : value_(Invalid{"uninitialized"}) {}
    PredictionOutcome(RelationLabel label) : value_(label) {}

    static PredictionOutcome invalid(std::string reason) {
        PredictionOutcome o;
        o.value_ = Invalid{std::move(reason)};
        return o;
    }

    bool is_valid() const { return std::holds_alternative<RelationLabel>(value_); }
    RelationLabel label() const {
        if (!is_valid()) throw Error("invalid outcome has no label");
        return std::get<RelationLabel>(value_);
    }
    const std::string& reason() const {
        static const std::string empty;
        if (is_valid()) return empty;
        return std::get<Invalid>(value_).reason;
    }

    /// Label token, or "invalid" for the invalid state.
    std::string token() const {
        return is_valid() ? std::string(label_token(label())) : "invalid";
    }

    bool operator==(const PredictionOutcome& rhs) const {
        if (is_valid() != rhs.is_valid()) return false;
        if (!is_valid()) return reason() == rhs.reason();
        return label() == rhs.label();
    }
    bool operator==(RelationLabel rhs) const { return is_valid() && label() == rhs; }

private:
    struct Invalid {
        std::string reason;
        bool operator==(const Invalid&) const = default;
    };
    std::variant<RelationLabel, Invalid> value_;
};

} // namespace ontorel
