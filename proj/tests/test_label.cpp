#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "ontorel/label.hpp"

using namespace ontorel;

TEST_CASE("inverse swaps the hierarchical labels and fixes the symmetric ones") {
    CHECK(inverse(RelationLabel::broader) == RelationLabel::narrower);
    CHECK(inverse(RelationLabel::narrower) == RelationLabel::broader);
    CHECK(inverse(RelationLabel::same_as) == RelationLabel::same_as);
    CHECK(inverse(RelationLabel::other) == RelationLabel::other);
}

TEST_CASE("inverse is an involution on every variant") {
    for (RelationLabel l : kAllLabels) CHECK(inverse(inverse(l)) == l);
}

TEST_CASE("statement numbers outside [1,6] cannot be constructed") {
    CHECK_THROWS_AS(StatementNumber(0), UsageError);
    CHECK_THROWS_AS(StatementNumber(7), UsageError);
    CHECK_THROWS_AS(StatementNumber(-3), UsageError);
    CHECK(StatementNumber(1).value() == 1);
    CHECK(StatementNumber(6).value() == 6);
}

TEST_CASE("statement_to_label maps the six statements onto the four labels") {
    CHECK(statement_to_label(StatementNumber(1)) == RelationLabel::broader);
    CHECK(statement_to_label(StatementNumber(2)) == RelationLabel::broader);
    CHECK(statement_to_label(StatementNumber(3)) == RelationLabel::narrower);
    CHECK(statement_to_label(StatementNumber(4)) == RelationLabel::narrower);
    CHECK(statement_to_label(StatementNumber(5)) == RelationLabel::same_as);
    CHECK(statement_to_label(StatementNumber(6)) == RelationLabel::other);

    std::set<RelationLabel> image;
    for (int n = 1; n <= 6; ++n) image.insert(statement_to_label(StatementNumber(n)));
    CHECK(image.size() == 4);  // surjective onto the label set
}

TEST_CASE("label_to_statement answers with the topic-A-first statement") {
    for (RelationLabel l : kAllLabels)
        CHECK(statement_to_label(label_to_statement(l)) == l);
    CHECK(label_to_statement(RelationLabel::broader).value() == 1);
    CHECK(label_to_statement(RelationLabel::narrower).value() == 3);
}

TEST_CASE("labels serialize as lowercase tokens") {
    CHECK(label_token(RelationLabel::broader) == "broader");
    CHECK(label_token(RelationLabel::narrower) == "narrower");
    CHECK(label_token(RelationLabel::same_as) == "same-as");
    CHECK(label_token(RelationLabel::other) == "other");
    for (RelationLabel l : kAllLabels) CHECK(label_from_token(label_token(l)) == l);
    CHECK_FALSE(label_from_token("sameas").has_value());
    CHECK_FALSE(label_from_token("invalid").has_value());
}

TEST_CASE("an invalid outcome never equals any label") {
    PredictionOutcome invalid = PredictionOutcome::invalid("no-answer");
    for (RelationLabel l : kAllLabels) {
        CHECK_FALSE(invalid == l);
        CHECK_FALSE(invalid == PredictionOutcome(l));
    }
    CHECK(invalid.token() == "invalid");
    CHECK(invalid.reason() == "no-answer");
    CHECK(PredictionOutcome(RelationLabel::broader) == RelationLabel::broader);
    CHECK(PredictionOutcome(RelationLabel::broader).token() == "broader");
}
