#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "faultforge/corpus.hpp"
#include "test_support.hpp"

using namespace faultforge;

namespace {

const char* kTinyHeader =
    "project,version,name,wmc,dit,noc,cbo,rfc,lcom,ca,ce,npm,lcom3,loc,dam,moa,mfa,cam,ic,cbm,"
    "amc,max_cc,avg_cc,bug";

std::string tiny_csv(const std::vector<std::string>& rows) {
    std::string out = kTinyHeader;
    out += "\n";
    for (const auto& r : rows) out += r + "\n";
    return out;
}

std::string row20(const std::string& first_metric, int bug) {
    std::string out = "p,1.0,c," + first_metric;
    for (int i = 1; i < 20; ++i) out += ",1";
    return out + "," + std::to_string(bug);
}

}  // namespace

TEST_CASE("load_csv binarizes bug counts and matches the published corpus counts") {
    const auto schema = FeatureSchema::ck_default();
    const Dataset ant = corpus::load_csv(test_support::data_file("ant-1.7.csv"), schema);
    CHECK(ant.rows() == 746);
    std::size_t faulty = 0;
    for (int y : ant.y) faulty += static_cast<std::size_t>(y);
    CHECK(faulty == 166);

    const Dataset jedit = corpus::load_csv(test_support::data_file("jedit-4.3.csv"), schema);
    CHECK(jedit.rows() == 492);
    faulty = 0;
    for (int y : jedit.y) faulty += static_cast<std::size_t>(y);
    CHECK(faulty == 11);
    const auto summary = corpus::summarize(jedit);
    REQUIRE(summary.size() == 1);
    CHECK(summary[0].rate == doctest::Approx(0.022));
}

TEST_CASE("empty file with a valid header loads as zero rows") {
    const Dataset d = corpus::parse_csv(tiny_csv({}), FeatureSchema::ck_default(), "empty");
    CHECK(d.rows() == 0);
}

TEST_CASE("missing cells accept both empty string and question mark") {
    const Dataset d = corpus::parse_csv(tiny_csv({row20("?", 0), row20("", 1), row20("3.5", 2)}),
                                        FeatureSchema::ck_default(), "t");
    CHECK(is_missing(d.X.at(0, 0)));
    CHECK(is_missing(d.X.at(1, 0)));
    CHECK(d.X.at(2, 0) == 3.5);
    CHECK(d.y == std::vector<int>{0, 1, 1});
}

TEST_CASE("malformed numeric cell reports row and column") {
    CHECK_THROWS_AS(corpus::parse_csv(tiny_csv({row20("oops", 0)}), FeatureSchema::ck_default(),
                                      "t"),
                    ParseError);
    try {
        corpus::parse_csv(tiny_csv({row20("oops", 0)}), FeatureSchema::ck_default(), "t");
    } catch (const ParseError& e) {
        CHECK(e.row == 2);
        CHECK(e.col == 4);
    }
}

TEST_CASE("header mismatch raises a schema error") {
    std::string body = std::string(kTinyHeader) + "\n";
    body[body.find("wmc")] = 'q';
    CHECK_THROWS_AS(corpus::parse_csv(body, FeatureSchema::ck_default(), "t"), SchemaError);
}

TEST_CASE("negative bug counts are rejected") {
    CHECK_THROWS_AS(corpus::parse_csv(tiny_csv({row20("1", -3)}), FeatureSchema::ck_default(), "t"),
                    ParseError);
}

TEST_CASE("deduplicate collapses identical metric+label rows and keeps conflicting labels") {
    const Dataset two_same =
        corpus::parse_csv(tiny_csv({row20("1", 0), row20("1", 0)}), FeatureSchema::ck_default(),
                          "t");
    CHECK(corpus::deduplicate(two_same).rows() == 1);

    // Binarization makes bug=1 and bug=2 the same label, so still duplicates.
    const Dataset two_same_label =
        corpus::parse_csv(tiny_csv({row20("1", 1), row20("1", 2)}), FeatureSchema::ck_default(),
                          "t");
    CHECK(corpus::deduplicate(two_same_label).rows() == 1);

    const Dataset conflicting =
        corpus::parse_csv(tiny_csv({row20("1", 0), row20("1", 1)}), FeatureSchema::ck_default(),
                          "t");
    CHECK(corpus::deduplicate(conflicting).rows() == 2);

    // Missing cells compare equal to missing cells.
    const Dataset missing_pair =
        corpus::parse_csv(tiny_csv({row20("?", 0), row20("?", 0)}), FeatureSchema::ck_default(),
                          "t");
    CHECK(corpus::deduplicate(missing_pair).rows() == 1);
}

TEST_CASE("deduplicate is idempotent and bounded by the original row count") {
    const auto schema = FeatureSchema::ck_default();
    const Dataset ant = corpus::load_csv(test_support::data_file("ant-1.7.csv"), schema);
    const Dataset once = corpus::deduplicate(ant);
    CHECK(once.rows() <= 746);
    const Dataset twice = corpus::deduplicate(once);
    CHECK(twice.rows() == once.rows());
    CHECK(twice.X == once.X);
    CHECK(twice.y == once.y);
}

TEST_CASE("summarize matches the published per-project rates") {
    const auto schema = FeatureSchema::ck_default();
    const Dataset camel = corpus::load_csv(test_support::data_file("camel-1.0.csv"), schema);
    auto s = corpus::summarize(camel);
    REQUIRE(s.size() == 1);
    CHECK(s[0].instances == 340);
    CHECK(s[0].defective == 13);
    CHECK(s[0].rate == doctest::Approx(0.038));

    const Dataset log4j = corpus::load_csv(test_support::data_file("log4j-1.2.csv"), schema);
    s = corpus::summarize(log4j);
    REQUIRE(s.size() == 1);
    CHECK(s[0].instances == 205);
    CHECK(s[0].defective == 189);
    CHECK(s[0].rate == doctest::Approx(0.922));
}

TEST_CASE("summarize of a single faulty row") {
    const Dataset d = corpus::parse_csv(tiny_csv({row20("1", 3)}), FeatureSchema::ck_default(),
                                        "t");
    const auto s = corpus::summarize(d);
    REQUIRE(s.size() == 1);
    CHECK(s[0].instances == 1);
    CHECK(s[0].defective == 1);
    CHECK(s[0].rate == 1.0);
}

TEST_CASE("summarize totals cover the whole pooled corpus") {
    const auto schema = FeatureSchema::ck_default();
    std::vector<Dataset> parts;
    for (const char* name : {"ant-1.7.csv", "camel-1.0.csv", "synapse-1.0.csv"})
        parts.push_back(corpus::load_csv(test_support::data_file(name), schema));
    const Dataset pooled = corpus::pool(parts);
    const auto summaries = corpus::summarize(pooled);
    std::size_t instances = 0, defective = 0;
    for (const auto& s : summaries) {
        instances += s.instances;
        defective += s.defective;
    }
    CHECK(instances == pooled.rows());
    std::size_t faulty = 0;
    for (int y : pooled.y) faulty += static_cast<std::size_t>(y);
    CHECK(defective == faulty);
    CHECK(summaries.size() == 3);
}

TEST_CASE("save/reload round trip preserves labels and values, binarization idempotent") {
    const auto schema = FeatureSchema::ck_default();
    const Dataset orig = corpus::load_csv(test_support::data_file("synapse-1.0.csv"), schema);
    const std::string text = corpus::to_csv(orig);
    const Dataset again = corpus::parse_csv(text, schema, "synapse-1.0");
    CHECK(again.y == orig.y);
    REQUIRE(again.rows() == orig.rows());
    for (std::size_t i = 0; i < orig.rows(); ++i)
        for (std::size_t j = 0; j < orig.X.cols(); ++j) {
            if (is_missing(orig.X.at(i, j)))
                CHECK(is_missing(again.X.at(i, j)));
            else
                CHECK(again.X.at(i, j) == orig.X.at(i, j));
        }
}
