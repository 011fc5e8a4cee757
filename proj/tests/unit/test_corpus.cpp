#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>

#include "scinov/corpus.hpp"
#include "scinov/error.hpp"

using namespace scinov;
using namespace scinov::corpus;

namespace {

std::filesystem::path write_temp(const std::string& name, const std::string& body) {
    auto p = std::filesystem::temp_directory_path() / ("scinov_test_" + name);
    std::ofstream(p) << body;
    return p;
}

PaperRecord rec(std::string id, std::string date, std::string title,
                std::optional<std::string> abstract = std::nullopt) {
    PaperRecord r;
    r.paper_id = std::move(id);
    r.pub_date = Date::parse(date);
    r.title = std::move(title);
    r.abstract = std::move(abstract);
    r.has_abstract = r.abstract.has_value();
    return r;
}

}  // namespace

TEST_CASE("dates parse and order") {
    CHECK(Date::parse("1950-01-02") > Date::parse("1950-01-01"));
    CHECK(Date::parse("2000-02-29").to_string() == "2000-02-29");
    CHECK(Date::parse("1666-09-02").year() == 1666);
    CHECK_THROWS_AS(Date::parse("1999-02-30"), DataError);
    CHECK_THROWS_AS(Date::parse("19990230"), DataError);
}

TEST_CASE("order_key breaks date ties by id") {
    std::vector<PaperRecord> rs{rec("B", "1950-01-01", "b"), rec("A", "1950-01-01", "a"),
                                rec("C", "1950-01-02", "c"), rec("0", "1949-12-31", "z")};
    sort_records(rs);
    std::vector<std::string> ids;
    for (auto& r : rs) ids.push_back(r.paper_id);
    CHECK(ids == std::vector<std::string>{"0", "A", "B", "C"});

    std::mt19937 gen(7);
    for (int i = 0; i < 5; ++i) {
        auto copy = rs;
        std::shuffle(copy.begin(), copy.end(), gen);
        sort_records(copy);
        CHECK(copy == rs);
    }
}

TEST_CASE("reconstruct_abstract") {
    InvertedIndex idx{{"deep", {0}}, {"learning", {1, 3}}, {"for", {2}}};
    auto r = reconstruct_abstract(idx);
    CHECK(r.text == "deep learning for learning");
    CHECK(r.gaps == 0);

    CHECK(reconstruct_abstract({}).text.empty());
    CHECK_THROWS_AS(reconstruct_abstract({{"a", {0}}, {"b", {0}}}), DataError);
    CHECK_THROWS_AS(reconstruct_abstract({{"a", {-1}}}), DataError);

    auto gap = reconstruct_abstract({{"a", {0}}, {"c", {2}}});
    CHECK(gap.text == "a c");
    CHECK(gap.gaps == 1);
}

TEST_CASE("reconstruct inverts invert_text") {
    std::mt19937 gen(11);
    std::vector<std::string> vocab{"alpha", "beta", "gamma", "delta", "x-ray", "dna", "of"};
    for (int trial = 0; trial < 200; ++trial) {
        std::string text;
        int n = static_cast<int>(gen() % 30);
        for (int i = 0; i < n; ++i) {
            if (i) text += ' ';
            text += vocab[gen() % vocab.size()];
        }
        CHECK(reconstruct_abstract(invert_text(text)).text == text);
    }
}

TEST_CASE("parse_record") {
    auto r = parse_record(
        R"({"id":"W1","date":"1950-03-04","title":"T","abstract_inverted_index":{"b":[1],"a":[0]},)"
        R"("venue":"J1","subfield":12,"field":3,"references":["W0"]})");
    CHECK(r.paper_id == "W1");
    CHECK(r.abstract == std::optional<std::string>("a b"));
    CHECK(r.has_abstract);
    CHECK(r.subfield_id == 12);
    CHECK(r.field_id == 3);
    CHECK(r.references == std::vector<std::string>{"W0"});

    auto plain = parse_record(
        R"({"id":"W2","date":"1950-03-04","title":"T","abstract":"plain","abstract_inverted_index":{"x":[0]}})");
    CHECK(plain.abstract == std::optional<std::string>("plain"));

    auto blank = parse_record(R"({"id":"W3","date":"1950-03-04","title":"T","abstract":"  "})");
    CHECK_FALSE(blank.has_abstract);
    CHECK_FALSE(blank.abstract.has_value());

    CHECK_THROWS_AS(parse_record(R"({"date":"1950-03-04","title":"T"})"), DataError);
    CHECK_THROWS_AS(parse_record(R"({"id":"W","date":"03/04/1950","title":"T"})"), DataError);
    CHECK_THROWS_AS(parse_record(R"({"id":"W","date":"1950-03-04","ti)"), DataError);

    CHECK(parse_record(record_to_json(r).dump()) == r);
}

TEST_CASE("RecordReader") {
    SUBCASE("empty file") {
        RecordReader reader(write_temp("empty.jsonl", ""));
        CHECK_FALSE(reader.next().has_value());
        CHECK(reader.malformed_lines() == 0);
    }
    const std::string good =
        R"({"id":"A","date":"1950-01-01","title":"one"})"
        "\n"
        R"({"id":"B","date":"1950-01-02","title":"two","venue":"J"})"
        "\n";
    SUBCASE("three lines in order") {
        RecordReader reader(write_temp(
            "three.jsonl", good + R"({"id":"C","date":"1949-01-01","title":"three"})" + "\n"));
        std::vector<PaperRecord> got;
        while (auto r = reader.next()) got.push_back(*r);
        REQUIRE(got.size() == 3);
        CHECK(got[0].paper_id == "A");
        CHECK(got[0].title == "one");
        CHECK(got[1].venue_id == "J");
        CHECK(got[2].pub_date == Date::parse("1949-01-01"));
    }
    SUBCASE("truncated line, lenient") {
        RecordReader reader(write_temp("trunc.jsonl", good + R"({"id":"C","date":"19)"));
        int n = 0;
        while (reader.next()) ++n;
        CHECK(n == 2);
        CHECK(reader.malformed_lines() == 1);
        REQUIRE(reader.malformed_reports().size() == 1);
        CHECK(reader.malformed_reports()[0].find(":3:") != std::string::npos);
    }
    SUBCASE("truncated line, strict") {
        RecordReader reader(write_temp("trunc_strict.jsonl", good + R"({"id":"C","date":"19)"),
                            IngestOptions{true});
        reader.next();
        reader.next();
        CHECK_THROWS_WITH_AS(reader.next(), doctest::Contains(":3:"), DataError);
    }
    SUBCASE("missing file") {
        CHECK_THROWS_AS(RecordReader("/nonexistent/corpus.jsonl"), DataError);
    }
}

TEST_CASE("clean_corpus") {
    SUBCASE("duplicate titles keep the earliest") {
        auto res = clean_corpus({rec("B", "1951-01-01", "Same Title"), rec("A", "1950-01-01", "same  title")},
                                CleaningRules{});
        REQUIRE(res.records.size() == 1);
        CHECK(res.records[0].paper_id == "A");
        CHECK(res.manifest.exclusion_tallies.at("duplicate_title") == 1);
    }
    SUBCASE("empty title removed") {
        auto res = clean_corpus({rec("A", "1950-01-01", "  "), rec("B", "1950-01-01", "x")}, CleaningRules{});
        CHECK(res.records.size() == 1);
        CHECK(res.manifest.exclusion_tallies.at("empty_title") == 1);
    }
    SUBCASE("duplicate abstracts lose the abstract, keep the title") {
        auto res = clean_corpus({rec("A", "1950-01-01", "t1", "shared text here"),
                                 rec("B", "1950-01-02", "t2", "shared text here"),
                                 rec("C", "1950-01-03", "t3", "distinct text")},
                                CleaningRules{});
        REQUIRE(res.records.size() == 3);
        CHECK_FALSE(res.records[0].has_abstract);
        CHECK_FALSE(res.records[1].has_abstract);
        CHECK(res.records[2].has_abstract);
        CHECK(res.manifest.exclusion_tallies.at("duplicate_abstract") == 2);
    }
    SUBCASE("bibliographic abstract demoted") {
        auto res = clean_corpus(
            {rec("A", "1950-01-01", "t", "Smith J. (1932) 45(3): 112-118. Jones K. (1933) 12, pp. 3-9.")},
            CleaningRules{});
        CHECK_FALSE(res.records[0].has_abstract);
        CHECK(res.manifest.exclusion_tallies.at("bibliographic_abstract") == 1);
        CHECK(bibliographic_fraction("we measure the spectrum of hydrogen") == 0.0);
    }
    SUBCASE("flag passthrough") {
        auto a = rec("A", "1950-01-01", "a");
        a.no_authors = true;
        auto b = rec("B", "1950-01-01", "b");
        b.no_publisher = true;
        auto res = clean_corpus({a, b, rec("C", "1950-01-01", "c")}, CleaningRules{});
        CHECK(res.records.size() == 1);
        CHECK(res.manifest.exclusion_tallies.at("no_author") == 1);
        CHECK(res.manifest.exclusion_tallies.at("venue_without_publisher") == 1);
    }
    SUBCASE("tallies cover exactly the enabled rules") {
        CleaningRules rules;
        rules.bibliographic_abstract = false;
        rules.no_author = false;
        auto res = clean_corpus({}, rules);
        std::vector<std::string> keys;
        for (auto& [k, v] : res.manifest.exclusion_tallies) keys.push_back(k);
        auto names = rules.enabled_rule_names();
        std::sort(names.begin(), names.end());
        CHECK(keys == names);
        CHECK(res.manifest.record_count == 0);
    }
    SUBCASE("idempotent") {
        std::vector<PaperRecord> rs{rec("A", "1950-01-01", "t1", "shared"), rec("B", "1950-01-02", "t2", "shared"),
                                    rec("C", "1950-01-03", "t1"), rec("D", "1950-01-04", ""),
                                    rec("E", "1950-01-05", "t5", "fine abstract")};
        auto once = clean_corpus(rs, CleaningRules{});
        auto twice = clean_corpus(once.records, CleaningRules{});
        CHECK(twice.records == once.records);
        for (auto& [k, v] : twice.manifest.exclusion_tallies) CHECK(v == 0);
    }
}

TEST_CASE("subfield mapping") {
    auto a = rec("A", "1950-01-01", "a");
    a.subfield_id = 1;
    a.field_id = 10;
    auto b = a;
    b.paper_id = "B";
    CHECK_NOTHROW(check_subfield_mapping({a, b}));
    b.field_id = 11;
    CHECK_THROWS_AS(check_subfield_mapping({a, b}), DataError);
}
