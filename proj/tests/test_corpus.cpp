#include <doctest.h>

#include <regex>
#include <set>

#include <nlohmann/json.hpp>

#include "hot/corpus.hpp"
#include "hot/errors.hpp"
#include "hot/util.hpp"

using namespace hot;

namespace {
const std::string kFixtures = HOT_FIXTURE_DIR;
}

TEST_CASE("canonical corpus parses ids, splits and dialogues") {
    auto samples = load_corpus(kFixtures + "/en.jsonl");
    CHECK(samples.size() == 60);
    int train = 0, test = 0;
    std::set<std::string> ids;
    for (const auto& s : samples) {
        CHECK(ids.insert(s.id).second);
        CHECK(!s.reference.empty());
        CHECK(!s.dialogue.turns.empty());
        (s.split == Split::Train ? train : test)++;
    }
    CHECK(train == 40);
    CHECK(test == 20);

    auto zh = load_corpus(kFixtures + "/zh.jsonl");
    CHECK(zh.size() == 60);
    CHECK(zh.front().lang == Lang::Zh);
}

TEST_CASE("canonical parsing rejects duplicates, bad roles and empty references") {
    std::string dup =
        R"({"id":"x","dialogue":[{"role":"patient","text":"hi"}],"reference":"r"})"
        "\n"
        R"({"id":"x","dialogue":[{"role":"patient","text":"hi"}],"reference":"r"})";
    CHECK_THROWS_AS(parse_corpus(dup), DuplicateId);
    CHECK_THROWS_AS(
        parse_corpus(R"({"id":"y","dialogue":[{"role":"nurse","text":"hi"}],"reference":"r"})"),
        ParseError);
    CHECK_THROWS_AS(
        parse_corpus(R"({"id":"y","dialogue":[{"role":"patient","text":"hi"}],"reference":""})"),
        ParseError);
    CHECK_THROWS_AS(parse_corpus("not json"), ParseError);
    CHECK_THROWS_AS(parse_corpus("{}", "no-such-format"), UsageError);
}

TEST_CASE("newlines inside fields are flattened to spaces") {
    auto samples = parse_corpus(
        R"({"id":"n","dialogue":[{"role":"patient","text":"line one\nline two"}],)"
        R"("reference":"ref one\nref two"})");
    CHECK(samples[0].dialogue.turns[0].text == "line one line two");
    CHECK(samples[0].reference == "ref one ref two");
}

TEST_CASE("meddialog adapter takes the last doctor turn as the reference") {
    auto samples = load_corpus(kFixtures + "/meddialog_sample.jsonl", "meddialog-like");
    REQUIRE(samples.size() == 2);
    CHECK(samples[0].reference == "Rest it, use ice, and get an x-ray if it worsens.");
    CHECK(samples[0].dialogue.turns.size() == 3);  // reference turn removed
    CHECK(samples[0].dialogue.turns.back().text == "Only with a lot of pain.");
    CHECK(samples[1].split == Split::Train);
}

TEST_CASE("covid adapter keeps the description") {
    auto samples = load_corpus(kFixtures + "/covid_sample.jsonl", "covid-like");
    REQUIRE(samples.size() == 1);
    CHECK(samples[0].dialogue.description == "Caller worried about exposure.");
    CHECK(samples[0].reference == "Monitor for symptoms and isolate for five days.");
}

TEST_CASE("cmdd adapter builds a single-round zh dialogue") {
    auto samples = load_corpus(kFixtures + "/cmdd_sample.jsonl", "cmdd-like");
    REQUIRE(samples.size() == 2);
    CHECK(samples[0].lang == Lang::Zh);
    CHECK(samples[0].dialogue.turns.size() == 1);
    CHECK(samples[0].dialogue.turns[0].role == Role::Patient);
    CHECK(!samples[0].reference.empty());
}

TEST_CASE("serialize/parse round trips the canonical form") {
    auto samples = load_corpus(kFixtures + "/en.jsonl");
    auto back = parse_corpus(serialize_corpus(samples));
    CHECK(back == samples);
}

TEST_CASE("anonymization replaces each audit category and nothing else") {
    auto rules = default_anonymization_rules();
    auto cases = nlohmann::json::parse(
        read_file(kFixtures + "/anonymization_cases.json"));
    for (const auto& c : cases) {
        auto result = anonymize(c.at("text").get<std::string>(), rules);
        auto expected = c.at("expected");
        auto count = [&](PiiCategory cat) {
            auto it = result.substitutions.find(cat);
            return it == result.substitutions.end() ? 0 : it->second;
        };
        CHECK(count(PiiCategory::Name) == expected.at("NAME").get<int>());
        CHECK(count(PiiCategory::Address) == expected.at("ADDRESS").get<int>());
        CHECK(count(PiiCategory::Contact) == expected.at("CONTACT").get<int>());
        // soundness: no rule still matches the anonymized text
        for (const auto& rule : rules) {
            std::regex re(rule.pattern);
            CHECK(!std::regex_search(result.text, re));
        }
        // idempotence
        auto again = anonymize(result.text, rules);
        CHECK(again.text == result.text);
        CHECK(again.substitutions.empty());
    }
}

TEST_CASE("overlapping matches resolve longest-first without double substitution") {
    auto rules = default_anonymization_rules();
    auto r = anonymize("Write to Dr. Mary Jane Watson at mj@web.net.", rules);
    CHECK(r.text == "Write to <NAME> at <CONTACT>.");
    CHECK(r.substitutions[PiiCategory::Name] == 1);  // one span, not per word
}

TEST_CASE("anonymize requires rules and supports custom rule files") {
    CHECK_THROWS_AS(anonymize("text", {}), UsageError);
    std::string path = "/tmp/hot_rules_test.json";
    write_file(path,
               R"([{"category":"contact","pattern":"ID-[0-9]{4}","name":"case-id"}])");
    auto rules = rules_from_json_file(path);
    REQUIRE(rules.size() == 1);
    CHECK(anonymize("ref ID-1234 here", rules).text == "ref <CONTACT> here");
    write_file(path, "[]");
    CHECK_THROWS_AS(rules_from_json_file(path), ParseError);
}

TEST_CASE("fewshot selection is deterministic, seed-sensitive and train-only") {
    auto samples = load_corpus(kFixtures + "/en.jsonl");
    std::vector<CorpusSample> train;
    std::set<std::string> train_ids;
    for (const auto& s : samples)
        if (s.split == Split::Train) {
            train.push_back(s);
            train_ids.insert(s.id);
        }
    auto a = fewshot_selection(train, 5, 42);
    auto b = fewshot_selection(train, 5, 42);
    CHECK(a == b);
    CHECK(a.size() == 5);
    CHECK(std::set<std::string>(a.begin(), a.end()).size() == 5);  // no repeats
    for (const auto& id : a) CHECK(train_ids.count(id) == 1);
    auto c = fewshot_selection(train, 5, 43);
    CHECK(a != c);
    CHECK_THROWS_AS(fewshot_selection({}, 5, 1), InsufficientTrainData);
}

TEST_CASE("fewshot prompt renders exemplar transcripts with their references") {
    auto samples = load_corpus(kFixtures + "/en.jsonl");
    std::vector<CorpusSample> train(samples.begin(), samples.begin() + 6);
    auto prompt = build_fewshot_prompt(train, 2, 7);
    auto ids = fewshot_selection(train, 2, 7);
    for (const auto& id : ids) {
        auto it = std::find_if(train.begin(), train.end(),
                               [&](const CorpusSample& s) { return s.id == id; });
        CHECK(prompt.find(it->reference) != std::string::npos);
    }
    CHECK(prompt.find("\n\n") != std::string::npos);  // blank-line separator
    CHECK(prompt.find("Doctor: ") != std::string::npos);
}
