#include <doctest.h>

#include <cmath>
#include <map>

#include "helpers.hpp"
#include "survey/response_io.hpp"
#include "survey/simulate.hpp"

using namespace survey;

TEST_CASE("uniform simulation completes branch-free surveys at full length") {
    Survey s = parse_survey_or_throw(test_helpers::flat_csv(7, 3));
    auto records = simulate(s, Profile::uniform(), 50, 11);
    CHECK(records.size() == 50);
    for (const ResponseRecord& r : records) {
        CHECK(r.terminal == Terminal::Completed);
        CHECK(r.events.size() == 7);
        CHECK(r.respondent_id.rfind("sim-11-", 0) == 0);
        CHECK(validate_record_shape(r).empty());
    }
}

TEST_CASE("simulation is bit-reproducible") {
    Survey s = test_helpers::load_data_survey("mixed.csv");
    auto a = simulate(s, Profile::uniform(), 40, 5);
    auto b = simulate(s, Profile::uniform(), 40, 5);
    CHECK(write_jsonl(a) == write_jsonl(b));
    auto c = simulate(s, Profile::uniform(), 40, 6);
    CHECK(write_jsonl(a) != write_jsonl(c));
}

TEST_CASE("records survive the jsonl round trip") {
    Survey s = test_helpers::load_data_survey("demographic.csv");
    Profile p = Profile::uniform();
    p.breakoff.kind = BreakoffRule::Kind::AtPosition;
    p.breakoff.probability = 0.2;
    auto records = simulate(s, p, 60, 7);
    auto reread = read_jsonl(write_jsonl(records));
    CHECK(write_jsonl(reread) == write_jsonl(records));

    CHECK_THROWS(read_jsonl("{\"respondent_id\": \"x\"}\n"));  // missing fields
    CHECK_THROWS(read_jsonl("not json\n"));
}

TEST_CASE("positional clickers look random on shuffled options") {
    Survey s = parse_survey_or_throw(test_helpers::flat_csv(1, 4));
    auto records = simulate(s, Profile::positional(0), 10000, 21);
    std::map<std::string, double> counts;
    for (const ResponseRecord& r : records) counts[r.events[0].chosen_option_ids[0]] += 1.0;
    CHECK(counts.size() == 4);
    // total-variation distance to uniform
    double tv = 0.0;
    for (const auto& [oid, c] : counts) tv += std::abs(c / 10000.0 - 0.25);
    CHECK(tv / 2.0 < 0.05);
}

TEST_CASE("deterministic preferences yield identical answer sets") {
    Survey s = parse_survey_or_throw(test_helpers::flat_csv(3, 3));
    std::map<std::string, std::map<std::string, double>> prefs;
    prefs["q2"]["opt3"] = 1.0;
    prefs["q5"]["opt6"] = 1.0;
    prefs["q8"]["opt10"] = 1.0;
    auto records = simulate(s, Profile::profiled(prefs), 30, 3);
    for (const ResponseRecord& r : records) {
        std::map<std::string, std::string> chosen;
        for (const ResponseEvent& e : r.events) chosen[e.question_id] = e.chosen_option_ids[0];
        CHECK(chosen.at("q2") == "opt3");
        CHECK(chosen.at("q5") == "opt6");
        CHECK(chosen.at("q8") == "opt10");
    }
}

TEST_CASE("positional breakoff truncates records") {
    Survey s = parse_survey_or_throw(test_helpers::flat_csv(20, 3));
    Profile p = Profile::uniform();
    p.breakoff.kind = BreakoffRule::Kind::AtPosition;
    p.breakoff.after_position = 1;
    p.breakoff.probability = 0.3;
    auto records = simulate(s, p, 300, 17);
    int breakoffs = 0;
    for (const ResponseRecord& r : records) {
        if (r.terminal != Terminal::Breakoff) continue;
        ++breakoffs;
        CHECK(r.events.size() < 20);
        CHECK(validate_record_shape(r).empty());
    }
    CHECK(breakoffs > 250);  // 1 - 0.7^19 of 300, minus luck
}

TEST_CASE("question breakoff stops right after the target question") {
    Survey s = parse_survey_or_throw(test_helpers::flat_csv(10, 3));
    Profile p = Profile::uniform();
    p.breakoff.kind = BreakoffRule::Kind::AtQuestion;
    p.breakoff.question_id = "q11";  // 4th authored question
    p.breakoff.probability = 1.0;
    auto records = simulate(s, p, 100, 9);
    for (const ResponseRecord& r : records) {
        if (r.terminal == Terminal::Completed) {
            // q11 was displayed last; no opportunity remained
            CHECK(r.events.back().question_id == "q11");
        } else {
            CHECK(r.events.back().question_id == "q11");
            CHECK(r.events.size() < 10);
        }
    }
}

TEST_CASE("collection profiles mix components reproducibly") {
    Survey s = parse_survey_or_throw(test_helpers::flat_csv(2, 2));
    Profile mix = Profile::collection({{0.5, Profile::positional(0)}, {0.5, Profile::uniform()}});
    auto a = simulate(s, mix, 50, 4);
    auto b = simulate(s, mix, 50, 4);
    CHECK(write_jsonl(a) == write_jsonl(b));
    CHECK_THROWS(Profile::collection({{0.3, Profile::uniform()}, {0.3, Profile::uniform()}}));
}

TEST_CASE("profile json parsing") {
    Profile p = Profile::from_json(nlohmann::json::parse(R"({
        "kind": "collection",
        "components": [
            {"weight": 0.9, "profile": {"kind": "profiled", "preferences": {"q2": {"opt2": 0.8, "opt3": 0.2}}}},
            {"weight": 0.1, "profile": {"kind": "uniform_random"}}
        ],
        "breakoff": {"kind": "position", "after": 3, "prob": 0.05}
    })"));
    CHECK(p.kind == Profile::Kind::Collection);
    CHECK(p.components.size() == 2);
    CHECK(p.breakoff.kind == BreakoffRule::Kind::AtPosition);
    CHECK(p.breakoff.after_position == 3);

    CHECK_THROWS(Profile::from_json(nlohmann::json::parse(R"({"kind": "nope"})")));
    CHECK_THROWS(Profile::from_json(nlohmann::json::parse(
        R"({"kind": "uniform_random", "breakoff": {"kind": "position", "prob": 1.5}})")));
}
