#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

#include "helpers.hpp"
#include "survey/interp.hpp"
#include "survey/rng.hpp"
#include "survey/static_analysis.hpp"

using namespace survey;

namespace {

// Answers every question via a fixed question->option choice function,
// falling back to the first displayed option.
ResponseRecord run_with_choices(const Survey& s, const std::string& respondent,
                                const std::map<std::string, std::string>& choices) {
    SurveyPlan plan = make_plan(s, respondent);
    Interpreter interp(s, plan);
    while (!interp.finished()) {
        const Question& q = *interp.current();
        ResponseEvent ev;
        ev.question_id = q.question_id;
        if (q.freetext) {
            ev.freetext_value = "x";
        } else if (!q.is_instructional()) {
            auto it = choices.find(q.question_id);
            ev.chosen_option_ids.push_back(
                it != choices.end() ? it->second : plan.option_order.at(q.question_id).front());
        }
        interp.step(std::move(ev));
    }
    return interp.record(Terminal::Completed);
}

}  // namespace

TEST_CASE("flat survey yields one event per question then finishes") {
    Survey s = parse_survey_or_throw(test_helpers::flat_csv(5, 3));
    ResponseRecord r = run_with_choices(s, "flat-1", {});
    CHECK(r.events.size() == 5);
    for (std::size_t i = 0; i < r.events.size(); ++i)
        CHECK(r.events[i].display_position == static_cast<int>(i) + 1);
    CHECK(r.terminal == Terminal::Completed);
    CHECK(r.seed == seed_from_id("flat-1"));
}

TEST_CASE("branch skips the middle block") {
    Survey s = parse_survey_or_throw(test_helpers::branch_toy_csv());
    // q4 is the branch question: opt4/opt5 -> block 3, opt6/opt7 fall through
    ResponseRecord jump = run_with_choices(s, "r-jump", {{"q4", "opt4"}});
    std::set<std::string> asked;
    for (const ResponseEvent& e : jump.events) asked.insert(e.question_id);
    CHECK(jump.events.size() == 3);
    CHECK(asked.count("q18"));        // final block
    CHECK_FALSE(asked.count("q8"));   // middle block skipped

    ResponseRecord stay = run_with_choices(s, "r-stay", {{"q4", "opt6"}});
    CHECK(stay.events.size() == 8);
}

TEST_CASE("branch executes only after the block is exhausted") {
    Survey s = parse_survey_or_throw(test_helpers::branch_toy_csv());
    for (int i = 0; i < 200; ++i) {
        std::string id = "defer-" + std::to_string(i);
        SurveyPlan plan = make_plan(s, id);
        Interpreter interp(s, plan);
        std::vector<std::string> block1 = plan.flatten_block("1");
        // Both block-1 questions are always asked, in plan order, even when
        // the branch question comes first.
        REQUIRE(block1.size() == 2);
        ResponseRecord r = run_with_choices(s, id, {{"q4", "opt4"}});
        CHECK(r.events[0].question_id == block1[0]);
        CHECK(r.events[1].question_id == block1[1]);
        CHECK(r.events.size() == 3);
    }
}

TEST_CASE("branch-set equality: same choices, same questions, any seed") {
    Survey s = parse_survey_or_throw(test_helpers::branch_toy_csv());
    std::map<std::string, std::string> stay{{"q4", "opt7"}};
    std::multiset<std::string> reference;
    for (int i = 0; i < 1000; ++i) {
        ResponseRecord r = run_with_choices(s, "eq-" + std::to_string(i), stay);
        std::multiset<std::string> asked;
        for (const ResponseEvent& e : r.events) asked.insert(e.question_id);
        if (i == 0)
            reference = asked;
        else
            CHECK(asked == reference);
    }
}

TEST_CASE("answer mismatch is rejected") {
    Survey s = parse_survey_or_throw(test_helpers::flat_csv(2, 2));
    SurveyPlan plan = make_plan(s, "m-1");
    Interpreter interp(s, plan);
    ResponseEvent wrong_question;
    wrong_question.question_id = "nope";
    CHECK_THROWS_AS(interp.step(wrong_question), AnswerMismatch);

    ResponseEvent wrong_option;
    wrong_option.question_id = interp.current()->question_id;
    wrong_option.chosen_option_ids = {"opt999"};
    CHECK_THROWS_AS(interp.step(std::move(wrong_option)), AnswerMismatch);
}

TEST_CASE("variant blocks ask exactly one wording") {
    Survey s = test_helpers::load_data_survey("mixed.csv");
    for (int i = 0; i < 100; ++i) {
        ResponseRecord r = run_with_choices(s, "v-" + std::to_string(i), {});
        int variants_seen = 0;
        for (const ResponseEvent& e : r.events)
            if (e.question_id == "q17" || e.question_id == "q20" || e.question_id == "q23")
                ++variants_seen;
        CHECK(variants_seen == 1);
        CHECK(r.events.size() == 9);  // 8 block-1/3 questions + 1 variant
    }
}

TEST_CASE("instructional question records an empty event") {
    Survey s = test_helpers::load_data_survey("demographic.csv");
    ResponseRecord r = run_with_choices(s, "instr-1", {{"q14", "opt15"}});  // skip state block
    bool saw_instruction = false;
    for (const ResponseEvent& e : r.events)
        if (e.question_id == "q27") {
            saw_instruction = true;
            CHECK(e.chosen_option_ids.empty());
            CHECK_FALSE(e.freetext_value.has_value());
        }
    CHECK(saw_instruction);
}
