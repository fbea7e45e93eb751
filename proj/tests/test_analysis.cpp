#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>

#include "helpers.hpp"
#include "survey/analysis.hpp"
#include "survey/interp.hpp"
#include "survey/rng.hpp"
#include "survey/simulate.hpp"

using namespace survey;

namespace {

AnalysisOptions fast_opts() {
    AnalysisOptions o;
    o.bootstrap_b = 400;
    return o;
}

// Drives respondents with a per-question answer function so tests can
// couple answers or make them order-dependent.
std::vector<ResponseRecord> drive(
    const Survey& s, int n, std::uint32_t seed,
    const std::function<std::string(const Question&, const SurveyPlan&, Prng&)>& pick) {
    std::vector<ResponseRecord> out;
    for (int i = 0; i < n; ++i) {
        std::string id = "drv-" + std::to_string(seed) + "-" + std::to_string(i);
        SurveyPlan plan = make_plan(s, id);
        Prng rng(seed_from_id("pick-" + id));
        Interpreter interp(s, plan);
        while (!interp.finished()) {
            const Question& q = *interp.current();
            ResponseEvent ev;
            ev.question_id = q.question_id;
            if (q.freetext)
                ev.freetext_value = "x";
            else if (!q.is_instructional())
                ev.chosen_option_ids.push_back(pick(q, plan, rng));
            interp.step(std::move(ev));
        }
        out.push_back(interp.record(Terminal::Completed));
    }
    return out;
}

std::string authored_option(const Question& q, std::size_t index) {
    return q.options[std::min(index, q.options.size() - 1)].option_id;
}

}  // namespace

TEST_CASE("duplicated answers flag as perfectly correlated") {
    Survey s = parse_survey_or_throw(test_helpers::flat_csv(2, 3));
    // both questions answered at the same authored index, varying by respondent
    auto records = drive(s, 80, 1, [](const Question& q, const SurveyPlan& plan, Prng&) {
        return authored_option(q, seed_from_id(plan.respondent_id) % 3);
    });
    auto m = ResponseMatrix(s, records);
    auto findings = analyze_correlations(m, fast_opts());
    REQUIRE(findings.size() == 1);
    CHECK(findings[0].statistic_name == "cramers_v");
    CHECK(findings[0].statistic == doctest::Approx(1.0));
    CHECK(findings[0].flagged);
}

TEST_CASE("declared correlated questions that are independent get reported") {
    Survey s = parse_survey_or_throw(
        "QUESTION,OPTIONS,CORRELATED\nFirst?,A,pair\n,B,\nSecond?,A,pair\n,B,\n");
    auto records = drive(s, 200, 2, [](const Question& q, const SurveyPlan&, Prng& rng) {
        return authored_option(q, rng.next_below(2));
    });
    auto m = ResponseMatrix(s, records);
    auto findings = analyze_correlations(m, fast_opts());
    REQUIRE(findings.size() == 1);
    CHECK(findings[0].expected);
    CHECK_FALSE(findings[0].flagged);
}

TEST_CASE("ordered pairs go through spearman") {
    Survey s = parse_survey_or_throw(
        "QUESTION,OPTIONS,ORDERED\nRate one,1,true\n,2,\n,3,\n,4,\nRate two,1,true\n,2,\n,3,\n,4,"
        "\n");
    auto records = drive(s, 100, 3, [](const Question& q, const SurveyPlan& plan, Prng&) {
        return authored_option(q, seed_from_id(plan.respondent_id) % 4);  // identical ranks
    });
    auto m = ResponseMatrix(s, records);
    auto findings = analyze_correlations(m, fast_opts());
    REQUIRE(findings.size() == 1);
    CHECK(findings[0].statistic_name == "spearman_rho");
    CHECK(findings[0].statistic == doctest::Approx(1.0));
    CHECK(findings[0].flagged);
}

TEST_CASE("fixed question order leaves nothing to test for order bias") {
    Survey s = parse_survey_or_throw(
        "QUESTION,OPTIONS,BLOCK\nQ one,A,1\n,B,1\nQ two,A,2\n,B,2\nQ three,A,3\n,B,3\n");
    auto records = drive(s, 60, 4, [](const Question& q, const SurveyPlan&, Prng& rng) {
        return authored_option(q, rng.next_below(2));
    });
    auto m = ResponseMatrix(s, records);
    CHECK(analyze_order_bias(m, fast_opts()).empty());
}

TEST_CASE("injected order dependence is flagged") {
    Survey s = parse_survey_or_throw(
        "QUESTION,OPTIONS,ORDERED\nTarget?,1,true\n,2,\n,3,\n,4,\nTrigger?,A,\n,B,\n");
    // Target shifts up a rank whenever Trigger came first.
    auto records = drive(s, 300, 5, [](const Question& q, const SurveyPlan& plan, Prng& rng) {
        if (q.question_id == "q6") return authored_option(q, rng.next_below(2));
        std::uint32_t base = rng.next_below(3);
        bool trigger_first = plan.flatten_all().front() == "q6";
        return authored_option(q, base + (trigger_first ? 1 : 0));
    });
    auto m = ResponseMatrix(s, records);
    auto findings = analyze_order_bias(m, fast_opts());
    bool target_flagged = false;
    for (const auto& f : findings)
        if (f.question == "q2") {
            CHECK(f.statistic_name == "mann_whitney_u");
            target_flagged |= f.flagged && f.p_value < 0.01;
        }
    CHECK(target_flagged);
}

TEST_CASE("injected order dependence on an unordered question uses chi-squared") {
    Survey s = parse_survey_or_throw(
        "QUESTION,OPTIONS\nTarget?,Cat A\n,Cat B\n,Cat C\nTrigger?,A\n,B\n");
    // Target's category flips to a disjoint mode when Trigger came first.
    auto records = drive(s, 300, 51, [](const Question& q, const SurveyPlan& plan, Prng& rng) {
        if (q.question_id == "q5") return authored_option(q, rng.next_below(2));
        bool trigger_first = plan.flatten_all().front() == "q5";
        std::uint32_t roll = rng.next_below(10);
        std::size_t mode = trigger_first ? 2 : 0;
        return authored_option(q, roll < 7 ? mode : 1);
    });
    auto m = ResponseMatrix(s, records);
    bool flagged = false;
    for (const auto& f : analyze_order_bias(m, fast_opts()))
        if (f.question == "q2") {
            CHECK(f.statistic_name == "chi_squared");
            flagged |= f.flagged && f.p_value < 0.01;
        }
    CHECK(flagged);
}

TEST_CASE("paper compat mode switches the chi-squared recipe") {
    Survey s = parse_survey_or_throw(
        "QUESTION,OPTIONS\nTarget?,Cat A\n,Cat B\n,Cat C\nTrigger?,A\n,B\n");
    auto records = drive(s, 200, 52, [](const Question& q, const SurveyPlan&, Prng& rng) {
        return authored_option(q, rng.next_below(q.question_id == "q5" ? 2 : 3));
    });
    auto m = ResponseMatrix(s, records);
    AnalysisOptions compat = fast_opts();
    compat.paper_compat = true;
    auto standard = analyze_order_bias(m, fast_opts());
    auto literal = analyze_order_bias(m, compat);
    REQUIRE_FALSE(standard.empty());
    REQUIRE(standard.size() == literal.size());
    bool any_difference = false;
    for (std::size_t i = 0; i < standard.size(); ++i)
        if (standard[i].statistic_name == "chi_squared")
            any_difference |= standard[i].p_value != literal[i].p_value;
    CHECK(any_difference);
}

TEST_CASE("variant bias flags only the shifted variant's pairs") {
    Survey s = parse_survey_or_throw(test_helpers::variant_chain_csv(3, 3, 4));
    // Variants answer from the same distribution except block 2's second
    // variant, which shifts by one step.
    auto records = drive(s, 400, 61, [&](const Question& q, const SurveyPlan&, Prng& rng) {
        std::uint32_t base = rng.next_below(3);
        bool shifted = q.block.str() == "2" && q.question_id == s.top_blocks[1].questions[1].question_id;
        return authored_option(q, base + (shifted ? 1 : 0));
    });
    auto m = ResponseMatrix(s, records);
    auto findings = analyze_variant_bias(m, s, fast_opts());
    CHECK(findings.size() == 9);  // 3 blocks x C(3,2)
    int false_flags = 0;
    for (const auto& f : findings) {
        bool involves_shifted =
            f.block == "2" && (f.variant_a == s.top_blocks[1].questions[1].question_id ||
                               f.variant_b == s.top_blocks[1].questions[1].question_id);
        CAPTURE(f.block);
        CAPTURE(f.variant_a);
        CAPTURE(f.variant_b);
        if (involves_shifted)
            CHECK(f.flagged);
        else
            false_flags += f.flagged;
    }
    CHECK(false_flags <= 1);
}

TEST_CASE("breakoff tallies rank positions and questions") {
    std::vector<ResponseRecord> records;
    auto make = [&](const std::string& id, std::vector<std::pair<std::string, int>> events,
                    Terminal t) {
        ResponseRecord r;
        r.respondent_id = id;
        r.terminal = t;
        for (auto& [qid, pos] : events) {
            ResponseEvent e;
            e.question_id = qid;
            e.display_position = pos;
            r.events.push_back(e);
        }
        records.push_back(std::move(r));
    };
    make("a", {{"q1", 1}, {"q2", 2}}, Terminal::Breakoff);
    make("b", {{"q9", 1}, {"q2", 2}}, Terminal::Breakoff);
    make("c", {{"q1", 1}, {"q7", 2}, {"q2", 3}}, Terminal::Breakoff);
    make("d", {{"q1", 1}}, Terminal::Completed);

    BreakoffReport report = analyze_breakoff(records);
    REQUIRE_FALSE(report.by_question.empty());
    CHECK(report.by_question[0].first == "q2");
    CHECK(report.by_question[0].second == 3);
    REQUIRE_FALSE(report.by_position.empty());
    CHECK(report.by_position[0].first == 2);
    CHECK(report.by_position[0].second == 2);
}

TEST_CASE("all-completed records produce empty breakoff rankings") {
    Survey s = parse_survey_or_throw(test_helpers::flat_csv(3, 2));
    auto records = simulate(s, Profile::uniform(), 30, 8);
    BreakoffReport report = analyze_breakoff(records);
    CHECK(report.by_position.empty());
    CHECK(report.by_question.empty());
}

TEST_CASE("identical respondents are never flagged random") {
    Survey s = parse_survey_or_throw(test_helpers::flat_csv(6, 4));
    auto records = drive(s, 40, 9, [](const Question& q, const SurveyPlan&, Prng&) {
        return authored_option(q, 0);
    });
    auto report = detect_random_respondents(records, s, fast_opts());
    for (const auto& e : report.entries) CHECK_FALSE(e.flagged);
}

TEST_CASE("random respondents rise above profiled ones") {
    Survey s = parse_survey_or_throw(test_helpers::flat_csv(30, 4));
    std::map<std::string, std::map<std::string, double>> prefs;
    for (const Question* q : s.all_questions()) {
        prefs[q->question_id][q->options[0].option_id] = 0.85;
        for (std::size_t i = 1; i < q->options.size(); ++i)
            prefs[q->question_id][q->options[i].option_id] = 0.05;
    }
    Profile mix = Profile::collection(
        {{0.9, Profile::profiled(prefs)}, {0.1, Profile::uniform()}});
    auto records = simulate(s, mix, 200, 10);
    auto report = detect_random_respondents(records, s, fast_opts());
    CHECK(report.score_kind == "surprisal");

    // Reconstruct which respondents the mixture made uniform-random: the
    // component draw is the first choice-stream draw.
    int random_total = 0, random_flagged = 0, profiled_flagged = 0, profiled_total = 0;
    for (const auto& e : report.entries) {
        Prng rng(seed_from_id("choice-" + e.respondent_id));
        bool is_random = rng.next_unit() >= 0.9;
        if (is_random) {
            ++random_total;
            random_flagged += e.flagged;
        } else {
            ++profiled_total;
            profiled_flagged += e.flagged;
        }
    }
    REQUIRE(random_total > 0);
    CHECK(static_cast<double>(random_flagged) / random_total > 0.6);
    CHECK(static_cast<double>(profiled_flagged) / profiled_total < 0.1);
}

TEST_CASE("homogeneous populations stay near the nominal flag rate") {
    // no random cluster: the detector should flag roughly alpha, not half
    Survey s = parse_survey_or_throw(test_helpers::flat_csv(20, 4));
    int flagged = 0, total = 0;
    for (std::uint32_t seed : {70u, 71u, 72u, 73u, 74u}) {
        auto records = simulate(s, Profile::uniform(), 150, seed);
        auto report = detect_random_respondents(records, s, fast_opts());
        for (const auto& e : report.entries) {
            ++total;
            flagged += e.flagged;
        }
    }
    CHECK(static_cast<double>(flagged) / total <= 0.10);
}

TEST_CASE("breakoff records are excluded from random scoring") {
    Survey s = parse_survey_or_throw(test_helpers::flat_csv(8, 4));
    auto completed = simulate(s, Profile::uniform(), 25, 11);
    Profile quitter = Profile::uniform();
    quitter.breakoff.kind = BreakoffRule::Kind::AtPosition;
    quitter.breakoff.probability = 0.8;
    auto dropped = simulate(s, quitter, 25, 12);
    auto all = completed;
    for (auto& r : dropped)
        if (r.terminal == Terminal::Breakoff) all.push_back(r);

    auto report = detect_random_respondents(all, s, fast_opts());
    CHECK(report.n_completed == static_cast<int>(completed.size()));
    for (const auto& e : report.entries) {
        bool was_breakoff = std::any_of(all.begin(), all.end(), [&](const ResponseRecord& r) {
            return r.respondent_id == e.respondent_id && r.terminal == Terminal::Breakoff;
        });
        CHECK_FALSE(was_breakoff);
    }
}

TEST_CASE("insufficient data raises") {
    Survey s = parse_survey_or_throw(test_helpers::flat_csv(3, 2));
    auto records = simulate(s, Profile::uniform(), 10, 13);
    CHECK_THROWS_AS(detect_random_respondents(records, s, fast_opts()), InsufficientData);
}

TEST_CASE("paper compat mode uses the signed score and lower tail") {
    Survey s = parse_survey_or_throw(test_helpers::flat_csv(12, 4));
    auto records = simulate(s, Profile::uniform(), 60, 14);
    AnalysisOptions opts = fast_opts();
    opts.paper_compat = true;
    auto report = detect_random_respondents(records, s, opts);
    CHECK(report.score_kind == "plogp");
    for (const auto& e : report.entries) CHECK(e.score <= 0.0);
}

TEST_CASE("full dynamic report ties the sections together") {
    Survey s = test_helpers::load_data_survey("demographic.csv");
    auto records = simulate(s, Profile::uniform(), 120, 15);
    DynamicReport report = analyze_dynamic(s, records, fast_opts());
    CHECK(report.n_records == 120);
    CHECK(report.n_completed == 120);
    CHECK(report.n_stale_skipped == 0);
    CHECK(report.correlation_pairs_tested > 0);
    std::string json = dynamic_report_json(report);
    CHECK(json.find("\"survey_id\"") != std::string::npos);
    std::string text = dynamic_report_text(report);
    CHECK(text.find("records:") != std::string::npos);

    // stale records get dropped
    auto stale = records;
    stale[0].source_digest = "ffffffffffffffff";
    DynamicReport report2 = analyze_dynamic(s, stale, fast_opts());
    CHECK(report2.n_stale_skipped == 1);
    CHECK(report2.n_records == 119);
}

TEST_CASE("respondent order does not change test results") {
    Survey s = parse_survey_or_throw(test_helpers::flat_csv(4, 3));
    auto records = simulate(s, Profile::uniform(), 80, 16);
    auto shuffled = records;
    std::reverse(shuffled.begin(), shuffled.end());
    AnalysisOptions opts = fast_opts();
    auto a = analyze_order_bias(ResponseMatrix(s, records), opts);
    auto b = analyze_order_bias(ResponseMatrix(s, shuffled), opts);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].question == b[i].question);
        CHECK(a[i].statistic == doctest::Approx(b[i].statistic));
        CHECK(a[i].p_value == doctest::Approx(b[i].p_value));
    }
}
