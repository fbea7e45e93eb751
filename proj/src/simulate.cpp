#include "survey/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "survey/interp.hpp"
#include "survey/rng.hpp"

namespace survey {

Profile Profile::uniform() { return Profile{}; }

Profile Profile::positional(int displayed_index) {
    Profile p;
    p.kind = Kind::Positional;
    p.positional_index = displayed_index;
    return p;
}

Profile Profile::profiled(std::map<std::string, std::map<std::string, double>> prefs) {
    Profile p;
    p.kind = Kind::Profiled;
    p.preferences = std::move(prefs);
    return p;
}

Profile Profile::collection(std::vector<std::pair<double, Profile>> components) {
    Profile p;
    p.kind = Kind::Collection;
    p.components = std::move(components);
    double total = 0.0;
    for (const auto& [w, _] : p.components) total += w;
    if (std::abs(total - 1.0) > 1e-9)
        throw std::runtime_error("collection weights must sum to 1");
    return p;
}

Profile Profile::from_json(const nlohmann::json& j) {
    Profile p;
    std::string kind = j.value("kind", "uniform_random");
    if (kind == "uniform_random") {
        p.kind = Kind::UniformRandom;
    } else if (kind == "positional") {
        p.kind = Kind::Positional;
        p.positional_index = j.value("index", 0);
        if (p.positional_index < 0) throw std::runtime_error("positional index must be >= 0");
    } else if (kind == "profiled") {
        p.kind = Kind::Profiled;
        for (auto& [qid, prefs] : j.at("preferences").items())
            for (auto& [oid, w] : prefs.items()) {
                double weight = w.get<double>();
                if (weight < 0) throw std::runtime_error("preference weights must be >= 0");
                p.preferences[qid][oid] = weight;
            }
    } else if (kind == "collection") {
        std::vector<std::pair<double, Profile>> components;
        for (const nlohmann::json& c : j.at("components"))
            components.emplace_back(c.at("weight").get<double>(), from_json(c.at("profile")));
        p = collection(std::move(components));
    } else {
        throw std::runtime_error("unknown profile kind \"" + kind + "\"");
    }
    if (j.contains("breakoff") && !j["breakoff"].is_null()) {
        const nlohmann::json& b = j["breakoff"];
        std::string bkind = b.at("kind").get<std::string>();
        if (bkind == "position") {
            p.breakoff.kind = BreakoffRule::Kind::AtPosition;
            p.breakoff.after_position = b.value("after", 1);
        } else if (bkind == "question") {
            p.breakoff.kind = BreakoffRule::Kind::AtQuestion;
            p.breakoff.question_id = b.at("question").get<std::string>();
        } else {
            throw std::runtime_error("unknown breakoff kind \"" + bkind + "\"");
        }
        p.breakoff.probability = b.at("prob").get<double>();
        if (p.breakoff.probability < 0.0 || p.breakoff.probability > 1.0)
            throw std::runtime_error("breakoff probability must be in [0,1]");
    }
    return p;
}

namespace {

struct Behavior {
    const Profile* answers;
    BreakoffRule breakoff;  // nearest rule on the resolution path
};

Behavior resolve_component(const Profile& profile, Prng& rng, BreakoffRule inherited) {
    if (profile.breakoff.kind != BreakoffRule::Kind::None) inherited = profile.breakoff;
    if (profile.kind != Profile::Kind::Collection) return {&profile, inherited};
    double roll = rng.next_unit();
    double acc = 0.0;
    for (const auto& [weight, component] : profile.components) {
        acc += weight;
        if (roll < acc) return resolve_component(component, rng, inherited);
    }
    return resolve_component(profile.components.back().second, rng, inherited);
}

std::vector<std::string> displayed_options(const Question& q, const SurveyPlan& plan) {
    auto it = plan.option_order.find(q.question_id);
    if (it != plan.option_order.end()) return it->second;
    std::vector<std::string> authored;
    for (const OptionSpec& o : q.options) authored.push_back(o.option_id);
    return authored;
}

ResponseEvent choose_answer(const Question& q, const SurveyPlan& plan, const Profile& behavior,
                            Prng& rng) {
    ResponseEvent ev;
    ev.question_id = q.question_id;
    if (q.freetext) {
        ev.freetext_value = "text";
        return ev;
    }
    if (q.is_instructional()) return ev;

    std::vector<std::string> displayed = displayed_options(q, plan);
    switch (behavior.kind) {
        case Profile::Kind::UniformRandom: {
            if (q.exclusive) {
                ev.chosen_option_ids.push_back(
                    displayed[rng.next_below(static_cast<std::uint32_t>(displayed.size()))]);
            } else {
                // Independent coin per option, redrawing an all-tails result.
                while (ev.chosen_option_ids.empty())
                    for (const std::string& oid : displayed)
                        if (rng.next_u32() & 1u) ev.chosen_option_ids.push_back(oid);
            }
            break;
        }
        case Profile::Kind::Positional: {
            std::size_t idx = std::min(static_cast<std::size_t>(behavior.positional_index),
                                       displayed.size() - 1);
            ev.chosen_option_ids.push_back(displayed[idx]);
            break;
        }
        case Profile::Kind::Profiled: {
            auto it = behavior.preferences.find(q.question_id);
            if (it == behavior.preferences.end() || it->second.empty()) {
                ev.chosen_option_ids.push_back(
                    displayed[rng.next_below(static_cast<std::uint32_t>(displayed.size()))]);
                break;
            }
            double total = 0.0;
            for (const auto& [oid, w] : it->second) total += w;
            double roll = rng.next_unit() * total;
            double acc = 0.0;
            std::string chosen = it->second.rbegin()->first;
            for (const auto& [oid, w] : it->second) {
                acc += w;
                if (roll < acc) {
                    chosen = oid;
                    break;
                }
            }
            ev.chosen_option_ids.push_back(chosen);
            break;
        }
        case Profile::Kind::Collection:
            throw std::logic_error("collection profile must be resolved per respondent");
    }
    return ev;
}

}  // namespace

std::vector<ResponseRecord> simulate(const Survey& s, const Profile& profile, int n,
                                     std::uint32_t seed) {
    std::vector<ResponseRecord> out;
    out.reserve(static_cast<std::size_t>(std::max(0, n)));

    for (int i = 0; i < n; ++i) {
        std::string respondent_id = "sim-" + std::to_string(seed) + "-" + std::to_string(i);
        SurveyPlan plan = make_plan(s, respondent_id);
        // Choice stream derived from the id but decoupled from the plan
        // stream, so behavior draws never disturb layout draws.
        Prng choice_rng(seed_from_id("choice-" + respondent_id));
        Behavior behavior = resolve_component(profile, choice_rng, BreakoffRule{});

        Interpreter interp(s, plan);
        Terminal terminal = Terminal::Completed;
        while (!interp.finished()) {
            const Question& q = *interp.current();
            int position = interp.position();
            ResponseEvent ev = choose_answer(q, plan, *behavior.answers, choice_rng);
            interp.step(std::move(ev));

            const BreakoffRule& rule = behavior.breakoff;
            bool opportunity =
                (rule.kind == BreakoffRule::Kind::AtPosition && position >= rule.after_position) ||
                (rule.kind == BreakoffRule::Kind::AtQuestion && q.question_id == rule.question_id);
            if (opportunity && !interp.finished() && choice_rng.next_unit() < rule.probability) {
                terminal = Terminal::Breakoff;
                break;
            }
        }
        out.push_back(interp.record(terminal));
    }
    return out;
}

}  // namespace survey
