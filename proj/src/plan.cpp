#include "survey/plan.hpp"

#include <algorithm>

#include "survey/rng.hpp"

namespace survey {

namespace {

void plan_options(const Question& q, Prng& rng, SurveyPlan& plan) {
    std::vector<std::string> order;
    order.reserve(q.options.size());
    for (const OptionSpec& o : q.options) order.push_back(o.option_id);

    // Instructions and freetext questions consume no draws.
    if (q.answerable()) {
        if (!q.ordered) {
            if (q.randomize) fisher_yates(order, rng);
        } else if (q.randomize) {
            // Ordered scales keep their shape: forward or exact reverse.
            if (rng.next_u32() & 1u) std::reverse(order.begin(), order.end());
        }
    }
    plan.option_order.emplace(q.question_id, std::move(order));
}

void plan_block(const Block& b, Prng& rng, SurveyPlan& plan) {
    const std::string key = b.id.str();

    if (b.branch_info.consistent && b.branch_info.type == BranchType::All) {
        std::uint32_t pick = rng.next_below(static_cast<std::uint32_t>(b.questions.size()));
        const Question& chosen = b.questions[pick];
        plan.variant_choice.emplace(key, chosen.question_id);
        plan.block_children[key] = {{PlanUnit::Kind::Question, chosen.question_id}};
        plan_options(chosen, rng, plan);
        return;
    }

    std::vector<PlanUnit> units;
    units.reserve(b.questions.size() + b.subblocks.size());
    for (const Question& q : b.questions)
        units.push_back({PlanUnit::Kind::Question, q.question_id});
    for (const Block& sub : b.subblocks)
        units.push_back({PlanUnit::Kind::SubBlock, sub.id.str()});

    fisher_yates(units, rng);

    // Everything shuffles as atomic units; numbered subblocks then reclaim
    // their relative order across the slots they landed in. Floating blocks
    // and direct questions stay put.
    std::vector<std::size_t> slots;
    std::vector<std::string> numbered;
    for (std::size_t i = 0; i < units.size(); ++i) {
        if (units[i].kind != PlanUnit::Kind::SubBlock) continue;
        if (BlockId::parse(units[i].id).is_floating()) continue;
        slots.push_back(i);
        numbered.push_back(units[i].id);
    }
    std::sort(numbered.begin(), numbered.end(), [](const std::string& a, const std::string& b) {
        return sibling_less(BlockId::parse(a), BlockId::parse(b));
    });
    for (std::size_t k = 0; k < slots.size(); ++k) units[slots[k]].id = numbered[k];

    plan.block_children[key] = std::move(units);

    for (const Question& q : b.questions) plan_options(q, rng, plan);
    for (const Block& sub : b.subblocks) plan_block(sub, rng, plan);
}

}  // namespace

SurveyPlan make_plan(const Survey& s, std::string_view respondent_id) {
    SurveyPlan plan;
    plan.respondent_id = std::string(respondent_id);
    plan.seed = seed_from_id(respondent_id);
    plan.source_digest = s.source_digest;

    Prng rng(plan.seed);
    for (const Block& b : s.top_blocks) {
        plan.top_block_order.push_back(b.id.str());
        plan_block(b, rng, plan);
    }
    return plan;
}

std::vector<std::string> SurveyPlan::flatten_block(const std::string& block_id) const {
    std::vector<std::string> out;
    auto it = block_children.find(block_id);
    if (it == block_children.end()) return out;
    for (const PlanUnit& u : it->second) {
        if (u.kind == PlanUnit::Kind::Question) {
            out.push_back(u.id);
        } else {
            std::vector<std::string> inner = flatten_block(u.id);
            out.insert(out.end(), inner.begin(), inner.end());
        }
    }
    return out;
}

std::vector<std::string> SurveyPlan::flatten_all() const {
    std::vector<std::string> out;
    for (const std::string& top : top_block_order) {
        std::vector<std::string> inner = flatten_block(top);
        out.insert(out.end(), inner.begin(), inner.end());
    }
    return out;
}

}  // namespace survey
