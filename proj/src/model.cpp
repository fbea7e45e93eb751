#include "survey/model.hpp"

#include <algorithm>

namespace survey {

bool Question::has_branch() const {
    return std::any_of(options.begin(), options.end(),
                       [](const OptionSpec& o) { return o.branch_target.has_value(); });
}

bool Question::fully_branching() const {
    return !options.empty() &&
           std::all_of(options.begin(), options.end(),
                       [](const OptionSpec& o) { return o.branch_target.has_value(); });
}

std::string_view branch_type_name(BranchType t) {
    switch (t) {
        case BranchType::None: return "NONE";
        case BranchType::One: return "ONE";
        case BranchType::All: return "ALL";
    }
    return "?";
}

int Block::question_count() const {
    int n = static_cast<int>(questions.size());
    for (const Block& b : subblocks) n += b.question_count();
    return n;
}

int Block::path_question_count() const {
    if (branch_info.consistent && branch_info.type == BranchType::All) return 1;
    int n = static_cast<int>(questions.size());
    for (const Block& b : subblocks) n += b.path_question_count();
    return n;
}

int Block::answerable_path_count() const {
    if (branch_info.consistent && branch_info.type == BranchType::All) return 1;
    int n = 0;
    for (const Question& q : questions)
        if (q.answerable()) ++n;
    for (const Block& b : subblocks) n += b.answerable_path_count();
    return n;
}

BranchTypeInfo block_branch_type(const Block& b) {
    BranchTypeInfo info;
    std::vector<const Question*> branching;
    for (const Question& q : b.questions)
        if (q.has_branch()) branching.push_back(&q);

    if (branching.empty()) return info;

    if (branching.size() == 1) {
        info.type = BranchType::One;
        info.branch_question_id = branching.front()->question_id;
        return info;
    }

    if (branching.size() != b.questions.size()) {
        info.consistent = false;
        info.detail = "some but not all questions branch";
        return info;
    }

    // Variant block candidate: every option of every question must share one
    // target.
    std::optional<BlockId> target;
    for (const Question* q : branching) {
        for (const OptionSpec& o : q->options) {
            if (!o.branch_target) {
                info.consistent = false;
                info.detail = "option without branch target in a variant block (" +
                              q->question_id + "/" + o.option_id + ")";
                return info;
            }
            if (!target) {
                target = o.branch_target;
            } else if (*target != *o.branch_target) {
                info.consistent = false;
                info.detail = "variant branch targets disagree (" + target->str() + " vs " +
                              o.branch_target->str() + ")";
                return info;
            }
        }
    }
    info.type = BranchType::All;
    info.common_target = target;
    return info;
}

namespace {

const Block* find_block_in(const std::vector<Block>& blocks, const BlockId& id) {
    for (const Block& b : blocks) {
        if (b.id == id) return &b;
        if (b.id.is_ancestor_of(id)) return find_block_in(b.subblocks, id);
    }
    return nullptr;
}

void collect_questions(const Block& b, std::vector<const Question*>& out) {
    for (const Question& q : b.questions) out.push_back(&q);
    for (const Block& sub : b.subblocks) collect_questions(sub, out);
}

void walk(const Block& b, const std::function<void(const Block&)>& fn) {
    fn(b);
    for (const Block& sub : b.subblocks) walk(sub, fn);
}

void finalize_block(Block& b) {
    b.branch_info = block_branch_type(b);
    for (Block& sub : b.subblocks) finalize_block(sub);
}

}  // namespace

const Block* Survey::find_block(const BlockId& id) const {
    return find_block_in(top_blocks, id);
}

const Question* Survey::find_question(std::string_view question_id) const {
    const Question* found = nullptr;
    for_each_block([&](const Block& b) {
        for (const Question& q : b.questions)
            if (q.question_id == question_id) found = &q;
    });
    return found;
}

std::vector<const Question*> Survey::all_questions() const {
    std::vector<const Question*> out;
    for (const Block& b : top_blocks) collect_questions(b, out);
    std::sort(out.begin(), out.end(), [](const Question* a, const Question* b) {
        return a->source_row < b->source_row;
    });
    return out;
}

void Survey::for_each_block(const std::function<void(const Block&)>& fn) const {
    for (const Block& b : top_blocks) walk(b, fn);
}

int Survey::question_count() const {
    int n = 0;
    for (const Block& b : top_blocks) n += b.question_count();
    return n;
}

void finalize_branch_info(Survey& s) {
    for (Block& b : s.top_blocks) finalize_block(b);
}

}  // namespace survey
