#include "survey/interp.hpp"

#include <algorithm>

namespace survey {

Interpreter::Interpreter(const Survey& s, const SurveyPlan& plan)
    : survey_(&s), plan_(&plan) {
    s.for_each_block([&](const Block& b) {
        for (const Question& q : b.questions) questions_by_id_[q.question_id] = &q;
    });
    for (auto it = s.top_blocks.rbegin(); it != s.top_blocks.rend(); ++it)
        block_stack_.push_back(&*it);
    advance_block();
}

void Interpreter::advance_block() {
    while (question_queue_.empty() && !block_stack_.empty()) {
        const Block* b = block_stack_.back();
        block_stack_.pop_back();
        for (const std::string& qid : plan_->flatten_block(b->id.str()))
            question_queue_.push_back(qid);
    }
    if (question_queue_.empty()) {
        current_ = nullptr;
        return;
    }
    current_ = questions_by_id_.at(question_queue_.front());
    position_ = static_cast<int>(events_.size()) + 1;
}

const Question* Interpreter::step(ResponseEvent answer) {
    if (!current_) throw AnswerMismatch("step on a finished survey");
    if (answer.question_id != current_->question_id)
        throw AnswerMismatch("answer for " + answer.question_id + " while " +
                             current_->question_id + " is pending");
    for (const std::string& oid : answer.chosen_option_ids) {
        bool known = std::any_of(current_->options.begin(), current_->options.end(),
                                 [&](const OptionSpec& o) { return o.option_id == oid; });
        if (!known)
            throw AnswerMismatch("option " + oid + " does not belong to " +
                                 current_->question_id);
    }

    answer.display_position = position_;
    std::sort(answer.chosen_option_ids.begin(), answer.chosen_option_ids.end());

    if (current_->has_branch() && !answer.chosen_option_ids.empty()) {
        if (answer.chosen_option_ids.size() != 1)
            throw AnswerMismatch("branch question " + current_->question_id +
                                 " needs exactly one chosen option");
        const std::string& oid = answer.chosen_option_ids.front();
        auto it = std::find_if(current_->options.begin(), current_->options.end(),
                               [&](const OptionSpec& o) { return o.option_id == oid; });
        if (it->branch_target) {
            if (branch_ref_)
                throw std::logic_error("branch reference already set in this block");
            branch_ref_ = it->branch_target;
        }
    }

    events_.push_back(std::move(answer));
    question_queue_.pop_front();

    if (!question_queue_.empty()) {
        current_ = questions_by_id_.at(question_queue_.front());
        position_ = static_cast<int>(events_.size()) + 1;
        return current_;
    }

    // Block exhausted: a parked branch now decides where to resume. Skipped
    // blocks come off the stack and are never asked.
    if (branch_ref_) {
        while (!block_stack_.empty() && !(block_stack_.back()->id == *branch_ref_))
            block_stack_.pop_back();
        if (block_stack_.empty())
            throw std::logic_error("branch target " + branch_ref_->str() +
                                   " not on the block stack");
        branch_ref_.reset();
    }
    advance_block();
    return current_;
}

ResponseRecord Interpreter::record(Terminal terminal) const {
    ResponseRecord r;
    r.respondent_id = plan_->respondent_id;
    r.seed = plan_->seed;
    r.source_digest = plan_->source_digest;
    r.events = events_;
    r.terminal = terminal;
    return r;
}

}  // namespace survey
