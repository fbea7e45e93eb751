#pragma once

#include <deque>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "survey/model.hpp"
#include "survey/plan.hpp"

namespace survey {

class AnswerMismatch : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// One respondent's pass through a survey. Top-level blocks wait on a stack;
/// the current block's questions are dealt one at a time in plan order. A
/// branch taken inside a block is parked in a reference cell and executed
/// only once the block's last question is answered, popping skipped blocks
/// off the stack unasked.
class Interpreter {
public:
    Interpreter(const Survey& s, const SurveyPlan& plan);

    /// Question currently displayed; nullptr once finished.
    const Question* current() const { return current_; }
    /// 1-based display position of current().
    int position() const { return position_; }
    bool finished() const { return current_ == nullptr; }

    /// Records the answer to current() and advances. The event's question id
    /// and option ids must match the pending question. display_position is
    /// assigned here. Returns the next question, or nullptr when done.
    const Question* step(ResponseEvent answer);

    const std::vector<ResponseEvent>& events() const { return events_; }
    ResponseRecord record(Terminal terminal) const;

private:
    void advance_block();

    const Survey* survey_;
    const SurveyPlan* plan_;
    std::map<std::string, const Question*> questions_by_id_;
    std::vector<const Block*> block_stack_;  // back() is next to run
    std::deque<std::string> question_queue_;
    std::optional<BlockId> branch_ref_;
    const Question* current_ = nullptr;
    int position_ = 0;
    std::vector<ResponseEvent> events_;
};

}  // namespace survey
