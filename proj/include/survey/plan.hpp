#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "survey/model.hpp"

namespace survey {

struct PlanUnit {
    enum class Kind { Question, SubBlock };
    Kind kind = Kind::Question;
    std::string id;  // question_id or serialized block id
};

/// One respondent's fully randomized instantiation of a survey: the display
/// order of every block's children, the chosen wording variant for each ALL
/// block, and the option order of every question to be displayed.
///
/// Plans are a pure function of (source digest, respondent id). The draw
/// sequence is normative; the browser runner reproduces it bit for bit, and
/// tests/golden/plan_vectors.json freezes it. Per block: variant choice (ALL
/// blocks), then one Fisher-Yates pass over the child units, then option
/// orders for direct questions in authored row order, then recursion into
/// subblocks in storage order (numeric ascending, floating after).
struct SurveyPlan {
    std::string respondent_id;
    std::uint32_t seed = 0;
    std::string source_digest;
    std::vector<std::string> top_block_order;                      // ascending, never shuffled
    std::map<std::string, std::vector<PlanUnit>> block_children;   // display order per block
    std::map<std::string, std::string> variant_choice;             // ALL block id -> question id
    std::map<std::string, std::vector<std::string>> option_order;  // question id -> option ids

    /// Question ids of one block's subtree in display order.
    std::vector<std::string> flatten_block(const std::string& block_id) const;
    /// Question ids of the whole survey in display order (before branching).
    std::vector<std::string> flatten_all() const;
};

SurveyPlan make_plan(const Survey& s, std::string_view respondent_id);

}  // namespace survey
