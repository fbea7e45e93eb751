#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "survey/block_id.hpp"

namespace survey {

struct OptionSpec {
    std::string option_id;
    std::string text;
    std::optional<BlockId> branch_target;
};

struct Question {
    std::string question_id;
    std::string text;                 // may contain HTML, passed through
    std::vector<OptionSpec> options;  // authored order
    bool exclusive = true;
    bool ordered = false;
    bool randomize = true;
    bool freetext = false;
    std::string freetext_pattern;     // optional regex constraint, only with freetext
    std::string correlated_group;     // empty when unset
    BlockId block;
    int source_row = 0;               // 1-based row in the canonical csv

    /// Display-only text: a single option row with an empty cell and no
    /// freetext flag.
    bool is_instructional() const {
        return !freetext && options.size() == 1 && options.front().text.empty();
    }
    bool has_branch() const;
    /// Every option carries a branch target, so answering always branches.
    bool fully_branching() const;
    /// Counts for entropy: the respondent picks among real options.
    bool answerable() const { return !freetext && !is_instructional(); }
};

enum class BranchType { None, One, All };

std::string_view branch_type_name(BranchType t);

struct BranchTypeInfo {
    BranchType type = BranchType::None;
    bool consistent = true;
    std::string detail;                    // set when !consistent
    std::string branch_question_id;        // set for One
    std::optional<BlockId> common_target;  // set for All
};

struct Block {
    BlockId id;
    std::vector<Question> questions;  // direct, authored order
    std::vector<Block> subblocks;     // storage order: numeric ascending, then floating
    BranchTypeInfo branch_info;       // cached by finalize_survey

    bool is_floating() const { return id.is_floating(); }
    /// All questions in this subtree.
    int question_count() const;
    /// Questions a single respondent sees in this subtree: an ALL block
    /// contributes exactly one variant.
    int path_question_count() const;
    /// Same, counting only answerable questions.
    int answerable_path_count() const;
};

/// Classify a block by its directly contained branch questions: NONE (no
/// branch maps), ONE (exactly one question branches), ALL (every question
/// branches and every option shares one target, i.e. wording variants).
/// Anything else is reported as inconsistent.
BranchTypeInfo block_branch_type(const Block& b);

enum class Terminal { Completed, Breakoff };

struct ResponseEvent {
    std::string question_id;
    int display_position = 0;                    // 1-based, strictly increasing
    std::vector<std::string> chosen_option_ids;  // kept sorted
    std::optional<std::string> freetext_value;
};

struct ResponseRecord {
    std::string respondent_id;
    std::uint32_t seed = 0;
    std::string source_digest;
    std::vector<ResponseEvent> events;
    Terminal terminal = Terminal::Completed;
    std::vector<std::int64_t> wall_times;  // per-event; empty unless recorded
};

struct Survey {
    std::string survey_id;
    std::vector<Block> top_blocks;  // ascending numeric id
    std::string source_digest;      // content hash of the canonical csv form

    const Block* find_block(const BlockId& id) const;
    const Question* find_question(std::string_view question_id) const;
    /// Authored order (ascending source row) across all blocks.
    std::vector<const Question*> all_questions() const;
    /// Pre-order over the block tree.
    void for_each_block(const std::function<void(const Block&)>& fn) const;
    int question_count() const;
};

/// Recomputes cached branch type info for every block. Called by the csv
/// frontend; needed again only if a survey is assembled by hand.
void finalize_branch_info(Survey& s);

}  // namespace survey
