#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "survey/csv.hpp"
#include "survey/model.hpp"

namespace survey {

namespace violation {
inline constexpr const char* kBackwardBranch = "BackwardBranch";
inline constexpr const char* kNonTopLevelTarget = "NonTopLevelTarget";
inline constexpr const char* kUnknownTarget = "UnknownTarget";
inline constexpr const char* kInconsistentBranchBlock = "InconsistentBranchBlock";
inline constexpr const char* kMultipleBranchQuestions = "MultipleBranchQuestions";
inline constexpr const char* kBranchInFloatingBlock = "BranchInFloatingBlock";
inline constexpr const char* kBranchFromNonExclusive = "BranchFromNonExclusive";
inline constexpr const char* kInstructionalBranch = "InstructionalBranch";
inline constexpr const char* kAllBlockWithSubblocks = "AllBlockWithSubblocks";
}  // namespace violation

struct Violation {
    std::string code;
    std::string location;  // block id or question id
    std::string message;
};

struct StaticReport {
    int question_count = 0;
    int min_path_len = 0;
    int max_path_len = 0;
    double avg_path_len = 0.0;
    double max_entropy_bits = 0.0;
    std::vector<Violation> violations;
    std::vector<Diagnostic> warnings;  // carried over from parsing
};

/// Structural validity: branch targets are existing, non-floating top-level
/// blocks strictly after the branching block; branch types are consistent;
/// one branch source per top-level block; no branching out of floating
/// blocks, checkbox questions, or instructions. Returns an empty list for a
/// deployable survey.
std::vector<Violation> check_wellformed(const Survey& s);

/// Fewest/most questions a completing respondent can answer, by dynamic
/// programming over the top-level branch graph. Pre: check_wellformed empty.
std::pair<int, int> path_length_bounds(const Survey& s);

/// Mean question count over simulated uniform-random respondents.
/// Bit-reproducible for a fixed seed. Pre: check_wellformed empty.
double average_path_length(const Survey& s, int n_sim = 5000, std::uint32_t seed = 0);

/// Conservative upper bound on response information content:
/// (answerable questions on the longest path) x log2(largest option count).
/// Instructions and freetext questions count for neither factor.
double max_entropy_bits(const Survey& s);

/// Top-level blocks no branch decision can reach (every path jumps over
/// them). A warning, not a violation. Pre: check_wellformed empty.
std::vector<std::string> unreachable_blocks(const Survey& s);

StaticReport analyze_static(const Survey& s, int n_sim = 5000, std::uint32_t seed = 0,
                            const ParseDiagnostics* parse_diagnostics = nullptr);

std::string static_report_text(const StaticReport& r);
std::string static_report_json(const StaticReport& r, const Survey& s);

}  // namespace survey
