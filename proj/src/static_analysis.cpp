#include "survey/static_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "survey/simulate.hpp"

namespace survey {

namespace {

// One outgoing branch decision of a top-level block: explicit targets plus,
// when some option carries no target, fall-through to the next block.
struct BranchExits {
    std::vector<std::uint64_t> targets;  // top-level block numbers
    bool fall_through = true;            // next block reachable without branching
};

const Question* find_one_branch_question(const Block& b) {
    if (b.branch_info.consistent && b.branch_info.type == BranchType::One) {
        for (const Question& q : b.questions)
            if (q.question_id == b.branch_info.branch_question_id) return &q;
    }
    const Question* found = nullptr;
    for (const Block& sub : b.subblocks)
        if (const Question* q = find_one_branch_question(sub)) found = q;
    return found;
}

const Block* find_all_block(const Block& b) {
    if (b.branch_info.consistent && b.branch_info.type == BranchType::All) return &b;
    for (const Block& sub : b.subblocks)
        if (const Block* hit = find_all_block(sub)) return hit;
    return nullptr;
}

BranchExits block_exits(const Block& top) {
    BranchExits exits;
    if (const Block* all = find_all_block(top)) {
        exits.targets.push_back(all->branch_info.common_target->top_number());
        exits.fall_through = false;
        return exits;
    }
    if (const Question* q = find_one_branch_question(top)) {
        std::set<std::uint64_t> seen;
        for (const OptionSpec& o : q->options)
            if (o.branch_target && seen.insert(o.branch_target->top_number()).second)
                exits.targets.push_back(o.branch_target->top_number());
        exits.fall_through = !q->fully_branching();
        return exits;
    }
    return exits;
}

int count_branch_sources(const Block& b) {
    if (b.branch_info.consistent && b.branch_info.type == BranchType::All) return 1;
    int n = (b.branch_info.consistent && b.branch_info.type == BranchType::One) ? 1 : 0;
    for (const Block& sub : b.subblocks) n += count_branch_sources(sub);
    return n;
}

}  // namespace

std::vector<Violation> check_wellformed(const Survey& s) {
    std::vector<Violation> out;
    auto add = [&](const char* code, std::string location, std::string message) {
        out.push_back({code, std::move(location), std::move(message)});
    };

    std::set<std::uint64_t> top_numbers;
    for (const Block& b : s.top_blocks) top_numbers.insert(b.id.top_number());

    s.for_each_block([&](const Block& b) {
        if (!b.branch_info.consistent)
            add(violation::kInconsistentBranchBlock, b.id.str(), b.branch_info.detail);
        if (b.branch_info.consistent && b.branch_info.type == BranchType::All &&
            !b.subblocks.empty())
            add(violation::kAllBlockWithSubblocks, b.id.str(),
                "variant block cannot contain subblocks");
        if (b.id.has_floating_segment()) {
            for (const Question& q : b.questions)
                if (q.has_branch())
                    add(violation::kBranchInFloatingBlock, q.question_id,
                        "branch question inside floating block " + b.id.str());
        }

        std::uint64_t container = b.id.top_number();
        for (const Question& q : b.questions) {
            if (!q.has_branch()) continue;
            if (!q.exclusive)
                add(violation::kBranchFromNonExclusive, q.question_id,
                    "checkbox question cannot branch");
            if (q.is_instructional())
                add(violation::kInstructionalBranch, q.question_id,
                    "instructional question cannot branch");
            for (const OptionSpec& o : q.options) {
                if (!o.branch_target) continue;
                const BlockId& t = *o.branch_target;
                if (!t.is_top_level()) {
                    add(violation::kNonTopLevelTarget, q.question_id,
                        "branch target " + t.str() + " is not a top-level block");
                    continue;
                }
                if (!top_numbers.count(t.top_number())) {
                    add(violation::kUnknownTarget, q.question_id,
                        "branch target " + t.str() + " does not exist");
                    continue;
                }
                if (t.top_number() <= container)
                    add(violation::kBackwardBranch, q.question_id,
                        "branch from block " + b.id.str() + " to block " + t.str() +
                            " does not move forward");
            }
        }
    });

    for (const Block& b : s.top_blocks) {
        int sources = count_branch_sources(b);
        if (sources > 1)
            add(violation::kMultipleBranchQuestions, b.id.str(),
                "top-level block has " + std::to_string(sources) +
                    " branch sources; only one is allowed");
    }
    return out;
}

std::pair<int, int> path_length_bounds(const Survey& s) {
    const std::size_t n = s.top_blocks.size();
    if (n == 0) return {0, 0};

    std::map<std::uint64_t, std::size_t> index_of;
    for (std::size_t i = 0; i < n; ++i) index_of[s.top_blocks[i].id.top_number()] = i;

    // Walk backward: branches only point forward, so suffix totals are final.
    std::vector<int> best_min(n), best_max(n);
    for (std::size_t ri = n; ri-- > 0;) {
        const Block& b = s.top_blocks[ri];
        int count = b.path_question_count();
        BranchExits exits = block_exits(b);
        int lo = 0, hi = 0;
        bool first = true;
        auto consider = [&](std::size_t next_index) {
            int m = next_index < n ? best_min[next_index] : 0;
            int M = next_index < n ? best_max[next_index] : 0;
            lo = first ? m : std::min(lo, m);
            hi = first ? M : std::max(hi, M);
            first = false;
        };
        for (std::uint64_t t : exits.targets) {
            auto it = index_of.find(t);
            if (it != index_of.end() && it->second > ri) consider(it->second);
        }
        if (exits.fall_through || first) consider(ri + 1);
        best_min[ri] = count + lo;
        best_max[ri] = count + hi;
    }
    return {best_min[0], best_max[0]};
}

double average_path_length(const Survey& s, int n_sim, std::uint32_t seed) {
    if (n_sim <= 0) return 0.0;
    std::vector<ResponseRecord> records = simulate(s, Profile::uniform(), n_sim, seed);
    double total = 0.0;
    for (const ResponseRecord& r : records) total += static_cast<double>(r.events.size());
    return total / static_cast<double>(records.size());
}

double max_entropy_bits(const Survey& s) {
    const std::size_t n = s.top_blocks.size();
    if (n == 0) return 0.0;

    std::map<std::uint64_t, std::size_t> index_of;
    for (std::size_t i = 0; i < n; ++i) index_of[s.top_blocks[i].id.top_number()] = i;

    std::vector<int> best(n);
    for (std::size_t ri = n; ri-- > 0;) {
        const Block& b = s.top_blocks[ri];
        int count = b.answerable_path_count();
        BranchExits exits = block_exits(b);
        int hi = 0;
        bool first = true;
        auto consider = [&](std::size_t next_index) {
            int v = next_index < n ? best[next_index] : 0;
            hi = first ? v : std::max(hi, v);
            first = false;
        };
        for (std::uint64_t t : exits.targets) {
            auto it = index_of.find(t);
            if (it != index_of.end() && it->second > ri) consider(it->second);
        }
        if (exits.fall_through || first) consider(ri + 1);
        best[ri] = count + hi;
    }

    std::size_t max_options = 0;
    s.for_each_block([&](const Block& b) {
        for (const Question& q : b.questions)
            if (q.answerable()) max_options = std::max(max_options, q.options.size());
    });
    if (best[0] <= 0 || max_options == 0) return 0.0;
    return static_cast<double>(best[0]) * std::log2(static_cast<double>(max_options));
}

std::vector<std::string> unreachable_blocks(const Survey& s) {
    const std::size_t n = s.top_blocks.size();
    std::vector<std::string> out;
    if (n == 0) return out;
    std::map<std::uint64_t, std::size_t> index_of;
    for (std::size_t i = 0; i < n; ++i) index_of[s.top_blocks[i].id.top_number()] = i;

    std::vector<bool> reached(n, false);
    std::vector<std::size_t> frontier{0};
    reached[0] = true;
    while (!frontier.empty()) {
        std::size_t i = frontier.back();
        frontier.pop_back();
        BranchExits exits = block_exits(s.top_blocks[i]);
        auto visit = [&](std::size_t j) {
            if (j < n && !reached[j]) {
                reached[j] = true;
                frontier.push_back(j);
            }
        };
        for (std::uint64_t t : exits.targets) {
            auto it = index_of.find(t);
            if (it != index_of.end() && it->second > i) visit(it->second);
        }
        if (exits.fall_through) visit(i + 1);
    }
    for (std::size_t i = 0; i < n; ++i)
        if (!reached[i]) out.push_back(s.top_blocks[i].id.str());
    return out;
}

StaticReport analyze_static(const Survey& s, int n_sim, std::uint32_t seed,
                            const ParseDiagnostics* parse_diagnostics) {
    StaticReport r;
    r.question_count = s.question_count();
    if (parse_diagnostics) r.warnings = parse_diagnostics->warnings;
    r.violations = check_wellformed(s);
    if (!r.violations.empty()) return r;
    for (const std::string& block : unreachable_blocks(s))
        r.warnings.push_back({0, "UnreachableBlock",
                              "no branch decision ever reaches block " + block});
    auto [lo, hi] = path_length_bounds(s);
    r.min_path_len = lo;
    r.max_path_len = hi;
    r.avg_path_len = average_path_length(s, n_sim, seed);
    r.max_entropy_bits = max_entropy_bits(s);
    return r;
}

std::string static_report_text(const StaticReport& r) {
    std::ostringstream out;
    out << "questions:         " << r.question_count << '\n';
    if (r.violations.empty()) {
        out << "path length:       min " << r.min_path_len << ", max " << r.max_path_len
            << ", avg " << r.avg_path_len << '\n';
        out << "max entropy:       " << r.max_entropy_bits << " bits\n";
    }
    out << "violations:        " << r.violations.size() << '\n';
    for (const Violation& v : r.violations)
        out << "  [" << v.code << "] " << v.location << ": " << v.message << '\n';
    out << "warnings:          " << r.warnings.size() << '\n';
    for (const Diagnostic& w : r.warnings)
        out << "  [" << w.code << "] row " << w.row << ": " << w.message << '\n';
    return out.str();
}

std::string static_report_json(const StaticReport& r, const Survey& s) {
    nlohmann::ordered_json j;
    j["survey_id"] = s.survey_id;
    j["source_digest"] = s.source_digest;
    j["question_count"] = r.question_count;
    j["min_path_len"] = r.min_path_len;
    j["max_path_len"] = r.max_path_len;
    j["avg_path_len"] = r.avg_path_len;
    j["max_entropy_bits"] = r.max_entropy_bits;
    j["violations"] = nlohmann::ordered_json::array();
    for (const Violation& v : r.violations)
        j["violations"].push_back({{"code", v.code}, {"location", v.location}, {"message", v.message}});
    j["warnings"] = nlohmann::ordered_json::array();
    for (const Diagnostic& w : r.warnings)
        j["warnings"].push_back({{"row", w.row}, {"code", w.code}, {"message", w.message}});
    return j.dump(2) + "\n";
}

}  // namespace survey
