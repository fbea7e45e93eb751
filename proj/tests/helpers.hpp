#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "survey/csv.hpp"

namespace test_helpers {

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE_MESSAGE(bool(in), "cannot open ", path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline std::string data_path(const std::string& name) {
    return std::string(SURVEY_TEST_DATA_DIR) + "/" + name;
}

inline std::string golden_path(const std::string& name) {
    return std::string(SURVEY_GOLDEN_DIR) + "/" + name;
}

inline survey::Survey load_data_survey(const std::string& name) {
    return survey::parse_survey_or_throw(read_file(data_path(name)),
                                         std::filesystem::path(name).stem().string());
}

/// A flat survey: `questions` x `options`, one block, unordered exclusive.
inline std::string flat_csv(int questions, int options) {
    std::ostringstream out;
    out << "QUESTION,OPTIONS\n";
    for (int q = 0; q < questions; ++q) {
        out << "Question " << q + 1 << "?,Choice 1\n";
        for (int o = 1; o < options; ++o) out << ",Choice " << o + 1 << "\n";
    }
    return out.str();
}

/// Wording-variant chain: `blocks` ALL-blocks of `variants` questions with
/// `options` ordered options each branching to the next block, then one
/// closing question.
inline std::string variant_chain_csv(int blocks, int variants, int options) {
    std::ostringstream out;
    out << "QUESTION,OPTIONS,BLOCK,ORDERED,BRANCH\n";
    for (int b = 1; b <= blocks; ++b) {
        for (int v = 0; v < variants; ++v) {
            out << "Wording " << b << "-" << v + 1 << "?,Scale 1," << b << ",true," << b + 1
                << "\n";
            for (int o = 1; o < options; ++o)
                out << ",Scale " << o + 1 << "," << b << ",," << b + 1 << "\n";
        }
    }
    out << "Closing question?,Choice 1," << blocks + 1 << ",,\n";
    out << ",Choice 2," << blocks + 1 << ",,\n";
    out << ",Choice 3," << blocks + 1 << ",,\n";
    out << ",Choice 4," << blocks + 1 << ",,\n";
    return out.str();
}

/// Three-block branch toy: block 1 has a plain question and a branch
/// question whose options either jump to block 3 or fall through to block 2
/// (5 questions); block 3 has one question.
inline std::string branch_toy_csv() {
    std::ostringstream out;
    out << "QUESTION,OPTIONS,BLOCK,BRANCH\n"
        << "Opening question?,A,1,\n"
        << ",B,1,\n"
        << "Jump or continue?,Jump now,1,3\n"
        << ",Jump anyway,1,3\n"
        << ",Keep going,1,\n"
        << ",Stay around,1,\n";
    for (int q = 0; q < 5; ++q) {
        out << "Middle question " << q + 1 << "?,A,2,\n"
            << ",B,2,\n";
    }
    out << "Final question?,A,3,\n"
        << ",B,3,\n";
    return out.str();
}

}  // namespace test_helpers
