// Regenerates the golden vector files that pin the randomization contract
// shared with the browser runner. Run from the repository root:
//
//   survey_golden_gen tests/data tests/golden
//
// Output is deterministic; a diff after regeneration means the contract
// changed and every consumer must be revisited.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "survey/csv.hpp"
#include "survey/plan.hpp"
#include "survey/rng.hpp"

using nlohmann::ordered_json;

namespace {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw std::runtime_error("write to " + path.string() + " failed");
}

ordered_json prng_vectors() {
    ordered_json j;
    j["generator"] = "mulberry32";
    j["hash"] = "fnv1a32";
    j["draws_per_seed"] = 16;
    j["seeds"] = ordered_json::array();
    for (std::uint32_t seed : {0u, 1u, 2u, 7u, 42u, 123456789u, 2166136261u, 4294967295u}) {
        survey::Prng rng(seed);
        ordered_json draws = ordered_json::array();
        for (int i = 0; i < 16; ++i) draws.push_back(rng.next_u32());
        j["seeds"].push_back({{"seed", seed}, {"draws", std::move(draws)}});
    }
    j["id_hashes"] = ordered_json::array();
    for (const char* id : {"", "a", "abc", "golden-000", "respondent-42", "sim-1-0"})
        j["id_hashes"].push_back({{"id", id}, {"seed", survey::seed_from_id(id)}});
    return j;
}

ordered_json plan_vectors(const std::filesystem::path& data_dir) {
    ordered_json j;
    j["respondent_count"] = 100;
    j["surveys"] = ordered_json::array();
    for (const char* name : {"demographic.csv", "mixed.csv"}) {
        survey::Survey s =
            survey::parse_survey_or_throw(read_file(data_dir / name),
                                          std::filesystem::path(name).stem().string());
        ordered_json entry;
        entry["file"] = name;
        entry["source_digest"] = s.source_digest;
        entry["respondents"] = ordered_json::array();
        for (int i = 0; i < 100; ++i) {
            char id[32];
            std::snprintf(id, sizeof id, "golden-%03d", i);
            survey::SurveyPlan plan = survey::make_plan(s, id);
            ordered_json r;
            r["id"] = id;
            r["seed"] = plan.seed;
            r["question_order"] = plan.flatten_all();
            ordered_json options = ordered_json::object();
            for (const std::string& qid : plan.flatten_all())
                options[qid] = plan.option_order.at(qid);
            r["option_order"] = std::move(options);
            entry["respondents"].push_back(std::move(r));
        }
        j["surveys"].push_back(std::move(entry));
    }
    return j;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc != 3) {
        std::cerr << "usage: survey_golden_gen <data-dir> <golden-dir>\n";
        return 2;
    }
    try {
        std::filesystem::path data_dir(argv[1]), golden_dir(argv[2]);
        std::filesystem::create_directories(golden_dir);
        write_file(golden_dir / "prng_vectors.json", prng_vectors().dump(2) + "\n");
        write_file(golden_dir / "plan_vectors.json", plan_vectors(data_dir).dump(2) + "\n");
        std::cout << "wrote " << (golden_dir / "prng_vectors.json").string() << " and "
                  << (golden_dir / "plan_vectors.json").string() << "\n";
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
