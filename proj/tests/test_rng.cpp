#include <doctest.h>

#include <json.hpp>

#include "helpers.hpp"
#include "survey/rng.hpp"
#include "survey/stats.hpp"

using namespace survey;

TEST_CASE("fnv1a seeds") {
    CHECK(seed_from_id("") == 2166136261u);
    CHECK(seed_from_id("a") == 3826002220u);
    CHECK(seed_from_id("abc") == 440920331u);
    CHECK(seed_from_id("respondent-42") == seed_from_id("respondent-42"));
    CHECK(seed_from_id("respondent-42") != seed_from_id("respondent-43"));
}

TEST_CASE("prng repeats per seed") {
    Prng a(1), b(1);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u32() == b.next_u32());
}

TEST_CASE("prng and hash match the golden vectors") {
    auto golden = nlohmann::json::parse(
        test_helpers::read_file(test_helpers::golden_path("prng_vectors.json")));
    for (const auto& entry : golden.at("seeds")) {
        Prng rng(entry.at("seed").get<std::uint32_t>());
        CAPTURE(entry.at("seed").get<std::uint32_t>());
        for (const auto& expected : entry.at("draws"))
            CHECK(rng.next_u32() == expected.get<std::uint32_t>());
    }
    for (const auto& entry : golden.at("id_hashes"))
        CHECK(seed_from_id(entry.at("id").get<std::string>()) ==
              entry.at("seed").get<std::uint32_t>());
}

TEST_CASE("prng uniformity over 256 buckets") {
    Prng rng(20240901);
    const int draws = 100000;
    std::vector<double> counts(256, 0.0);
    for (int i = 0; i < draws; ++i) counts[rng.next_u32() & 0xFF] += 1.0;
    std::vector<double> freqs(256, 1.0 / 256.0);
    auto r = stats::chi_squared_gof(counts, freqs, 255.0);
    // chi-squared(255) critical value at alpha = 0.001
    CHECK(r.chi2 < 330.52);
}

TEST_CASE("shuffle draw counts and golden permutation") {
    Prng rng(7);
    std::vector<int> empty;
    fisher_yates(empty, rng);
    std::vector<int> one{9};
    fisher_yates(one, rng);
    CHECK(rng.state() == 7u);  // no draws consumed for sizes < 2
    CHECK(one == std::vector<int>{9});

    std::vector<int> four{1, 2, 3, 4};
    fisher_yates(four, rng);  // frozen from the reference run at seed 7
    CHECK(four == std::vector<int>{2, 4, 3, 1});
}

TEST_CASE("shuffle hits all permutations uniformly") {
    std::map<std::vector<int>, int> counts;
    const int trials = 10000;
    for (int seed = 0; seed < trials; ++seed) {
        std::vector<int> items{1, 2, 3, 4};
        Prng rng(static_cast<std::uint32_t>(seed));
        fisher_yates(items, rng);
        counts[items] += 1;
    }
    CHECK(counts.size() == 24);
    double expected = trials / 24.0;
    double sigma = std::sqrt(trials * (1.0 / 24.0) * (23.0 / 24.0));
    for (const auto& [perm, count] : counts) {
        CAPTURE(count);
        CHECK(std::abs(count - expected) < 5.0 * sigma);
    }
}
