#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "survey/model.hpp"

namespace survey {

/// Geometric abandonment: an independent coin flip at every opportunity.
struct BreakoffRule {
    enum class Kind { None, AtPosition, AtQuestion };
    Kind kind = Kind::None;
    int after_position = 1;   // positional: flips after answering positions >= this
    std::string question_id;  // question rule: flips after answering this question
    double probability = 0.0;
};

/// Synthetic respondent behavior. UNIFORM_RANDOM picks uniformly among the
/// displayed options; POSITIONAL always clicks the same displayed slot;
/// PROFILED draws from per-question preference distributions; COLLECTION
/// mixes sub-profiles by weight.
struct Profile {
    enum class Kind { UniformRandom, Positional, Profiled, Collection };
    Kind kind = Kind::UniformRandom;
    int positional_index = 0;
    // question id -> option id -> weight (normalized at use)
    std::map<std::string, std::map<std::string, double>> preferences;
    std::vector<std::pair<double, Profile>> components;  // weights sum to 1
    BreakoffRule breakoff;

    static Profile uniform();
    static Profile positional(int displayed_index);
    static Profile profiled(std::map<std::string, std::map<std::string, double>> prefs);
    static Profile collection(std::vector<std::pair<double, Profile>> components);

    /// Throws std::runtime_error on unknown kinds, bad weights, or
    /// probabilities outside [0,1].
    static Profile from_json(const nlohmann::json& j);
};

/// Drives n planned respondents through the survey, answering per profile.
/// Respondent ids are "sim-<seed>-<index>"; answer choices and breakoff
/// coins come from a stream independent of the plan seed, so results are
/// bit-identical for a fixed (survey, profile, n, seed) regardless of
/// scheduling. Pre: s is well-formed.
std::vector<ResponseRecord> simulate(const Survey& s, const Profile& profile, int n,
                                     std::uint32_t seed);

}  // namespace survey
