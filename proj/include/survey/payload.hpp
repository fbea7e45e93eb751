#pragma once

#include <stdexcept>
#include <string>

#include <json.hpp>

#include "survey/model.hpp"

namespace survey {

inline constexpr int kPayloadSchemaVersion = 1;

class CompileOnInvalidSurvey : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The deployable JSON document: structure and display flags only, with
/// analysis metadata (correlation labels, diagnostics) stripped out. Key
/// order is fixed and documented in docs/payload.md so the serialized bytes
/// are digest-stable.
struct Payload {
    nlohmann::ordered_json json;
    std::string survey_id;
    std::string source_digest;

    std::string dump() const { return json.dump(2) + "\n"; }
};

/// Lower a validated survey. Authored option order is retained; each
/// respondent's randomization happens client-side from their seed.
/// Throws CompileOnInvalidSurvey unless check_wellformed(s) is empty.
Payload compile(const Survey& s);

/// Single self-contained HTML document: one inline payload script block,
/// a mount point, and the runner bundle reference.
std::string wrap_html(const Payload& p);

}  // namespace survey
