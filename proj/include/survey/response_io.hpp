#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "survey/model.hpp"

namespace survey {

nlohmann::ordered_json response_to_json(const ResponseRecord& r);

/// Throws std::runtime_error on schema problems (missing fields, wrong
/// types, bad positions or arity).
ResponseRecord response_from_json(const nlohmann::json& j);

/// One JSON object per line.
std::string write_jsonl(const std::vector<ResponseRecord>& records);
std::vector<ResponseRecord> read_jsonl(std::string_view text);

/// Structural checks that need no survey: nonempty respondent id, display
/// positions starting at 1 and increasing without gaps. Returns an empty
/// string when valid, else a description.
std::string validate_record_shape(const ResponseRecord& r);

/// Just enough of a payload to validate submissions against.
struct QuestionInfo {
    bool exclusive = true;
    bool freetext = false;
    bool instructional = false;
    std::vector<std::string> option_ids;
};

struct PayloadIndex {
    std::string source_digest;
    std::map<std::string, QuestionInfo> questions;

    static PayloadIndex from_payload_json(const nlohmann::json& payload);
};

/// Shape checks plus per-question arity: exclusive events carry exactly one
/// known option, checkbox events at least one, freetext a value and no
/// options, instructions nothing. Digest mismatches are the caller's
/// concern. Returns an empty string when valid.
std::string validate_record(const ResponseRecord& r, const PayloadIndex& index);

}  // namespace survey
