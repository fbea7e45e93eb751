#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "survey/model.hpp"

namespace survey {

struct Diagnostic {
    int row = 0;  // 1-based canonical row; 0 when not row-specific
    std::string code;
    std::string message;
};

struct ParseDiagnostics {
    std::vector<Diagnostic> warnings;
    std::vector<Diagnostic> errors;
    bool ok() const { return errors.empty(); }
};

class ParseError : public std::runtime_error {
public:
    explicit ParseError(ParseDiagnostics diagnostics);
    const ParseDiagnostics& diagnostics() const { return diagnostics_; }

private:
    ParseDiagnostics diagnostics_;
};

class MalformedBoolean : public std::runtime_error {
public:
    explicit MalformedBoolean(std::string_view cell)
        : std::runtime_error("malformed boolean cell: \"" + std::string(cell) + "\"") {}
};

/// Comma-separated records with double-quote escaping, LF or CRLF line ends,
/// optional UTF-8 BOM. Blank records are dropped, so indices into the result
/// are the canonical 1-based row numbers (header = row 1).
std::vector<std::vector<std::string>> read_csv(std::string_view text);

/// Case-insensitive "true"/"yes"/"1" and "false"/"no"/"0"; empty picks the
/// fallback. Throws MalformedBoolean on anything else.
bool boolean_cell(std::string_view cell, bool fallback);

struct ParseResult {
    std::optional<Survey> survey;  // engaged iff diagnostics.ok()
    ParseDiagnostics diagnostics;
};

/// Parse the tabular survey language. A row with a nonempty QUESTION cell
/// starts a question; following rows with an empty QUESTION cell add its
/// options. See README for the column set and defaults.
ParseResult parse_survey(std::string_view csv_text, std::string survey_id = "survey");

/// Same, throwing ParseError instead of reporting.
Survey parse_survey_or_throw(std::string_view csv_text, std::string survey_id = "survey");

/// Canonical serialization: the full header in fixed order, questions in
/// authored order, stable cell formatting. Reparsing the emission rebuilds
/// the same survey, generated ids included, and emit(parse(emit(s))) is a
/// fixed point.
std::string emit_csv(const Survey& s);

/// FNV-1a 64-bit content hash, 16 hex digits. Survey digests hash the
/// canonical emission, so column order and quoting style do not disturb
/// them.
std::string content_digest(std::string_view bytes);

}  // namespace survey
