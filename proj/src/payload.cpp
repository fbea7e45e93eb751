#include "survey/payload.hpp"

#include <sstream>

#include "survey/static_analysis.hpp"

namespace survey {

namespace {

using nlohmann::ordered_json;

ordered_json lower_question(const Question& q) {
    ordered_json j;
    j["id"] = q.question_id;
    j["text"] = q.text;
    j["instructional"] = q.is_instructional();
    j["exclusive"] = q.exclusive;
    j["ordered"] = q.ordered;
    j["randomize"] = q.randomize;
    j["freetext"] = q.freetext;
    if (q.freetext && !q.freetext_pattern.empty()) j["freetext_pattern"] = q.freetext_pattern;
    j["options"] = ordered_json::array();
    for (const OptionSpec& o : q.options)
        j["options"].push_back({{"id", o.option_id}, {"text", o.text}});
    ordered_json branch = ordered_json::object();
    for (const OptionSpec& o : q.options)
        if (o.branch_target) branch[o.option_id] = o.branch_target->str();
    if (!branch.empty()) j["branch"] = std::move(branch);
    return j;
}

ordered_json lower_block(const Block& b) {
    ordered_json j;
    j["id"] = b.id.str();
    j["floating"] = b.is_floating();
    j["branch_type"] = std::string(branch_type_name(b.branch_info.type));
    j["questions"] = ordered_json::array();
    for (const Question& q : b.questions) j["questions"].push_back(lower_question(q));
    j["subblocks"] = ordered_json::array();
    for (const Block& sub : b.subblocks) j["subblocks"].push_back(lower_block(sub));
    return j;
}

}  // namespace

Payload compile(const Survey& s) {
    std::vector<Violation> violations = check_wellformed(s);
    if (!violations.empty())
        throw CompileOnInvalidSurvey("cannot compile: " + violations.front().code + " at " +
                                     violations.front().location + " (violations: " +
                                     std::to_string(violations.size()) + ")");
    Payload p;
    p.survey_id = s.survey_id;
    p.source_digest = s.source_digest;
    p.json["schema_version"] = kPayloadSchemaVersion;
    p.json["survey_id"] = s.survey_id;
    p.json["source_digest"] = s.source_digest;
    p.json["blocks"] = nlohmann::ordered_json::array();
    for (const Block& b : s.top_blocks) p.json["blocks"].push_back(lower_block(b));
    return p;
}

std::string wrap_html(const Payload& p) {
    std::ostringstream out;
    out << "<!doctype html>\n"
        << "<html lang=\"en\">\n"
        << "<head>\n"
        << "<meta charset=\"utf-8\">\n"
        << "<meta name=\"viewport\" content=\"width=device-width, initial-scale=1\">\n"
        << "<title>" << p.survey_id << "</title>\n"
        << "</head>\n"
        << "<body>\n"
        << "<div id=\"survey-root\"></div>\n"
        << "<script id=\"survey-payload\" type=\"application/json\">\n"
        << p.dump()
        << "</script>\n"
        << "<script src=\"./runner.js\"></script>\n"
        << "</body>\n"
        << "</html>\n";
    return out.str();
}

}  // namespace survey
