#include "survey/response_io.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace survey {

using nlohmann::json;
using nlohmann::ordered_json;

ordered_json response_to_json(const ResponseRecord& r) {
    ordered_json j;
    j["respondent_id"] = r.respondent_id;
    j["seed"] = r.seed;
    j["source_digest"] = r.source_digest;
    j["terminal"] = r.terminal == Terminal::Completed ? "COMPLETED" : "BREAKOFF";
    j["events"] = ordered_json::array();
    for (const ResponseEvent& e : r.events) {
        ordered_json ev;
        ev["question_id"] = e.question_id;
        ev["display_position"] = e.display_position;
        ev["chosen_option_ids"] = e.chosen_option_ids;
        if (e.freetext_value) ev["freetext_value"] = *e.freetext_value;
        j["events"].push_back(std::move(ev));
    }
    if (!r.wall_times.empty()) j["wall_times"] = r.wall_times;
    return j;
}

ResponseRecord response_from_json(const json& j) {
    if (!j.is_object()) throw std::runtime_error("response record must be a JSON object");
    ResponseRecord r;
    r.respondent_id = j.at("respondent_id").get<std::string>();
    r.seed = j.at("seed").get<std::uint32_t>();
    r.source_digest = j.value("source_digest", std::string());
    std::string terminal = j.at("terminal").get<std::string>();
    if (terminal == "COMPLETED")
        r.terminal = Terminal::Completed;
    else if (terminal == "BREAKOFF")
        r.terminal = Terminal::Breakoff;
    else
        throw std::runtime_error("unknown terminal \"" + terminal + "\"");
    for (const json& ev : j.at("events")) {
        ResponseEvent e;
        e.question_id = ev.at("question_id").get<std::string>();
        e.display_position = ev.at("display_position").get<int>();
        e.chosen_option_ids = ev.at("chosen_option_ids").get<std::vector<std::string>>();
        std::sort(e.chosen_option_ids.begin(), e.chosen_option_ids.end());
        if (ev.contains("freetext_value") && !ev["freetext_value"].is_null())
            e.freetext_value = ev["freetext_value"].get<std::string>();
        r.events.push_back(std::move(e));
    }
    if (j.contains("wall_times") && !j["wall_times"].is_null())
        r.wall_times = j["wall_times"].get<std::vector<std::int64_t>>();
    return r;
}

std::string write_jsonl(const std::vector<ResponseRecord>& records) {
    std::ostringstream out;
    for (const ResponseRecord& r : records) out << response_to_json(r).dump() << '\n';
    return out.str();
}

std::vector<ResponseRecord> read_jsonl(std::string_view text) {
    std::vector<ResponseRecord> out;
    std::size_t start = 0;
    int line_no = 0;
    while (start < text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(start, end - start);
        start = end + 1;
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
        try {
            out.push_back(response_from_json(json::parse(line)));
        } catch (const std::exception& e) {
            throw std::runtime_error("responses line " + std::to_string(line_no) + ": " +
                                     e.what());
        }
    }
    return out;
}

std::string validate_record_shape(const ResponseRecord& r) {
    if (r.respondent_id.empty()) return "respondent_id is empty";
    for (std::size_t i = 0; i < r.events.size(); ++i) {
        if (r.events[i].display_position != static_cast<int>(i) + 1)
            return "display positions must start at 1 and increase without gaps";
        if (r.events[i].question_id.empty()) return "event without question_id";
    }
    if (!r.wall_times.empty() && r.wall_times.size() != r.events.size())
        return "wall_times length does not match events";
    return "";
}

PayloadIndex PayloadIndex::from_payload_json(const json& payload) {
    PayloadIndex idx;
    idx.source_digest = payload.at("source_digest").get<std::string>();
    std::function<void(const json&)> walk = [&](const json& block) {
        for (const json& q : block.at("questions")) {
            QuestionInfo info;
            info.exclusive = q.value("exclusive", true);
            info.freetext = q.value("freetext", false);
            info.instructional = q.value("instructional", false);
            for (const json& o : q.at("options"))
                info.option_ids.push_back(o.at("id").get<std::string>());
            idx.questions.emplace(q.at("id").get<std::string>(), std::move(info));
        }
        for (const json& sub : block.at("subblocks")) walk(sub);
    };
    for (const json& b : payload.at("blocks")) walk(b);
    return idx;
}

std::string validate_record(const ResponseRecord& r, const PayloadIndex& index) {
    std::string shape = validate_record_shape(r);
    if (!shape.empty()) return shape;
    for (const ResponseEvent& e : r.events) {
        auto it = index.questions.find(e.question_id);
        if (it == index.questions.end()) return "unknown question " + e.question_id;
        const QuestionInfo& q = it->second;
        for (const std::string& oid : e.chosen_option_ids)
            if (std::find(q.option_ids.begin(), q.option_ids.end(), oid) == q.option_ids.end())
                return "option " + oid + " does not belong to " + e.question_id;
        if (q.freetext) {
            if (!e.chosen_option_ids.empty()) return "freetext event with chosen options";
            if (!e.freetext_value) return "freetext event without a value";
        } else if (q.instructional) {
            if (!e.chosen_option_ids.empty()) return "instructional event with chosen options";
        } else if (q.exclusive) {
            if (e.chosen_option_ids.size() != 1)
                return "exclusive question " + e.question_id + " needs exactly one option";
        } else if (e.chosen_option_ids.empty()) {
            return "checkbox question " + e.question_id + " needs at least one option";
        }
    }
    return "";
}

}  // namespace survey
