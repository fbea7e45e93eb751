#include "survey/csv.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <map>
#include <set>
#include <sstream>

namespace survey {

namespace {

constexpr std::array<std::string_view, 9> kCanonicalHeaders = {
    "QUESTION", "OPTIONS", "BLOCK", "EXCLUSIVE", "ORDERED",
    "BRANCH",   "RANDOMIZE", "FREETEXT", "CORRELATED"};

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

std::string upper(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    return out;
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string collapse_whitespace(std::string_view s) {
    std::string out;
    bool in_space = false;
    for (char c : s) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            in_space = true;
            continue;
        }
        if (in_space && !out.empty()) out += ' ';
        in_space = false;
        out += c;
    }
    return out;
}

std::string csv_cell(std::string_view value) {
    bool needs_quote = value.find_first_of(",\"\r\n") != std::string_view::npos;
    if (!needs_quote) return std::string(value);
    std::string out = "\"";
    for (char c : value) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

}  // namespace

ParseError::ParseError(ParseDiagnostics diagnostics)
    : std::runtime_error(diagnostics.errors.empty()
                             ? std::string("survey parse failed")
                             : "survey parse failed: " + diagnostics.errors.front().code + " (row " +
                                   std::to_string(diagnostics.errors.front().row) + "): " +
                                   diagnostics.errors.front().message),
      diagnostics_(std::move(diagnostics)) {}

std::vector<std::vector<std::string>> read_csv(std::string_view text) {
    if (text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);

    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string cell;
    bool quoted = false;
    bool any_cell = false;

    auto end_cell = [&] {
        row.push_back(trim(cell));
        cell.clear();
    };
    auto end_row = [&] {
        end_cell();
        bool blank = std::all_of(row.begin(), row.end(),
                                 [](const std::string& c) { return c.empty(); });
        if (!blank) rows.push_back(std::move(row));
        row.clear();
        any_cell = false;
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    cell += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cell += c;
            }
            continue;
        }
        switch (c) {
            case '"':
                quoted = true;
                any_cell = true;
                break;
            case ',':
                end_cell();
                any_cell = true;
                break;
            case '\r':
                break;
            case '\n':
                end_row();
                break;
            default:
                cell += c;
                any_cell = true;
                break;
        }
    }
    if (any_cell || !cell.empty() || !row.empty()) end_row();
    return rows;
}

bool boolean_cell(std::string_view cell, bool fallback) {
    if (cell.empty()) return fallback;
    std::string v = lower(trim(cell));
    if (v.empty()) return fallback;
    if (v == "true" || v == "yes" || v == "1") return true;
    if (v == "false" || v == "no" || v == "0") return false;
    throw MalformedBoolean(cell);
}

std::string content_digest(std::string_view bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (char c : bytes) {
        h ^= static_cast<std::uint8_t>(c);
        h *= 1099511628211ull;
    }
    static const char* hex = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = hex[h & 0xF];
        h >>= 4;
    }
    return out;
}

namespace {

struct PendingQuestion {
    Question q;
};

class SurveyParser {
public:
    explicit SurveyParser(std::string survey_id) : survey_id_(std::move(survey_id)) {}

    ParseResult run(std::string_view csv_text) {
        auto rows = read_csv(csv_text);
        if (rows.empty()) {
            error(0, "MissingRequiredColumn", "empty input: no header row");
            return finish();
        }
        read_header(rows.front());
        if (!diag_.ok()) return finish();

        for (std::size_t i = 1; i < rows.size(); ++i)
            consume_row(static_cast<int>(i) + 1, rows[i]);
        flush_question();
        warn_duplicates();
        return finish();
    }

private:
    void error(int row, std::string code, std::string message) {
        diag_.errors.push_back({row, std::move(code), std::move(message)});
    }
    void warn(int row, std::string code, std::string message) {
        diag_.warnings.push_back({row, std::move(code), std::move(message)});
    }

    void read_header(const std::vector<std::string>& header) {
        for (std::size_t i = 0; i < header.size(); ++i) {
            std::string name = upper(trim(header[i]));
            if (name.empty()) continue;
            bool known = std::find(kCanonicalHeaders.begin(), kCanonicalHeaders.end(), name) !=
                         kCanonicalHeaders.end();
            if (!known) {
                warn(1, "UnrecognizedHeader",
                     "unrecognized header \"" + header[i] + "\"; possible typo");
                continue;
            }
            if (columns_.count(name)) {
                warn(1, "DuplicateHeader", "duplicate header \"" + name + "\"; first one wins");
                continue;
            }
            columns_[name] = i;
        }
        for (std::string_view required : {"QUESTION", "OPTIONS"})
            if (!columns_.count(std::string(required)))
                error(1, "MissingRequiredColumn",
                      "required column " + std::string(required) + " is missing");
    }

    std::string cell(const std::vector<std::string>& row, const std::string& name) const {
        auto it = columns_.find(name);
        if (it == columns_.end() || it->second >= row.size()) return "";
        return row[it->second];
    }

    bool flag_cell(int row_no, const std::vector<std::string>& row, const std::string& name,
                   bool fallback) {
        try {
            return boolean_cell(cell(row, name), fallback);
        } catch (const MalformedBoolean&) {
            error(row_no, "MalformedBoolean",
                  name + " cell \"" + cell(row, name) + "\" is not a boolean");
            return fallback;
        }
    }

    std::optional<BlockId> branch_cell(int row_no, const std::vector<std::string>& row) {
        std::string raw = cell(row, "BRANCH");
        if (raw.empty()) return std::nullopt;
        auto id = BlockId::try_parse(raw);
        if (!id) {
            error(row_no, "MalformedBlockId", "BRANCH cell \"" + raw + "\" is not a block id");
            return std::nullopt;
        }
        return id;
    }

    void consume_row(int row_no, const std::vector<std::string>& row) {
        std::string question_text = cell(row, "QUESTION");
        if (!question_text.empty()) {
            flush_question();
            start_question(row_no, row, question_text);
        } else {
            append_option(row_no, row);
        }
    }

    // Ids number canonical rows (the rows that survive parsing), so dropping
    // an ignored row never shifts them and the canonical emission reparses to
    // identical ids. Diagnostics keep the input row number.
    void start_question(int row_no, const std::vector<std::string>& row, std::string text) {
        int id_row = ++canonical_row_;
        PendingQuestion p;
        p.q.question_id = "q" + std::to_string(id_row);
        p.q.text = std::move(text);
        p.q.source_row = id_row;
        p.q.exclusive = flag_cell(row_no, row, "EXCLUSIVE", true);
        p.q.ordered = flag_cell(row_no, row, "ORDERED", false);
        p.q.randomize = flag_cell(row_no, row, "RANDOMIZE", true);
        p.q.freetext = flag_cell(row_no, row, "FREETEXT", false);
        p.q.correlated_group = cell(row, "CORRELATED");

        std::string block_text = cell(row, "BLOCK");
        if (block_text.empty()) block_text = "1";
        if (auto id = BlockId::try_parse(block_text)) {
            p.q.block = *id;
        } else {
            error(row_no, "MalformedBlockId", "BLOCK cell \"" + block_text + "\" is not a block id");
            p.q.block = BlockId::parse("1");
        }

        std::string option_text = cell(row, "OPTIONS");
        auto branch = branch_cell(row_no, row);
        if (p.q.freetext) {
            p.q.freetext_pattern = option_text;  // optional constraint
            if (branch) error(row_no, "FreetextWithBranch",
                              "freetext questions cannot branch");
        } else if (!option_text.empty() || branch) {
            p.q.options.push_back({"opt" + std::to_string(id_row), option_text, branch});
        }
        current_ = std::move(p);
    }

    void append_option(int row_no, const std::vector<std::string>& row) {
        if (!current_) {
            error(row_no, "OptionBeforeFirstQuestion",
                  "option row appears before any question row");
            return;
        }
        std::string block_text = cell(row, "BLOCK");
        if (!block_text.empty()) {
            auto id = BlockId::try_parse(block_text);
            if (!id) {
                error(row_no, "MalformedBlockId",
                      "BLOCK cell \"" + block_text + "\" is not a block id");
            } else if (*id != current_->q.block) {
                error(row_no, "InconsistentBlockWithinQuestion",
                      "option row block \"" + block_text + "\" conflicts with question block \"" +
                          current_->q.block.str() + "\"");
            }
        }
        check_flag_consistency(row_no, row);

        if (current_->q.freetext) {
            warn(row_no, "FreetextOptionIgnored",
                 "freetext question takes no option rows; row ignored");
            return;
        }
        std::string option_text = cell(row, "OPTIONS");
        auto branch = branch_cell(row_no, row);
        if (option_text.empty() && !branch) {
            warn(row_no, "EmptyOptionRow", "option row with no option text; row ignored");
            return;
        }
        current_->q.options.push_back(
            {"opt" + std::to_string(++canonical_row_), option_text, branch});
    }

    void check_flag_consistency(int row_no, const std::vector<std::string>& row) {
        struct FlagRef { const char* name; bool value; };
        const FlagRef flags[] = {{"EXCLUSIVE", current_->q.exclusive},
                                 {"ORDERED", current_->q.ordered},
                                 {"RANDOMIZE", current_->q.randomize},
                                 {"FREETEXT", current_->q.freetext}};
        for (const FlagRef& f : flags) {
            std::string raw = cell(row, f.name);
            if (raw.empty()) continue;
            try {
                if (boolean_cell(raw, f.value) != f.value)
                    warn(row_no, "InconsistentFlagWithinQuestion",
                         std::string(f.name) + " differs from the question row; question row wins");
            } catch (const MalformedBoolean&) {
                warn(row_no, "InconsistentFlagWithinQuestion",
                     std::string(f.name) + " cell \"" + raw + "\" ignored on option row");
            }
        }
        std::string correlated = cell(row, "CORRELATED");
        if (!correlated.empty() && correlated != current_->q.correlated_group)
            warn(row_no, "InconsistentFlagWithinQuestion",
                 "CORRELATED differs from the question row; question row wins");
    }

    void flush_question() {
        if (!current_) return;
        Question q = std::move(current_->q);
        current_.reset();
        if (q.options.empty() && !q.freetext) {
            // Question row with an empty OPTIONS cell and no option rows:
            // display-only instructions, modeled as one empty option.
            q.options.push_back({"opt" + std::to_string(q.source_row), "", std::nullopt});
        }
        questions_.push_back(std::move(q));
    }

    void warn_duplicates() {
        std::map<std::string, int> seen;  // normalized text -> first row
        for (const Question& q : questions_) {
            std::string key = collapse_whitespace(q.text);
            auto [it, inserted] = seen.emplace(key, q.source_row);
            if (!inserted)
                warn(q.source_row, "DuplicateQuestion",
                     "question text duplicates row " + std::to_string(it->second));
        }
    }

    Block* ensure_block(std::vector<Block>& siblings, const BlockId& id) {
        for (Block& b : siblings)
            if (b.id == id) return &b;
        Block fresh;
        fresh.id = id;
        auto pos = std::upper_bound(siblings.begin(), siblings.end(), fresh,
                                    [](const Block& a, const Block& b) {
                                        return sibling_less(a.id, b.id);
                                    });
        return &*siblings.insert(pos, std::move(fresh));
    }

    ParseResult finish() {
        ParseResult result;
        if (!diag_.ok()) {
            result.diagnostics = std::move(diag_);
            return result;
        }
        Survey s;
        s.survey_id = survey_id_;
        for (Question& q : questions_) {
            std::vector<Block>* siblings = &s.top_blocks;
            Block* block = nullptr;
            BlockId prefix;
            for (const std::string& seg : q.block.segments()) {
                prefix = prefix.valid() ? prefix.child(seg) : BlockId::parse(seg);
                block = ensure_block(*siblings, prefix);
                siblings = &block->subblocks;
            }
            block->questions.push_back(std::move(q));
        }
        finalize_branch_info(s);
        s.source_digest = content_digest(emit_csv(s));
        result.survey = std::move(s);
        result.diagnostics = std::move(diag_);
        return result;
    }

    std::string survey_id_;
    std::map<std::string, std::size_t> columns_;
    std::optional<PendingQuestion> current_;
    std::vector<Question> questions_;
    ParseDiagnostics diag_;
    int canonical_row_ = 1;  // header row
};

}  // namespace

ParseResult parse_survey(std::string_view csv_text, std::string survey_id) {
    return SurveyParser(std::move(survey_id)).run(csv_text);
}

Survey parse_survey_or_throw(std::string_view csv_text, std::string survey_id) {
    ParseResult r = parse_survey(csv_text, std::move(survey_id));
    if (!r.survey) throw ParseError(std::move(r.diagnostics));
    return *std::move(r.survey);
}

std::string emit_csv(const Survey& s) {
    std::ostringstream out;
    for (std::size_t i = 0; i < kCanonicalHeaders.size(); ++i) {
        if (i) out << ',';
        out << kCanonicalHeaders[i];
    }
    out << '\n';

    auto bool_text = [](bool v) { return v ? "true" : "false"; };

    for (const Question* q : s.all_questions()) {
        // The first option sits on the question row iff it did originally;
        // this keeps row numbers, and so generated ids, stable on reparse.
        std::string first_row_opt_id = "opt" + std::to_string(q->source_row);
        bool first_inline = !q->options.empty() && q->options.front().option_id == first_row_opt_id;

        auto emit_row = [&](std::string_view question, std::string_view option_text,
                            const std::optional<BlockId>& branch, bool question_row) {
            out << csv_cell(question) << ',' << csv_cell(option_text) << ',';
            if (question_row)
                out << q->block.str() << ',' << bool_text(q->exclusive) << ','
                    << bool_text(q->ordered) << ',';
            else
                out << ",,,";
            out << (branch ? branch->str() : "") << ',';
            if (question_row)
                out << bool_text(q->randomize) << ',' << bool_text(q->freetext) << ','
                    << csv_cell(q->correlated_group);
            else
                out << ",,";
            out << '\n';
        };

        if (q->freetext) {
            emit_row(q->text, q->freetext_pattern, std::nullopt, true);
            continue;
        }
        std::size_t start = 0;
        if (first_inline) {
            emit_row(q->text, q->options.front().text, q->options.front().branch_target, true);
            start = 1;
        } else {
            emit_row(q->text, "", std::nullopt, true);
        }
        for (std::size_t i = start; i < q->options.size(); ++i)
            emit_row("", q->options[i].text, q->options[i].branch_target, false);
    }
    return out.str();
}

}  // namespace survey
