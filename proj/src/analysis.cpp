#include "survey/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include <json.hpp>

#include "survey/rng.hpp"
#include "survey/stats.hpp"

namespace survey {

using nlohmann::ordered_json;

ResponseMatrix::ResponseMatrix(const Survey& s, const std::vector<ResponseRecord>& records) {
    std::map<std::string, const Question*> eligible;
    for (const Question* q : s.all_questions())
        if (q->exclusive && q->answerable()) {
            questions_.push_back(q);
            eligible.emplace(q->question_id, q);
        }

    for (const ResponseRecord& r : records) {
        std::map<std::string, Cell> row;
        for (const ResponseEvent& e : r.events) {
            auto it = eligible.find(e.question_id);
            if (it == eligible.end() || e.chosen_option_ids.size() != 1) continue;
            const Question* q = it->second;
            const std::string& oid = e.chosen_option_ids.front();
            auto opt = std::find_if(q->options.begin(), q->options.end(),
                                    [&](const OptionSpec& o) { return o.option_id == oid; });
            if (opt == q->options.end()) continue;
            Cell cell;
            cell.option_id = oid;
            cell.display_position = e.display_position;
            cell.rank = static_cast<double>(opt - q->options.begin()) + 1.0;
            row.emplace(e.question_id, std::move(cell));
        }
        respondent_ids_.push_back(r.respondent_id);
        cells_.push_back(std::move(row));
    }
}

const ResponseMatrix::Cell* ResponseMatrix::answer(std::size_t respondent,
                                                   const std::string& question_id) const {
    const auto& row = cells_[respondent];
    auto it = row.find(question_id);
    return it == row.end() ? nullptr : &it->second;
}

namespace {

struct TestOutcome {
    std::string statistic_name;
    double statistic = 0.0;
    double p_value = 1.0;
    bool low_confidence = false;
    bool ok = false;
};

// Distribution-shift test shared by the order and variant analyses: ranks go
// through Mann-Whitney, categories through chi-squared. The default
// chi-squared is the two-sample homogeneity test (df = categories - 1),
// which holds the advertised false-positive rate; treating the baseline
// frequencies as a known expectation roughly doubles the statistic's
// variance under the null, so that literal recipe lives behind
// paper_compat together with its (m-1)^2 degrees of freedom.
TestOutcome compare_samples(bool ordered, std::size_t category_count,
                            const std::vector<double>& baseline,
                            const std::vector<double>& observed, bool paper_compat) {
    TestOutcome out;
    try {
        if (ordered) {
            auto r = stats::mann_whitney_u(observed, baseline);
            out = {"mann_whitney_u", r.u, r.p, r.low_confidence, true};
            return out;
        }
        std::vector<double> base_counts(category_count, 0.0), obs_counts(category_count, 0.0);
        for (double v : baseline) base_counts[static_cast<std::size_t>(v) - 1] += 1.0;
        for (double v : observed) obs_counts[static_cast<std::size_t>(v) - 1] += 1.0;

        if (paper_compat) {
            double base_total = static_cast<double>(baseline.size());
            std::vector<double> freqs(category_count, 0.0);
            std::size_t live = 0;
            for (std::size_t i = 0; i < category_count; ++i) {
                freqs[i] = base_counts[i] / base_total;
                if (freqs[i] > 0.0) ++live;
            }
            if (live < 2) return out;
            double m = static_cast<double>(category_count);
            auto r = stats::chi_squared_gof(obs_counts, freqs, (m - 1.0) * (m - 1.0));
            out = {"chi_squared", r.chi2, r.p, r.low_confidence, true};
            return out;
        }
        auto r = stats::cramers_v({base_counts, obs_counts});
        out = {"chi_squared", r.chi2, r.p, r.low_confidence, true};
        return out;
    } catch (const stats::DegenerateInput&) {
        return out;
    }
}

double quantile(std::vector<double> values, double q) {
    std::sort(values.begin(), values.end());
    if (values.empty()) return 0.0;
    double pos = q * static_cast<double>(values.size() - 1);
    std::size_t lo = static_cast<std::size_t>(pos);
    std::size_t hi = std::min(lo + 1, values.size() - 1);
    double frac = pos - static_cast<double>(lo);
    return values[lo] * (1.0 - frac) + values[hi] * frac;
}

}  // namespace

std::vector<CorrelationFinding> analyze_correlations(const ResponseMatrix& m,
                                                     const AnalysisOptions& opts,
                                                     int* pairs_tested) {
    std::vector<CorrelationFinding> out;
    const auto& questions = m.questions();
    int tested = 0;

    for (std::size_t a = 0; a < questions.size(); ++a) {
        for (std::size_t b = a + 1; b < questions.size(); ++b) {
            const Question* qa = questions[a];
            const Question* qb = questions[b];
            bool expected = !qa->correlated_group.empty() &&
                            qa->correlated_group == qb->correlated_group;

            std::vector<double> ra, rb;
            std::map<std::string, std::size_t> ia, ib;
            for (std::size_t i = 0; i < qa->options.size(); ++i)
                ia[qa->options[i].option_id] = i;
            for (std::size_t i = 0; i < qb->options.size(); ++i)
                ib[qb->options[i].option_id] = i;
            std::vector<std::vector<double>> table(qa->options.size(),
                                                   std::vector<double>(qb->options.size(), 0.0));
            for (std::size_t r = 0; r < m.respondents().size(); ++r) {
                const auto* ca = m.answer(r, qa->question_id);
                const auto* cb = m.answer(r, qb->question_id);
                if (!ca || !cb) continue;
                ra.push_back(ca->rank);
                rb.push_back(cb->rank);
                table[ia[ca->option_id]][ib[cb->option_id]] += 1.0;
            }
            if (ra.size() < 3) continue;
            ++tested;

            CorrelationFinding f;
            f.question_a = qa->question_id;
            f.question_b = qb->question_id;
            f.expected = expected;
            f.n = static_cast<int>(ra.size());
            try {
                if (qa->ordered && qb->ordered) {
                    auto r = stats::spearman_rho(ra, rb);
                    f.statistic_name = "spearman_rho";
                    f.statistic = r.rho;
                    f.p_value = r.p;
                    f.flagged = r.p < opts.alpha && std::abs(r.rho) >= opts.strength_threshold;
                } else {
                    auto r = stats::cramers_v(table);
                    f.statistic_name = "cramers_v";
                    f.statistic = r.v;
                    f.p_value = r.p;
                    f.low_confidence = r.low_confidence;
                    f.flagged = r.p < opts.alpha && r.v >= opts.strength_threshold;
                }
            } catch (const stats::DegenerateInput&) {
                // Constant answers carry no correlation signal; still worth
                // reporting when the author declared one.
                f.statistic_name = "degenerate";
            }
            if (f.flagged || expected) out.push_back(std::move(f));
        }
    }
    if (pairs_tested) *pairs_tested = tested;
    return out;
}

std::vector<OrderBiasFinding> analyze_order_bias(const ResponseMatrix& m,
                                                 const AnalysisOptions& opts) {
    std::vector<OrderBiasFinding> out;
    const auto& questions = m.questions();

    for (std::size_t a = 0; a < questions.size(); ++a) {
        for (std::size_t b = a + 1; b < questions.size(); ++b) {
            const Question* qa = questions[a];
            const Question* qb = questions[b];

            // Answers to each question, split by which question came first.
            std::vector<double> a_first_a, a_later_a, b_first_b, b_later_b;
            for (std::size_t r = 0; r < m.respondents().size(); ++r) {
                const auto* ca = m.answer(r, qa->question_id);
                const auto* cb = m.answer(r, qb->question_id);
                if (!ca || !cb) continue;
                bool a_first = ca->display_position < cb->display_position;
                (a_first ? a_first_a : a_later_a).push_back(ca->rank);
                (a_first ? b_later_b : b_first_b).push_back(cb->rank);
            }

            auto run = [&](const Question* target, const Question* other,
                           const std::vector<double>& before, const std::vector<double>& after) {
                if (static_cast<int>(before.size()) < opts.min_partition ||
                    static_cast<int>(after.size()) < opts.min_partition)
                    return;
                TestOutcome t = compare_samples(target->ordered, target->options.size(), before,
                                                after, opts.paper_compat);
                if (!t.ok) return;
                OrderBiasFinding f;
                f.question = target->question_id;
                f.other = other->question_id;
                f.statistic_name = t.statistic_name;
                f.statistic = t.statistic;
                f.p_value = t.p_value;
                f.n_before = static_cast<int>(before.size());
                f.n_after = static_cast<int>(after.size());
                f.low_confidence = t.low_confidence;
                f.flagged = t.p_value < opts.alpha;
                out.push_back(std::move(f));
            };
            run(qa, qb, a_first_a, a_later_a);
            run(qb, qa, b_first_b, b_later_b);
        }
    }
    return out;
}

std::vector<VariantBiasFinding> analyze_variant_bias(const ResponseMatrix& m, const Survey& s,
                                                     const AnalysisOptions& opts) {
    std::vector<VariantBiasFinding> out;

    std::map<std::string, std::vector<double>> answers;  // variant question -> ranks
    for (std::size_t r = 0; r < m.respondents().size(); ++r)
        for (const Question* q : m.questions())
            if (const auto* cell = m.answer(r, q->question_id))
                answers[q->question_id].push_back(cell->rank);

    s.for_each_block([&](const Block& block) {
        if (!block.branch_info.consistent || block.branch_info.type != BranchType::All) return;
        for (std::size_t a = 0; a < block.questions.size(); ++a) {
            for (std::size_t b = a + 1; b < block.questions.size(); ++b) {
                const Question& va = block.questions[a];
                const Question& vb = block.questions[b];
                if (va.options.size() != vb.options.size()) continue;
                const auto& sa = answers[va.question_id];
                const auto& sb = answers[vb.question_id];
                if (static_cast<int>(sa.size()) < opts.min_partition ||
                    static_cast<int>(sb.size()) < opts.min_partition)
                    continue;
                TestOutcome t =
                    compare_samples(va.ordered, va.options.size(), sa, sb, opts.paper_compat);
                if (!t.ok) continue;
                VariantBiasFinding f;
                f.block = block.id.str();
                f.variant_a = va.question_id;
                f.variant_b = vb.question_id;
                f.statistic_name = t.statistic_name;
                f.statistic = t.statistic;
                f.p_value = t.p_value;
                f.n_a = static_cast<int>(sa.size());
                f.n_b = static_cast<int>(sb.size());
                f.low_confidence = t.low_confidence;
                f.flagged = t.p_value < opts.alpha;
                out.push_back(std::move(f));
            }
        }
    });
    return out;
}

BreakoffReport analyze_breakoff(const std::vector<ResponseRecord>& records) {
    std::map<int, int> by_position;
    std::map<std::string, int> by_question;
    for (const ResponseRecord& r : records) {
        if (r.terminal != Terminal::Breakoff || r.events.empty()) continue;
        const ResponseEvent& last = r.events.back();
        by_position[last.display_position] += 1;
        by_question[last.question_id] += 1;
    }
    BreakoffReport report;
    report.by_position.assign(by_position.begin(), by_position.end());
    report.by_question.assign(by_question.begin(), by_question.end());
    std::stable_sort(report.by_position.begin(), report.by_position.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    std::stable_sort(report.by_question.begin(), report.by_question.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    return report;
}

RandomRespondentReport detect_random_respondents(const std::vector<ResponseRecord>& records,
                                                 const Survey& s, const AnalysisOptions& opts) {
    std::vector<const ResponseRecord*> completed;
    for (const ResponseRecord& r : records)
        if (r.terminal == Terminal::Completed) completed.push_back(&r);
    if (completed.size() < 20)
        throw InsufficientData("need at least 20 completed records, have " +
                               std::to_string(completed.size()));

    std::set<std::string> eligible;
    for (const Question* q : s.all_questions())
        if (q->exclusive && q->answerable()) eligible.insert(q->question_id);

    // Empirical choice probabilities from completed records only; breakoff
    // traces would bias them short.
    std::map<std::string, std::map<std::string, double>> counts;
    std::map<std::string, double> totals;
    for (const ResponseRecord* r : completed)
        for (const ResponseEvent& e : r->events) {
            if (!eligible.count(e.question_id) || e.chosen_option_ids.size() != 1) continue;
            counts[e.question_id][e.chosen_option_ids.front()] += 1.0;
            totals[e.question_id] += 1.0;
        }

    RandomRespondentReport report;
    report.score_kind = opts.paper_compat ? "plogp" : "surprisal";
    report.n_completed = static_cast<int>(completed.size());

    std::vector<double> scores;
    for (const ResponseRecord* r : completed) {
        double score = 0.0;
        for (const ResponseEvent& e : r->events) {
            if (!eligible.count(e.question_id) || e.chosen_option_ids.size() != 1) continue;
            double p = counts[e.question_id][e.chosen_option_ids.front()] / totals[e.question_id];
            if (p <= 0.0) continue;
            score += opts.paper_compat ? p * std::log2(p) : -std::log2(p);
        }
        scores.push_back(score);
        report.entries.push_back({r->respondent_id, score, false});
    }

    // Bootstrap-stabilized one-sided bound on a respondent's score: each
    // resample contributes mean + z * sd (minus, for the lower-tailed
    // signed score), and the threshold is the median of those bounds. On a
    // homogeneous population this flags about an alpha share; a cluster of
    // random respondents inflates the spread and lands the bound between
    // the clusters.
    Prng rng(opts.seed);
    const double z = -stats::normal_quantile(opts.alpha);
    std::vector<double> bounds;
    bounds.reserve(static_cast<std::size_t>(opts.bootstrap_b));
    const std::size_t n = scores.size();
    for (int b = 0; b < opts.bootstrap_b; ++b) {
        double sum = 0.0, sum_sq = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double v = scores[rng.next_below(static_cast<std::uint32_t>(n))];
            sum += v;
            sum_sq += v * v;
        }
        double mean = sum / static_cast<double>(n);
        double var = std::max(0.0, sum_sq / static_cast<double>(n) - mean * mean);
        double sd = std::sqrt(var);
        bounds.push_back(opts.paper_compat ? mean - z * sd : mean + z * sd);
    }
    report.threshold = quantile(bounds, 0.5);
    for (RespondentScore& e : report.entries)
        e.flagged = opts.paper_compat ? e.score < report.threshold : e.score > report.threshold;
    return report;
}

bool DynamicReport::any_flagged() const {
    for (const auto& f : correlations)
        if (f.flagged || (f.expected && !f.flagged)) return true;
    for (const auto& f : order_bias)
        if (f.flagged) return true;
    for (const auto& f : variant_bias)
        if (f.flagged) return true;
    if (random_respondents)
        for (const auto& e : random_respondents->entries)
            if (e.flagged) return true;
    return false;
}

DynamicReport analyze_dynamic(const Survey& s, const std::vector<ResponseRecord>& records,
                              const AnalysisOptions& opts) {
    DynamicReport report;
    report.survey_id = s.survey_id;
    report.source_digest = s.source_digest;
    report.alpha = opts.alpha;
    report.paper_compat = opts.paper_compat;

    // One record per respondent against the current survey; a completed
    // record supersedes an earlier breakoff beacon.
    std::vector<ResponseRecord> kept;
    std::map<std::string, std::size_t> by_respondent;
    for (const ResponseRecord& r : records) {
        if (r.source_digest != s.source_digest) {
            ++report.n_stale_skipped;
            continue;
        }
        auto it = by_respondent.find(r.respondent_id);
        if (it == by_respondent.end()) {
            by_respondent[r.respondent_id] = kept.size();
            kept.push_back(r);
        } else if (kept[it->second].terminal == Terminal::Breakoff &&
                   r.terminal == Terminal::Completed) {
            kept[it->second] = r;
        }
    }
    if (report.n_stale_skipped > 0)
        report.notes.push_back(std::to_string(report.n_stale_skipped) +
                               " record(s) skipped: stale source digest");

    report.n_records = static_cast<int>(kept.size());
    for (const ResponseRecord& r : kept)
        (r.terminal == Terminal::Completed ? report.n_completed : report.n_breakoff) += 1;

    ResponseMatrix matrix(s, kept);
    report.correlations =
        analyze_correlations(matrix, opts, &report.correlation_pairs_tested);
    report.order_bias = analyze_order_bias(matrix, opts);
    report.variant_bias = analyze_variant_bias(matrix, s, opts);
    report.breakoff = analyze_breakoff(kept);
    try {
        report.random_respondents = detect_random_respondents(kept, s, opts);
    } catch (const InsufficientData& e) {
        report.notes.push_back(std::string("random-respondent detection skipped: ") + e.what());
    }
    return report;
}

std::string dynamic_report_text(const DynamicReport& r) {
    std::ostringstream out;
    out << "records:            " << r.n_records << " (" << r.n_completed << " completed, "
        << r.n_breakoff << " breakoff";
    if (r.n_stale_skipped) out << ", " << r.n_stale_skipped << " stale skipped";
    out << ")\n";
    out << "alpha:              " << r.alpha << (r.paper_compat ? " (compat mode)" : "") << "\n";

    out << "correlations:       " << r.correlation_pairs_tested << " pairs tested\n";
    for (const auto& f : r.correlations) {
        if (f.flagged && !f.expected)
            out << "  flagged " << f.question_a << " ~ " << f.question_b << " ("
                << f.statistic_name << "=" << f.statistic << ", p=" << f.p_value << ")\n";
        else if (f.expected && !f.flagged)
            out << "  NOT correlated (authored as correlated): " << f.question_a << " ~ "
                << f.question_b << " (p=" << f.p_value << ")\n";
    }

    int order_flagged = 0;
    for (const auto& f : r.order_bias)
        if (f.flagged) ++order_flagged;
    out << "order bias:         " << r.order_bias.size() << " tests, " << order_flagged
        << " flagged\n";
    for (const auto& f : r.order_bias)
        if (f.flagged)
            out << "  " << f.question << " depends on order vs " << f.other << " ("
                << f.statistic_name << "=" << f.statistic << ", p=" << f.p_value << ")\n";

    int variant_flagged = 0;
    for (const auto& f : r.variant_bias)
        if (f.flagged) ++variant_flagged;
    out << "variant bias:       " << r.variant_bias.size() << " tests, " << variant_flagged
        << " flagged\n";
    for (const auto& f : r.variant_bias)
        if (f.flagged)
            out << "  block " << f.block << ": " << f.variant_a << " vs " << f.variant_b << " ("
                << f.statistic_name << "=" << f.statistic << ", p=" << f.p_value << ")\n";

    out << "breakoff:           " << r.n_breakoff << " respondents\n";
    for (std::size_t i = 0; i < r.breakoff.by_position.size() && i < 5; ++i)
        out << "  position " << r.breakoff.by_position[i].first << ": "
            << r.breakoff.by_position[i].second << "\n";
    for (std::size_t i = 0; i < r.breakoff.by_question.size() && i < 5; ++i)
        out << "  question " << r.breakoff.by_question[i].first << ": "
            << r.breakoff.by_question[i].second << "\n";

    if (r.random_respondents) {
        int flagged = 0;
        for (const auto& e : r.random_respondents->entries)
            if (e.flagged) ++flagged;
        out << "random respondents: " << flagged << " of " << r.random_respondents->n_completed
            << " flagged (threshold " << r.random_respondents->threshold << ", "
            << r.random_respondents->score_kind << ")\n";
    }
    for (const std::string& n : r.notes) out << "note: " << n << "\n";
    return out.str();
}

std::string dynamic_report_json(const DynamicReport& r) {
    ordered_json j;
    j["survey_id"] = r.survey_id;
    j["source_digest"] = r.source_digest;
    j["alpha"] = r.alpha;
    j["paper_compat"] = r.paper_compat;
    j["n_records"] = r.n_records;
    j["n_completed"] = r.n_completed;
    j["n_breakoff"] = r.n_breakoff;
    j["n_stale_skipped"] = r.n_stale_skipped;

    j["correlations"] = ordered_json::array();
    j["correlation_pairs_tested"] = r.correlation_pairs_tested;
    for (const auto& f : r.correlations)
        j["correlations"].push_back({{"question_a", f.question_a},
                                     {"question_b", f.question_b},
                                     {"statistic_name", f.statistic_name},
                                     {"statistic", f.statistic},
                                     {"p_value", f.p_value},
                                     {"n", f.n},
                                     {"flagged", f.flagged},
                                     {"expected", f.expected},
                                     {"low_confidence", f.low_confidence}});

    j["order_bias"] = ordered_json::array();
    for (const auto& f : r.order_bias) {
        if (!f.flagged) continue;
        j["order_bias"].push_back({{"question", f.question},
                                   {"other", f.other},
                                   {"statistic_name", f.statistic_name},
                                   {"statistic", f.statistic},
                                   {"p_value", f.p_value},
                                   {"n_before", f.n_before},
                                   {"n_after", f.n_after},
                                   {"flagged", f.flagged},
                                   {"low_confidence", f.low_confidence}});
    }
    j["order_bias_tests"] = static_cast<int>(r.order_bias.size());

    j["variant_bias"] = ordered_json::array();
    for (const auto& f : r.variant_bias) {
        if (!f.flagged) continue;
        j["variant_bias"].push_back({{"block", f.block},
                                     {"variant_a", f.variant_a},
                                     {"variant_b", f.variant_b},
                                     {"statistic_name", f.statistic_name},
                                     {"statistic", f.statistic},
                                     {"p_value", f.p_value},
                                     {"n_a", f.n_a},
                                     {"n_b", f.n_b},
                                     {"flagged", f.flagged},
                                     {"low_confidence", f.low_confidence}});
    }
    j["variant_bias_tests"] = static_cast<int>(r.variant_bias.size());

    j["breakoff_by_position"] = ordered_json::array();
    for (const auto& [position, count] : r.breakoff.by_position)
        j["breakoff_by_position"].push_back({{"position", position}, {"count", count}});
    j["breakoff_by_question"] = ordered_json::array();
    for (const auto& [qid, count] : r.breakoff.by_question)
        j["breakoff_by_question"].push_back({{"question_id", qid}, {"count", count}});

    if (r.random_respondents) {
        ordered_json rr;
        rr["score_kind"] = r.random_respondents->score_kind;
        rr["threshold"] = r.random_respondents->threshold;
        rr["n_completed"] = r.random_respondents->n_completed;
        rr["entries"] = ordered_json::array();
        for (const auto& e : r.random_respondents->entries)
            rr["entries"].push_back({{"respondent_id", e.respondent_id},
                                     {"score", e.score},
                                     {"flagged", e.flagged}});
        j["random_respondents"] = std::move(rr);
    } else {
        j["random_respondents"] = nullptr;
    }
    j["notes"] = r.notes;
    return j.dump(2) + "\n";
}

}  // namespace survey
