#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "survey/analysis.hpp"
#include "survey/csv.hpp"
#include "survey/payload.hpp"
#include "survey/response_io.hpp"
#include "survey/service.hpp"
#include "survey/simulate.hpp"
#include "survey/static_analysis.hpp"
#include "survey/store.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFindings = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw IoError("write to " + path + " failed");
}

std::string stem_of(const std::string& path) {
    std::string stem = std::filesystem::path(path).stem().string();
    return stem.empty() ? "survey" : stem;
}

survey::Survey load_survey(const std::string& path, survey::ParseDiagnostics* diagnostics) {
    survey::ParseResult parsed = survey::parse_survey(read_file(path), stem_of(path));
    if (diagnostics) *diagnostics = parsed.diagnostics;
    if (!parsed.survey) {
        for (const survey::Diagnostic& d : parsed.diagnostics.errors)
            std::cerr << "error [" << d.code << "] row " << d.row << ": " << d.message << "\n";
        throw survey::ParseError(parsed.diagnostics);
    }
    return *std::move(parsed.survey);
}

int cmd_check(const std::string& csv_path, const std::string& json_path, int n_sim,
              std::uint32_t seed) {
    survey::ParseDiagnostics diagnostics;
    survey::Survey s = load_survey(csv_path, &diagnostics);
    survey::StaticReport report = survey::analyze_static(s, n_sim, seed, &diagnostics);
    std::cout << survey::static_report_text(report);
    if (!json_path.empty()) {
        std::string json = survey::static_report_json(report, s);
        if (json_path == "-")
            std::cout << json;
        else
            write_file(json_path, json);
    }
    return report.violations.empty() ? kExitOk : kExitFindings;
}

int cmd_compile(const std::string& csv_path, const std::string& out_dir) {
    survey::Survey s = load_survey(csv_path, nullptr);
    survey::Payload payload = survey::compile(s);
    std::filesystem::create_directories(out_dir);
    std::filesystem::path dir(out_dir);
    write_file((dir / "payload.json").string(), payload.dump());
    write_file((dir / "survey.html").string(), survey::wrap_html(payload));
    std::cout << "compiled " << s.survey_id << " (digest " << s.source_digest << ") to "
              << out_dir << "\n";
    return kExitOk;
}

int cmd_serve(const std::string& dir, const std::string& host, int port) {
    if (const char* env_port = std::getenv("SURVEY_PORT")) port = std::atoi(env_port);
    survey::ServiceConfig config;
    config.dir = dir;
    config.host = host;
    config.port = port;
    survey::SurveyService service(config);
    std::cout << "serving " << dir << " on http://" << host << ":" << port
              << " (responses -> " << service.store_path() << ")\n";
    if (!service.run()) throw IoError("server terminated abnormally");
    return kExitOk;
}

int cmd_simulate(const std::string& csv_path, const std::string& profile_path, int n,
                 std::uint32_t seed, const std::string& out_path) {
    survey::Survey s = load_survey(csv_path, nullptr);
    std::vector<survey::Violation> violations = survey::check_wellformed(s);
    if (!violations.empty()) {
        std::cerr << "survey is not well-formed: " << violations.front().code << " at "
                  << violations.front().location << "\n";
        return kExitFindings;
    }
    survey::Profile profile;
    if (!profile_path.empty())
        profile = survey::Profile::from_json(nlohmann::json::parse(read_file(profile_path)));
    std::vector<survey::ResponseRecord> records = survey::simulate(s, profile, n, seed);
    survey::save_responses(out_path, records);
    std::cout << "simulated " << records.size() << " respondents -> " << out_path << "\n";
    return kExitOk;
}

int cmd_analyze(const std::string& csv_path, const std::string& responses_path,
                const survey::AnalysisOptions& opts, const std::string& json_path) {
    survey::Survey s = load_survey(csv_path, nullptr);
    std::vector<survey::ResponseRecord> records = survey::load_responses(responses_path);
    survey::DynamicReport report = survey::analyze_dynamic(s, records, opts);
    std::cout << survey::dynamic_report_text(report);
    if (!json_path.empty()) {
        std::string json = survey::dynamic_report_json(report);
        if (json_path == "-")
            std::cout << json;
        else
            write_file(json_path, json);
    }
    return report.any_flagged() ? kExitFindings : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"survey toolchain: author in csv, validate, deploy, simulate, analyze"};
    app.require_subcommand(1);
    bool deterministic = false;
    app.add_flag("--deterministic", deterministic,
                 "suppress all run-dependent output (reports carry none by default)");

    std::string csv_path, json_path, out_dir, dir, host = "0.0.0.0", profile_path, out_path,
                responses_path;
    int n_sim = 5000, port = 8080, n = 100;
    std::uint32_t seed = 0;
    survey::AnalysisOptions opts;

    CLI::App* check = app.add_subcommand("check", "static analysis report");
    check->add_option("csv", csv_path, "survey csv file")->required();
    check->add_option("--json", json_path, "write the report as JSON to this path ('-' = stdout)");
    check->add_option("--n-sim", n_sim, "simulated respondents for the average path length");
    check->add_option("--seed", seed, "simulation seed");

    CLI::App* compile = app.add_subcommand("compile", "compile to payload.json + survey.html");
    compile->add_option("csv", csv_path, "survey csv file")->required();
    compile->add_option("-o,--out", out_dir, "output directory")->required();

    CLI::App* serve = app.add_subcommand("serve", "host a compiled survey and collect responses");
    serve->add_option("dir", dir, "directory produced by compile")->required();
    serve->add_option("--port", port, "listen port (env SURVEY_PORT overrides)");
    serve->add_option("--host", host, "bind address");

    CLI::App* simulate = app.add_subcommand("simulate", "generate synthetic responses");
    simulate->add_option("csv", csv_path, "survey csv file")->required();
    simulate->add_option("--profile", profile_path, "respondent profile JSON");
    simulate->add_option("-n", n, "number of respondents");
    simulate->add_option("--seed", seed, "simulation seed");
    simulate->add_option("-o,--out", out_path, "responses.jsonl output")->required();

    CLI::App* analyze = app.add_subcommand("analyze", "statistical report over responses");
    analyze->add_option("csv", csv_path, "survey csv file")->required();
    analyze->add_option("responses", responses_path, "responses.jsonl")->required();
    analyze->add_option("--alpha", opts.alpha, "significance level");
    analyze->add_option("--bootstrap-b", opts.bootstrap_b, "bootstrap resamples");
    analyze->add_option("--seed", opts.seed, "bootstrap seed");
    analyze->add_flag("--paper-compat", opts.paper_compat,
                      "literal-formula mode: (m-1)^2 dof and signed p*log2(p) scores");
    analyze->add_option("--json", json_path, "write the report as JSON ('-' = stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);  // prints help or the parse problem
        return rc == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (check->parsed()) return cmd_check(csv_path, json_path, n_sim, seed);
        if (compile->parsed()) return cmd_compile(csv_path, out_dir);
        if (serve->parsed()) return cmd_serve(dir, host, port);
        if (simulate->parsed()) return cmd_simulate(csv_path, profile_path, n, seed, out_path);
        if (analyze->parsed()) return cmd_analyze(csv_path, responses_path, opts, json_path);
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const survey::ParseError&) {
        return kExitFindings;  // diagnostics already printed
    } catch (const survey::CompileOnInvalidSurvey& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFindings;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
