#pragma once

#include <memory>
#include <string>
#include <thread>

#include "survey/store.hpp"

namespace httplib {
class Server;
}

namespace survey {

struct ServiceConfig {
    std::string dir;                // holds payload.json, survey.html, responses.jsonl
    std::string host = "0.0.0.0";
    int port = 8080;                // 0 picks a free port
    bool cors = true;
};

/// Local deployment of one compiled survey.
///
///   GET  /survey        the self-contained HTML document
///   GET  /payload.json  the compiled payload, byte for byte
///   GET  /runner.js     the runner bundle, when present in the directory
///   GET  /health        service status and stored-response count
///   POST /response      a completed response record
///   POST /breakoff      a partial record; terminal forced to BREAKOFF
///
/// Submissions are validated against the payload (400 on schema problems,
/// 409 on a source digest mismatch) and appended to the store. A repeated
/// completed submission for the same respondent is acknowledged but not
/// stored again.
class SurveyService {
public:
    explicit SurveyService(ServiceConfig config);  // throws when dir lacks the payload
    ~SurveyService();

    SurveyService(const SurveyService&) = delete;
    SurveyService& operator=(const SurveyService&) = delete;

    /// Blocks until stop() is called from another thread.
    bool run();
    /// Binds and serves on a background thread; returns the bound port.
    int start_background();
    void stop();

    const std::string& store_path() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace survey
