#include "survey/service.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <httplib.h>
#include <json.hpp>

#include "survey/response_io.hpp"

namespace survey {

namespace {

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

struct SurveyService::Impl {
    ServiceConfig config;
    std::string payload_text;
    std::string html_text;
    std::string runner_text;
    bool has_runner = false;
    PayloadIndex index;
    ResponseStore store;
    httplib::Server server;
    std::thread worker;
    std::mutex dedup_mutex;
    std::set<std::string> completed_ids;

    explicit Impl(ServiceConfig cfg)
        : config(std::move(cfg)),
          store((std::filesystem::path(config.dir) / "responses.jsonl").string()) {
        std::filesystem::path dir(config.dir);
        payload_text = slurp(dir / "payload.json");
        html_text = slurp(dir / "survey.html");
        index = PayloadIndex::from_payload_json(nlohmann::json::parse(payload_text));
        if (std::filesystem::exists(dir / "runner.js")) {
            runner_text = slurp(dir / "runner.js");
            has_runner = true;
        }
        for (const ResponseRecord& r : store.load())
            if (r.terminal == Terminal::Completed) completed_ids.insert(r.respondent_id);
        routes();
    }

    void set_cors(httplib::Response& res) {
        if (!config.cors) return;
        res.set_header("Access-Control-Allow-Origin", "*");
        res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
        res.set_header("Access-Control-Allow-Headers", "Content-Type");
    }

    void reply_json(httplib::Response& res, int status, const nlohmann::ordered_json& body) {
        res.status = status;
        set_cors(res);
        res.set_content(body.dump() + "\n", "application/json");
    }

    void handle_submission(const httplib::Request& req, httplib::Response& res,
                           bool force_breakoff) {
        ResponseRecord record;
        try {
            record = response_from_json(nlohmann::json::parse(req.body));
        } catch (const std::exception& e) {
            reply_json(res, 400, {{"error", e.what()}});
            return;
        }
        if (force_breakoff) record.terminal = Terminal::Breakoff;
        if (record.source_digest != index.source_digest) {
            reply_json(res, 409, {{"error", "source digest mismatch"},
                                  {"expected", index.source_digest}});
            return;
        }
        std::string problem = validate_record(record, index);
        if (!problem.empty()) {
            reply_json(res, 400, {{"error", problem}});
            return;
        }
        if (record.terminal == Terminal::Completed) {
            std::lock_guard<std::mutex> lock(dedup_mutex);
            if (!completed_ids.insert(record.respondent_id).second) {
                reply_json(res, 200, {{"status", "ok"}, {"deduplicated", true}});
                return;
            }
        }
        store.append(record);
        reply_json(res, 200, {{"status", "ok"}});
    }

    void routes() {
        server.Get("/survey", [this](const httplib::Request&, httplib::Response& res) {
            set_cors(res);
            res.set_content(html_text, "text/html; charset=utf-8");
        });
        server.Get("/payload.json", [this](const httplib::Request&, httplib::Response& res) {
            set_cors(res);
            res.set_content(payload_text, "application/json");
        });
        server.Get("/runner.js", [this](const httplib::Request&, httplib::Response& res) {
            if (!has_runner) {
                res.status = 404;
                return;
            }
            set_cors(res);
            res.set_content(runner_text, "text/javascript");
        });
        server.Get("/health", [this](const httplib::Request&, httplib::Response& res) {
            reply_json(res, 200,
                       {{"status", "ok"},
                        {"source_digest", index.source_digest},
                        {"responses", store.count()}});
        });
        server.Post("/response", [this](const httplib::Request& req, httplib::Response& res) {
            handle_submission(req, res, false);
        });
        server.Post("/breakoff", [this](const httplib::Request& req, httplib::Response& res) {
            handle_submission(req, res, true);
        });
        server.Options(".*", [this](const httplib::Request&, httplib::Response& res) {
            set_cors(res);
            res.status = 204;
        });
    }
};

SurveyService::SurveyService(ServiceConfig config) : impl_(new Impl(std::move(config))) {}

SurveyService::~SurveyService() {
    stop();
}

bool SurveyService::run() {
    return impl_->server.listen(impl_->config.host, impl_->config.port);
}

int SurveyService::start_background() {
    int port = impl_->config.port;
    if (port == 0) {
        port = impl_->server.bind_to_any_port(impl_->config.host);
    } else if (!impl_->server.bind_to_port(impl_->config.host, port)) {
        throw std::runtime_error("cannot bind port " + std::to_string(port));
    }
    impl_->worker = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
    return port;
}

void SurveyService::stop() {
    if (!impl_) return;
    impl_->server.stop();
    if (impl_->worker.joinable()) impl_->worker.join();
}

const std::string& SurveyService::store_path() const { return impl_->store.path(); }

}  // namespace survey
