#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <deque>
#include <fstream>
#include <iostream>
#include <mutex>
#include <semaphore>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>

#include "autoviz/digest.hpp"
#include "autoviz/json_util.hpp"
#include "autoviz/pipeline.hpp"
#include "autoviz/report/export.hpp"
#include "autoviz/report/report.hpp"
#include "autoviz/service/config.hpp"
#include "autoviz/service/job_store.hpp"
#include "autoviz/version.hpp"

namespace autoviz::service {

inline void log_line(const std::string& text) {
    static std::mutex mutex;
    std::lock_guard lock(mutex);
    std::cerr << utc_timestamp() << " autoviz: " << text << '\n';
}

/// Fixed set of threads draining a FIFO of job ids.
class WorkerPool {
public:
    using Task = std::function<void(const std::string&)>;

    void start(std::size_t threads, Task task) {
        task_ = std::move(task);
        for (std::size_t i = 0; i < threads; ++i) threads_.emplace_back([this] { loop(); });
    }

    void submit(std::string id) {
        {
            std::lock_guard lock(mutex_);
            queue_.push_back(std::move(id));
        }
        cv_.notify_one();
    }

    /// Lets running jobs finish; queued ones stay queued in the store.
    void stop() {
        {
            std::lock_guard lock(mutex_);
            stopping_ = true;
        }
        cv_.notify_all();
        for (auto& t : threads_)
            if (t.joinable()) t.join();
        threads_.clear();
    }

    std::size_t pending() const {
        std::lock_guard lock(mutex_);
        return queue_.size();
    }

private:
    void loop() {
        for (;;) {
            std::string id;
            {
                std::unique_lock lock(mutex_);
                cv_.wait(lock, [&] { return stopping_ || !queue_.empty(); });
                if (stopping_) return;
                id = std::move(queue_.front());
                queue_.pop_front();
            }
            task_(id);
        }
    }

    Task task_;
    std::vector<std::thread> threads_;
    std::deque<std::string> queue_;
    mutable std::mutex mutex_;
    std::condition_variable cv_;
    bool stopping_ = false;
};

namespace detail {

inline std::string lower(std::string s) {
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

/// Accepts delimited-text uploads: a text-like or generic content type and a
/// .csv/.tsv/.txt/.tab name when a name is given.
inline bool acceptable_upload(const std::string& content_type, const std::string& filename) {
    auto type = lower(content_type.substr(0, content_type.find(';')));
    while (!type.empty() && type.back() == ' ') type.pop_back();
    static const std::vector<std::string> types{"",
                                                "text/csv",
                                                "text/x-csv",
                                                "text/plain",
                                                "text/tab-separated-values",
                                                "application/csv",
                                                "application/x-csv",
                                                "application/vnd.ms-excel",
                                                "application/octet-stream"};
    if (std::find(types.begin(), types.end(), type) == types.end()) return false;
    if (filename.empty()) return true;
    const auto dot = filename.rfind('.');
    if (dot == std::string::npos) return true;
    const auto ext = lower(filename.substr(dot));
    return ext == ".csv" || ext == ".tsv" || ext == ".txt" || ext == ".tab";
}

inline const char* status_code_name(int status) {
    switch (status) {
    case 400: return "bad_request";
    case 404: return "not_found";
    case 405: return "method_not_allowed";
    case 413: return "payload_too_large";
    case 415: return "unsupported_media_type";
    case 422: return "unprocessable";
    default: return status >= 500 ? "internal" : "error";
    }
}

} // namespace detail

/// HTTP facade: POST /api/upload, GET /api/health, GET /api/jobs/{id}.
class Service {
public:
    explicit Service(ServiceConfig config) : config_(std::move(config)), store_(config_.store_dir) {
        config_.pipeline.parse.max_bytes = config_.max_upload_bytes;
        config_.validate();
        install_routes();
    }

    ~Service() { stop(); }

    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    /// Binds the listening socket; port 0 picks a free one. Returns the bound port.
    int bind() {
        if (port_ > 0) return port_;
        if (config_.port == 0) {
            port_ = server_.bind_to_any_port(config_.bind);
        } else if (server_.bind_to_port(config_.bind, config_.port)) {
            port_ = config_.port;
        }
        if (port_ <= 0) {
            port_ = 0;
            throw Error(ErrorCode::io_error, "cannot listen on " + config_.bind + ":" + std::to_string(config_.port) +
                                                 " (address in use?)");
        }
        return port_;
    }

    /// Binds, recovers the store and serves on a background thread.
    void start() {
        bind();
        start_workers();
        listener_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }

    /// Binds, recovers the store and serves on the calling thread until stop().
    void run() {
        bind();
        start_workers();
        server_.listen_after_bind();
    }

    void stop() {
        if (stopped_.exchange(true)) return;
        server_.stop();
        if (listener_.joinable()) listener_.join();
        workers_.stop();
    }

    int port() const { return port_; }
    JobStore& store() { return store_; }
    const ServiceConfig& config() const { return config_; }

private:
    void start_workers() {
        if (workers_started_) return;
        workers_started_ = true;
        workers_.start(config_.workers, [this](const std::string& id) { run_background(id); });
        for (auto& id : store_.recover()) workers_.submit(std::move(id));
    }

    static void send_json(httplib::Response& res, int status, const Json& body) {
        res.status = status;
        res.set_content(body.dump(), "application/json");
    }

    static void send_error(httplib::Response& res, const ApiError& e) { send_json(res, e.http_status, e.to_json()); }

    void install_routes() {
        server_.new_task_queue = [n = config_.http_threads] { return new httplib::ThreadPool(n); };
        server_.set_payload_max_length(config_.max_upload_bytes + kMultipartSlack);
        server_.set_socket_options([](socket_t sock) {
            int yes = 1;
            ::setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes); // no SO_REUSEPORT: a taken port must fail
        });

        server_.set_error_handler([](const httplib::Request&, httplib::Response& res) {
            if (!res.body.empty()) return httplib::Server::HandlerResponse::Unhandled;
            ApiError e{res.status, detail::status_code_name(res.status), httplib::status_message(res.status), {}};
            send_error(res, e);
            return httplib::Server::HandlerResponse::Handled;
        });
        server_.set_exception_handler([](const httplib::Request& req, httplib::Response& res, std::exception_ptr ep) {
            std::string what = "unknown exception";
            try {
                if (ep) std::rethrow_exception(ep);
            } catch (const std::exception& e) {
                what = e.what();
            } catch (...) {
            }
            log_line("internal error on " + req.method + " " + req.path + ": " + what);
            send_error(res, {500, "internal", "internal server error", "see the server log"});
        });
        server_.set_post_routing_handler([this](const httplib::Request& req, httplib::Response& res) { apply_cors(req, res); });

        server_.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

        server_.Get("/api/health", [this](const httplib::Request&, httplib::Response& res) {
            const double uptime = std::chrono::duration<double>(std::chrono::steady_clock::now() - started_).count();
            send_json(res, 200, {{"status", "ok"}, {"uptime_seconds", uptime}, {"version", kVersion}});
        });

        server_.Get(R"(/api/jobs/([^/]*))", [this](const httplib::Request& req, httplib::Response& res) {
            const std::string id = req.matches[1];
            if (!is_job_id(id)) return send_error(res, {400, "malformed_job_id", "job ids are 32 lowercase hex digits", {}});
            const auto record = store_.load(id);
            if (!record) return send_error(res, {404, "unknown_job", "no job with id " + id, {}});
            Json body = record->to_json();
            if (record->state == JobState::done) {
                if (const auto text = store_.report_text(id)) body["report"] = Json::parse(*text);
            }
            send_json(res, 200, body);
        });

        server_.Post("/api/upload", [this](const httplib::Request& req, httplib::Response& res,
                                           const httplib::ContentReader& reader) { upload(req, res, reader); });
    }

    void apply_cors(const httplib::Request& req, httplib::Response& res) const {
        const auto origin = req.get_header_value("Origin");
        if (origin.empty()) return;
        const bool any = std::find(config_.cors_origins.begin(), config_.cors_origins.end(), "*") != config_.cors_origins.end();
        const bool listed =
            std::find(config_.cors_origins.begin(), config_.cors_origins.end(), origin) != config_.cors_origins.end();
        if (!any && !listed) return;
        res.set_header("Access-Control-Allow-Origin", any ? "*" : origin);
        if (!any) res.set_header("Vary", "Origin");
        res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
        res.set_header("Access-Control-Allow-Headers", "Content-Type");
        res.set_header("Access-Control-Expose-Headers", "X-Job-Id");
    }

    void upload(const httplib::Request& req, httplib::Response& res, const httplib::ContentReader& reader) {
        if (!req.is_multipart_form_data()) {
            return send_error(res, {400, "missing_file", "expected a multipart/form-data body with a 'file' part", {}});
        }
        const std::string id = store_.new_id();
        store_.prepare(id);
        bool keep = false;
        struct Cleanup {
            JobStore& store;
            const std::string& id;
            bool& keep;
            ~Cleanup() {
                if (!keep) store.remove(id);
            }
        } cleanup{store_, id, keep};

        enum class Part { none, file, options };
        Part current = Part::none;
        bool have_file = false, unsupported = false, too_large = false, options_too_large = false;
        std::uint64_t file_bytes = 0;
        std::string options_text, sniff;
        Sha256 hash;
        std::ofstream input(store_.input_path(id), std::ios::binary);

        const bool ok = reader(
            [&](const httplib::MultipartFormData& part) {
                current = Part::none;
                if (part.name == "file" && !have_file) {
                    have_file = true;
                    current = Part::file;
                    if (!detail::acceptable_upload(part.content_type, part.filename)) unsupported = true;
                } else if (part.name == "options") {
                    current = Part::options;
                    options_text.clear();
                }
                return true;
            },
            [&](const char* data, std::size_t n) {
                if (current == Part::options) {
                    if (options_text.size() + n > kMaxOptionsBytes) options_too_large = true;
                    else options_text.append(data, n);
                } else if (current == Part::file && !too_large && !unsupported) {
                    file_bytes += n;
                    if (file_bytes > config_.max_upload_bytes) {
                        too_large = true;
                        return true; // keep draining so the client sees the response
                    }
                    if (sniff.size() < kSniffBytes) sniff.append(data, std::min(n, kSniffBytes - sniff.size()));
                    hash.update(data, n);
                    input.write(data, static_cast<std::streamsize>(n));
                }
                return true;
            });
        input.close();

        if (too_large || res.status == 413) {
            return send_error(res, {413, "payload_too_large",
                                    "uploads are limited to " + std::to_string(config_.max_upload_bytes) + " bytes", {}});
        }
        if (!ok) return send_error(res, {400, "bad_request", "malformed multipart body", {}});
        res.status = -1;
        if (!have_file) return send_error(res, {400, "missing_file", "the request has no 'file' part", {}});
        if (unsupported || sniff.find('\0') != std::string::npos) {
            return send_error(res, {415, "unsupported_media_type", "only CSV or TSV text files are accepted", {}});
        }
        if (!input) return send_error(res, {500, "internal", "could not store the upload", "see the server log"});

        Json options = Json::object();
        if (options_too_large) return send_error(res, {400, "malformed_options", "options document is too large", {}});
        if (!options_text.empty()) {
            try {
                options = Json::parse(options_text);
                PipelineOptions probe = config_.pipeline;
                apply_options(probe, options);
            } catch (const Json::exception& e) {
                return send_error(res, {400, "malformed_options", "options are not valid JSON", e.what()});
            } catch (const Error& e) {
                return send_error(res, {400, "malformed_options", e.what(), {}});
            }
        }

        JobRecord record;
        record.id = id;
        record.created_at = utc_timestamp();
        record.input_digest = hash.hex();
        store_.create(record, options);
        keep = true;
        res.set_header("X-Job-Id", id);

        if (file_bytes > config_.sync_limit_bytes) {
            workers_.submit(id);
            return send_json(res, 202, {{"job_id", id}, {"state", "queued"}, {"status_url", "/api/jobs/" + id}});
        }

        std::counting_semaphore<>* slots = &sync_slots_;
        slots->acquire();
        struct Release {
            std::counting_semaphore<>* s;
            ~Release() { s->release(); }
        } release{slots};
        const auto outcome = execute(id);
        if (outcome.error) return send_error(res, *outcome.error);
        res.status = 200;
        res.set_content(outcome.report, "application/json");
    }

    struct Outcome {
        std::string report;
        std::optional<ApiError> error;
    };

    /// Runs one stored job through the pipeline and records the outcome.
    Outcome execute(const std::string& id) {
        Outcome out;
        try {
            store_.mark_running(id);
            PipelineOptions opts = config_.pipeline;
            apply_options(opts, store_.load_options(id));
            opts.cleaning.imputation.threads = 1; // concurrency comes from parallel jobs
            const auto result = run_pipeline_file(store_.input_path(id), opts);
            report::write_outputs(result, store_.dir(id) / "output");
            out.report = report::report_text(result);
            store_.mark_done(id, out.report);
        } catch (const Error& e) {
            out.error = api_error(e);
            if (out.error->http_status >= 500) {
                log_line("job " + id + " failed: " + e.what());
                out.error->message = "internal error";
                out.error->detail = "see the server log, job " + id;
            }
        } catch (const std::exception& e) {
            log_line("job " + id + " failed: " + e.what());
            out.error = ApiError{500, "internal", "internal error", "see the server log, job " + id};
        }
        if (out.error) {
            try {
                store_.mark_failed(id, *out.error);
            } catch (const std::exception& e) {
                log_line("job " + id + ": cannot record failure: " + e.what());
            }
        }
        return out;
    }

    void run_background(const std::string& id) { execute(id); }

    static constexpr std::size_t kMaxOptionsBytes = 64 * 1024;
    // room for the options part, boundaries and part headers
    static constexpr std::uint64_t kMultipartSlack = kMaxOptionsBytes + 16 * 1024;
    static constexpr std::size_t kSniffBytes = 64 * 1024;

    ServiceConfig config_;
    JobStore store_;
    httplib::Server server_;
    WorkerPool workers_;
    std::counting_semaphore<> sync_slots_{static_cast<std::ptrdiff_t>(config_.workers)};
    std::thread listener_;
    std::atomic<bool> stopped_{false};
    bool workers_started_ = false;
    int port_ = 0;
    std::chrono::steady_clock::time_point started_ = std::chrono::steady_clock::now();
};

} // namespace autoviz::service
