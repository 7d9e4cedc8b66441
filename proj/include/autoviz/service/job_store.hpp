#pragma once

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "autoviz/error.hpp"
#include "autoviz/json_util.hpp"

namespace autoviz::service {

enum class JobState { queued, running, done, failed };

constexpr std::string_view to_string(JobState s) {
    switch (s) {
    case JobState::queued: return "queued";
    case JobState::running: return "running";
    case JobState::done: return "done";
    case JobState::failed: return "failed";
    }
    return "failed";
}

inline std::optional<JobState> parse_job_state(std::string_view s) {
    for (auto v : {JobState::queued, JobState::running, JobState::done, JobState::failed})
        if (to_string(v) == s) return v;
    return std::nullopt;
}

struct ApiError {
    int http_status = 500;
    std::string code;
    std::string message;
    std::optional<std::string> detail;

    Json to_json() const {
        return {{"http_status", http_status},
                {"code", code},
                {"message", message},
                {"detail", detail ? Json(*detail) : Json(nullptr)}};
    }

    static ApiError from_json(const Json& j) {
        ApiError e;
        e.http_status = j.at("http_status").get<int>();
        e.code = j.at("code").get<std::string>();
        e.message = j.at("message").get<std::string>();
        if (j.contains("detail") && j["detail"].is_string()) e.detail = j["detail"].get<std::string>();
        return e;
    }
};

/// Library errors map to their HTTP status and machine-readable code.
inline ApiError api_error(const Error& e) { return {http_status(e.code()), std::string(to_string(e.code())), e.what(), {}}; }

struct JobRecord {
    std::string id;
    JobState state = JobState::queued;
    std::string created_at;
    std::optional<std::string> finished_at;
    std::string input_digest;
    std::optional<std::string> result_location;
    std::optional<ApiError> error;

    Json to_json() const {
        return {{"id", id},
                {"state", to_string(state)},
                {"created_at", created_at},
                {"finished_at", finished_at ? Json(*finished_at) : Json(nullptr)},
                {"input_digest", input_digest},
                {"result_location", result_location ? Json(*result_location) : Json(nullptr)},
                {"error", error ? error->to_json() : Json(nullptr)}};
    }

    static JobRecord from_json(const Json& j) {
        JobRecord r;
        r.id = j.at("id").get<std::string>();
        const auto state = parse_job_state(j.at("state").get<std::string>());
        if (!state) throw Error(ErrorCode::internal, "job " + r.id + " has an unknown state");
        r.state = *state;
        r.created_at = j.at("created_at").get<std::string>();
        if (j["finished_at"].is_string()) r.finished_at = j["finished_at"].get<std::string>();
        r.input_digest = j.at("input_digest").get<std::string>();
        if (j["result_location"].is_string()) r.result_location = j["result_location"].get<std::string>();
        if (j["error"].is_object()) r.error = ApiError::from_json(j["error"]);
        return r;
    }
};

/// 32 lowercase hex digits.
inline bool is_job_id(std::string_view id) {
    if (id.size() != 32) return false;
    for (const char c : id)
        if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) return false;
    return true;
}

/// UTC, millisecond precision: 2024-01-31T12:00:00.000Z
inline std::string utc_timestamp(std::chrono::system_clock::time_point t = std::chrono::system_clock::now()) {
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(t.time_since_epoch()).count();
    const std::time_t secs = static_cast<std::time_t>(ms / 1000);
    std::tm tm{};
    gmtime_r(&secs, &tm);
    char buf[96];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday,
                  tm.tm_hour, tm.tm_min, tm.tm_sec, static_cast<int>(ms % 1000));
    return buf;
}

/// One directory per job under root/jobs: input.csv, options.json, job.json and,
/// once done, report.json. Files are replaced by rename, and report.json is in
/// place before job.json says done.
class JobStore {
public:
    explicit JobStore(std::filesystem::path root) : root_(std::move(root)) {
        std::error_code ec;
        std::filesystem::create_directories(root_ / "jobs", ec);
        if (ec) throw Error(ErrorCode::io_error, "cannot create job store at " + root_.string() + ": " + ec.message());
    }

    const std::filesystem::path& root() const { return root_; }

    std::string new_id() {
        std::lock_guard lock(mutex_);
        auto word = [&] { return (static_cast<unsigned long long>(random_()) << 32) | random_(); };
        char buf[33];
        std::snprintf(buf, sizeof buf, "%016llx%016llx", word(), word());
        return buf;
    }

    std::filesystem::path dir(const std::string& id) const { return root_ / "jobs" / id; }
    std::filesystem::path input_path(const std::string& id) const { return dir(id) / "input.csv"; }
    std::filesystem::path options_path(const std::string& id) const { return dir(id) / "options.json"; }
    std::filesystem::path report_path(const std::string& id) const { return dir(id) / "report.json"; }

    /// Reserves the job directory for an upload in progress.
    void prepare(const std::string& id) {
        std::error_code ec;
        std::filesystem::create_directories(dir(id), ec);
        if (ec) throw Error(ErrorCode::io_error, "cannot create job directory: " + ec.message());
    }

    void create(const JobRecord& record, const Json& options) {
        std::lock_guard lock(mutex_);
        write_atomic(options_path(record.id), options.dump() + "\n");
        write_atomic(dir(record.id) / "job.json", record.to_json().dump(2) + "\n");
    }

    std::optional<JobRecord> load(const std::string& id) const {
        if (!is_job_id(id)) return std::nullopt;
        std::lock_guard lock(mutex_);
        return load_unlocked(id);
    }

    Json load_options(const std::string& id) const {
        std::ifstream in(options_path(id));
        if (!in) return Json::object();
        return Json::parse(in);
    }

    std::optional<std::string> report_text(const std::string& id) const {
        std::ifstream in(report_path(id), std::ios::binary);
        if (!in) return std::nullopt;
        std::ostringstream s;
        s << in.rdbuf();
        return s.str();
    }

    void mark_running(const std::string& id) {
        std::lock_guard lock(mutex_);
        auto r = require(id);
        if (r.state != JobState::queued) throw Error(ErrorCode::internal, "job " + id + " is not queued");
        r.state = JobState::running;
        save(r);
    }

    void mark_done(const std::string& id, const std::string& report) {
        std::lock_guard lock(mutex_);
        auto r = require(id);
        if (r.state != JobState::running) throw Error(ErrorCode::internal, "job " + id + " is not running");
        write_atomic(report_path(id), report);
        r.state = JobState::done;
        r.finished_at = utc_timestamp();
        r.result_location = (std::filesystem::path("jobs") / id / "report.json").string();
        save(r);
    }

    void mark_failed(const std::string& id, const ApiError& error) {
        std::lock_guard lock(mutex_);
        auto r = require(id);
        if (r.state == JobState::done || r.state == JobState::failed) return;
        r.state = JobState::failed;
        r.finished_at = utc_timestamp();
        r.error = error;
        save(r);
    }

    void remove(const std::string& id) {
        std::error_code ec;
        std::filesystem::remove_all(dir(id), ec);
    }

    /// Startup recovery: running jobs were interrupted and are failed; queued
    /// jobs are returned, oldest first, to be run again. Directories without a
    /// job record are abandoned uploads and are deleted.
    std::vector<std::string> recover() {
        std::lock_guard lock(mutex_);
        std::vector<std::pair<std::string, std::string>> queued;
        for (const auto& entry : std::filesystem::directory_iterator(root_ / "jobs")) {
            const auto id = entry.path().filename().string();
            if (!is_job_id(id)) continue;
            auto r = load_unlocked(id);
            if (!r) {
                std::error_code ec;
                std::filesystem::remove_all(entry.path(), ec);
                continue;
            }
            if (r->state == JobState::running) {
                r->state = JobState::failed;
                r->finished_at = utc_timestamp();
                r->error = ApiError{500, "interrupted", "the service stopped while this job was running", {}};
                save(*r);
            } else if (r->state == JobState::done && !std::filesystem::exists(report_path(id))) {
                r->state = JobState::failed;
                r->error = ApiError{500, "internal", "report missing from the store", {}};
                save(*r);
            } else if (r->state == JobState::queued) {
                queued.emplace_back(r->created_at, id);
            }
        }
        std::sort(queued.begin(), queued.end());
        std::vector<std::string> out;
        for (auto& q : queued) out.push_back(std::move(q.second));
        return out;
    }

private:
    std::optional<JobRecord> load_unlocked(const std::string& id) const {
        std::ifstream in(dir(id) / "job.json");
        if (!in) return std::nullopt;
        try {
            return JobRecord::from_json(Json::parse(in));
        } catch (const std::exception&) {
            return std::nullopt;
        }
    }

    JobRecord require(const std::string& id) const {
        auto r = load_unlocked(id);
        if (!r) throw Error(ErrorCode::internal, "job " + id + " is missing from the store");
        return *r;
    }

    void save(const JobRecord& r) { write_atomic(dir(r.id) / "job.json", r.to_json().dump(2) + "\n"); }

    static void write_atomic(const std::filesystem::path& path, const std::string& text) {
        const auto tmp = path.string() + ".tmp";
        {
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            out << text;
            if (!out.flush()) throw Error(ErrorCode::io_error, "cannot write " + tmp);
        }
        std::error_code ec;
        std::filesystem::rename(tmp, path, ec);
        if (ec) throw Error(ErrorCode::io_error, "cannot replace " + path.string() + ": " + ec.message());
    }

    std::filesystem::path root_;
    mutable std::mutex mutex_;
    std::random_device random_;
};

} // namespace autoviz::service
