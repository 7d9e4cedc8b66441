#pragma once

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "autoviz/error.hpp"
#include "autoviz/json_util.hpp"
#include "autoviz/pipeline.hpp"

namespace autoviz::service {

struct ServiceConfig {
    std::string bind = "0.0.0.0";
    int port = 8080;
    std::uint64_t max_upload_bytes = 500ull * 1000 * 1000;
    std::uint64_t sync_limit_bytes = 5ull * 1024 * 1024; // larger uploads become background jobs
    std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
    std::size_t http_threads = 64;
    std::vector<std::string> cors_origins; // "*" allows any origin
    std::filesystem::path store_dir = "autoviz-store";
    PipelineOptions pipeline; // defaults for every job; uploads may override

    void validate() const {
        if (port < 0 || port > 65535) throw Error(ErrorCode::invalid_argument, "port must lie in 0..65535");
        if (workers < 1 || http_threads < 1) throw Error(ErrorCode::invalid_argument, "worker counts must be positive");
        if (max_upload_bytes < 1) throw Error(ErrorCode::invalid_argument, "max_upload_bytes must be positive");
        pipeline.validate();
    }
};

namespace detail {

inline std::uint64_t parse_unsigned(const std::string& text, const std::string& what) {
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
        v = std::stoull(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != text.size() || text.front() == '-') {
        throw Error(ErrorCode::invalid_argument, what + " must be a non-negative integer, got '" + text + "'");
    }
    return v;
}

inline std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::string item;
    for (const char c : text + ",") {
        if (c != ',') {
            if (c != ' ') item.push_back(c);
            continue;
        }
        if (!item.empty()) out.push_back(item);
        item.clear();
    }
    return out;
}

} // namespace detail

/// Reads an optional JSON config file, then applies AUTOVIZ_* environment
/// overrides: BIND, PORT, MAX_UPLOAD_BYTES, SYNC_LIMIT_BYTES, WORKERS,
/// HTTP_THREADS, CORS_ORIGINS (comma separated), STORE_DIR.
inline ServiceConfig load_service_config(const std::optional<std::filesystem::path>& file,
                                         const std::function<const char*(const char*)>& getenv = ::getenv) {
    ServiceConfig c;
    if (file) {
        std::ifstream in(*file);
        if (!in) throw Error(ErrorCode::io_error, "cannot open config " + file->string());
        Json doc;
        try {
            doc = Json::parse(in);
        } catch (const Json::exception& e) {
            throw Error(ErrorCode::invalid_argument, "config " + file->string() + ": " + e.what());
        }
        if (!doc.is_object()) throw Error(ErrorCode::invalid_argument, "config must be a JSON object");
        try {
            for (const auto& [key, v] : doc.items()) {
                if (key == "bind") c.bind = v.get<std::string>();
                else if (key == "port") c.port = v.get<int>();
                else if (key == "max_upload_bytes") c.max_upload_bytes = v.get<std::uint64_t>();
                else if (key == "sync_limit_bytes") c.sync_limit_bytes = v.get<std::uint64_t>();
                else if (key == "workers") c.workers = v.get<std::size_t>();
                else if (key == "http_threads") c.http_threads = v.get<std::size_t>();
                else if (key == "cors_origins") c.cors_origins = v.get<std::vector<std::string>>();
                else if (key == "store_dir") c.store_dir = v.get<std::string>();
                else if (key == "pipeline") apply_options(c.pipeline, v);
                else throw Error(ErrorCode::invalid_argument, "config: unknown key " + key);
            }
        } catch (const Json::exception& e) {
            throw Error(ErrorCode::invalid_argument, std::string("config: ") + e.what());
        }
    }
    auto env = [&](const char* name) -> std::optional<std::string> {
        const char* v = getenv(name);
        if (!v) return std::nullopt;
        return std::string(v);
    };
    if (auto v = env("AUTOVIZ_BIND")) c.bind = *v;
    if (auto v = env("AUTOVIZ_PORT")) c.port = static_cast<int>(detail::parse_unsigned(*v, "AUTOVIZ_PORT"));
    if (auto v = env("AUTOVIZ_MAX_UPLOAD_BYTES")) c.max_upload_bytes = detail::parse_unsigned(*v, "AUTOVIZ_MAX_UPLOAD_BYTES");
    if (auto v = env("AUTOVIZ_SYNC_LIMIT_BYTES")) c.sync_limit_bytes = detail::parse_unsigned(*v, "AUTOVIZ_SYNC_LIMIT_BYTES");
    if (auto v = env("AUTOVIZ_WORKERS")) c.workers = detail::parse_unsigned(*v, "AUTOVIZ_WORKERS");
    if (auto v = env("AUTOVIZ_HTTP_THREADS")) c.http_threads = detail::parse_unsigned(*v, "AUTOVIZ_HTTP_THREADS");
    if (auto v = env("AUTOVIZ_CORS_ORIGINS")) c.cors_origins = detail::split_list(*v);
    if (auto v = env("AUTOVIZ_STORE_DIR")) c.store_dir = *v;
    c.pipeline.parse.max_bytes = c.max_upload_bytes;
    c.validate();
    return c;
}

} // namespace autoviz::service
