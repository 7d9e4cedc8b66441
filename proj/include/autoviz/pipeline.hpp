#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <streambuf>
#include <string>
#include <vector>

#include "autoviz/analysis/analyze.hpp"
#include "autoviz/charts/recommend.hpp"
#include "autoviz/cleaning/pipeline.hpp"
#include "autoviz/digest.hpp"
#include "autoviz/features/select.hpp"
#include "autoviz/ingest/dialect.hpp"
#include "autoviz/ingest/infer.hpp"
#include "autoviz/ingest/parser.hpp"
#include "autoviz/ingest/profile.hpp"
#include "autoviz/json_util.hpp"
#include "autoviz/report/quality.hpp"

namespace autoviz {

struct PipelineOptions {
    ingest::ParseOptions parse;
    ingest::InferOptions infer;
    cleaning::CleaningConfig cleaning;
    analysis::AnalysisOptions analysis;
    charts::ChartConfig charts;
    std::optional<std::string> target;
    double redundancy_threshold = 0.9;

    void validate() const {
        cleaning.validate();
        charts.validate();
        if (!(redundancy_threshold > 0.0 && redundancy_threshold <= 1.0)) {
            throw Error(ErrorCode::invalid_argument, "redundancy_threshold must lie in (0, 1]");
        }
    }
};

/// Applies a JSON options document:
/// {"target", "top_n", "scaling", "weights": {...}, "knn_k", "transform", "encoding",
///  "cap_outliers", "redundancy_threshold"}. Unknown keys and wrong types are rejected.
inline void apply_options(PipelineOptions& opts, const Json& doc) {
    auto bad = [](const std::string& what) { return Error(ErrorCode::invalid_argument, "options: " + what); };
    if (!doc.is_object()) throw bad("expected a JSON object");
    for (const auto& [key, value] : doc.items()) {
        if (key == "target") {
            if (value.is_null()) opts.target.reset();
            else if (value.is_string()) opts.target = value.get<std::string>();
            else throw bad("target must be a string");
        } else if (key == "top_n") {
            if (!value.is_number_unsigned() || value.get<std::size_t>() < 1) throw bad("top_n must be a positive integer");
            opts.charts.top_n = value.get<std::size_t>();
        } else if (key == "scaling") {
            if (!value.is_boolean()) throw bad("scaling must be a boolean");
            opts.cleaning.scaling = value.get<bool>();
        } else if (key == "cap_outliers") {
            if (!value.is_boolean()) throw bad("cap_outliers must be a boolean");
            opts.cleaning.cap_outliers = value.get<bool>();
        } else if (key == "knn_k") {
            if (!value.is_number_unsigned() || value.get<std::size_t>() < 1) throw bad("knn_k must be a positive integer");
            opts.cleaning.imputation.knn_k = value.get<std::size_t>();
        } else if (key == "transform") {
            const auto m = value.is_string() ? cleaning::parse_transform_method(value.get<std::string>()) : std::nullopt;
            if (!m) throw bad("transform must be one of none, log, box_cox, auto");
            opts.cleaning.transform = *m;
        } else if (key == "encoding") {
            const auto m = value.is_string() ? cleaning::parse_encoding_method(value.get<std::string>()) : std::nullopt;
            if (!m) throw bad("encoding must be one of none, one_hot, label");
            opts.cleaning.encoding = *m;
        } else if (key == "redundancy_threshold") {
            if (!value.is_number()) throw bad("redundancy_threshold must be a number");
            opts.redundancy_threshold = value.get<double>();
        } else if (key == "weights") {
            if (!value.is_object()) throw bad("weights must be an object");
            for (const auto& [w, v] : value.items()) {
                if (!v.is_number()) throw bad("weight " + w + " must be a number");
                if (w == "interpretability") opts.charts.weights.interpretability = v.get<double>();
                else if (w == "relationship_strength") opts.charts.weights.relationship_strength = v.get<double>();
                else if (w == "data_fit") opts.charts.weights.data_fit = v.get<double>();
                else throw bad("unknown weight " + w);
            }
        } else {
            throw bad("unknown key " + key);
        }
    }
    opts.validate();
}

/// Input buffer that serves an already-read prefix, then the rest of a stream,
/// hashing and counting every byte it hands out.
class DigestingReplayBuf : public std::streambuf {
public:
    DigestingReplayBuf(std::string head, std::istream& tail) : head_(std::move(head)), tail_(tail), buf_(64 * 1024, '\0') {}

    std::string hex() { return hash_.hex(); }
    std::uint64_t bytes() const { return bytes_; }

    /// Reads and hashes whatever the consumer left unread.
    void drain() {
        while (underflow() != traits_type::eof()) setg(eback(), egptr(), egptr());
    }

protected:
    int_type underflow() override {
        if (gptr() < egptr()) return traits_type::to_int_type(*gptr());
        char* data = nullptr;
        std::size_t got = 0;
        if (!head_done_) {
            head_done_ = true;
            data = head_.data();
            got = head_.size();
        }
        if (got == 0) {
            tail_.read(buf_.data(), static_cast<std::streamsize>(buf_.size()));
            got = static_cast<std::size_t>(tail_.gcount());
            data = buf_.data();
        }
        if (got == 0) return traits_type::eof();
        hash_.update(data, got);
        bytes_ += got;
        setg(data, data, data + got);
        return traits_type::to_int_type(*gptr());
    }

private:
    std::string head_;
    std::istream& tail_;
    std::string buf_;
    bool head_done_ = false;
    Sha256 hash_;
    std::uint64_t bytes_ = 0;
};

struct StageTiming {
    std::string stage;
    double milliseconds = 0.0;
};

struct PipelineResult {
    std::string input_digest; // sha256 of the raw input bytes
    std::uint64_t input_bytes = 0;
    ingest::Dialect dialect;
    std::size_t rows_parsed = 0;
    std::size_t columns_parsed = 0;
    std::size_t decoded_bytes = 0; // typed table before cleaning
    std::vector<std::string> ingest_warnings;
    std::vector<ingest::ColumnProfile> profiles_before;
    std::vector<ingest::ColumnProfile> profiles_after;
    Dataset cleaned;
    cleaning::CleaningReport cleaning;
    analysis::AnalysisResult analysis;
    std::vector<features::FeatureRanking> rankings;
    std::optional<features::RedundancyResult> redundancy;
    std::vector<charts::ChartSpec> charts;
    report::QualityMetrics quality;
    std::vector<analysis::StageStatus> stages; // pipeline stages
    std::vector<std::string> warnings;         // everything, in stage order
    std::vector<StageTiming> timings;
    std::optional<std::string> target;
    double redundancy_threshold = 0.9;

    bool stage_skipped(std::string_view stage) const {
        for (const auto& s : stages)
            if (s.stage == stage) return s.skipped;
        return true;
    }
};

namespace detail {

class StageClock {
public:
    explicit StageClock(std::vector<StageTiming>& out) : out_(out) {}
    void lap(std::string stage) {
        const auto now = std::chrono::steady_clock::now();
        out_.push_back({std::move(stage), std::chrono::duration<double, std::milli>(now - last_).count()});
        last_ = now;
    }

private:
    std::vector<StageTiming>& out_;
    std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

inline bool any_column_varies(const std::vector<ingest::ColumnProfile>& profiles) {
    for (const auto& p : profiles)
        if (p.distinct_count > 1) return true;
    return false;
}

} // namespace detail

/// parse -> infer -> clean -> analyze -> rank features -> recommend charts.
///
/// Ingest and cleaning failures are fatal and propagate as Error. Later stages
/// that fail are marked skipped with a warning and the run continues.
inline PipelineResult run_pipeline(std::istream& in, const PipelineOptions& opts = {}) {
    opts.validate();
    PipelineResult r;
    r.target = opts.target;
    r.redundancy_threshold = opts.redundancy_threshold;
    detail::StageClock clock(r.timings);

    // ingest
    std::string head(ingest::kDefaultSampleBytes, '\0');
    in.read(head.data(), static_cast<std::streamsize>(head.size()));
    head.resize(static_cast<std::size_t>(in.gcount()));
    DigestingReplayBuf source(head, in);
    std::istream replay(&source);
    Dataset typed;
    try {
        r.dialect = ingest::detect_dialect(head);
        auto parsed = ingest::parse_table(replay, r.dialect, opts.parse);
        for (const auto& w : parsed.warnings) r.ingest_warnings.push_back(w.message());
        const std::size_t dropped_warnings = parsed.padded_rows + parsed.truncated_rows - parsed.warnings.size();
        if (dropped_warnings > 0) r.ingest_warnings.push_back(std::to_string(dropped_warnings) + " further ragged rows");
        auto inferred = ingest::infer_types(std::move(parsed.dataset), opts.infer);
        for (auto& w : inferred.warnings) r.ingest_warnings.push_back(std::move(w));
        typed = std::move(inferred.dataset);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::empty_input) throw Error(ErrorCode::empty_table, e.what());
        throw;
    }
    source.drain();
    r.input_digest = source.hex();
    r.input_bytes = source.bytes();
    r.rows_parsed = typed.row_count();
    r.columns_parsed = typed.column_count();
    r.decoded_bytes = typed.memory_bytes();
    if (opts.target && !typed.find(*opts.target)) {
        throw Error(ErrorCode::unknown_target, "target column '" + *opts.target + "' does not exist");
    }
    r.profiles_before = ingest::profile_columns(typed);
    r.stages.push_back({"ingest", false, {}});
    for (const auto& w : r.ingest_warnings) r.warnings.push_back(w);
    clock.lap("ingest");

    // clean
    {
        auto cleaned = cleaning::clean_pipeline(std::move(typed), opts.cleaning);
        r.cleaned = std::move(cleaned.dataset);
        r.cleaning = std::move(cleaned.report);
    }
    r.profiles_after = ingest::profile_columns(r.cleaned);
    if (!detail::any_column_varies(r.profiles_after)) {
        throw Error(ErrorCode::no_varying_columns, "every column holds a single value after cleaning");
    }
    if (opts.target && !r.cleaned.find(*opts.target)) {
        throw Error(ErrorCode::unknown_target, "target column '" + *opts.target + "' did not survive cleaning");
    }
    r.quality = report::quality_metrics(r.profiles_before, r.profiles_after, r.cleaning);
    r.stages.push_back({"clean", false, {}});
    for (const auto& w : r.cleaning.warnings) r.warnings.push_back(w);
    clock.lap("clean");

    // analyze
    r.analysis = analysis::analyze(r.cleaned, opts.analysis);
    r.stages.push_back({"analyze", false, {}});
    for (const auto& w : r.analysis.warnings) r.warnings.push_back(w);
    clock.lap("analyze");

    // feature selection
    try {
        r.rankings = features::rank_features(r.cleaned, r.analysis, opts.target);
        if (r.analysis.correlation) r.redundancy = features::redundancy_filter(*r.analysis.correlation, opts.redundancy_threshold);
        r.stages.push_back({"feature_select", false, {}});
    } catch (const Error& e) {
        r.stages.push_back({"feature_select", true, e.what()});
        r.warnings.push_back(std::string("feature selection skipped: ") + e.what());
    }
    clock.lap("feature_select");

    // charts
    try {
        r.charts = charts::recommend(r.cleaned, r.analysis, opts.charts);
        r.stages.push_back({"chart_recommend", false, {}});
    } catch (const Error& e) {
        r.stages.push_back({"chart_recommend", true, e.what()});
        r.warnings.push_back(std::string("chart recommendation skipped: ") + e.what());
    }
    clock.lap("chart_recommend");
    return r;
}

inline PipelineResult run_pipeline_file(const std::filesystem::path& path, const PipelineOptions& opts = {}) {
    std::error_code ec;
    const auto size = std::filesystem::file_size(path, ec);
    if (ec) throw Error(ErrorCode::io_error, "cannot read " + path.string() + ": " + ec.message());
    if (size > opts.parse.max_bytes) {
        throw Error(ErrorCode::size_limit_exceeded, "input exceeds the " + std::to_string(opts.parse.max_bytes) + " byte limit");
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::io_error, "cannot open " + path.string());
    return run_pipeline(in, opts);
}

} // namespace autoviz
