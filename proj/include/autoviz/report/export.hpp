#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "autoviz/charts/export.hpp"
#include "autoviz/ingest/writer.hpp"
#include "autoviz/pipeline.hpp"
#include "autoviz/report/report.hpp"

namespace autoviz::report {

struct WrittenFiles {
    std::filesystem::path report;
    std::filesystem::path cleaned;
    std::vector<std::filesystem::path> charts;
};

namespace detail {

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << text;
    if (!out.flush()) throw Error(ErrorCode::io_error, "cannot write " + path.string());
}

} // namespace detail

/// Writes report.json, cleaned.csv and charts/chart_NN.json under `dir`,
/// creating it when absent.
inline WrittenFiles write_outputs(const PipelineResult& result, const std::filesystem::path& dir,
                                  std::size_t sample_rows = 10000) {
    std::error_code ec;
    std::filesystem::create_directories(dir / "charts", ec);
    if (ec) throw Error(ErrorCode::io_error, "cannot create " + (dir / "charts").string() + ": " + ec.message());

    WrittenFiles files;
    files.report = dir / "report.json";
    {
        std::ofstream out(files.report, std::ios::binary | std::ios::trunc);
        write_report(out, result);
        if (!out.flush()) throw Error(ErrorCode::io_error, "cannot write " + files.report.string());
    }

    files.cleaned = dir / "cleaned.csv";
    {
        std::ofstream out(files.cleaned, std::ios::binary | std::ios::trunc);
        ingest::write_csv(out, result.cleaned);
        if (!out.flush()) throw Error(ErrorCode::io_error, "cannot write " + files.cleaned.string());
    }

    // stale charts from an earlier run would otherwise linger
    for (const auto& entry : std::filesystem::directory_iterator(dir / "charts")) {
        const auto name = entry.path().filename().string();
        if (name.starts_with("chart_") && entry.path().extension() == ".json") std::filesystem::remove(entry.path());
    }
    for (std::size_t i = 0; i < result.charts.size(); ++i) {
        files.charts.push_back(dir / "charts" / charts::chart_file_name(i));
        detail::write_text(files.charts.back(), charts::chart_to_json(result.charts[i], result.cleaned, sample_rows).dump(2) + "\n");
    }
    return files;
}

} // namespace autoviz::report
