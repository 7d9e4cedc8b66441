// autoviz: analyze, profile or serve CSV/TSV data.
#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <pthread.h>

#include "autoviz/ingest/dialect.hpp"
#include "autoviz/ingest/infer.hpp"
#include "autoviz/ingest/parser.hpp"
#include "autoviz/ingest/profile.hpp"
#include "autoviz/pipeline.hpp"
#include "autoviz/report/export.hpp"
#include "autoviz/report/report.hpp"
#include "autoviz/service/config.hpp"
#include "autoviz/service/job_store.hpp"
#include "autoviz/service/server.hpp"
#include "autoviz/version.hpp"

namespace fs = std::filesystem;
using namespace autoviz;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitPipeline = 1;
constexpr int kExitUsage = 2;

int report_error(const Error& e) {
    std::cerr << "autoviz: error [" << to_string(e.code()) << "]: " << e.what() << '\n';
    return kExitPipeline;
}

bool readable_file(const fs::path& path) {
    std::error_code ec;
    if (!fs::is_regular_file(path, ec)) {
        std::cerr << "autoviz: cannot read input '" << path.string() << "': no such file\n";
        return false;
    }
    std::ifstream probe(path, std::ios::binary);
    if (!probe) {
        std::cerr << "autoviz: cannot read input '" << path.string() << "'\n";
        return false;
    }
    return true;
}

std::string fixed(double v, int digits = 3) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::string pad(std::string s, std::size_t width) {
    if (s.size() < width) s.append(width - s.size(), ' ');
    return s;
}

struct AnalyzeArgs {
    fs::path input;
    fs::path out;
    std::optional<std::string> target;
    std::optional<std::size_t> top_charts;
    bool no_scaling = false;
    std::optional<double> w_interpretability, w_relationship, w_fit;
    std::optional<fs::path> config;
    bool quiet = false;
    bool json_summary = false;
};

PipelineOptions analyze_options(const AnalyzeArgs& a) {
    PipelineOptions opts;
    if (a.config) {
        std::ifstream in(*a.config);
        if (!in) throw Error(ErrorCode::io_error, "cannot open options file " + a.config->string());
        Json doc;
        try {
            doc = Json::parse(in);
        } catch (const Json::exception& e) {
            throw Error(ErrorCode::invalid_argument, "options file is not valid JSON: " + std::string(e.what()));
        }
        apply_options(opts, doc);
    }
    if (a.target) opts.target = a.target;
    if (a.top_charts) opts.charts.top_n = *a.top_charts;
    if (a.no_scaling) opts.cleaning.scaling = false;
    if (a.w_interpretability) opts.charts.weights.interpretability = *a.w_interpretability;
    if (a.w_relationship) opts.charts.weights.relationship_strength = *a.w_relationship;
    if (a.w_fit) opts.charts.weights.data_fit = *a.w_fit;
    opts.validate();
    return opts;
}

int run_analyze(const AnalyzeArgs& a) {
    if (!readable_file(a.input)) return kExitUsage;
    PipelineOptions opts;
    try {
        opts = analyze_options(a);
    } catch (const Error& e) {
        std::cerr << "autoviz: " << e.what() << '\n';
        return kExitUsage;
    }
    try {
        const auto result = run_pipeline_file(a.input, opts);
        const auto files = report::write_outputs(result, a.out);

        Json timings = Json::object();
        double total = 0.0;
        for (const auto& t : result.timings) {
            timings[t.stage] = t.milliseconds;
            total += t.milliseconds;
        }
        timings["total"] = total;
        std::ofstream(a.out / "timings.json") << Json{{"milliseconds", timings}}.dump(2) << '\n';

        if (a.json_summary) {
            Json s{{"report", files.report.string()},
                   {"cleaned", files.cleaned.string()},
                   {"rows", result.rows_parsed},
                   {"columns", result.columns_parsed},
                   {"completeness_before", json_number(result.quality.completeness_before)},
                   {"completeness_after", json_number(result.quality.completeness_after)},
                   {"charts", Json::array()}};
            for (const auto& c : result.charts) s["charts"].push_back(c.title);
            std::cout << s.dump(2) << '\n';
        } else if (!a.quiet) {
            std::cout << "input        " << a.input.string() << "  (" << result.input_bytes << " bytes, sha256 "
                      << result.input_digest.substr(0, 12) << ")\n";
            std::cout << "table        " << result.rows_parsed << " rows x " << result.columns_parsed << " columns, "
                      << result.cleaned.column_count() << " after cleaning\n";
            std::cout << "completeness " << fixed(result.quality.completeness_before) << " -> "
                      << fixed(result.quality.completeness_after) << "\n";
            std::cout << "imputations  " << result.cleaning.imputations.size() << ", outlier flags "
                      << result.quality.outlier_flag_count << ", transforms " << result.quality.transformations_applied
                      << "\n";
            for (const auto& s : result.stages)
                if (s.skipped) std::cout << "skipped      " << s.stage << ": " << s.reason << "\n";
            std::cout << "charts\n";
            for (std::size_t i = 0; i < result.charts.size(); ++i) {
                const auto& c = result.charts[i];
                std::cout << "  " << i + 1 << ". " << pad(std::string(charts::to_string(c.chart_type)), 12) << fixed(c.score)
                          << "  " << c.title << "\n";
            }
            std::cout << "wrote        " << files.report.string() << ", " << files.cleaned.string() << ", "
                      << files.charts.size() << " chart file(s)\n";
            std::cout << "time         " << fixed(total / 1000.0, 2) << " s\n";
        }
        return kExitOk;
    } catch (const Error& e) {
        return report_error(e);
    } catch (const std::exception& e) {
        std::cerr << "autoviz: error [internal]: " << e.what() << '\n';
        return kExitPipeline;
    }
}

int run_profile(const fs::path& input) {
    if (!readable_file(input)) return kExitUsage;
    try {
        std::ifstream in(input, std::ios::binary);
        std::string head(ingest::kDefaultSampleBytes, '\0');
        in.read(head.data(), static_cast<std::streamsize>(head.size()));
        head.resize(static_cast<std::size_t>(in.gcount()));
        in.clear();
        in.seekg(0);
        Dataset data;
        ingest::Dialect dialect;
        try {
            dialect = ingest::detect_dialect(head);
            data = ingest::infer_types(ingest::parse_table(in, dialect).dataset).dataset;
        } catch (const Error& e) {
            if (e.code() == ErrorCode::empty_input) throw Error(ErrorCode::empty_table, e.what());
            throw;
        }
        std::cout << data.row_count() << " rows x " << data.column_count() << " columns, delimiter ";
        if (dialect.delimiter == '\t') std::cout << "TAB";
        else std::cout << "'" << dialect.delimiter << "'";
        std::cout << ", encoding " << ingest::to_string(dialect.encoding) << "\n\n";

        std::size_t width = 6;
        for (const auto& c : data.columns()) width = std::max(width, c.name().size());
        width = std::min<std::size_t>(width, 32);
        std::cout << pad("column", width + 2) << pad("type", 13) << pad("complete", 10) << pad("distinct", 10)
                  << pad("mean", 12) << pad("std", 12) << pad("min", 12) << "max\n";
        for (const auto& p : ingest::profile_columns(data)) {
            std::string name = p.name.size() > 32 ? p.name.substr(0, 31) + "~" : p.name;
            std::cout << pad(name, width + 2) << pad(std::string(to_string(p.kind)), 13) << pad(fixed(p.completeness), 10)
                      << pad(std::to_string(p.distinct_count), 10);
            if (p.stats) {
                std::cout << pad(fixed(p.stats->mean, 4), 12) << pad(fixed(p.stats->std, 4), 12)
                          << pad(fixed(p.stats->min, 4), 12) << fixed(p.stats->max, 4);
            } else {
                std::cout << pad("-", 12) << pad("-", 12) << pad("-", 12) << "-";
            }
            std::cout << '\n';
        }
        return kExitOk;
    } catch (const Error& e) {
        return report_error(e);
    }
}

int run_serve(const std::optional<fs::path>& config_path, std::optional<int> port) {
    service::ServiceConfig config;
    try {
        config = service::load_service_config(config_path);
        if (port) config.port = *port;
        config.validate();
    } catch (const Error& e) {
        std::cerr << "autoviz: " << e.what() << '\n';
        return kExitUsage;
    }

    // Signals are taken synchronously on this thread; every other thread inherits the mask.
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);

    try {
        service::Service svc(config);
        svc.start();
        std::cerr << "autoviz " << kVersion << " listening on " << config.bind << ":" << svc.port() << " (store "
                  << config.store_dir.string() << ", " << config.workers << " workers)" << std::endl;
        int sig = 0;
        sigwait(&signals, &sig);
        std::cerr << "autoviz: shutting down" << std::endl;
        svc.stop();
        return kExitOk;
    } catch (const Error& e) {
        return report_error(e);
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Automated exploratory analysis of CSV/TSV files", "autoviz"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    AnalyzeArgs a;
    auto* analyze = app.add_subcommand("analyze", "Clean, analyze and recommend charts; write the results to --out");
    analyze->add_option("input", a.input, "CSV or TSV file")->required();
    analyze->add_option("-o,--out", a.out, "Output directory (created if absent)")->required();
    analyze->add_option("-t,--target", a.target, "Target column for supervised feature ranking");
    analyze->add_option("-n,--top-charts", a.top_charts, "Number of charts to keep (default 5)")->check(CLI::PositiveNumber);
    analyze->add_flag("--no-scaling", a.no_scaling, "Leave numeric columns unscaled");
    analyze->add_option("--w-interpretability", a.w_interpretability, "Chart weight for interpretability (default 0.4)");
    analyze->add_option("--w-relationship", a.w_relationship, "Chart weight for relationship strength (default 0.4)");
    analyze->add_option("--w-fit", a.w_fit, "Chart weight for data fit (default 0.2)");
    analyze->add_option("-c,--config", a.config, "JSON options file (same keys as the upload options)");
    analyze->add_flag("-q,--quiet", a.quiet, "Print nothing on success");
    analyze->add_flag("--json", a.json_summary, "Print the summary as JSON");

    fs::path profile_input;
    auto* profile = app.add_subcommand("profile", "Print per-column type, completeness and summary statistics");
    profile->add_option("input", profile_input, "CSV or TSV file")->required();

    std::optional<fs::path> serve_config;
    std::optional<int> serve_port;
    auto* serve = app.add_subcommand("serve", "Run the HTTP service until interrupted");
    serve->add_option("-c,--config", serve_config, "JSON service config file");
    serve->add_option("-p,--port", serve_port, "Listen port (0 picks a free one)")->check(CLI::Range(0, 65535));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    if (*analyze) return run_analyze(a);
    if (*profile) return run_profile(profile_input);
    if (*serve) return run_serve(serve_config, serve_port);
    return kExitUsage;
}
