#pragma once

#include <functional>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "autoviz/charts/export.hpp"
#include "autoviz/json_util.hpp"
#include "autoviz/pipeline.hpp"
#include "autoviz/version.hpp"

namespace autoviz::report {

namespace detail {

inline Json numbers(const std::vector<double>& v) {
    Json out = Json::array();
    for (const double x : v) out.push_back(json_number(x));
    return out;
}

inline Json matrix(const analysis::Matrix& m) {
    Json out = Json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(json_number(m(i, j)));
        out.push_back(std::move(row));
    }
    return out;
}

inline Json stats(const analysis::SummaryStats& s) {
    return {{"n", s.n},
            {"mean", json_number(s.mean)},
            {"median", json_number(s.median)},
            {"std", json_number(s.std)},
            {"skewness", json_number(s.skewness)},
            {"kurtosis", json_number(s.kurtosis)},
            {"min", json_number(s.min)},
            {"max", json_number(s.max)}};
}

inline Json profile(const ingest::ColumnProfile& p) {
    return {{"name", p.name},
            {"type", to_string(p.kind)},
            {"count", p.count},
            {"missing_count", p.missing_count},
            {"completeness", json_number(p.completeness)},
            {"distinct_count", p.distinct_count},
            {"stats", p.stats ? stats(*p.stats) : Json(nullptr)}};
}

inline Json profiles(const std::vector<ingest::ColumnProfile>& ps) {
    Json out = Json::array();
    for (const auto& p : ps) out.push_back(profile(p));
    return out;
}

inline Json cell(const cleaning::CellValue& v) {
    if (const auto* d = std::get_if<double>(&v)) return json_number(*d);
    return std::get<std::string>(v);
}

inline Json named_parameters(const std::vector<std::pair<std::string, double>>& params) {
    Json out = Json::object();
    for (const auto& [k, v] : params) out[k] = json_number(v);
    return out;
}

inline Json stages(const std::vector<analysis::StageStatus>& stages) {
    Json out = Json::array();
    for (const auto& s : stages) {
        out.push_back({{"stage", s.stage},
                       {"status", s.skipped ? "skipped" : "ok"},
                       {"reason", s.skipped ? Json(s.reason) : Json(nullptr)}});
    }
    return out;
}

inline Json imputation_entry(const cleaning::Imputation& e) {
    return {{"column", e.column}, {"row", e.row}, {"value", cell(e.value)}, {"method", e.method}};
}

inline Json flag_entry(const cleaning::OutlierEntry& f) {
    return {{"column", f.column},
            {"row", f.row},
            {"value", json_number(f.value)},
            {"detector", to_string(f.detector)},
            {"score", json_number(f.score)}};
}

inline Json cap_entry(const cleaning::OutlierCap& e) {
    return {{"column", e.column}, {"row", e.row}, {"before", json_number(e.before)}, {"after", json_number(e.after)}};
}

// Stand-ins for the per-cell ledgers when they are streamed by write_report.
inline constexpr const char* kImputationsMark = "\x01ledger:imputations";
inline constexpr const char* kFlagsMark = "\x01ledger:outlier_flags";
inline constexpr const char* kCapsMark = "\x01ledger:outlier_caps";

template <class T, class F>
Json entries(const std::vector<T>& items, F&& to_json) {
    Json out = Json::array();
    for (const auto& item : items) out.push_back(to_json(item));
    return out;
}

inline Json cleaning_section(const cleaning::CleaningReport& c, bool ledger_marks = false) {
    Json imputations = ledger_marks ? Json(kImputationsMark) : entries(c.imputations, imputation_entry);
    Json flags = ledger_marks ? Json(kFlagsMark) : entries(c.outlier_flags, flag_entry);
    Json caps = ledger_marks ? Json(kCapsMark) : entries(c.outlier_caps, cap_entry);
    Json scalings = Json::array();
    for (const auto& s : c.scalings) {
        scalings.push_back({{"column", s.column},
                            {"method", to_string(s.choice.method)},
                            {"parameters", named_parameters(s.choice.parameters())}});
    }
    Json transforms = Json::array();
    for (const auto& t : c.transforms) {
        transforms.push_back(
            {{"column", t.column}, {"name", t.name}, {"parameters", named_parameters(t.parameters)}, {"outputs", t.outputs}});
    }
    return {{"imputations", imputations},
            {"outlier_flags", flags},
            {"outlier_caps", caps},
            {"scalings", scalings},
            {"transforms", transforms},
            {"dropped_columns", c.dropped_columns},
            {"warnings", c.warnings},
            {"completeness_before", json_number(c.completeness_before)},
            {"completeness_after", json_number(c.completeness_after)},
            {"table_digest_before", c.input_digest},
            {"table_digest_after", c.output_digest}};
}

inline Json analysis_section(const analysis::AnalysisResult& a) {
    Json summaries = Json::array();
    for (const auto& s : a.summaries) summaries.push_back({{"column", s.column}, {"stats", stats(s.stats)}});

    Json correlation = nullptr;
    if (a.correlation) {
        const auto& c = *a.correlation;
        Json counts = Json::array();
        for (std::size_t i = 0; i < c.size(); ++i) {
            Json row = Json::array();
            for (std::size_t j = 0; j < c.size(); ++j) row.push_back(c.count(i, j));
            counts.push_back(std::move(row));
        }
        correlation = {{"features", c.feature_names}, {"values", matrix(c.values)}, {"pair_counts", counts}};
    }

    Json chi = Json::array();
    for (const auto& c : a.chi_square) {
        chi.push_back({{"x", c.x},
                       {"y", c.y},
                       {"statistic", json_number(c.result.statistic)},
                       {"dof", c.result.dof},
                       {"p_value", json_number(c.result.p_value)},
                       {"cramers_v", json_number(c.result.cramers_v())},
                       {"n", json_number(c.result.n)},
                       {"low_expected_warning", c.result.low_expected_warning}});
    }

    Json pca = nullptr;
    if (a.pca) {
        const auto& p = *a.pca;
        pca = {{"features", p.feature_names},
               {"components", matrix(p.components)},
               {"eigenvalues", numbers(p.eigenvalues)},
               {"explained_variance_ratio", numbers(p.explained_variance_ratio)},
               {"means", numbers(p.means)},
               {"stds", numbers(p.stds)},
               {"rows_used", p.rows_used},
               {"warnings", p.warnings}};
    }

    Json mi = Json::array();
    for (const auto& m : a.mutual_information)
        mi.push_back({{"x", m.x}, {"y", m.y}, {"score", json_number(m.score)}, {"bins_used", m.bins_used}});

    Json densities = Json::array();
    for (const auto& d : a.densities) {
        densities.push_back({{"column", d.column},
                             {"bandwidth", json_number(d.estimate.bandwidth)},
                             {"rule", analysis::to_string(d.estimate.rule)},
                             {"integral", json_number(d.estimate.integral())},
                             {"grid", numbers(d.estimate.grid)},
                             {"density", numbers(d.estimate.density)}});
    }
    return {{"summaries", summaries},   {"correlation", correlation}, {"chi_square", chi},
            {"pca", pca},               {"mutual_information", mi},  {"densities", densities},
            {"stages", stages(a.stages)}, {"warnings", a.warnings}};
}

inline Json feature_section(const PipelineResult& r) {
    const features::FeatureRanking* aggregate = nullptr;
    for (const auto& k : r.rankings)
        if (k.method == features::Method::aggregate) aggregate = &k;
    Json list = Json::array();
    if (aggregate) {
        for (const auto& e : aggregate->entries) {
            Json scores = Json::object(), ranks = Json::object();
            for (const auto& k : r.rankings) {
                if (k.method == features::Method::aggregate) continue;
                const auto* hit = k.find(e.feature);
                scores[std::string(to_string(k.method))] = hit ? json_number(hit->score) : Json(nullptr);
                ranks[std::string(to_string(k.method))] = hit ? Json(hit->rank) : Json(nullptr);
            }
            list.push_back({{"feature", e.feature},
                            {"aggregate_rank", e.rank},
                            {"aggregate_score", json_number(e.score)},
                            {"scores", scores},
                            {"ranks", ranks}});
        }
    }
    Json inapplicable = Json::object();
    for (const auto& k : r.rankings) inapplicable[std::string(to_string(k.method))] = k.inapplicable;

    Json redundancy = nullptr;
    if (r.redundancy) {
        Json dropped = Json::array();
        for (const auto& d : r.redundancy->dropped)
            dropped.push_back({{"feature", d.feature}, {"partner", d.partner}, {"r", json_number(d.r)}});
        redundancy = {{"threshold", json_number(r.redundancy_threshold)},
                      {"retained", r.redundancy->retained},
                      {"dropped", dropped}};
    }
    return {{"mode", r.target ? "supervised" : "unsupervised relevance"},
            {"target", r.target ? Json(*r.target) : Json(nullptr)},
            {"features", list},
            {"inapplicable", inapplicable},
            {"redundancy", redundancy}};
}

inline Json chart_section(const std::vector<charts::ChartSpec>& specs) {
    Json out = Json::array();
    for (std::size_t i = 0; i < specs.size(); ++i) {
        const auto& s = specs[i];
        out.push_back({{"file", "charts/" + charts::chart_file_name(i)},
                       {"chart_type", charts::to_string(s.chart_type)},
                       {"x", s.x},
                       {"y", s.y ? Json(*s.y) : Json(nullptr)},
                       {"aggregate", s.aggregate == charts::Aggregate::none ? Json(nullptr) : Json(to_string(s.aggregate))},
                       {"title", s.title},
                       {"score", json_number(s.score)},
                       {"rationale", s.rationale},
                       {"criteria",
                        {{"interpretability", json_number(s.criteria.interpretability)},
                         {"relationship_strength", json_number(s.criteria.relationship_strength)},
                         {"data_fit", json_number(s.criteria.data_fit)}}}});
    }
    return out;
}

} // namespace detail

/// The full report document (schema autoviz-report/1). Wall-clock timings are
/// left out so identical input and options give identical bytes.
inline Json build_report(const PipelineResult& r, bool ledger_marks = false) {
    const auto& q = r.quality;
    Json comparison = Json::array();
    for (const auto& before : r.profiles_before) {
        if (!before.stats) continue;
        for (const auto& after : r.profiles_after) {
            if (after.name != before.name || !after.stats) continue;
            comparison.push_back({{"column", before.name}, {"before", detail::stats(*before.stats)}, {"after", detail::stats(*after.stats)}});
        }
    }
    Json quality = {{"rows_processed", q.rows_processed},
                    {"completeness_before", json_number(q.completeness_before)},
                    {"completeness_after", json_number(q.completeness_after)},
                    {"outlier_flag_count", q.outlier_flag_count},
                    {"transformations_applied", q.transformations_applied},
                    {"per_column_quality", Json::object()}};
    for (const auto& [name, value] : q.per_column_quality) quality["per_column_quality"][name] = json_number(value);

    const bool features_ok = !r.stage_skipped("feature_select");
    const bool charts_ok = !r.stage_skipped("chart_recommend");
    return {{"schema", kReportSchema},
            {"generator", {{"name", "autoviz"}, {"version", kVersion}}},
            {"input",
             {{"digest", {{"algorithm", kDigestAlgorithm}, {"value", r.input_digest}}},
              {"bytes", r.input_bytes},
              {"rows", r.rows_parsed},
              {"columns", r.columns_parsed},
              {"decoded_bytes", r.decoded_bytes},
              {"dialect",
               {{"delimiter", std::string(1, r.dialect.delimiter)},
                {"quote", std::string(1, r.dialect.quote)},
                {"has_header", r.dialect.has_header},
                {"encoding", ingest::to_string(r.dialect.encoding)}}}}},
            {"profiles", {{"before", detail::profiles(r.profiles_before)}, {"after", detail::profiles(r.profiles_after)}}},
            {"comparison", comparison},
            {"quality", quality},
            {"cleaning", detail::cleaning_section(r.cleaning, ledger_marks)},
            {"analysis", detail::analysis_section(r.analysis)},
            {"feature_importance", features_ok ? detail::feature_section(r) : Json(nullptr)},
            {"charts", charts_ok ? detail::chart_section(r.charts) : Json(nullptr)},
            {"stages", detail::stages(r.stages)},
            {"warnings", r.warnings}};
}

/// Two-space indented, keys sorted, trailing newline.
inline std::string serialize_report(const Json& report) { return report.dump(2) + "\n"; }

namespace detail {

template <class T, class F>
void stream_entries(std::ostream& out, const std::vector<T>& items, F&& to_json, std::size_t indent) {
    if (items.empty()) {
        out << "[]";
        return;
    }
    const std::string pad(indent + 2, ' ');
    out << "[\n";
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out << ",\n";
        out << pad;
        for (const char ch : to_json(items[i]).dump(2)) {
            out << ch;
            if (ch == '\n') out << pad;
        }
    }
    out << '\n' << std::string(indent, ' ') << ']';
}

} // namespace detail

/// Writes the same bytes as serialize_report(build_report(r)) without holding
/// the per-cell ledgers as a JSON tree.
inline void write_report(std::ostream& out, const PipelineResult& r) {
    const std::string text = build_report(r, true).dump(2);
    struct Mark {
        std::string token;
        std::function<void(std::size_t)> emit;
    };
    const auto& c = r.cleaning;
    const std::vector<Mark> marks{
        {Json(detail::kImputationsMark).dump(), [&](std::size_t ind) { detail::stream_entries(out, c.imputations, detail::imputation_entry, ind); }},
        {Json(detail::kFlagsMark).dump(), [&](std::size_t ind) { detail::stream_entries(out, c.outlier_flags, detail::flag_entry, ind); }},
        {Json(detail::kCapsMark).dump(), [&](std::size_t ind) { detail::stream_entries(out, c.outlier_caps, detail::cap_entry, ind); }},
    };
    std::size_t pos = 0;
    for (;;) {
        std::size_t next = std::string::npos;
        const Mark* hit = nullptr;
        for (const auto& m : marks) {
            const auto at = text.find(m.token, pos);
            if (at < next) {
                next = at;
                hit = &m;
            }
        }
        if (!hit) break;
        const auto line = text.rfind('\n', next) + 1;
        const auto indent = text.find_first_not_of(' ', line) - line;
        out.write(text.data() + pos, static_cast<std::streamsize>(next - pos));
        hit->emit(indent);
        pos = next + hit->token.size();
    }
    out.write(text.data() + pos, static_cast<std::streamsize>(text.size() - pos));
    out << '\n';
}

inline std::string report_text(const PipelineResult& r) {
    std::ostringstream out;
    write_report(out, r);
    return out.str();
}

/// Structural check of a parsed report. Returns an empty string when it conforms.
inline std::string validate_report_json(const Json& j) {
    if (!j.is_object()) return "report is not an object";
    if (j.value("schema", std::string()) != kReportSchema) return "wrong or missing schema";
    for (const char* key : {"generator", "input", "profiles", "quality", "cleaning", "analysis"}) {
        if (!j.contains(key) || !j[key].is_object()) return std::string("missing object ") + key;
    }
    for (const char* key : {"comparison", "stages", "warnings"}) {
        if (!j.contains(key) || !j[key].is_array()) return std::string("missing array ") + key;
    }
    const auto& digest = j["input"]["digest"];
    if (!digest.is_object() || !digest["value"].is_string() || digest["value"].get<std::string>().size() != 64)
        return "bad input digest";
    for (const auto& s : j["stages"]) {
        if (!s.is_object() || !s["stage"].is_string()) return "malformed stage entry";
        if (s["status"] != "ok" && s["status"] != "skipped") return "bad stage status";
    }
    auto stage_ok = [&](const std::string& name) {
        for (const auto& s : j["stages"])
            if (s["stage"] == name) return s["status"] == "ok";
        return false;
    };
    for (const char* stage : {"ingest", "clean", "analyze"})
        if (!stage_ok(stage)) return std::string("stage not completed: ") + stage;
    if (!j.contains("feature_importance") || (stage_ok("feature_select") != j["feature_importance"].is_object()))
        return "feature_importance does not match its stage status";
    if (!j.contains("charts") || (stage_ok("chart_recommend") != j["charts"].is_array()))
        return "charts do not match their stage status";
    const auto& q = j["quality"];
    for (const char* key : {"completeness_before", "completeness_after"}) {
        if (!q[key].is_number() || q[key].get<double>() < 0.0 || q[key].get<double>() > 1.0) return "bad quality field";
    }
    if (q["completeness_after"].get<double>() < q["completeness_before"].get<double>()) return "completeness decreased";
    for (const auto& [name, v] : q["per_column_quality"].items())
        if (!v.is_number() || v.get<double>() < 0.0 || v.get<double>() > 1.0) return "bad quality for " + name;
    const auto& c = j["cleaning"];
    if (q["outlier_flag_count"] != c["outlier_flags"].size()) return "flag count disagrees with the ledger";
    if (q["transformations_applied"] != c["transforms"].size()) return "transform count disagrees with the ledger";
    if (j["charts"].is_array()) {
        for (const auto& chart : j["charts"]) {
            if (!chart["file"].is_string() || !chart["title"].is_string() || !chart["score"].is_number())
                return "malformed chart entry";
            const auto type = charts::parse_chart_type(chart.value("chart_type", std::string()));
            if (!type || charts::is_univariate(*type) != chart["y"].is_null()) return "chart entry arity";
        }
    }
    return {};
}

} // namespace autoviz::report
