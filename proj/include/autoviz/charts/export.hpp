#pragma once

#include <cstdio>
#include <string>

#include "autoviz/charts/recommend.hpp"
#include "autoviz/dataset.hpp"
#include "autoviz/json_util.hpp"
#include "autoviz/version.hpp"

namespace autoviz::charts {

namespace detail {

inline Json column_values(const Column& col, std::size_t rows) {
    Json out = Json::array();
    for (std::size_t i = 0; i < rows; ++i) {
        if (!col.is_present(i)) out.push_back(nullptr);
        else if (col.kind() == ColumnKind::numeric) out.push_back(json_number(col.numbers()[i]));
        else out.push_back(std::string(col.label(i)));
    }
    return out;
}

} // namespace detail

/// Standalone chart document with the first `sample_rows` rows inlined.
inline Json chart_to_json(const ChartSpec& spec, const Dataset& data, std::size_t sample_rows = 10000) {
    const std::size_t rows = std::min(sample_rows, data.row_count());
    Json values = Json::object();
    values[spec.x] = detail::column_values(data.column(spec.x), rows);
    if (spec.y) values[*spec.y] = detail::column_values(data.column(*spec.y), rows);

    Json j;
    j["schema"] = kChartSchema;
    j["chart_type"] = to_string(spec.chart_type);
    j["x"] = spec.x;
    j["y"] = spec.y ? Json(*spec.y) : Json(nullptr);
    j["aggregate"] = spec.aggregate == Aggregate::none ? Json(nullptr) : Json(to_string(spec.aggregate));
    j["title"] = spec.title;
    j["score"] = json_number(spec.score);
    j["rationale"] = spec.rationale;
    j["criteria"] = {{"interpretability", json_number(spec.criteria.interpretability)},
                     {"relationship_strength", json_number(spec.criteria.relationship_strength)},
                     {"data_fit", json_number(spec.criteria.data_fit)}};
    j["data"] = {{"rows", rows}, {"total_rows", data.row_count()}, {"sampled", rows < data.row_count()}, {"values", values}};
    return j;
}

/// chart_01.json, chart_02.json, ...
inline std::string chart_file_name(std::size_t index) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "chart_%02zu.json", index + 1);
    return buf;
}

/// Checks a parsed chart document against the autoviz-spec/1 layout.
/// Returns an empty string when it conforms.
inline std::string validate_chart_json(const Json& j) {
    if (!j.is_object()) return "chart is not an object";
    if (j.value("schema", std::string()) != kChartSchema) return "wrong or missing schema";
    for (const char* key : {"chart_type", "x", "title", "rationale"})
        if (!j.contains(key) || !j[key].is_string()) return std::string("missing string field ") + key;
    const auto type = parse_chart_type(j["chart_type"].get<std::string>());
    if (!type) return "unknown chart_type";
    if (j["title"].get<std::string>().empty()) return "empty title";
    if (!j.contains("y") || !(j["y"].is_null() || j["y"].is_string())) return "bad y";
    if (is_univariate(*type) != j["y"].is_null()) return "y arity does not match chart_type";
    if (!j.contains("aggregate") || !(j["aggregate"].is_null() || j["aggregate"] == "count" || j["aggregate"] == "mean"))
        return "bad aggregate";
    if (!j.contains("score") || !j["score"].is_number()) return "missing score";
    const double score = j["score"].get<double>();
    if (score < 0.0 || score > 1.0) return "score out of range";
    if (!j.contains("criteria") || !j["criteria"].is_object()) return "missing criteria";
    for (const char* key : {"interpretability", "relationship_strength", "data_fit"}) {
        if (!j["criteria"].contains(key) || !j["criteria"][key].is_number()) return std::string("missing criterion ") + key;
    }
    if (!j.contains("data") || !j["data"].is_object()) return "missing data";
    const auto& d = j["data"];
    if (!d.contains("rows") || !d["rows"].is_number_unsigned() || !d.contains("values") || !d["values"].is_object())
        return "malformed data";
    const auto rows = d["rows"].get<std::size_t>();
    if (rows > 10000) return "inline data above 10000 rows";
    for (const auto& [name, column] : d["values"].items()) {
        if (!column.is_array() || column.size() != rows) return "data column " + name + " has the wrong length";
    }
    if (!d["values"].contains(j["x"].get<std::string>())) return "data lacks the x column";
    if (j["y"].is_string() && !d["values"].contains(j["y"].get<std::string>())) return "data lacks the y column";
    return {};
}

} // namespace autoviz::charts
