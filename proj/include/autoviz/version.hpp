#pragma once

#ifndef AUTOVIZ_VERSION
#define AUTOVIZ_VERSION "0.1.0"
#endif

namespace autoviz {

inline constexpr const char* kVersion = AUTOVIZ_VERSION;
inline constexpr const char* kReportSchema = "autoviz-report/1";
inline constexpr const char* kChartSchema = "autoviz-spec/1";

} // namespace autoviz
