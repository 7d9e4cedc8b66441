#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "autoviz/error.hpp"

namespace autoviz::cleaning {

struct ImputationConfig {
    std::size_t knn_k = 5;
    /// Worker threads for the neighbour search; 0 uses the hardware concurrency.
    std::size_t threads = 0;

    void validate() const {
        if (knn_k < 1) throw Error(ErrorCode::invalid_argument, "knn_k must be at least 1");
    }
};

inline constexpr double kModifiedZConstant = 0.6745;
// sqrt(2/pi): the mean absolute deviation of a standard normal
inline constexpr double kMeanAbsDeviationConstant = 0.7979;

struct OutlierParams {
    double z_threshold = 3.0;
    double modified_z_threshold = 3.5;
    double iqr_multiplier = 1.5;

    void validate() const {
        if (!(z_threshold > 0.0) || !(modified_z_threshold > 0.0) || !(iqr_multiplier > 0.0)) {
            throw Error(ErrorCode::invalid_argument, "outlier thresholds must be positive");
        }
    }
};

enum class Detector { zscore, modified_z, iqr };

constexpr std::string_view to_string(Detector d) {
    switch (d) {
    case Detector::zscore: return "zscore";
    case Detector::modified_z: return "modified_z";
    case Detector::iqr: return "iqr";
    }
    return "zscore";
}

struct OutlierFlag {
    std::size_t row = 0;
    double value = 0.0;
    // zscore / modified_z: the signed score; iqr: signed distance beyond the nearer fence
    double score = 0.0;
};

enum class ScalingMethod { none, standard, robust, minmax, unit_vector };

constexpr std::string_view to_string(ScalingMethod m) {
    switch (m) {
    case ScalingMethod::none: return "none";
    case ScalingMethod::standard: return "standard";
    case ScalingMethod::robust: return "robust";
    case ScalingMethod::minmax: return "minmax";
    case ScalingMethod::unit_vector: return "unit_vector";
    }
    return "none";
}

inline std::optional<ScalingMethod> parse_scaling_method(std::string_view s) {
    for (auto m : {ScalingMethod::none, ScalingMethod::standard, ScalingMethod::robust, ScalingMethod::minmax,
                   ScalingMethod::unit_vector})
        if (to_string(m) == s) return m;
    return std::nullopt;
}

/// A scaler fitted to one column: y = (x - center) / scale.
struct ScalingChoice {
    ScalingMethod method = ScalingMethod::none;
    double center = 0.0; // mean, median or min; 0 for unit_vector
    double scale = 1.0;  // population std, IQR, range or L2 norm

    /// Named fitted parameters, as reported.
    std::vector<std::pair<std::string, double>> parameters() const {
        switch (method) {
        case ScalingMethod::standard: return {{"mean", center}, {"std", scale}};
        case ScalingMethod::robust: return {{"median", center}, {"iqr", scale}};
        case ScalingMethod::minmax: return {{"min", center}, {"max", center + scale}};
        case ScalingMethod::unit_vector: return {{"norm", scale}};
        case ScalingMethod::none: return {};
        }
        return {};
    }

    friend bool operator==(const ScalingChoice&, const ScalingChoice&) = default;
};

enum class TransformMethod { none, log, box_cox, auto_select };

constexpr std::string_view to_string(TransformMethod m) {
    switch (m) {
    case TransformMethod::none: return "none";
    case TransformMethod::log: return "log";
    case TransformMethod::box_cox: return "box_cox";
    case TransformMethod::auto_select: return "auto";
    }
    return "none";
}

inline std::optional<TransformMethod> parse_transform_method(std::string_view s) {
    for (auto m : {TransformMethod::none, TransformMethod::log, TransformMethod::box_cox, TransformMethod::auto_select})
        if (to_string(m) == s) return m;
    return std::nullopt;
}

enum class EncodingMethod { none, one_hot, label };

constexpr std::string_view to_string(EncodingMethod m) {
    switch (m) {
    case EncodingMethod::none: return "none";
    case EncodingMethod::one_hot: return "one_hot";
    case EncodingMethod::label: return "label";
    }
    return "none";
}

inline std::optional<EncodingMethod> parse_encoding_method(std::string_view s) {
    for (auto m : {EncodingMethod::none, EncodingMethod::one_hot, EncodingMethod::label})
        if (to_string(m) == s) return m;
    return std::nullopt;
}

inline constexpr std::size_t kOneHotMaxLevels = 50;

struct CleaningConfig {
    ImputationConfig imputation;
    OutlierParams outliers;
    bool scaling = true;
    /// Applies one scaler to every numeric column instead of the adaptive choice.
    std::optional<ScalingMethod> force_scaler;
    TransformMethod transform = TransformMethod::none;
    EncodingMethod encoding = EncodingMethod::none;
    /// Clamp IQR-flagged values to the nearer fence.
    bool cap_outliers = false;

    void validate() const {
        imputation.validate();
        outliers.validate();
    }
};

// ---- ledger -------------------------------------------------------------

using CellValue = std::variant<double, std::string>;

struct Imputation {
    std::string column;
    std::size_t row = 0;
    CellValue value;
    std::string_view method; // knn, column_mean or mode; always a literal
};

struct OutlierEntry {
    std::string column;
    std::size_t row = 0;
    double value = 0.0;
    Detector detector = Detector::zscore;
    double score = 0.0;
};

struct OutlierCap {
    std::string column;
    std::size_t row = 0;
    double before = 0.0;
    double after = 0.0;
};

struct ScalingEntry {
    std::string column;
    ScalingChoice choice;
};

struct TransformEntry {
    std::string column;
    std::string name; // log, box_cox, label, one_hot
    std::vector<std::pair<std::string, double>> parameters;
    std::vector<std::string> outputs; // columns produced
};

struct CleaningReport {
    std::vector<Imputation> imputations;
    std::vector<OutlierEntry> outlier_flags;
    std::vector<OutlierCap> outlier_caps;
    std::vector<ScalingEntry> scalings;
    std::vector<TransformEntry> transforms;
    std::vector<std::string> dropped_columns;
    std::vector<std::string> warnings;
    double completeness_before = 1.0;
    double completeness_after = 1.0;
    std::string input_digest;
    std::string output_digest;

    std::size_t flag_count(std::string_view column) const {
        std::size_t n = 0;
        for (const auto& f : outlier_flags) n += f.column == column ? 1 : 0;
        return n;
    }
};

} // namespace autoviz::cleaning
