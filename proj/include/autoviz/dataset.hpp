#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <variant>
#include <vector>

#include "autoviz/error.hpp"
#include "autoviz/numeric.hpp"

namespace autoviz {

enum class ColumnKind : std::uint8_t { text, numeric, categorical, boolean };

constexpr std::string_view to_string(ColumnKind kind) {
    switch (kind) {
    case ColumnKind::text: return "text";
    case ColumnKind::numeric: return "numeric";
    case ColumnKind::categorical: return "categorical";
    case ColumnKind::boolean: return "boolean";
    }
    return "text";
}

/// True for kinds stored as category codes (categorical and boolean).
constexpr bool is_discrete(ColumnKind kind) {
    return kind == ColumnKind::categorical || kind == ColumnKind::boolean;
}

/// One named column with per-cell missingness.
///
/// Storage depends on the kind: untyped text lives in a single byte arena with
/// end offsets, numbers in a dense double vector, and categorical/boolean cells
/// as codes into a level table. Missing cells keep a placeholder in the
/// storage and a zero in the presence mask.
class Column {
public:
    struct TextCells {
        std::string bytes;
        std::vector<std::uint32_t> ends;
    };
    struct NumericCells {
        std::vector<double> values;
    };
    struct CategoryCells {
        std::vector<std::uint32_t> codes;
        std::vector<std::string> levels;
    };

    Column() = default;

    static Column text(std::string name, TextCells cells, std::vector<std::uint8_t> present) {
        if (cells.ends.size() != present.size()) {
            throw Error(ErrorCode::invalid_argument, "text column length mismatch");
        }
        return Column(std::move(name), ColumnKind::text, std::move(present), std::move(cells));
    }

    static Column text(std::string name, const std::vector<std::optional<std::string>>& cells) {
        TextCells storage;
        std::vector<std::uint8_t> present;
        present.reserve(cells.size());
        for (const auto& cell : cells) {
            if (cell) storage.bytes += *cell;
            storage.ends.push_back(static_cast<std::uint32_t>(storage.bytes.size()));
            present.push_back(cell ? 1 : 0);
        }
        return text(std::move(name), std::move(storage), std::move(present));
    }

    static Column numeric(std::string name, std::vector<double> values, std::vector<std::uint8_t> present) {
        if (values.size() != present.size()) {
            throw Error(ErrorCode::invalid_argument, "numeric column length mismatch");
        }
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (!present[i]) values[i] = 0.0;
            else if (!std::isfinite(values[i])) {
                throw Error(ErrorCode::invalid_argument, "numeric cells must be finite");
            }
        }
        return Column(std::move(name), ColumnKind::numeric, std::move(present), NumericCells{std::move(values)});
    }

    static Column numeric(std::string name, std::vector<double> values) {
        std::vector<std::uint8_t> present(values.size(), 1);
        return numeric(std::move(name), std::move(values), std::move(present));
    }

    static Column numeric(std::string name, const std::vector<std::optional<double>>& cells) {
        std::vector<double> values(cells.size(), 0.0);
        std::vector<std::uint8_t> present(cells.size(), 0);
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (cells[i]) {
                values[i] = *cells[i];
                present[i] = 1;
            }
        }
        return numeric(std::move(name), std::move(values), std::move(present));
    }

    static Column categorical(std::string name, std::vector<std::uint32_t> codes, std::vector<std::string> levels,
                              std::vector<std::uint8_t> present, ColumnKind kind = ColumnKind::categorical) {
        if (!is_discrete(kind)) throw Error(ErrorCode::invalid_argument, "categorical storage needs a discrete kind");
        if (codes.size() != present.size()) {
            throw Error(ErrorCode::invalid_argument, "categorical column length mismatch");
        }
        for (std::size_t i = 0; i < codes.size(); ++i) {
            if (!present[i]) codes[i] = 0;
            else if (codes[i] >= levels.size()) throw Error(ErrorCode::invalid_argument, "category code out of range");
        }
        return Column(std::move(name), kind, std::move(present), CategoryCells{std::move(codes), std::move(levels)});
    }

    /// Builds a categorical column; levels are numbered in order of first appearance.
    static Column categorical(std::string name, const std::vector<std::optional<std::string>>& cells,
                              ColumnKind kind = ColumnKind::categorical) {
        std::vector<std::uint32_t> codes(cells.size(), 0);
        std::vector<std::uint8_t> present(cells.size(), 0);
        std::vector<std::string> levels;
        std::unordered_map<std::string, std::uint32_t> lookup;
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (!cells[i]) continue;
            auto [it, inserted] = lookup.try_emplace(*cells[i], static_cast<std::uint32_t>(levels.size()));
            if (inserted) levels.push_back(*cells[i]);
            codes[i] = it->second;
            present[i] = 1;
        }
        return categorical(std::move(name), std::move(codes), std::move(levels), std::move(present), kind);
    }

    const std::string& name() const noexcept { return name_; }
    ColumnKind kind() const noexcept { return kind_; }
    std::size_t size() const noexcept { return present_.size(); }

    bool is_present(std::size_t row) const { return present_[row] != 0; }
    std::span<const std::uint8_t> present_mask() const noexcept { return present_; }

    std::size_t missing_count() const noexcept {
        return static_cast<std::size_t>(std::count(present_.begin(), present_.end(), std::uint8_t{0}));
    }
    std::size_t present_count() const noexcept { return size() - missing_count(); }

    /// Dense numeric storage; missing cells hold 0.
    std::span<const double> numbers() const { return std::get<NumericCells>(data_).values; }

    std::optional<double> number_at(std::size_t row) const {
        if (!is_present(row)) return std::nullopt;
        return std::get<NumericCells>(data_).values[row];
    }

    /// Present numeric values in row order.
    std::vector<double> present_numbers() const {
        const auto& values = std::get<NumericCells>(data_).values;
        std::vector<double> out;
        out.reserve(values.size());
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (present_[i]) out.push_back(values[i]);
        }
        return out;
    }

    std::span<const std::uint32_t> codes() const { return std::get<CategoryCells>(data_).codes; }
    const std::vector<std::string>& levels() const { return std::get<CategoryCells>(data_).levels; }

    /// Cell text for text and categorical columns; empty view for missing cells.
    std::string_view label(std::size_t row) const {
        if (!is_present(row)) return {};
        if (const auto* text = std::get_if<TextCells>(&data_)) {
            const std::uint32_t begin = row == 0 ? 0 : text->ends[row - 1];
            return std::string_view(text->bytes).substr(begin, text->ends[row] - begin);
        }
        const auto& cats = std::get<CategoryCells>(data_);
        return cats.levels[cats.codes[row]];
    }

    /// Textual form of any cell; missing renders as the empty string.
    std::string render(std::size_t row) const {
        if (!is_present(row)) return {};
        if (kind_ == ColumnKind::numeric) return format_number(std::get<NumericCells>(data_).values[row]);
        return std::string(label(row));
    }

    std::optional<std::string> cell_text(std::size_t row) const {
        if (!is_present(row)) return std::nullopt;
        return render(row);
    }

    Column renamed(std::string name) const {
        Column copy = *this;
        copy.name_ = std::move(name);
        return copy;
    }

    /// Approximate heap footprint of the cell storage.
    std::size_t memory_bytes() const {
        std::size_t total = present_.capacity() + name_.capacity();
        std::visit(
            [&](const auto& cells) {
                using T = std::decay_t<decltype(cells)>;
                if constexpr (std::is_same_v<T, TextCells>) {
                    total += cells.bytes.capacity() + cells.ends.capacity() * sizeof(std::uint32_t);
                } else if constexpr (std::is_same_v<T, NumericCells>) {
                    total += cells.values.capacity() * sizeof(double);
                } else {
                    total += cells.codes.capacity() * sizeof(std::uint32_t);
                    for (const auto& level : cells.levels) total += sizeof(std::string) + level.capacity();
                }
            },
            data_);
        return total;
    }

    /// Cell-for-cell equality: same name, kind, missingness and values.
    friend bool operator==(const Column& a, const Column& b) {
        if (a.name_ != b.name_ || a.kind_ != b.kind_ || a.present_ != b.present_) return false;
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (!a.is_present(i)) continue;
            if (a.kind_ == ColumnKind::numeric) {
                if (a.numbers()[i] != b.numbers()[i]) return false;
            } else if (a.label(i) != b.label(i)) {
                return false;
            }
        }
        return true;
    }

private:
    using Storage = std::variant<TextCells, NumericCells, CategoryCells>;

    Column(std::string name, ColumnKind kind, std::vector<std::uint8_t> present, Storage data)
        : name_(std::move(name)), kind_(kind), present_(std::move(present)), data_(std::move(data)) {}

    std::string name_;
    ColumnKind kind_ = ColumnKind::text;
    std::vector<std::uint8_t> present_;
    Storage data_;
};

/// Ordered set of equally long, uniquely named columns. Immutable once built.
class Dataset {
public:
    Dataset() = default;

    explicit Dataset(std::vector<Column> columns) : columns_(std::move(columns)) {
        row_count_ = columns_.empty() ? 0 : columns_.front().size();
        std::unordered_set<std::string_view> names;
        for (const auto& col : columns_) {
            if (col.size() != row_count_) {
                throw Error(ErrorCode::invalid_argument, "column '" + col.name() + "' has a different length");
            }
            if (!names.insert(col.name()).second) {
                throw Error(ErrorCode::invalid_argument, "duplicate column name '" + col.name() + "'");
            }
        }
    }

    std::size_t row_count() const noexcept { return row_count_; }
    std::size_t column_count() const noexcept { return columns_.size(); }
    const std::vector<Column>& columns() const noexcept { return columns_; }
    const Column& column(std::size_t index) const { return columns_.at(index); }

    std::optional<std::size_t> index_of(std::string_view name) const {
        for (std::size_t i = 0; i < columns_.size(); ++i) {
            if (columns_[i].name() == name) return i;
        }
        return std::nullopt;
    }

    const Column* find(std::string_view name) const {
        const auto idx = index_of(name);
        return idx ? &columns_[*idx] : nullptr;
    }

    const Column& column(std::string_view name) const {
        if (const auto* col = find(name)) return *col;
        throw Error(ErrorCode::invalid_argument, "no column named '" + std::string(name) + "'");
    }

    std::vector<std::size_t> numeric_indices() const {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < columns_.size(); ++i) {
            if (columns_[i].kind() == ColumnKind::numeric) out.push_back(i);
        }
        return out;
    }

    std::vector<std::size_t> discrete_indices() const {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < columns_.size(); ++i) {
            if (is_discrete(columns_[i].kind())) out.push_back(i);
        }
        return out;
    }

    std::size_t memory_bytes() const {
        std::size_t total = 0;
        for (const auto& col : columns_) total += col.memory_bytes();
        return total;
    }

    /// Releases the columns; the dataset is left empty.
    std::vector<Column> release_columns() && {
        row_count_ = 0;
        return std::move(columns_);
    }

    friend bool operator==(const Dataset& a, const Dataset& b) {
        return a.row_count_ == b.row_count_ && a.columns_ == b.columns_;
    }

private:
    std::vector<Column> columns_;
    std::size_t row_count_ = 0;
};

} // namespace autoviz
