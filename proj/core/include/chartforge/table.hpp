#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace chartforge::chart {

enum class ColumnKind { numeric, categorical, temporal };

struct Column {
    std::string name;
    ColumnKind kind = ColumnKind::categorical;
    friend bool operator==(const Column&, const Column&) = default;
};

/// Empty cells are std::monostate; numeric columns hold doubles, all other
/// columns hold the original text.
using Cell = std::variant<std::monostate, double, std::string>;

struct DataTable {
    std::vector<Column> columns;
    std::vector<std::vector<Cell>> rows;
    std::optional<std::string> title;

    std::size_t row_count() const { return rows.size(); }
    std::optional<std::size_t> column_index(std::string_view name) const;
    /// Numeric value of a cell; throws MissingValue for empty cells and
    /// InvalidArgument for non-numeric columns.
    double number(std::size_t row, std::size_t column) const;
    /// Display text of a cell ("" when empty).
    std::string text(std::size_t row, std::size_t column) const;

    /// Throws if any DataTable invariant is broken.
    void validate() const;

    friend bool operator==(const DataTable&, const DataTable&) = default;
};

enum class TableFormat { csv, json };

/// Parses CSV (header row, comma separated, RFC 4180 quoting) or JSON (array
/// of flat objects, or {"title": ..., "data": [...]}). A column is numeric when
/// every non-empty cell parses as a finite number; non-numeric columns whose
/// header looks like a date field are tagged temporal and keep input order.
DataTable parse_table(std::string_view bytes, TableFormat format);

std::string_view to_string(ColumnKind kind);
std::string_view to_string(TableFormat format);
TableFormat table_format_from_string(std::string_view name);

} // namespace chartforge::chart
