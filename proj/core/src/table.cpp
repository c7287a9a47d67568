#include "chartforge/table.hpp"

#include "chartforge/error.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <set>
#include <sstream>

namespace chartforge::chart {
namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::optional<double> parse_number(std::string_view s) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    if (s.empty()) return std::nullopt;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

bool looks_temporal(std::string_view name) {
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    for (std::string_view key : {"year", "date", "month", "day", "time", "week", "quarter"})
        if (lower.find(key) != std::string::npos) return true;
    return false;
}

using RawRow = std::vector<std::optional<std::string>>;

struct RawTable {
    std::vector<std::string> header;
    std::vector<RawRow> rows;
    std::optional<std::string> title;
};

// RFC 4180 field splitter. Tracks the physical line of each record so errors
// can point at the offending input.
RawTable read_csv(std::string_view text) {
    if (text.size() >= 3 && static_cast<unsigned char>(text[0]) == 0xEF &&
        static_cast<unsigned char>(text[1]) == 0xBB && static_cast<unsigned char>(text[2]) == 0xBF)
        text.remove_prefix(3);

    std::vector<std::pair<int, std::vector<std::pair<std::string, bool>>>> records;
    std::vector<std::pair<std::string, bool>> fields;
    std::string field;
    bool quoted = false, in_quotes = false, field_started = false;
    int line = 1, record_line = 1;

    auto end_field = [&] {
        fields.emplace_back(quoted ? field : std::string(trim(field)), quoted);
        field.clear();
        quoted = false;
        field_started = false;
    };
    auto end_record = [&] {
        end_field();
        const bool blank = fields.size() == 1 && !fields[0].second && fields[0].first.empty();
        if (!blank) records.emplace_back(record_line, std::move(fields));
        fields.clear();
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                if (c == '\n') ++line;
                field.push_back(c);
            }
            continue;
        }
        if (c == '"') {
            if (!trim(field).empty() || quoted)
                throw Error(ErrorCode::MalformedInput, "line " + std::to_string(line) + ": stray quote in field");
            field.clear();
            quoted = in_quotes = field_started = true;
        } else if (c == ',') {
            end_field();
        } else if (c == '\r') {
            // tolerated before \n
        } else if (c == '\n') {
            end_record();
            ++line;
            record_line = line;
        } else {
            if (quoted && !std::isspace(static_cast<unsigned char>(c)))
                throw Error(ErrorCode::MalformedInput,
                            "line " + std::to_string(line) + ": text after closing quote");
            if (!quoted) field.push_back(c);
            field_started = true;
        }
    }
    if (in_quotes) throw Error(ErrorCode::MalformedInput, "line " + std::to_string(line) + ": unterminated quote");
    if (field_started || !fields.empty()) end_record();

    if (records.empty()) throw Error(ErrorCode::MalformedInput, "no header row");
    RawTable raw;
    for (auto& [name, q] : records.front().second) raw.header.push_back(name);
    for (std::size_t r = 1; r < records.size(); ++r) {
        auto& [rec_line, cells] = records[r];
        if (cells.size() != raw.header.size())
            throw Error(ErrorCode::MalformedInput, "line " + std::to_string(rec_line) + ": expected " +
                                                       std::to_string(raw.header.size()) + " fields, found " +
                                                       std::to_string(cells.size()));
        RawRow row;
        for (auto& [value, q] : cells) {
            if (value.empty() && !q)
                row.emplace_back(std::nullopt);
            else
                row.emplace_back(std::move(value));
        }
        raw.rows.push_back(std::move(row));
    }
    return raw;
}

RawTable read_json(std::string_view text) {
    nlohmann::ordered_json doc;
    try {
        doc = nlohmann::ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorCode::MalformedInput, std::string("json: ") + e.what());
    }
    RawTable raw;
    const nlohmann::ordered_json* records = &doc;
    if (doc.is_object()) {
        if (auto t = doc.find("title"); t != doc.end() && t->is_string()) raw.title = t->get<std::string>();
        auto d = doc.find("data");
        if (d == doc.end()) throw Error(ErrorCode::MalformedInput, "json object needs a \"data\" array");
        records = &*d;
    }
    if (!records->is_array()) throw Error(ErrorCode::MalformedInput, "json: expected an array of objects");

    for (std::size_t i = 0; i < records->size(); ++i) {
        const auto& rec = (*records)[i];
        if (!rec.is_object())
            throw Error(ErrorCode::MalformedInput, "json record " + std::to_string(i) + ": not an object");
        for (auto it = rec.begin(); it != rec.end(); ++it)
            if (std::find(raw.header.begin(), raw.header.end(), it.key()) == raw.header.end())
                raw.header.push_back(it.key());
    }
    for (std::size_t i = 0; i < records->size(); ++i) {
        const auto& rec = (*records)[i];
        RawRow row;
        for (const auto& name : raw.header) {
            auto it = rec.find(name);
            if (it == rec.end() || it->is_null()) {
                row.emplace_back(std::nullopt);
            } else if (it->is_string()) {
                row.emplace_back(it->get<std::string>());
            } else if (it->is_number() || it->is_boolean()) {
                row.emplace_back(it->dump());
            } else {
                throw Error(ErrorCode::MalformedInput,
                            "json record " + std::to_string(i) + ", field \"" + name + "\": nested values unsupported");
            }
        }
        raw.rows.push_back(std::move(row));
    }
    return raw;
}

} // namespace

std::optional<std::size_t> DataTable::column_index(std::string_view name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i].name == name) return i;
    return std::nullopt;
}

double DataTable::number(std::size_t row, std::size_t column) const {
    const Cell& c = rows.at(row).at(column);
    if (const double* v = std::get_if<double>(&c)) return *v;
    if (std::holds_alternative<std::monostate>(c))
        throw Error(ErrorCode::MissingValue,
                    "row " + std::to_string(row) + ", column \"" + columns.at(column).name + "\" is empty");
    throw Error(ErrorCode::InvalidArgument, "column \"" + columns.at(column).name + "\" is not numeric");
}

std::string DataTable::text(std::size_t row, std::size_t column) const {
    const Cell& c = rows.at(row).at(column);
    if (const double* v = std::get_if<double>(&c)) {
        std::ostringstream os;
        os << *v;
        return os.str();
    }
    if (const std::string* s = std::get_if<std::string>(&c)) return *s;
    return {};
}

void DataTable::validate() const {
    if (rows.empty()) throw Error(ErrorCode::EmptyTable, "table has no data rows");
    bool numeric = false;
    for (const auto& c : columns) numeric = numeric || c.kind == ColumnKind::numeric;
    if (!numeric) throw Error(ErrorCode::NoNumericColumn, "table has no numeric column");
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != columns.size())
            throw Error(ErrorCode::MalformedInput, "row " + std::to_string(r) + " has the wrong number of values");
        for (std::size_t c = 0; c < columns.size(); ++c) {
            const bool is_num = std::holds_alternative<double>(rows[r][c]);
            const bool is_text = std::holds_alternative<std::string>(rows[r][c]);
            if ((columns[c].kind == ColumnKind::numeric && is_text) || (columns[c].kind != ColumnKind::numeric && is_num))
                throw Error(ErrorCode::MalformedInput, "row " + std::to_string(r) + ": cell type disagrees with column kind");
        }
    }
}

DataTable parse_table(std::string_view bytes, TableFormat format) {
    if (trim(bytes).empty()) throw Error(ErrorCode::MalformedInput, "input is empty");
    RawTable raw = format == TableFormat::csv ? read_csv(bytes) : read_json(bytes);

    std::set<std::string> seen;
    for (const auto& name : raw.header) {
        if (name.empty()) throw Error(ErrorCode::MalformedInput, "header contains an empty column name");
        if (!seen.insert(name).second) throw Error(ErrorCode::MalformedInput, "duplicate column \"" + name + "\"");
    }
    if (raw.rows.empty()) throw Error(ErrorCode::EmptyTable, "table has a header but no data rows");

    DataTable table;
    table.title = raw.title;
    for (std::size_t c = 0; c < raw.header.size(); ++c) {
        bool numeric = true, any_value = false;
        for (const auto& row : raw.rows) {
            if (!row[c]) continue;
            any_value = true;
            if (!parse_number(*row[c])) {
                numeric = false;
                break;
            }
        }
        ColumnKind kind = ColumnKind::categorical;
        if (numeric && any_value)
            kind = ColumnKind::numeric;
        else if (looks_temporal(raw.header[c]))
            kind = ColumnKind::temporal;
        table.columns.push_back({raw.header[c], kind});
    }
    for (const auto& row : raw.rows) {
        std::vector<Cell> cells;
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (!row[c])
                cells.emplace_back(std::monostate{});
            else if (table.columns[c].kind == ColumnKind::numeric)
                cells.emplace_back(*parse_number(*row[c]));
            else
                cells.emplace_back(*row[c]);
        }
        table.rows.push_back(std::move(cells));
    }
    table.validate();
    return table;
}

std::string_view to_string(ColumnKind kind) {
    switch (kind) {
    case ColumnKind::numeric: return "numeric";
    case ColumnKind::categorical: return "categorical";
    case ColumnKind::temporal: return "temporal";
    }
    return "categorical";
}

std::string_view to_string(TableFormat format) { return format == TableFormat::csv ? "csv" : "json"; }

TableFormat table_format_from_string(std::string_view name) {
    if (name == "csv") return TableFormat::csv;
    if (name == "json") return TableFormat::json;
    throw Error(ErrorCode::UnsupportedFormat, "unknown table format \"" + std::string(name) + "\"");
}

} // namespace chartforge::chart
