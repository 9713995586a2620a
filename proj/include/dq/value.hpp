#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace dq {

// Scalar cell value. monostate represents SQL NULL. Dates are kept as
// ISO "YYYY-MM-DD" strings; the column type tag decides how text is coerced.
using Value = std::variant<std::monostate, bool, std::int64_t, double, std::string>;

enum class ColumnType { String, Integer, Decimal, Date, Boolean };

inline bool is_null(const Value& v) { return std::holds_alternative<std::monostate>(v); }

const char* column_type_name(ColumnType t);
std::optional<ColumnType> column_type_from_name(std::string_view name);

// Canonical single-token rendering: strings double-quoted, NULL for null.
// Injective per type; used by rule rendering and report output.
std::string render_value(const Value& v);

// Plain text (no quotes) for CSV cells. Null is not representable here;
// callers handle null fields themselves.
std::string value_to_text(const Value& v);

nlohmann::json value_to_json(const Value& v);
Value value_from_json(const nlohmann::json& j);

// Coerce a CSV cell to a typed value. Returns nullopt when the text does
// not conform to the column type.
std::optional<Value> coerce_text(const std::string& text, ColumnType type);

// Check a JSON literal (correspondence values, changelog values) against a
// column type. Null is accepted for every type.
bool json_matches_type(const nlohmann::json& j, ColumnType type);

std::string render_value_list(const std::vector<Value>& vs);

}  // namespace dq
