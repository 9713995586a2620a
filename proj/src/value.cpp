#include "dq/value.hpp"

#include <charconv>
#include <cstdio>
#include <sstream>

#include "dq/digest.hpp"

namespace dq {

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

const char* column_type_name(ColumnType t) {
    switch (t) {
        case ColumnType::String: return "string";
        case ColumnType::Integer: return "integer";
        case ColumnType::Decimal: return "decimal";
        case ColumnType::Date: return "date";
        case ColumnType::Boolean: return "boolean";
    }
    return "string";
}

std::optional<ColumnType> column_type_from_name(std::string_view name) {
    if (name == "string") return ColumnType::String;
    if (name == "integer") return ColumnType::Integer;
    if (name == "decimal") return ColumnType::Decimal;
    if (name == "date") return ColumnType::Date;
    if (name == "boolean") return ColumnType::Boolean;
    return std::nullopt;
}

namespace {

std::string double_to_text(double d) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), d);
    return std::string(buf, end);
}

bool is_iso_date(const std::string& s) {
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
    for (std::size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u})
        if (s[i] < '0' || s[i] > '9') return false;
    int month = (s[5] - '0') * 10 + (s[6] - '0');
    int day = (s[8] - '0') * 10 + (s[9] - '0');
    return month >= 1 && month <= 12 && day >= 1 && day <= 31;
}

}  // namespace

std::string render_value(const Value& v) {
    struct R {
        std::string operator()(std::monostate) const { return "NULL"; }
        std::string operator()(bool b) const { return b ? "true" : "false"; }
        std::string operator()(std::int64_t i) const { return std::to_string(i); }
        std::string operator()(double d) const { return double_to_text(d); }
        std::string operator()(const std::string& s) const { return "\"" + s + "\""; }
    };
    return std::visit(R{}, v);
}

std::string value_to_text(const Value& v) {
    struct R {
        std::string operator()(std::monostate) const { return ""; }
        std::string operator()(bool b) const { return b ? "true" : "false"; }
        std::string operator()(std::int64_t i) const { return std::to_string(i); }
        std::string operator()(double d) const { return double_to_text(d); }
        std::string operator()(const std::string& s) const { return s; }
    };
    return std::visit(R{}, v);
}

nlohmann::json value_to_json(const Value& v) {
    struct R {
        nlohmann::json operator()(std::monostate) const { return nullptr; }
        nlohmann::json operator()(bool b) const { return b; }
        nlohmann::json operator()(std::int64_t i) const { return i; }
        nlohmann::json operator()(double d) const { return d; }
        nlohmann::json operator()(const std::string& s) const { return s; }
    };
    return std::visit(R{}, v);
}

Value value_from_json(const nlohmann::json& j) {
    if (j.is_null()) return std::monostate{};
    if (j.is_boolean()) return j.get<bool>();
    if (j.is_number_integer()) return j.get<std::int64_t>();
    if (j.is_number_float()) return j.get<double>();
    if (j.is_string()) return j.get<std::string>();
    throw std::runtime_error("unsupported JSON value for a scalar: " + j.dump());
}

std::optional<Value> coerce_text(const std::string& text, ColumnType type) {
    switch (type) {
        case ColumnType::String:
            return Value(text);
        case ColumnType::Integer: {
            std::int64_t out = 0;
            const char* first = text.data();
            const char* last = text.data() + text.size();
            auto [ptr, ec] = std::from_chars(first, last, out);
            if (ec != std::errc() || ptr != last || text.empty()) return std::nullopt;
            return Value(out);
        }
        case ColumnType::Decimal: {
            if (text.empty()) return std::nullopt;
            std::size_t used = 0;
            double d = 0;
            try {
                d = std::stod(text, &used);
            } catch (const std::exception&) {
                return std::nullopt;
            }
            if (used != text.size()) return std::nullopt;
            return Value(d);
        }
        case ColumnType::Date:
            if (!is_iso_date(text)) return std::nullopt;
            return Value(text);
        case ColumnType::Boolean:
            if (text == "true") return Value(true);
            if (text == "false") return Value(false);
            return std::nullopt;
    }
    return std::nullopt;
}

bool json_matches_type(const nlohmann::json& j, ColumnType type) {
    if (j.is_null()) return true;
    switch (type) {
        case ColumnType::String: return j.is_string();
        case ColumnType::Integer: return j.is_number_integer();
        case ColumnType::Decimal: return j.is_number();
        case ColumnType::Date: return j.is_string() && is_iso_date(j.get<std::string>());
        case ColumnType::Boolean: return j.is_boolean();
    }
    return false;
}

std::string render_value_list(const std::vector<Value>& vs) {
    std::string out = "(";
    for (std::size_t i = 0; i < vs.size(); ++i) {
        if (i) out += ", ";
        out += render_value(vs[i]);
    }
    out += ")";
    return out;
}

}  // namespace dq
