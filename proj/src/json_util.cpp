#include "dq/json_util.hpp"

#include <sstream>

namespace dq {

std::string format_diagnostics(const std::vector<Diagnostic>& ds) {
    std::ostringstream out;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        if (i) out << "; ";
        out << ds[i].code << " (" << ds[i].element << "): " << ds[i].message;
    }
    return out.str();
}

std::string ParseError::position_prefix(int line, int column) {
    if (line <= 0) return "";
    std::ostringstream out;
    out << "line " << line;
    if (column > 0) out << ", column " << column;
    out << ": ";
    return out.str();
}

namespace {

// nlohmann reports a byte offset; translate it to line/column for messages.
std::pair<int, int> offset_to_position(const std::string& text, std::size_t byte) {
    int line = 1, col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

}  // namespace

nlohmann::json parse_json_text(const std::string& text) {
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        auto [line, col] = offset_to_position(text, e.byte > 0 ? e.byte - 1 : 0);
        throw ParseError(e.what(), line, col);
    }
}

void require_keys(const nlohmann::json& obj, const std::vector<std::string>& allowed,
                  const std::string& context) {
    if (!obj.is_object()) throw ParseError(context + ": expected a JSON object");
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const auto& k : allowed)
            if (it.key() == k) {
                known = true;
                break;
            }
        if (!known) throw ParseError(context + ": unknown key \"" + it.key() + "\"");
    }
}

const nlohmann::json& require_field(const nlohmann::json& obj, const std::string& key,
                                    const std::string& context) {
    auto it = obj.find(key);
    if (it == obj.end()) throw ParseError(context + ": missing required key \"" + key + "\"");
    return *it;
}

std::string require_string(const nlohmann::json& obj, const std::string& key,
                           const std::string& context) {
    const auto& j = require_field(obj, key, context);
    if (!j.is_string() || j.get<std::string>().empty())
        throw ParseError(context + ": \"" + key + "\" must be a non-empty string");
    return j.get<std::string>();
}

std::vector<std::string> require_string_array(const nlohmann::json& j, const std::string& context) {
    if (!j.is_array()) throw ParseError(context + ": expected an array of strings");
    std::vector<std::string> out;
    for (const auto& e : j) {
        if (!e.is_string() || e.get<std::string>().empty())
            throw ParseError(context + ": array entries must be non-empty strings");
        out.push_back(e.get<std::string>());
    }
    return out;
}

}  // namespace dq
