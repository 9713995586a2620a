#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "dq/diagnostics.hpp"

namespace dq {

// Parse JSON text, rethrowing nlohmann's byte-offset error as a ParseError
// with a line/column computed from the source.
nlohmann::json parse_json_text(const std::string& text);

// Reject keys outside `allowed`; context names the object for the message.
void require_keys(const nlohmann::json& obj, const std::vector<std::string>& allowed,
                  const std::string& context);

const nlohmann::json& require_field(const nlohmann::json& obj, const std::string& key,
                                    const std::string& context);

std::string require_string(const nlohmann::json& obj, const std::string& key,
                           const std::string& context);

std::vector<std::string> require_string_array(const nlohmann::json& j, const std::string& context);

}  // namespace dq
