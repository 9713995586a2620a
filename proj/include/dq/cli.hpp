#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <set>
#include <string>

namespace dq {

// Exit codes shared by every subcommand: 0 clean, 1 findings, 2 operational
// failure (unreadable input, syntax error, I/O).
inline constexpr int exit_clean = 0;
inline constexpr int exit_findings = 1;
inline constexpr int exit_failure = 2;

struct RunConfig {
    std::string olc_path;
    std::string schema_path;
    std::string map_path;
    std::string rules_path;
    std::string data_dir;
    std::string log_path;
    std::string manifest_path;       // gen: defaults to <data_dir>/manifest.json
    std::string format = "text";     // text | json
    std::string schema_kind = "auto";  // auto | json | ddl
    bool strict_null = false;
    std::set<std::string> allow_missing;
    int max_hops = 3;
    std::uint64_t seed = 1;
    std::size_t count = 100;
    std::map<std::string, std::size_t> inject;
};

int cmd_check_model(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_derive(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_validate(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_gen(const RunConfig& config, std::ostream& out, std::ostream& err);

// "transition=3,domain=2" -> {{"transition",3},{"domain",2}}; throws
// ParseError on unknown class names or malformed counts.
std::map<std::string, std::size_t> parse_inject_spec(const std::string& spec);

}  // namespace dq
