#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dq/correspondence.hpp"
#include "dq/data.hpp"
#include "dq/rules.hpp"

namespace dq {

// Ground truth for one planted corruption, shaped to compare 1:1 against
// the Violation the analyzer must report.
struct InjectedViolation {
    std::string klass;  // domain | transition | status_link | link_order | exclusive
    std::string rule_id;
    std::string table;
    KeyTuple key;
    std::optional<std::int64_t> event_seq;

    bool operator==(const InjectedViolation&) const = default;
};

struct GenOptions {
    std::uint64_t seed = 1;
    std::size_t count = 100;                     // objects to generate
    std::map<std::string, std::size_t> inject;   // class -> corruption count
};

struct GeneratedData {
    Snapshot snapshot;
    ChangeLog changelog;
    std::vector<InjectedViolation> manifest;
};

// Faithful random walks over the life cycle: each object starts in a random
// initial state, takes transition-graph edges, sets bound attribute values
// and creates bound link rows on state entry. Without injections the output
// violates no derived rule. Deterministic for a fixed seed.
//
// Injections corrupt disjoint objects, one corruption each, crafted so each
// shows up as exactly one violation of its own template class. Throws
// ConfigError when the clean population cannot support the requested counts.
GeneratedData generate(const OlcModel& olc, const DbSchema& schema, const CorrespondenceMap& map,
                       const RuleSet& rules, const GenOptions& options);

std::string serialize_manifest(const std::vector<InjectedViolation>& manifest);
std::vector<InjectedViolation> parse_manifest(const std::string& text);

const std::vector<std::string>& injection_class_names();

}  // namespace dq
