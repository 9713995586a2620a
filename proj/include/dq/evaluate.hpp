#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dq/data.hpp"
#include "dq/rules.hpp"

namespace dq {

struct Violation {
    std::string rule_id;
    std::string table;
    KeyTuple key;
    std::string expected;
    std::string found;
    std::optional<std::int64_t> event_seq;  // transition findings only

    bool operator==(const Violation&) const = default;
};

// Row whose foreign key does not resolve. Reported ahead of rule
// evaluation; the row is ignored by every rule check.
struct DanglingRow {
    std::string table;
    KeyTuple key;
    std::string fk_description;

    bool operator==(const DanglingRow&) const = default;
};

struct SkippedRule {
    std::string rule_id;
    std::string reason;

    bool operator==(const SkippedRule&) const = default;
};

struct EvalOptions {
    // When set, NULL status values violate Domain rules instead of being
    // read as "no state yet".
    bool strict_null = false;
};

struct EvaluationResult {
    std::vector<Violation> violations;  // ordered by (rule_id, table, key, event_seq)
    std::vector<DanglingRow> dangling;
    std::vector<SkippedRule> skipped;
};

// Referential precheck over every FK in the snapshot.
std::vector<DanglingRow> check_referential(const Snapshot& snapshot);

// Evaluate one rule. Transition rules need a changelog; pass nullptr to get
// a SkippedRule instead. Throws ConfigError when the rule references schema
// elements the snapshot does not carry.
EvaluationResult evaluate(const IntegrityRule& rule, const Snapshot& snapshot,
                          const ChangeLog* changelog, const EvalOptions& options = {});

EvaluationResult evaluate_all(const RuleSet& rules, const Snapshot& snapshot,
                              const ChangeLog* changelog, const EvalOptions& options = {});

}  // namespace dq
