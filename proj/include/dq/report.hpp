#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dq/evaluate.hpp"

namespace dq {

struct TableStat {
    std::string table;
    std::size_t rows = 0;
    std::size_t violations = 0;
    double rate = 0.0;  // violations / rows, 4 decimal places; 0 when rows == 0

    bool operator==(const TableStat&) const = default;
};

struct RuleStat {
    std::string rule_id;
    int template_no = 0;
    std::string table;  // the rule's target table
    std::size_t count = 0;

    bool operator==(const RuleStat&) const = default;
};

struct ViolationReport {
    std::vector<Violation> violations;  // evaluate_all order
    std::vector<DanglingRow> dangling;
    std::vector<SkippedRule> skipped;
    std::vector<RuleStat> by_rule;          // every evaluated rule, rule id order
    std::map<int, std::size_t> by_template;  // templates 1..5, always present
    std::vector<TableStat> by_table;        // every snapshot table, name order
    std::size_t rows_scanned = 0;
    std::size_t events_scanned = 0;

    bool operator==(const ViolationReport&) const = default;
};

ViolationReport aggregate(const EvaluationResult& result, const RuleSet& rules,
                          const std::map<std::string, std::size_t>& snapshot_sizes,
                          std::size_t event_count);

// Fixed-width stats table followed by one line per finding.
std::string emit_text(const ViolationReport& report);

std::string emit_json(const ViolationReport& report);
ViolationReport parse_report(const std::string& text);

}  // namespace dq
