#include "dq/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <sstream>

#include "dq/json_util.hpp"

namespace dq {

namespace {

double round4(double v) { return std::round(v * 10000.0) / 10000.0; }

std::string format_rate(double rate) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", rate);
    return buf;
}

std::string key_text(const KeyTuple& key) {
    std::string out = "(";
    for (std::size_t i = 0; i < key.size(); ++i) {
        if (i) out += ", ";
        out += render_value(key[i]);
    }
    return out + ")";
}

nlohmann::json key_to_json(const KeyTuple& key) {
    auto out = nlohmann::json::array();
    for (const auto& v : key) out.push_back(value_to_json(v));
    return out;
}

KeyTuple key_from_json(const nlohmann::json& j) {
    KeyTuple out;
    for (const auto& e : j) out.push_back(value_from_json(e));
    return out;
}

}  // namespace

ViolationReport aggregate(const EvaluationResult& result, const RuleSet& rules,
                          const std::map<std::string, std::size_t>& snapshot_sizes,
                          std::size_t event_count) {
    ViolationReport report;
    report.violations = result.violations;
    report.dangling = result.dangling;
    report.skipped = result.skipped;
    report.events_scanned = event_count;
    for (const auto& [_, n] : snapshot_sizes) report.rows_scanned += n;

    for (int t = 1; t <= 5; ++t) report.by_template[t] = 0;

    std::map<std::string, std::size_t> rule_counts;
    std::map<std::string, std::size_t> table_counts;
    for (const auto& v : report.violations) {
        rule_counts[v.rule_id] += 1;
        table_counts[v.table] += 1;
    }
    for (const auto& rule : rules.rules) {
        report.by_rule.push_back(
            {rule.id, rule.template_no(), rule_target_table(rule), rule_counts[rule.id]});
        report.by_template[rule.template_no()] += rule_counts[rule.id];
    }
    for (const auto& [table, rows] : snapshot_sizes) {
        TableStat stat;
        stat.table = table;
        stat.rows = rows;
        stat.violations = table_counts[table];
        // capped: several rules can flag one row
        stat.rate = rows == 0 ? 0.0 : std::min(1.0, round4(static_cast<double>(stat.violations) / rows));
        report.by_table.push_back(stat);
    }
    return report;
}

std::string emit_text(const ViolationReport& report) {
    std::ostringstream out;
    std::size_t total = report.violations.size();
    out << total << " violation" << (total == 1 ? "" : "s") << ", " << report.dangling.size()
        << " dangling row" << (report.dangling.size() == 1 ? "" : "s") << " (" << report.rows_scanned
        << " rows, " << report.events_scanned << " events scanned)\n";

    out << "\n" << std::left << std::setw(22) << "rule" << std::setw(10) << "template"
        << std::setw(12) << "table" << std::setw(8) << "count" << "\n";
    for (const auto& r : report.by_rule)
        out << std::left << std::setw(22) << r.rule_id << std::setw(10) << r.template_no
            << std::setw(12) << r.table << std::setw(8) << r.count << "\n";

    out << "\n" << std::left << std::setw(22) << "table" << std::setw(10) << "rows"
        << std::setw(12) << "violations" << std::setw(8) << "rate" << "\n";
    for (const auto& t : report.by_table)
        out << std::left << std::setw(22) << t.table << std::setw(10) << t.rows << std::setw(12)
            << t.violations << std::setw(8) << format_rate(t.rate) << "\n";

    if (!report.skipped.empty()) {
        out << "\nnot evaluated:\n";
        for (const auto& s : report.skipped) out << "  " << s.rule_id << ": " << s.reason << "\n";
    }
    if (!report.dangling.empty()) {
        out << "\nreferential integrity:\n";
        for (const auto& d : report.dangling)
            out << "  " << d.table << " " << key_text(d.key) << ": dangling " << d.fk_description
                << "\n";
    }
    if (!report.violations.empty()) {
        out << "\nviolations:\n";
        for (const auto& v : report.violations) {
            out << "  [" << v.rule_id << "] " << v.table << " " << key_text(v.key);
            if (v.event_seq) out << " seq " << *v.event_seq;
            out << ": expected " << v.expected << "; found " << v.found << "\n";
        }
    }
    return out.str();
}

std::string emit_json(const ViolationReport& report) {
    nlohmann::json j;
    j["totals"] = {{"violations", report.violations.size()},
                   {"dangling_rows", report.dangling.size()},
                   {"rows_scanned", report.rows_scanned},
                   {"events_scanned", report.events_scanned}};

    auto by_rule = nlohmann::json::array();
    for (const auto& r : report.by_rule)
        by_rule.push_back({{"rule_id", r.rule_id},
                           {"template", r.template_no},
                           {"table", r.table},
                           {"count", r.count}});
    j["by_rule"] = by_rule;

    auto by_template = nlohmann::json::array();
    for (const auto& [t, n] : report.by_template)
        by_template.push_back({{"template", t}, {"count", n}});
    j["by_template"] = by_template;

    auto by_table = nlohmann::json::array();
    for (const auto& t : report.by_table)
        by_table.push_back({{"table", t.table},
                            {"rows", t.rows},
                            {"violations", t.violations},
                            {"rate", format_rate(t.rate)}});
    j["by_table"] = by_table;

    auto violations = nlohmann::json::array();
    for (const auto& v : report.violations) {
        nlohmann::json vj = {{"rule_id", v.rule_id},
                             {"table", v.table},
                             {"key", key_to_json(v.key)},
                             {"expected", v.expected},
                             {"found", v.found}};
        if (v.event_seq) vj["event_seq"] = *v.event_seq;
        violations.push_back(vj);
    }
    j["violations"] = violations;

    auto dangling = nlohmann::json::array();
    for (const auto& d : report.dangling)
        dangling.push_back({{"table", d.table}, {"key", key_to_json(d.key)}, {"fk", d.fk_description}});
    j["referential"] = dangling;

    auto skipped = nlohmann::json::array();
    for (const auto& s : report.skipped)
        skipped.push_back({{"rule_id", s.rule_id}, {"reason", s.reason}});
    j["skipped"] = skipped;

    return j.dump(2) + "\n";
}

ViolationReport parse_report(const std::string& text) {
    auto j = parse_json_text(text);
    require_keys(j, {"totals", "by_rule", "by_template", "by_table", "violations", "referential",
                     "skipped"},
                 "report");
    ViolationReport report;
    const auto& totals = require_field(j, "totals", "report");
    report.rows_scanned = totals.value("rows_scanned", 0u);
    report.events_scanned = totals.value("events_scanned", 0u);

    for (const auto& rj : require_field(j, "by_rule", "report"))
        report.by_rule.push_back({rj.at("rule_id").get<std::string>(), rj.at("template").get<int>(),
                                  rj.at("table").get<std::string>(),
                                  rj.at("count").get<std::size_t>()});
    for (const auto& tj : require_field(j, "by_template", "report"))
        report.by_template[tj.at("template").get<int>()] = tj.at("count").get<std::size_t>();
    for (const auto& tj : require_field(j, "by_table", "report")) {
        TableStat stat;
        stat.table = tj.at("table").get<std::string>();
        stat.rows = tj.at("rows").get<std::size_t>();
        stat.violations = tj.at("violations").get<std::size_t>();
        stat.rate = std::stod(tj.at("rate").get<std::string>());
        report.by_table.push_back(stat);
    }
    for (const auto& vj : require_field(j, "violations", "report")) {
        Violation v;
        v.rule_id = vj.at("rule_id").get<std::string>();
        v.table = vj.at("table").get<std::string>();
        v.key = key_from_json(vj.at("key"));
        v.expected = vj.at("expected").get<std::string>();
        v.found = vj.at("found").get<std::string>();
        if (vj.contains("event_seq")) v.event_seq = vj.at("event_seq").get<std::int64_t>();
        report.violations.push_back(std::move(v));
    }
    for (const auto& dj : require_field(j, "referential", "report"))
        report.dangling.push_back({dj.at("table").get<std::string>(), key_from_json(dj.at("key")),
                                   dj.at("fk").get<std::string>()});
    for (const auto& sj : require_field(j, "skipped", "report"))
        report.skipped.push_back(
            {sj.at("rule_id").get<std::string>(), sj.at("reason").get<std::string>()});
    return report;
}

}  // namespace dq
