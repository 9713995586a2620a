#include "dq/evaluate.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace dq {

namespace {

std::string describe_key(const Table& table, const KeyTuple& key) {
    std::string out = "(";
    for (std::size_t i = 0; i < table.primary_key.size() && i < key.size(); ++i) {
        if (i) out += ", ";
        out += table.primary_key[i] + "=" + render_value(key[i]);
    }
    return out + ")";
}

std::string describe_link(const LinkRef& ref) {
    std::string out;
    for (const auto& path : ref.paths) {
        if (!out.empty()) out += " and ";
        for (std::size_t i = 0; i < path.hops.size(); ++i) out += path.hops[i].table + "->";
        out += path.target_table;
    }
    for (const auto& a : ref.attributes)
        out += " with " + a.attribute + "=" + render_value(a.value);
    return out;
}

// Row lookup structures over one snapshot, with dangling rows masked out.
class SnapshotIndex {
public:
    SnapshotIndex(const Snapshot& snapshot, const std::set<std::pair<std::string, std::size_t>>& excluded)
        : snapshot_(snapshot), excluded_(excluded) {}

    const Snapshot& snapshot() const { return snapshot_; }

    const Table* table_schema(const std::string& name) const {
        return snapshot_.schema.find_table(name);
    }

    bool row_excluded(const std::string& table, std::size_t row_idx) const {
        return excluded_.count({table, row_idx}) > 0;
    }

    // Rows of `table` whose `columns` tuple equals `values`.
    const std::vector<std::size_t>& rows_matching(const std::string& table,
                                                  const std::vector<std::string>& columns,
                                                  const KeyTuple& values) const {
        static const std::vector<std::size_t> empty;
        const auto& index = column_index(table, columns);
        auto it = index.find(values);
        return it == index.end() ? empty : it->second;
    }

    KeyTuple row_key(const std::string& table, std::size_t row_idx) const {
        const Table* t = table_schema(table);
        const TableData* data = snapshot_.find_table(table);
        KeyTuple key;
        for (const auto& k : t->primary_key)
            key.push_back(data->rows[row_idx].fields[t->column_index(k)]);
        return key;
    }

private:
    using TupleIndex = std::map<KeyTuple, std::vector<std::size_t>>;

    const TupleIndex& column_index(const std::string& table,
                                   const std::vector<std::string>& columns) const {
        auto cache_key = std::make_pair(table, columns);
        auto it = cache_.find(cache_key);
        if (it != cache_.end()) return it->second;

        TupleIndex index;
        const Table* t = table_schema(table);
        const TableData* data = snapshot_.find_table(table);
        if (t && data) {
            std::vector<int> cols;
            for (const auto& c : columns) cols.push_back(t->column_index(c));
            for (std::size_t r = 0; r < data->rows.size(); ++r) {
                if (row_excluded(table, r)) continue;
                KeyTuple tuple;
                bool has_null = false;
                for (int c : cols) {
                    const Value& v = data->rows[r].fields[c];
                    if (is_null(v)) has_null = true;
                    tuple.push_back(v);
                }
                if (!has_null) index[tuple].push_back(r);
            }
        }
        return cache_.emplace(std::move(cache_key), std::move(index)).first->second;
    }

    const Snapshot& snapshot_;
    const std::set<std::pair<std::string, std::size_t>>& excluded_;
    mutable std::map<std::pair<std::string, std::vector<std::string>>, TupleIndex> cache_;
};

// Does evidence of `ref` exist for the identity row with key `identity_key`?
// Every path must chain to the identity row and every attribute part must
// match on it.
bool link_evidence_exists(const SnapshotIndex& index, const LinkRef& ref,
                          const std::string& identity_table, const KeyTuple& identity_key,
                          const Row& identity_row) {
    const Table* identity = index.table_schema(identity_table);
    for (const auto& part : ref.attributes) {
        int col = identity->column_index(part.attribute);
        if (col < 0 || !(identity_row.fields[col] == part.value)) return false;
    }
    for (const auto& path : ref.paths) {
        // Walk the chain from the identity side outwards.
        std::set<KeyTuple> wanted{identity_key};
        for (std::size_t i = path.hops.size(); i-- > 0;) {
            const auto& hop = path.hops[i];
            std::set<KeyTuple> found;
            for (const auto& key : wanted)
                for (std::size_t r : index.rows_matching(hop.table, hop.fk_columns, key))
                    found.insert(index.row_key(hop.table, r));
            if (found.empty()) return false;
            wanted = std::move(found);
        }
    }
    return true;
}

void require_table_column(const DbSchema& schema, const std::string& table,
                          const std::string& column, const std::string& rule_id) {
    const Table* t = schema.find_table(table);
    if (!t)
        throw ConfigError("rule " + rule_id + " references table " + table +
                          " absent from the snapshot schema");
    if (!column.empty() && !t->find_column(column))
        throw ConfigError("rule " + rule_id + " references column " + table + "." + column +
                          " absent from the snapshot schema");
}

void require_link_ref(const DbSchema& schema, const LinkRef& ref, const std::string& rule_id) {
    for (const auto& path : ref.paths) {
        for (const auto& hop : path.hops) {
            require_table_column(schema, hop.table, "", rule_id);
            for (const auto& c : hop.fk_columns) require_table_column(schema, hop.table, c, rule_id);
        }
        require_table_column(schema, path.target_table, "", rule_id);
    }
    for (const auto& part : ref.attributes)
        require_table_column(schema, part.table, part.attribute, rule_id);
}

struct RuleEvaluator {
    const IntegrityRule& rule;
    const SnapshotIndex& index;
    const ChangeLog* changelog;
    const EvalOptions& options;
    EvaluationResult& result;

    void add(const std::string& table, KeyTuple key, std::string expected, std::string found,
             std::optional<std::int64_t> seq = std::nullopt) {
        result.violations.push_back(
            {rule.id, table, std::move(key), std::move(expected), std::move(found), seq});
    }

    void operator()(const DomainPayload& p) {
        require_table_column(index.snapshot().schema, p.table, p.attribute, rule.id);
        const Table* t = index.table_schema(p.table);
        const TableData* data = index.snapshot().find_table(p.table);
        int col = t->column_index(p.attribute);
        for (std::size_t r = 0; r < data->rows.size(); ++r) {
            if (index.row_excluded(p.table, r)) continue;
            const Value& v = data->rows[r].fields[col];
            if (is_null(v)) {
                if (options.strict_null)
                    add(p.table, index.row_key(p.table, r),
                        p.attribute + " ∈ " + render_value_list(p.allowed), p.attribute + " is NULL");
                continue;
            }
            if (std::find(p.allowed.begin(), p.allowed.end(), v) == p.allowed.end())
                add(p.table, index.row_key(p.table, r),
                    p.attribute + " ∈ " + render_value_list(p.allowed),
                    p.attribute + " = " + render_value(v));
        }
    }

    void operator()(const TransitionPayload& p) {
        require_table_column(index.snapshot().schema, p.table, p.attribute, rule.id);
        if (!changelog) {
            result.skipped.push_back({rule.id, "transition rules need a changelog"});
            return;
        }
        const Table* t = index.table_schema(p.table);
        for (const auto& ev : changelog->events) {
            if (ev.table != p.table || !ev.attribute || *ev.attribute != p.attribute) continue;
            KeyTuple key;
            for (const auto& k : t->primary_key) {
                auto it = ev.key.find(k);
                if (it == ev.key.end())
                    throw ConfigError("event seq " + std::to_string(ev.seq) +
                                      " misses primary key column " + p.table + "." + k);
                key.push_back(it->second);
            }

            if (ev.kind == ChangeKind::Insert) {
                if (is_null(ev.new_value)) continue;
                if (std::find(p.initial_values.begin(), p.initial_values.end(), ev.new_value) ==
                    p.initial_values.end())
                    add(p.table, key, "insert sets " + p.attribute + " ∈ " +
                            render_value_list(p.initial_values),
                        p.attribute + " = " + render_value(ev.new_value), ev.seq);
                continue;
            }
            if (ev.kind != ChangeKind::Update) continue;
            // A first assignment behaves like an insert; clearing the status
            // is not a transition; no-op updates never violate.
            if (is_null(ev.old_value)) {
                if (is_null(ev.new_value)) continue;
                if (std::find(p.initial_values.begin(), p.initial_values.end(), ev.new_value) ==
                    p.initial_values.end())
                    add(p.table, key, "first " + p.attribute + " value ∈ " +
                            render_value_list(p.initial_values),
                        p.attribute + " = " + render_value(ev.new_value), ev.seq);
                continue;
            }
            if (is_null(ev.new_value) || ev.old_value == ev.new_value) continue;
            auto pair = std::make_pair(ev.old_value, ev.new_value);
            if (std::find(p.allowed_pairs.begin(), p.allowed_pairs.end(), pair) ==
                p.allowed_pairs.end())
                add(p.table, key, "change of " + p.attribute + " follows the life cycle",
                    render_value(ev.old_value) + " → " + render_value(ev.new_value), ev.seq);
        }
    }

    void operator()(const StatusLinkPayload& p) {
        const std::string& table = p.attribute.table;
        require_table_column(index.snapshot().schema, table, p.attribute.attribute, rule.id);
        require_link_ref(index.snapshot().schema, p.link, rule.id);
        const Table* t = index.table_schema(table);
        const TableData* data = index.snapshot().find_table(table);
        int col = t->column_index(p.attribute.attribute);
        for (std::size_t r = 0; r < data->rows.size(); ++r) {
            if (index.row_excluded(table, r)) continue;
            const Value& v = data->rows[r].fields[col];
            KeyTuple key = index.row_key(table, r);
            bool linked = link_evidence_exists(index, p.link, table, key, data->rows[r]);
            if (v == p.attribute.value && !linked) {
                add(table, key, "∃ " + describe_link(p.link) + " row while " + p.attribute.attribute +
                        " = " + render_value(p.attribute.value),
                    "no such row");
                continue;
            }
            // Reverse direction: rows carrying the link evidence must hold an
            // in-domain status consistent with having reached `state`. Values
            // outside the bound domain are the Domain rule's finding.
            if (!linked || is_null(v)) continue;
            bool in_domain = std::find(p.attribute_domain.begin(), p.attribute_domain.end(), v) !=
                             p.attribute_domain.end();
            if (!in_domain) continue;
            if (std::find(p.reachable_values.begin(), p.reachable_values.end(), v) ==
                p.reachable_values.end())
                add(table, key, p.attribute.attribute + " ∈ " + render_value_list(p.reachable_values) +
                        " while " + describe_link(p.link) + " row exists",
                    p.attribute.attribute + " = " + render_value(v));
        }
    }

    void operator()(const LinkOrderPayload& p) {
        require_table_column(index.snapshot().schema, p.identity_table, "", rule.id);
        require_link_ref(index.snapshot().schema, p.earlier, rule.id);
        require_link_ref(index.snapshot().schema, p.later, rule.id);
        const TableData* data = index.snapshot().find_table(p.identity_table);
        for (std::size_t r = 0; r < data->rows.size(); ++r) {
            if (index.row_excluded(p.identity_table, r)) continue;
            KeyTuple key = index.row_key(p.identity_table, r);
            const Row& row = data->rows[r];
            if (link_evidence_exists(index, p.later, p.identity_table, key, row) &&
                !link_evidence_exists(index, p.earlier, p.identity_table, key, row))
                add(p.identity_table, key, "∃ " + describe_link(p.earlier) + " row before " +
                        describe_link(p.later) + " row",
                    "only the later row exists");
        }
    }

    void operator()(const ExclusivePayload& p) {
        require_table_column(index.snapshot().schema, p.identity_table, "", rule.id);
        require_link_ref(index.snapshot().schema, p.link_a, rule.id);
        require_link_ref(index.snapshot().schema, p.link_b, rule.id);
        const TableData* data = index.snapshot().find_table(p.identity_table);
        for (std::size_t r = 0; r < data->rows.size(); ++r) {
            if (index.row_excluded(p.identity_table, r)) continue;
            KeyTuple key = index.row_key(p.identity_table, r);
            const Row& row = data->rows[r];
            if (link_evidence_exists(index, p.link_a, p.identity_table, key, row) &&
                link_evidence_exists(index, p.link_b, p.identity_table, key, row))
                add(p.identity_table, key, "at most one of " + describe_link(p.link_a) + " / " +
                        describe_link(p.link_b),
                    "both rows exist");
        }
    }
};

bool violation_before(const Violation& a, const Violation& b) {
    if (a.rule_id != b.rule_id) return a.rule_id < b.rule_id;
    if (a.table != b.table) return a.table < b.table;
    if (a.key != b.key) return a.key < b.key;
    return a.event_seq.value_or(-1) < b.event_seq.value_or(-1);
}

std::set<std::pair<std::string, std::size_t>> excluded_rows(const Snapshot& snapshot,
                                                            const std::vector<DanglingRow>& dangling) {
    std::set<std::pair<std::string, std::size_t>> out;
    for (const auto& table : snapshot.schema.tables) {
        const TableData* data = snapshot.find_table(table.name);
        for (std::size_t r = 0; r < data->rows.size(); ++r) {
            KeyTuple key;
            for (const auto& k : table.primary_key)
                key.push_back(data->rows[r].fields[table.column_index(k)]);
            for (const auto& d : dangling)
                if (d.table == table.name && d.key == key) out.insert({table.name, r});
        }
    }
    return out;
}

EvaluationResult evaluate_impl(const IntegrityRule& rule, const ChangeLog* changelog,
                               const EvalOptions& options, const SnapshotIndex& index) {
    EvaluationResult result;
    RuleEvaluator ev{rule, index, changelog, options, result};
    std::visit(ev, rule.payload);
    std::sort(result.violations.begin(), result.violations.end(), violation_before);
    return result;
}

}  // namespace

std::vector<DanglingRow> check_referential(const Snapshot& snapshot) {
    std::vector<DanglingRow> out;
    for (const auto& table : snapshot.schema.tables) {
        const TableData* data = snapshot.find_table(table.name);
        if (!data) continue;
        for (const auto& fk : table.foreign_keys) {
            const Table* target = snapshot.schema.find_table(fk.ref_table);
            const TableData* target_data = snapshot.find_table(fk.ref_table);
            if (!target || !target_data) continue;

            std::set<KeyTuple> target_keys;
            for (const auto& row : target_data->rows) {
                KeyTuple key;
                for (const auto& k : target->primary_key)
                    key.push_back(row.fields[target->column_index(k)]);
                target_keys.insert(key);
            }
            std::vector<int> cols;
            for (const auto& c : fk.columns) cols.push_back(table.column_index(c));
            for (const auto& row : data->rows) {
                KeyTuple ref;
                bool has_null = false;
                for (int c : cols) {
                    if (is_null(row.fields[c])) has_null = true;
                    ref.push_back(row.fields[c]);
                }
                if (has_null || target_keys.count(ref)) continue;  // null FK = no reference
                KeyTuple key;
                for (const auto& k : table.primary_key)
                    key.push_back(row.fields[table.column_index(k)]);
                out.push_back({table.name, key,
                               table.name + " -> " + fk.ref_table + " " + describe_key(*target, ref)});
            }
        }
    }
    std::sort(out.begin(), out.end(), [](const DanglingRow& a, const DanglingRow& b) {
        if (a.table != b.table) return a.table < b.table;
        if (a.key != b.key) return a.key < b.key;
        return a.fk_description < b.fk_description;
    });
    return out;
}

EvaluationResult evaluate(const IntegrityRule& rule, const Snapshot& snapshot,
                          const ChangeLog* changelog, const EvalOptions& options) {
    auto dangling = check_referential(snapshot);
    auto excluded = excluded_rows(snapshot, dangling);
    SnapshotIndex index(snapshot, excluded);
    EvaluationResult result = evaluate_impl(rule, changelog, options, index);
    result.dangling = std::move(dangling);
    return result;
}

EvaluationResult evaluate_all(const RuleSet& rules, const Snapshot& snapshot,
                              const ChangeLog* changelog, const EvalOptions& options) {
    EvaluationResult result;
    result.dangling = check_referential(snapshot);
    auto excluded = excluded_rows(snapshot, result.dangling);
    SnapshotIndex index(snapshot, excluded);
    for (const auto& rule : rules.rules) {
        EvaluationResult one = evaluate_impl(rule, changelog, options, index);
        result.violations.insert(result.violations.end(), one.violations.begin(),
                                 one.violations.end());
        result.skipped.insert(result.skipped.end(), one.skipped.begin(), one.skipped.end());
    }
    std::sort(result.violations.begin(), result.violations.end(), violation_before);
    return result;
}

}  // namespace dq
