#include "dq/generate.hpp"

#include <algorithm>
#include <ctime>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "dq/json_util.hpp"

namespace dq {

namespace {

constexpr double kStopProbability = 0.2;
constexpr std::int64_t kEpoch2025 = 1735689600;  // 2025-01-01T00:00:00Z

std::string timestamp_for_seq(std::int64_t seq) {
    std::time_t t = static_cast<std::time_t>(kEpoch2025 + seq);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// mt19937_64 output is pinned by the standard, so results are reproducible
// across platforms; std::uniform_int_distribution is not, hence the modulo.
struct Rng {
    std::mt19937_64 engine;

    explicit Rng(std::uint64_t seed) : engine(seed) {}
    std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : engine() % n; }
    bool chance(double p) {
        return below(1000000) < static_cast<std::uint64_t>(p * 1000000.0);
    }
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
    }
};

Value typed_counter_value(ColumnType type, std::int64_t n) {
    switch (type) {
        case ColumnType::Integer: return n;
        case ColumnType::String: return "k" + std::to_string(n);
        case ColumnType::Decimal: return static_cast<double>(n);
        case ColumnType::Boolean: return (n % 2) == 0;
        case ColumnType::Date: {
            std::tm tm{};
            std::time_t t = static_cast<std::time_t>(kEpoch2025 + n * 86400);
            gmtime_r(&t, &tm);
            char buf[16];
            std::strftime(buf, sizeof(buf), "%Y-%m-%d", &tm);
            return std::string(buf);
        }
    }
    return n;
}

Value filler_value(ColumnType type, Rng& rng) {
    switch (type) {
        case ColumnType::Integer: return static_cast<std::int64_t>(rng.below(100000));
        case ColumnType::String: return "v" + std::to_string(rng.below(100000));
        case ColumnType::Decimal: return static_cast<double>(rng.below(1000000)) / 100.0;
        case ColumnType::Boolean: return rng.below(2) == 0;
        case ColumnType::Date: {
            std::tm tm{};
            std::time_t t = static_cast<std::time_t>(kEpoch2025 - (1 + rng.below(365)) * 86400);
            gmtime_r(&t, &tm);
            char buf[16];
            std::strftime(buf, sizeof(buf), "%Y-%m-%d", &tm);
            return std::string(buf);
        }
    }
    return std::monostate{};
}

struct RowRef {
    std::string table;
    std::size_t index;

    auto operator<=>(const RowRef&) const = default;
};

struct ObjectInfo {
    KeyTuple key;
    std::size_t identity_row = 0;
    StateId final_state;
    std::set<StateId> visited;
    // First-hop evidence rows created for this object, per state.
    std::map<StateId, std::vector<RowRef>> evidence;
};

class Generator {
public:
    Generator(const OlcModel& olc, const DbSchema& schema, const CorrespondenceMap& map,
              const RuleSet& rules, const GenOptions& options)
        : olc_(olc), schema_(schema), map_(map), rules_(rules), options_(options),
          graph_(transition_graph(olc)), exclusives_(exclusive_pairs(olc, graph_)),
          rng_(options.seed) {
        snapshot_.schema = schema_;
        for (const auto& t : schema_.tables) snapshot_.tables.push_back({t.name, {}});
        for (const auto& b : map_.bindings)
            for (const auto& part : b.attributes) status_columns_.insert({part.table, part.attribute});
        identity_ = schema_.find_table(map_.identity.table);
        if (!identity_) throw ConfigError("identity table missing from schema");
    }

    GeneratedData run() {
        if (olc_.initial.empty())
            throw ConfigError("generation needs at least one initial state");
        for (std::size_t i = 0; i < options_.count; ++i) walk_object(i);
        inject_all();

        GeneratedData out;
        out.snapshot.schema = schema_;
        for (std::size_t t = 0; t < snapshot_.tables.size(); ++t) {
            TableData filtered{snapshot_.tables[t].name, {}};
            for (std::size_t r = 0; r < snapshot_.tables[t].rows.size(); ++r)
                if (!deleted_.count({snapshot_.tables[t].name, r}))
                    filtered.rows.push_back(snapshot_.tables[t].rows[r]);
            out.snapshot.tables.push_back(std::move(filtered));
        }
        out.changelog = std::move(log_);
        out.manifest = std::move(manifest_);
        std::sort(out.manifest.begin(), out.manifest.end(),
                  [](const InjectedViolation& a, const InjectedViolation& b) {
                      if (a.rule_id != b.rule_id) return a.rule_id < b.rule_id;
                      if (a.table != b.table) return a.table < b.table;
                      if (a.key != b.key) return a.key < b.key;
                      return a.event_seq.value_or(-1) < b.event_seq.value_or(-1);
                  });
        return out;
    }

private:
    // --- table plumbing -----------------------------------------------------

    TableData& table_data(const std::string& name) {
        for (auto& t : snapshot_.tables)
            if (t.name == name) return t;
        throw ConfigError("unknown table " + name);
    }

    KeyTuple row_key(const std::string& table_name, std::size_t row) {
        const Table* t = schema_.find_table(table_name);
        KeyTuple key;
        for (const auto& k : t->primary_key)
            key.push_back(table_data(table_name).rows[row].fields[t->column_index(k)]);
        return key;
    }

    Value& field(const std::string& table_name, std::size_t row, const std::string& column) {
        const Table* t = schema_.find_table(table_name);
        return table_data(table_name).rows[row].fields[t->column_index(column)];
    }

    int find_row(const std::string& table_name, const std::vector<std::string>& columns,
                 const KeyTuple& values) {
        const Table* t = schema_.find_table(table_name);
        std::vector<int> cols;
        for (const auto& c : columns) cols.push_back(t->column_index(c));
        const auto& rows = table_data(table_name).rows;
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (deleted_.count({table_name, r})) continue;
            bool match = true;
            for (std::size_t i = 0; i < cols.size(); ++i)
                if (!(rows[r].fields[cols[i]] == values[i])) match = false;
            if (match) return static_cast<int>(r);
        }
        return -1;
    }

    // New row with synthetic primary key; `given` pre-sets columns, filler
    // fills the rest except status columns (those start NULL).
    std::size_t add_row(const std::string& table_name, const std::map<std::string, Value>& given,
                        bool with_filler, bool emit_insert) {
        const Table* t = schema_.find_table(table_name);
        Row row;
        std::int64_t counter = ++pk_counter_[table_name];
        for (const auto& col : t->columns) {
            auto it = given.find(col.name);
            if (it != given.end()) {
                row.fields.push_back(it->second);
                continue;
            }
            bool is_pk = std::find(t->primary_key.begin(), t->primary_key.end(), col.name) !=
                         t->primary_key.end();
            if (is_pk) {
                row.fields.push_back(typed_counter_value(col.type, counter));
                continue;
            }
            bool is_status = status_columns_.count({table_name, col.name}) > 0;
            bool is_fk = false;
            for (const auto& fk : t->foreign_keys)
                if (std::find(fk.columns.begin(), fk.columns.end(), col.name) != fk.columns.end())
                    is_fk = true;
            if (is_status || is_fk || !with_filler) {
                row.fields.emplace_back(std::monostate{});
            } else {
                row.fields.push_back(filler_value(col.type, rng_));
            }
        }
        table_data(table_name).rows.push_back(row);
        std::size_t index = table_data(table_name).rows.size() - 1;
        if (emit_insert) {
            ChangeEvent ev;
            ev.seq = next_seq_++;
            ev.timestamp = timestamp_for_seq(ev.seq);
            ev.table = table_name;
            for (const auto& k : t->primary_key)
                ev.key[k] = table_data(table_name).rows[index].fields[t->column_index(k)];
            ev.kind = ChangeKind::Insert;
            log_.events.push_back(std::move(ev));
        }
        return index;
    }

    void emit_update(const std::string& table_name, const KeyTuple& key, const std::string& attribute,
                     const Value& old_value, const Value& new_value) {
        const Table* t = schema_.find_table(table_name);
        ChangeEvent ev;
        ev.seq = next_seq_++;
        ev.timestamp = timestamp_for_seq(ev.seq);
        ev.table = table_name;
        for (std::size_t i = 0; i < t->primary_key.size(); ++i) ev.key[t->primary_key[i]] = key[i];
        ev.kind = ChangeKind::Update;
        ev.attribute = attribute;
        ev.old_value = old_value;
        ev.new_value = new_value;
        log_.events.push_back(std::move(ev));
    }

    // --- walks ---------------------------------------------------------------

    // Build or reuse the FK chain realizing `path` for this object; returns
    // the first-hop row. Rows are created from the identity outwards.
    RowRef ensure_chain(const LinkPath& path, const KeyTuple& identity_key) {
        KeyTuple wanted = identity_key;
        RowRef first_hop{};
        for (std::size_t i = path.hops.size(); i-- > 0;) {
            const auto& hop = path.hops[i];
            int existing = find_row(hop.table, hop.fk_columns, wanted);
            std::size_t row;
            if (existing >= 0) {
                row = static_cast<std::size_t>(existing);
            } else {
                std::map<std::string, Value> given;
                for (std::size_t c = 0; c < hop.fk_columns.size(); ++c)
                    given[hop.fk_columns[c]] = wanted[c];
                row = add_row(hop.table, given, true, true);
            }
            wanted = row_key(hop.table, row);
            if (i == 0) first_hop = {hop.table, row};
        }
        return first_hop;
    }

    void enter_state(ObjectInfo& obj, const StateId& state) {
        obj.visited.insert(state);
        for (const auto& part : attribute_parts_of(map_, state)) {
            Value& cell = field(part.table, obj.identity_row, part.attribute);
            if (cell == part.value) continue;
            Value old = cell;
            cell = part.value;
            emit_update(part.table, obj.key, part.attribute, old, part.value);
        }
        auto& evidence = obj.evidence[state];
        for (const auto& ref : link_refs_of(map_, schema_, state)) {
            for (const auto& path : ref.paths) {
                RowRef first = ensure_chain(path, obj.key);
                if (std::find(evidence.begin(), evidence.end(), first) == evidence.end())
                    evidence.push_back(first);
            }
        }
    }

    // States excluded because an exclusive partner was already visited.
    bool may_enter(const ObjectInfo& obj, const StateId& target) const {
        for (const auto& [a, b] : exclusives_) {
            if (a == target && obj.visited.count(b)) return false;
            if (b == target && obj.visited.count(a)) return false;
        }
        return true;
    }

    void walk_object(std::size_t) {
        std::vector<StateId> initials(olc_.initial.begin(), olc_.initial.end());
        StateId current = initials[rng_.below(initials.size())];

        ObjectInfo obj;
        obj.identity_row = add_row(identity_->name, {}, true, true);
        obj.key = row_key(identity_->name, obj.identity_row);
        enter_state(obj, current);

        while (true) {
            if (rng_.chance(kStopProbability)) break;
            std::vector<const Edge*> out;
            for (const auto& e : graph_.edges)
                if (e.from == current && may_enter(obj, e.to)) out.push_back(&e);
            if (out.empty()) break;
            current = out[rng_.below(out.size())]->to;
            enter_state(obj, current);
        }
        obj.final_state = current;
        objects_.push_back(std::move(obj));
    }

    // --- injections -----------------------------------------------------------

    std::vector<const IntegrityRule*> rules_of(RuleVariant variant) const {
        std::vector<const IntegrityRule*> out;
        for (const auto& r : rules_.rules)
            if (r.variant == variant) out.push_back(&r);
        return out;
    }

    // True when some live row outside `about_to_delete` references `target`.
    bool row_referenced(const RowRef& target, const std::vector<RowRef>& about_to_delete) {
        KeyTuple key = row_key(target.table, target.index);
        for (const auto& t : schema_.tables) {
            for (const auto& fk : t.foreign_keys) {
                if (fk.ref_table != target.table) continue;
                const auto& rows = table_data(t.name).rows;
                for (std::size_t r = 0; r < rows.size(); ++r) {
                    RowRef ref{t.name, r};
                    if (deleted_.count({t.name, r})) continue;
                    if (std::find(about_to_delete.begin(), about_to_delete.end(), ref) !=
                        about_to_delete.end())
                        continue;
                    KeyTuple fkv;
                    bool has_null = false;
                    for (const auto& c : fk.columns) {
                        const Value& v = rows[r].fields[schema_.find_table(t.name)->column_index(c)];
                        if (is_null(v)) has_null = true;
                        fkv.push_back(v);
                    }
                    if (!has_null && fkv == key) return true;
                }
            }
        }
        return false;
    }

    const Value* current_status(const ObjectInfo& obj, const AttributePart& attr) {
        return &table_data(attr.table).rows[obj.identity_row].fields[schema_.find_table(attr.table)
                                                                          ->column_index(attr.attribute)];
    }

    // Link-bound states whose StatusLink rules reference `state`, used to
    // decide which status attributes an exclusive injection must clear.
    std::vector<const IntegrityRule*> status_link_rules_of_state(const StateId& state) const {
        std::vector<const IntegrityRule*> out;
        for (const auto& r : rules_.rules)
            if (r.variant == RuleVariant::StatusLink &&
                std::get<StatusLinkPayload>(r.payload).state == state)
                out.push_back(&r);
        return out;
    }

    // Deleting `state`'s evidence must surface only the intended finding:
    // no link-order rule other than `exempt_rule` may start firing, and no
    // live row may dangle. Walks never co-visit exclusive states, so
    // deletions cannot complete an exclusive pair.
    bool deletion_is_isolated(const ObjectInfo& obj, const StateId& state,
                              const std::string& exempt_rule = {}) {
        for (const auto* r : rules_of(RuleVariant::LinkOrder)) {
            const auto& p = std::get<LinkOrderPayload>(r->payload);
            if (r->id != exempt_rule && p.earlier_state == state && obj.visited.count(p.later_state))
                return false;
        }
        auto it = obj.evidence.find(state);
        if (it == obj.evidence.end() || it->second.empty()) return false;
        for (const auto& row : it->second)
            if (row_referenced(row, it->second)) return false;
        return true;
    }

    void delete_evidence(ObjectInfo& obj, const StateId& state) {
        for (const auto& row : obj.evidence.at(state)) deleted_.insert({row.table, row.index});
    }

    // True when some rule's link evidence tests this attribute; corrupting
    // such a column would retract evidence and fire link-family rules too.
    bool attribute_used_in_evidence(const std::string& table, const std::string& attribute) const {
        auto ref_uses = [&](const LinkRef& ref) {
            for (const auto& part : ref.attributes)
                if (part.table == table && part.attribute == attribute) return true;
            return false;
        };
        for (const auto& r : rules_.rules) {
            if (const auto* sl = std::get_if<StatusLinkPayload>(&r.payload)) {
                if (ref_uses(sl->link)) return true;
            } else if (const auto* lo = std::get_if<LinkOrderPayload>(&r.payload)) {
                if (ref_uses(lo->earlier) || ref_uses(lo->later)) return true;
            } else if (const auto* ex = std::get_if<ExclusivePayload>(&r.payload)) {
                if (ref_uses(ex->link_a) || ref_uses(ex->link_b)) return true;
            }
        }
        return false;
    }

    bool inject_domain(ObjectInfo& obj) {
        for (const auto* r : rules_of(RuleVariant::Domain)) {
            const auto& p = std::get<DomainPayload>(r->payload);
            if (p.table != identity_->name) continue;
            if (attribute_used_in_evidence(p.table, p.attribute)) continue;
            const Column* col = identity_->find_column(p.attribute);
            Value& cell = field(p.table, obj.identity_row, p.attribute);
            if (is_null(cell)) continue;
            Value corrupt;
            std::int64_t salt = static_cast<std::int64_t>(++corrupt_counter_);
            switch (col->type) {
                case ColumnType::String: corrupt = "__invalid_" + std::to_string(salt); break;
                case ColumnType::Integer: corrupt = -1000000 - salt; break;
                case ColumnType::Decimal: corrupt = -1000000.5 - static_cast<double>(salt); break;
                case ColumnType::Date: corrupt = std::string("1890-01-01"); break;
                case ColumnType::Boolean: continue;  // cannot leave a two-value domain safely
            }
            if (std::find(p.allowed.begin(), p.allowed.end(), corrupt) != p.allowed.end()) continue;
            cell = corrupt;
            manifest_.push_back({"domain", r->id, p.table, obj.key, std::nullopt});
            return true;
        }
        return false;
    }

    bool inject_transition(ObjectInfo& obj) {
        for (const auto* r : rules_of(RuleVariant::Transition)) {
            const auto& p = std::get<TransitionPayload>(r->payload);
            // Enumerate in-domain non-self pairs outside the allowed set.
            std::vector<std::pair<Value, Value>> forbidden;
            std::vector<Value> domain;
            for (const auto* dr : rules_of(RuleVariant::Domain)) {
                const auto& dp = std::get<DomainPayload>(dr->payload);
                if (dp.table == p.table && dp.attribute == p.attribute) domain = dp.allowed;
            }
            for (const auto& oldv : domain)
                for (const auto& newv : domain) {
                    if (oldv == newv) continue;
                    if (std::find(p.allowed_pairs.begin(), p.allowed_pairs.end(),
                                  std::make_pair(oldv, newv)) == p.allowed_pairs.end())
                        forbidden.emplace_back(oldv, newv);
                }
            if (forbidden.empty()) continue;
            auto [oldv, newv] = forbidden[rng_.below(forbidden.size())];
            std::int64_t seq = next_seq_;
            emit_update(p.table, obj.key, p.attribute, oldv, newv);
            manifest_.push_back({"transition", r->id, p.table, obj.key, seq});
            return true;
        }
        return false;
    }

    bool inject_status_link(ObjectInfo& obj) {
        auto rules = status_link_rules_of_state(obj.final_state);
        if (rules.size() != 1) return false;  // several rules would all fire at once
        const auto& p = std::get<StatusLinkPayload>(rules[0]->payload);
        const Value* status = current_status(obj, p.attribute);
        if (!(*status == p.attribute.value)) return false;
        if (!deletion_is_isolated(obj, obj.final_state)) return false;
        delete_evidence(obj, obj.final_state);
        manifest_.push_back({"status_link", rules[0]->id, p.attribute.table, obj.key, std::nullopt});
        return true;
    }

    bool inject_link_order(ObjectInfo& obj) {
        for (const auto* r : rules_of(RuleVariant::LinkOrder)) {
            const auto& p = std::get<LinkOrderPayload>(r->payload);
            if (!obj.visited.count(p.later_state)) continue;
            if (!obj.visited.count(p.earlier_state)) continue;
            // The earlier state's own forward status-link rule must not fire
            // once its evidence disappears.
            bool forward_would_fire = false;
            for (const auto* sr : status_link_rules_of_state(p.earlier_state)) {
                const auto& sp = std::get<StatusLinkPayload>(sr->payload);
                if (*current_status(obj, sp.attribute) == sp.attribute.value)
                    forward_would_fire = true;
            }
            if (forward_would_fire) continue;
            if (!deletion_is_isolated(obj, p.earlier_state, r->id)) continue;
            delete_evidence(obj, p.earlier_state);
            manifest_.push_back({"link_order", r->id, p.identity_table, obj.key, std::nullopt});
            return true;
        }
        return false;
    }

    using AttrColumn = std::pair<std::string, std::string>;

    // Status attributes an exclusive fabrication of `missing` has to clear:
    // those its status-link rules judge, except the ones the fabricated
    // evidence itself pins to the state's own value.
    std::set<AttrColumn> attrs_cleared_for(const StateId& missing, const LinkRef& missing_ref) const {
        std::set<AttrColumn> cleared;
        for (const auto* sr : status_link_rules_of_state(missing)) {
            const auto& sp = std::get<StatusLinkPayload>(sr->payload);
            bool pinned = false;
            for (const auto& part : missing_ref.attributes)
                if (part.table == sp.attribute.table && part.attribute == sp.attribute.attribute)
                    pinned = true;
            if (!pinned) cleared.insert({sp.attribute.table, sp.attribute.attribute});
        }
        return cleared;
    }

    // Fabricate the missing side of an exclusive pair. Interior chain rows
    // must already exist; only first-hop rows are created. Status attributes
    // that would contradict the fabricated evidence are cleared.
    bool inject_exclusive(ObjectInfo& obj) {
        for (const auto* r : rules_of(RuleVariant::ExclusiveLink)) {
            const auto& p = std::get<ExclusivePayload>(r->payload);
            for (bool fabricate_b : {true, false}) {
                const StateId& held = fabricate_b ? p.state_a : p.state_b;
                const StateId& missing = fabricate_b ? p.state_b : p.state_a;
                const LinkRef& held_ref = fabricate_b ? p.link_a : p.link_b;
                const LinkRef& missing_ref = fabricate_b ? p.link_b : p.link_a;
                if (!obj.visited.count(held) || obj.visited.count(missing)) continue;
                if (!exclusive_fabrication_safe(obj, missing, missing_ref, held_ref, r->id))
                    continue;

                for (const auto& path : missing_ref.paths) fabricate_first_hop(obj, path);
                for (const auto& part : missing_ref.attributes)
                    field(part.table, obj.identity_row, part.attribute) = part.value;
                for (const auto& [table, attribute] : attrs_cleared_for(missing, missing_ref))
                    field(table, obj.identity_row, attribute) = std::monostate{};
                manifest_.push_back({"exclusive", r->id, p.identity_table, obj.key, std::nullopt});
                return true;
            }
        }
        return false;
    }

    bool exclusive_fabrication_safe(const ObjectInfo& obj, const StateId& missing,
                                    const LinkRef& missing_ref, const LinkRef& held_ref,
                                    const std::string& target_rule) {
        // Interior chains must pre-exist (fabricating them could satisfy
        // other states' evidence).
        for (const auto& path : missing_ref.paths) {
            KeyTuple wanted = obj.key;
            for (std::size_t i = path.hops.size(); i-- > 1;) {
                int row = find_row(path.hops[i].table, path.hops[i].fk_columns, wanted);
                if (row < 0) return false;
                wanted = row_key(path.hops[i].table, static_cast<std::size_t>(row));
            }
        }
        // Evidence of `missing` must not complete a second exclusive pair or
        // leave a later-without-earlier hole.
        for (const auto* r2 : rules_of(RuleVariant::ExclusiveLink)) {
            if (r2->id == target_rule) continue;
            const auto& p2 = std::get<ExclusivePayload>(r2->payload);
            if (p2.state_a == missing && obj.visited.count(p2.state_b)) return false;
            if (p2.state_b == missing && obj.visited.count(p2.state_a)) return false;
        }
        for (const auto* r2 : rules_of(RuleVariant::LinkOrder)) {
            const auto& p2 = std::get<LinkOrderPayload>(r2->payload);
            if (p2.later_state == missing && !obj.visited.count(p2.earlier_state)) return false;
        }
        // Clearing status attributes must not retract evidence other rules
        // rely on: neither the held side of this pair, nor the earlier side
        // of a link-order rule whose later evidence the object carries.
        auto cleared = attrs_cleared_for(missing, missing_ref);
        auto uses_cleared = [&](const LinkRef& ref) {
            for (const auto& part : ref.attributes)
                if (cleared.count({part.table, part.attribute})) return true;
            return false;
        };
        if (uses_cleared(held_ref)) return false;
        for (const auto* r2 : rules_of(RuleVariant::LinkOrder)) {
            const auto& p2 = std::get<LinkOrderPayload>(r2->payload);
            if (obj.visited.count(p2.later_state) && uses_cleared(p2.earlier)) return false;
        }
        return true;
    }

    void fabricate_first_hop(ObjectInfo& obj, const LinkPath& path) {
        KeyTuple wanted = obj.key;
        for (std::size_t i = path.hops.size(); i-- > 1;) {
            int row = find_row(path.hops[i].table, path.hops[i].fk_columns, wanted);
            wanted = row_key(path.hops[i].table, static_cast<std::size_t>(row));
        }
        std::map<std::string, Value> given;
        for (std::size_t c = 0; c < path.hops[0].fk_columns.size(); ++c)
            given[path.hops[0].fk_columns[c]] = wanted[c];
        add_row(path.hops[0].table, given, false, false);
    }

    void inject_all() {
        if (options_.inject.empty()) return;
        for (const auto& [klass, _] : options_.inject) {
            const auto& known = injection_class_names();
            if (std::find(known.begin(), known.end(), klass) == known.end())
                throw ConfigError("unknown injection class: " + klass);
        }
        std::set<std::size_t> used;
        // Structure-sensitive classes pick victims first.
        for (const std::string& klass :
             {std::string("status_link"), std::string("link_order"), std::string("exclusive"),
              std::string("transition"), std::string("domain")}) {
            auto it = options_.inject.find(klass);
            if (it == options_.inject.end() || it->second == 0) continue;
            std::size_t wanted = it->second;

            std::vector<std::size_t> candidates;
            for (std::size_t i = 0; i < objects_.size(); ++i)
                if (!used.count(i)) candidates.push_back(i);
            rng_.shuffle(candidates);

            std::size_t planted = 0;
            for (std::size_t idx : candidates) {
                if (planted == wanted) break;
                bool ok = false;
                if (klass == "domain") ok = inject_domain(objects_[idx]);
                else if (klass == "transition") ok = inject_transition(objects_[idx]);
                else if (klass == "status_link") ok = inject_status_link(objects_[idx]);
                else if (klass == "link_order") ok = inject_link_order(objects_[idx]);
                else if (klass == "exclusive") ok = inject_exclusive(objects_[idx]);
                if (ok) {
                    used.insert(idx);
                    ++planted;
                }
            }
            if (planted < wanted)
                throw ConfigError("cannot plant " + std::to_string(wanted) + " " + klass +
                                  " corruptions; only " + std::to_string(planted) +
                                  " eligible objects (generate more data)");
        }
    }

    const OlcModel& olc_;
    const DbSchema& schema_;
    const CorrespondenceMap& map_;
    const RuleSet& rules_;
    GenOptions options_;
    TransitionGraph graph_;
    std::set<StatePair> exclusives_;
    Rng rng_;

    Snapshot snapshot_;
    ChangeLog log_;
    std::vector<ObjectInfo> objects_;
    std::vector<InjectedViolation> manifest_;
    std::set<std::pair<std::string, std::size_t>> deleted_;
    std::map<std::string, std::int64_t> pk_counter_;
    std::set<std::pair<std::string, std::string>> status_columns_;
    const Table* identity_ = nullptr;
    std::int64_t next_seq_ = 1;
    std::uint64_t corrupt_counter_ = 0;
};

}  // namespace

GeneratedData generate(const OlcModel& olc, const DbSchema& schema, const CorrespondenceMap& map,
                       const RuleSet& rules, const GenOptions& options) {
    return Generator(olc, schema, map, rules, options).run();
}

const std::vector<std::string>& injection_class_names() {
    static const std::vector<std::string> names{"domain", "transition", "status_link", "link_order",
                                                "exclusive"};
    return names;
}

std::string serialize_manifest(const std::vector<InjectedViolation>& manifest) {
    nlohmann::json j;
    auto arr = nlohmann::json::array();
    for (const auto& m : manifest) {
        nlohmann::json mj;
        mj["class"] = m.klass;
        mj["rule_id"] = m.rule_id;
        mj["table"] = m.table;
        auto key = nlohmann::json::array();
        for (const auto& v : m.key) key.push_back(value_to_json(v));
        mj["key"] = key;
        if (m.event_seq) mj["event_seq"] = *m.event_seq;
        arr.push_back(mj);
    }
    j["injected"] = arr;
    return j.dump(2) + "\n";
}

std::vector<InjectedViolation> parse_manifest(const std::string& text) {
    auto j = parse_json_text(text);
    require_keys(j, {"injected"}, "manifest");
    std::vector<InjectedViolation> out;
    for (const auto& mj : require_field(j, "injected", "manifest")) {
        require_keys(mj, {"class", "rule_id", "table", "key", "event_seq"}, "manifest entry");
        InjectedViolation m;
        m.klass = require_string(mj, "class", "manifest entry");
        m.rule_id = require_string(mj, "rule_id", "manifest entry");
        m.table = require_string(mj, "table", "manifest entry");
        for (const auto& v : require_field(mj, "key", "manifest entry"))
            m.key.push_back(value_from_json(v));
        if (mj.contains("event_seq")) m.event_seq = mj["event_seq"].get<std::int64_t>();
        out.push_back(std::move(m));
    }
    return out;
}

}  // namespace dq
