#include "dq/correspondence.hpp"

#include <algorithm>
#include <map>
#include <tuple>

#include "dq/json_util.hpp"

namespace dq {

const char* binding_kind_name(BindingKind k) {
    switch (k) {
        case BindingKind::Table: return "table";
        case BindingKind::Attribute: return "attribute";
        case BindingKind::Link: return "link";
        case BindingKind::Combined: return "combined";
    }
    return "attribute";
}

namespace {

std::optional<BindingKind> binding_kind_from_name(const std::string& name) {
    if (name == "table") return BindingKind::Table;
    if (name == "attribute") return BindingKind::Attribute;
    if (name == "link") return BindingKind::Link;
    if (name == "combined") return BindingKind::Combined;
    return std::nullopt;
}

LinkPath parse_path(const nlohmann::json& j, const std::string& identity_table,
                    const std::string& context) {
    if (!j.is_array() || j.empty())
        throw ParseError(context + ": a link path must be a non-empty array of hops");
    LinkPath path;
    for (const auto& hop : j) {
        require_keys(hop, {"table", "fk"}, context + " hop");
        LinkHop h;
        h.table = require_string(hop, "table", context + " hop");
        h.fk_columns = require_string_array(require_field(hop, "fk", context + " hop"), context);
        path.hops.push_back(std::move(h));
    }
    path.target_table = identity_table;
    return path;
}

nlohmann::json path_to_json(const LinkPath& path) {
    auto out = nlohmann::json::array();
    for (const auto& hop : path.hops)
        out.push_back({{"table", hop.table}, {"fk", hop.fk_columns}});
    return out;
}

AttributePart parse_attr_part(const nlohmann::json& j, const std::string& context) {
    require_keys(j, {"table", "attribute", "value"}, context);
    AttributePart part;
    part.table = require_string(j, "table", context);
    part.attribute = require_string(j, "attribute", context);
    part.value = value_from_json(require_field(j, "value", context));
    return part;
}

nlohmann::json attr_part_to_json(const AttributePart& part) {
    return {{"table", part.table}, {"attribute", part.attribute}, {"value", value_to_json(part.value)}};
}

}  // namespace

CorrespondenceMap parse_correspondence_syntax(const std::string& document) {
    auto j = parse_json_text(document);
    require_keys(j, {"object", "identity", "unbound", "bindings"}, "correspondence document");

    CorrespondenceMap map;
    map.object_name = require_string(j, "object", "correspondence document");

    const auto& identity = require_field(j, "identity", "correspondence document");
    require_keys(identity, {"table", "key"}, "identity");
    map.identity.table = require_string(identity, "table", "identity");
    map.identity.key_columns =
        require_string_array(require_field(identity, "key", "identity"), "identity key");

    if (j.contains("unbound")) {
        auto unbound = require_string_array(j["unbound"], "unbound");
        map.unbound_allowance.insert(unbound.begin(), unbound.end());
    }

    const auto& bindings = require_field(j, "bindings", "correspondence document");
    if (!bindings.is_array()) throw ParseError("bindings: expected an array");
    for (const auto& bj : bindings) {
        StateBinding b;
        std::string context = "binding";
        b.state = require_string(bj, "state", context);
        context = "binding for " + b.state;
        auto kind = binding_kind_from_name(require_string(bj, "kind", context));
        if (!kind) throw ParseError(context + ": unknown kind");
        b.kind = *kind;
        switch (b.kind) {
            case BindingKind::Table:
                require_keys(bj, {"state", "kind", "table"}, context);
                b.table_name = require_string(bj, "table", context);
                break;
            case BindingKind::Attribute:
                require_keys(bj, {"state", "kind", "table", "attribute", "value"}, context);
                b.attributes.push_back(parse_attr_part(
                    nlohmann::json{{"table", bj["table"]},
                                   {"attribute", bj["attribute"]},
                                   {"value", require_field(bj, "value", context)}},
                    context));
                break;
            case BindingKind::Link:
                require_keys(bj, {"state", "kind", "path"}, context);
                b.links.push_back(
                    parse_path(require_field(bj, "path", context), map.identity.table, context));
                break;
            case BindingKind::Combined: {
                require_keys(bj, {"state", "kind", "attrs", "links"}, context);
                if (bj.contains("attrs")) {
                    if (!bj["attrs"].is_array()) throw ParseError(context + ": attrs must be an array");
                    for (const auto& aj : bj["attrs"]) b.attributes.push_back(parse_attr_part(aj, context));
                }
                if (bj.contains("links")) {
                    if (!bj["links"].is_array()) throw ParseError(context + ": links must be an array");
                    for (const auto& pj : bj["links"])
                        b.links.push_back(parse_path(pj, map.identity.table, context));
                }
                if (b.attributes.empty() && b.links.empty())
                    throw ParseError(context + ": combined binding needs at least one part");
                break;
            }
        }
        map.bindings.push_back(std::move(b));
    }
    return map;
}

namespace {

// The unique foreign key from a table-binding's table into the identity
// table; nullopt when missing or ambiguous.
std::optional<LinkPath> table_binding_path(const DbSchema& schema, const std::string& table,
                                           const std::string& identity_table) {
    const Table* t = schema.find_table(table);
    if (!t) return std::nullopt;
    std::vector<const ForeignKey*> hits;
    for (const auto& fk : t->foreign_keys)
        if (fk.ref_table == identity_table) hits.push_back(&fk);
    if (hits.size() != 1) return std::nullopt;
    return LinkPath{{{table, hits[0]->columns, {}}}, identity_table};
}

void check_attr_part(const AttributePart& part, const DbSchema& schema, const IdentityRef& identity,
                     const StateId& state, std::vector<Diagnostic>& out) {
    std::string element = state + ": " + part.table + "." + part.attribute;
    if (part.table != identity.table) {
        out.push_back({"attribute-not-on-identity", element,
                       "attribute bindings must target the identity table " + identity.table});
        return;
    }
    const Table* t = schema.find_table(part.table);
    if (!t) {
        out.push_back({"unknown-table", element, "table does not exist"});
        return;
    }
    const Column* c = t->find_column(part.attribute);
    if (!c) {
        out.push_back({"unknown-attribute", element, "column does not exist"});
        return;
    }
    if (is_null(part.value)) {
        out.push_back({"null-binding-value", element, "binding values must be non-null"});
        return;
    }
    if (!json_matches_type(value_to_json(part.value), c->type))
        out.push_back({"value-type-mismatch", element,
                       "value " + render_value(part.value) + " does not fit column type " +
                           column_type_name(c->type)});
}

// Discriminating content of a binding, used to spot states that the data
// could never tell apart.
std::string binding_fingerprint(const StateBinding& b, const DbSchema& schema,
                                const IdentityRef& identity) {
    std::vector<std::string> parts;
    for (const auto& a : b.attributes)
        parts.push_back("a:" + a.table + "." + a.attribute + "=" + render_value(a.value));
    std::vector<LinkPath> links = b.links;
    if (b.kind == BindingKind::Table) {
        if (auto p = table_binding_path(schema, b.table_name, identity.table)) links.push_back(*p);
    }
    for (const auto& l : links) {
        std::string s = "l:";
        for (const auto& hop : l.hops) {
            s += hop.table + "(";
            for (const auto& c : hop.fk_columns) s += c + ",";
            s += ")>";
        }
        parts.push_back(s);
    }
    std::sort(parts.begin(), parts.end());
    std::string out;
    for (const auto& p : parts) out += p + "|";
    return out;
}

}  // namespace

std::vector<Diagnostic> validate_correspondence(const CorrespondenceMap& map, const DbSchema& schema,
                                                const OlcModel& olc) {
    std::vector<Diagnostic> out;

    const Table* identity = schema.find_table(map.identity.table);
    if (!identity) {
        out.push_back({"unknown-table", map.identity.table, "identity table does not exist"});
        return out;
    }
    if (map.identity.key_columns != identity->primary_key)
        out.push_back({"identity-key-mismatch", map.identity.table,
                       "identity key must equal the table's primary key"});

    for (const auto& s : map.unbound_allowance)
        if (!olc.has_state(s))
            out.push_back({"unknown-state", s, "unbound allowance names a state the OLC lacks"});

    // value -> first owning state, per (table, attribute)
    std::map<std::pair<std::string, std::string>, std::map<std::string, StateId>> attr_values;
    std::map<std::string, StateId> fingerprints;

    for (const auto& b : map.bindings) {
        std::string element = b.state + " (" + binding_kind_name(b.kind) + ")";
        if (!olc.has_state(b.state)) {
            out.push_back({"unknown-state", element, "binding names a state the OLC lacks"});
            continue;
        }

        for (const auto& part : b.attributes) check_attr_part(part, schema, map.identity, b.state, out);

        for (const auto& path : b.links) {
            std::string error;
            if (path.target_table != map.identity.table)
                out.push_back({"link-target-not-identity", element,
                               "link paths must end at the identity table"});
            else if (!link_path_resolves(schema, path, &error))
                out.push_back({"bad-link-path", element, error});
        }

        if (b.kind == BindingKind::Table) {
            if (!schema.find_table(b.table_name)) {
                out.push_back({"unknown-table", element, "table " + b.table_name + " does not exist"});
            } else if (b.table_name == map.identity.table) {
                out.push_back({"table-binding-on-identity", element,
                               "a table binding cannot use the identity table itself"});
            } else if (!table_binding_path(schema, b.table_name, map.identity.table)) {
                out.push_back({"no-unique-fk", element,
                               "table " + b.table_name + " needs exactly one foreign key into " +
                                   map.identity.table});
            }
        }

    }

    // One state demanding two different values of the same attribute is
    // contradictory, whether the parts sit in one binding or several.
    std::map<std::tuple<StateId, std::string, std::string>, Value> state_attr_values;
    for (const auto& b : map.bindings) {
        if (!olc.has_state(b.state)) continue;
        for (const auto& part : b.attributes) {
            auto key = std::make_tuple(b.state, part.table, part.attribute);
            auto [it, inserted] = state_attr_values.emplace(key, part.value);
            if (!inserted && !(it->second == part.value))
                out.push_back({"conflicting-attribute-parts",
                               b.state + ": " + part.table + "." + part.attribute,
                               "state binds the attribute to both " + render_value(it->second) +
                                   " and " + render_value(part.value)});
        }
    }

    // Cross-state checks only over bindings that resolved individually.
    for (const auto& b : map.bindings) {
        if (!olc.has_state(b.state)) continue;
        for (const auto& part : b.attributes) {
            if (part.table != map.identity.table) continue;
            auto key = std::make_pair(part.table, part.attribute);
            std::string rendered = render_value(part.value);
            auto [it, inserted] = attr_values[key].emplace(rendered, b.state);
            if (!inserted && it->second != b.state)
                out.push_back({"duplicate-attribute-value",
                               part.table + "." + part.attribute + "=" + rendered,
                               "value bound to both " + it->second + " and " + b.state});
        }
        auto fp = binding_fingerprint(b, schema, map.identity);
        auto [it, inserted] = fingerprints.emplace(fp, b.state);
        if (!inserted && it->second != b.state)
            out.push_back({"indistinguishable-states", b.state + " vs " + it->second,
                           "two states carry identical discriminating content"});
    }

    // Two states sharing a status attribute must never be held at once: a
    // single-valued column cannot witness multi-state residency. Residency
    // overlaps exactly on retained pairs.
    std::map<std::pair<std::string, std::string>, std::set<StateId>> attr_states;
    for (const auto& b : map.bindings)
        for (const auto& part : b.attributes)
            attr_states[{part.table, part.attribute}].insert(b.state);
    for (const auto& [attr, states] : attr_states) {
        for (const auto& [sj, si] : olc.retained) {
            if (states.count(sj) && states.count(si))
                out.push_back({"coexistent-states-share-attribute",
                               attr.first + "." + attr.second,
                               sj + " retains " + si + ", yet both bind this attribute"});
        }
    }

    std::set<StateId> bound;
    for (const auto& b : map.bindings) bound.insert(b.state);
    for (const auto& s : olc.states)
        if (!bound.count(s) && !map.unbound_allowance.count(s))
            out.push_back({"unbound-state", s, "state has no binding and no unbound allowance"});

    return out;
}

CorrespondenceMap parse_correspondence(const std::string& document, const DbSchema& schema,
                                       const OlcModel& olc) {
    CorrespondenceMap map = parse_correspondence_syntax(document);
    auto diagnostics = validate_correspondence(map, schema, olc);
    if (!diagnostics.empty()) throw ValidationError(std::move(diagnostics));
    return map;
}

std::string serialize_correspondence(const CorrespondenceMap& map) {
    nlohmann::json j;
    j["object"] = map.object_name;
    j["identity"] = {{"table", map.identity.table}, {"key", map.identity.key_columns}};
    if (!map.unbound_allowance.empty())
        j["unbound"] = std::vector<StateId>(map.unbound_allowance.begin(), map.unbound_allowance.end());
    auto bindings = nlohmann::json::array();
    for (const auto& b : map.bindings) {
        nlohmann::json bj;
        bj["state"] = b.state;
        bj["kind"] = binding_kind_name(b.kind);
        switch (b.kind) {
            case BindingKind::Table:
                bj["table"] = b.table_name;
                break;
            case BindingKind::Attribute:
                bj["table"] = b.attributes[0].table;
                bj["attribute"] = b.attributes[0].attribute;
                bj["value"] = value_to_json(b.attributes[0].value);
                break;
            case BindingKind::Link:
                bj["path"] = path_to_json(b.links[0]);
                break;
            case BindingKind::Combined: {
                auto attrs = nlohmann::json::array();
                for (const auto& a : b.attributes) attrs.push_back(attr_part_to_json(a));
                auto links = nlohmann::json::array();
                for (const auto& l : b.links) links.push_back(path_to_json(l));
                bj["attrs"] = attrs;
                bj["links"] = links;
                break;
            }
        }
        bindings.push_back(bj);
    }
    j["bindings"] = bindings;
    return j.dump(2) + "\n";
}

std::vector<AttributePart> attribute_parts_of(const CorrespondenceMap& map, const StateId& state) {
    std::vector<AttributePart> out;
    for (const auto& b : map.bindings)
        if (b.state == state)
            for (const auto& part : b.attributes) out.push_back(part);
    return out;
}

std::vector<LinkRef> link_refs_of(const CorrespondenceMap& map, const DbSchema& schema,
                                  const StateId& state) {
    std::vector<LinkRef> out;
    for (const auto& b : map.bindings) {
        if (b.state != state) continue;
        switch (b.kind) {
            case BindingKind::Attribute:
                break;
            case BindingKind::Link:
                out.push_back({b.links, {}});
                break;
            case BindingKind::Table: {
                auto path = table_binding_path(schema, b.table_name, map.identity.table);
                if (path) out.push_back({{*path}, {}});
                break;
            }
            case BindingKind::Combined:
                if (!b.links.empty()) out.push_back({b.links, b.attributes});
                break;
        }
    }
    return out;
}

}  // namespace dq
