#include "dq/rules.hpp"

#include <algorithm>
#include <cctype>
#include <ctime>
#include <deque>
#include <map>
#include <sstream>

#include "dq/digest.hpp"
#include "dq/io.hpp"
#include "dq/json_util.hpp"

namespace dq {

const char* rule_variant_name(RuleVariant v) {
    switch (v) {
        case RuleVariant::Domain: return "domain";
        case RuleVariant::Transition: return "transition";
        case RuleVariant::StatusLink: return "status_link";
        case RuleVariant::LinkOrder: return "link_order";
        case RuleVariant::ExclusiveLink: return "exclusive";
    }
    return "domain";
}

int rule_template_no(RuleVariant v) {
    switch (v) {
        case RuleVariant::Domain: return 1;
        case RuleVariant::Transition: return 2;
        case RuleVariant::StatusLink: return 3;
        case RuleVariant::LinkOrder: return 4;
        case RuleVariant::ExclusiveLink: return 5;
    }
    return 1;
}

const IntegrityRule* RuleSet::find(const std::string& id) const {
    for (const auto& r : rules)
        if (r.id == id) return &r;
    return nullptr;
}

namespace {

std::string alias_of(const std::string& table) {
    std::string out = table;
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

// Values in first-appearance order; derivation and rendering share it.
struct ValueOrder {
    std::vector<Value> values;

    void add(const Value& v) {
        if (std::find(values.begin(), values.end(), v) == values.end()) values.push_back(v);
    }
    int index(const Value& v) const {
        auto it = std::find(values.begin(), values.end(), v);
        return it == values.end() ? -1 : static_cast<int>(it - values.begin());
    }
};

using AttrKey = std::pair<std::string, std::string>;  // (table, attribute)

// Per status attribute: bound values in binding order and the state -> value map.
struct AttributeInfo {
    ValueOrder order;
    std::map<StateId, Value> value_of;
};

std::map<AttrKey, AttributeInfo> collect_attributes(const CorrespondenceMap& map) {
    std::map<AttrKey, AttributeInfo> out;
    for (const auto& b : map.bindings) {
        for (const auto& part : b.attributes) {
            auto& info = out[{part.table, part.attribute}];
            info.order.add(part.value);
            info.value_of.emplace(b.state, part.value);
        }
    }
    return out;
}

std::vector<AttrKey> attribute_keys_in_binding_order(const CorrespondenceMap& map) {
    std::vector<AttrKey> keys;
    for (const auto& b : map.bindings)
        for (const auto& part : b.attributes) {
            AttrKey k{part.table, part.attribute};
            if (std::find(keys.begin(), keys.end(), k) == keys.end()) keys.push_back(k);
        }
    return keys;
}

LinkRef resolve_link_ref(const DbSchema& schema, LinkRef ref) {
    for (auto& path : ref.paths) {
        for (std::size_t i = 0; i < path.hops.size(); ++i) {
            const std::string& next =
                i + 1 < path.hops.size() ? path.hops[i + 1].table : path.target_table;
            if (const Table* t = schema.find_table(next)) path.hops[i].ref_columns = t->primary_key;
        }
    }
    return ref;
}

nlohmann::json link_ref_to_json(const LinkRef& ref) {
    nlohmann::json j;
    auto paths = nlohmann::json::array();
    for (const auto& p : ref.paths) {
        auto hops = nlohmann::json::array();
        for (const auto& h : p.hops)
            hops.push_back({{"table", h.table}, {"fk", h.fk_columns}, {"ref", h.ref_columns}});
        paths.push_back({{"hops", hops}, {"target", p.target_table}});
    }
    j["paths"] = paths;
    auto attrs = nlohmann::json::array();
    for (const auto& a : ref.attributes)
        attrs.push_back(
            {{"table", a.table}, {"attribute", a.attribute}, {"value", value_to_json(a.value)}});
    j["attrs"] = attrs;
    return j;
}

LinkRef link_ref_from_json(const nlohmann::json& j) {
    require_keys(j, {"paths", "attrs"}, "link ref");
    LinkRef ref;
    for (const auto& pj : require_field(j, "paths", "link ref")) {
        require_keys(pj, {"hops", "target"}, "link path");
        LinkPath path;
        path.target_table = require_string(pj, "target", "link path");
        for (const auto& hj : require_field(pj, "hops", "link path")) {
            require_keys(hj, {"table", "fk", "ref"}, "link hop");
            LinkHop hop;
            hop.table = require_string(hj, "table", "link hop");
            hop.fk_columns = require_string_array(require_field(hj, "fk", "link hop"), "link hop fk");
            hop.ref_columns =
                require_string_array(require_field(hj, "ref", "link hop"), "link hop ref");
            path.hops.push_back(std::move(hop));
        }
        ref.paths.push_back(std::move(path));
    }
    for (const auto& aj : require_field(j, "attrs", "link ref")) {
        require_keys(aj, {"table", "attribute", "value"}, "link ref attr");
        AttributePart part;
        part.table = require_string(aj, "table", "link ref attr");
        part.attribute = require_string(aj, "attribute", "link ref attr");
        part.value = value_from_json(require_field(aj, "value", "link ref attr"));
        ref.attributes.push_back(std::move(part));
    }
    return ref;
}

nlohmann::json values_to_json(const std::vector<Value>& vs) {
    auto out = nlohmann::json::array();
    for (const auto& v : vs) out.push_back(value_to_json(v));
    return out;
}

std::vector<Value> values_from_json(const nlohmann::json& j, const std::string& context) {
    if (!j.is_array()) throw ParseError(context + ": expected an array of values");
    std::vector<Value> out;
    for (const auto& e : j) out.push_back(value_from_json(e));
    return out;
}

nlohmann::json payload_to_json(const IntegrityRule& rule) {
    struct V {
        nlohmann::json operator()(const DomainPayload& p) const {
            return {{"table", p.table}, {"attribute", p.attribute}, {"allowed", values_to_json(p.allowed)}};
        }
        nlohmann::json operator()(const TransitionPayload& p) const {
            auto pairs = nlohmann::json::array();
            for (const auto& [oldv, newv] : p.allowed_pairs)
                pairs.push_back({value_to_json(oldv), value_to_json(newv)});
            return {{"table", p.table},
                    {"attribute", p.attribute},
                    {"pairs", pairs},
                    {"initial", values_to_json(p.initial_values)}};
        }
        nlohmann::json operator()(const StatusLinkPayload& p) const {
            return {{"state", p.state},
                    {"table", p.attribute.table},
                    {"attribute", p.attribute.attribute},
                    {"value", value_to_json(p.attribute.value)},
                    {"link", link_ref_to_json(p.link)},
                    {"reachable", values_to_json(p.reachable_values)},
                    {"domain", values_to_json(p.attribute_domain)}};
        }
        nlohmann::json operator()(const LinkOrderPayload& p) const {
            return {{"earlier_state", p.earlier_state},
                    {"later_state", p.later_state},
                    {"earlier", link_ref_to_json(p.earlier)},
                    {"later", link_ref_to_json(p.later)},
                    {"identity_table", p.identity_table}};
        }
        nlohmann::json operator()(const ExclusivePayload& p) const {
            return {{"state_a", p.state_a},
                    {"state_b", p.state_b},
                    {"a", link_ref_to_json(p.link_a)},
                    {"b", link_ref_to_json(p.link_b)},
                    {"identity_table", p.identity_table}};
        }
    };
    return std::visit(V{}, rule.payload);
}

RulePayload payload_from_json(RuleVariant variant, const nlohmann::json& j) {
    switch (variant) {
        case RuleVariant::Domain: {
            require_keys(j, {"table", "attribute", "allowed"}, "domain payload");
            DomainPayload p;
            p.table = require_string(j, "table", "domain payload");
            p.attribute = require_string(j, "attribute", "domain payload");
            p.allowed = values_from_json(require_field(j, "allowed", "domain payload"), "allowed");
            return p;
        }
        case RuleVariant::Transition: {
            require_keys(j, {"table", "attribute", "pairs", "initial"}, "transition payload");
            TransitionPayload p;
            p.table = require_string(j, "table", "transition payload");
            p.attribute = require_string(j, "attribute", "transition payload");
            const auto& pairs = require_field(j, "pairs", "transition payload");
            if (!pairs.is_array()) throw ParseError("transition payload: pairs must be an array");
            for (const auto& pj : pairs) {
                if (!pj.is_array() || pj.size() != 2)
                    throw ParseError("transition payload: each pair is [old, new]");
                p.allowed_pairs.emplace_back(value_from_json(pj[0]), value_from_json(pj[1]));
            }
            p.initial_values =
                values_from_json(require_field(j, "initial", "transition payload"), "initial");
            return p;
        }
        case RuleVariant::StatusLink: {
            require_keys(j, {"state", "table", "attribute", "value", "link", "reachable", "domain"},
                         "status_link payload");
            StatusLinkPayload p;
            p.state = require_string(j, "state", "status_link payload");
            p.attribute.table = require_string(j, "table", "status_link payload");
            p.attribute.attribute = require_string(j, "attribute", "status_link payload");
            p.attribute.value = value_from_json(require_field(j, "value", "status_link payload"));
            p.link = link_ref_from_json(require_field(j, "link", "status_link payload"));
            p.reachable_values =
                values_from_json(require_field(j, "reachable", "status_link payload"), "reachable");
            p.attribute_domain =
                values_from_json(require_field(j, "domain", "status_link payload"), "domain");
            return p;
        }
        case RuleVariant::LinkOrder: {
            require_keys(j, {"earlier_state", "later_state", "earlier", "later", "identity_table"},
                         "link_order payload");
            LinkOrderPayload p;
            p.earlier_state = require_string(j, "earlier_state", "link_order payload");
            p.later_state = require_string(j, "later_state", "link_order payload");
            p.earlier = link_ref_from_json(require_field(j, "earlier", "link_order payload"));
            p.later = link_ref_from_json(require_field(j, "later", "link_order payload"));
            p.identity_table = require_string(j, "identity_table", "link_order payload");
            return p;
        }
        case RuleVariant::ExclusiveLink: {
            require_keys(j, {"state_a", "state_b", "a", "b", "identity_table"}, "exclusive payload");
            ExclusivePayload p;
            p.state_a = require_string(j, "state_a", "exclusive payload");
            p.state_b = require_string(j, "state_b", "exclusive payload");
            p.link_a = link_ref_from_json(require_field(j, "a", "exclusive payload"));
            p.link_b = link_ref_from_json(require_field(j, "b", "exclusive payload"));
            p.identity_table = require_string(j, "identity_table", "exclusive payload");
            return p;
        }
    }
    throw ParseError("unknown rule variant");
}

IntegrityRule finish_rule(RuleVariant variant, RulePayload payload) {
    IntegrityRule rule;
    rule.variant = variant;
    rule.payload = std::move(payload);
    std::string canonical =
        std::string(rule_variant_name(variant)) + ":" + payload_to_json(rule).dump();
    rule.id = "t" + std::to_string(rule_template_no(variant)) + "-" + digest_hex(canonical);
    return rule;
}

std::optional<RuleVariant> rule_variant_from_name(const std::string& name) {
    for (RuleVariant v : {RuleVariant::Domain, RuleVariant::Transition, RuleVariant::StatusLink,
                          RuleVariant::LinkOrder, RuleVariant::ExclusiveLink})
        if (name == rule_variant_name(v)) return v;
    return std::nullopt;
}

}  // namespace

std::vector<IntegrityRule> derive_domain_rules(const CorrespondenceMap& map) {
    auto attrs = collect_attributes(map);
    std::vector<IntegrityRule> out;
    for (const auto& key : attribute_keys_in_binding_order(map)) {
        DomainPayload p;
        p.table = key.first;
        p.attribute = key.second;
        p.allowed = attrs[key].order.values;
        out.push_back(finish_rule(RuleVariant::Domain, std::move(p)));
    }
    return out;
}

namespace {

// Values an attribute may take when an object first becomes visible on it:
// values of the first bound state on each path from an initial state,
// crossing only states that do not bind the attribute.
std::vector<Value> first_bound_values(const AttributeInfo& info, const TransitionGraph& graph,
                                      const std::set<StateId>& initials) {
    std::vector<Value> out;
    auto add = [&](const Value& v) {
        if (std::find(out.begin(), out.end(), v) == std::end(out)) out.push_back(v);
    };
    std::set<StateId> visited;
    std::deque<StateId> work;
    for (const auto& s : initials) {
        if (info.value_of.count(s)) {
            add(info.value_of.at(s));
        } else if (visited.insert(s).second) {
            work.push_back(s);
        }
    }
    while (!work.empty()) {
        StateId cur = work.front();
        work.pop_front();
        for (const auto& e : graph.edges) {
            if (e.from != cur) continue;
            if (info.value_of.count(e.to)) {
                add(info.value_of.at(e.to));
            } else if (visited.insert(e.to).second) {
                work.push_back(e.to);
            }
        }
    }
    // Keep the report order aligned with the binding order.
    std::vector<Value> ordered;
    for (const auto& v : info.order.values)
        if (std::find(out.begin(), out.end(), v) != out.end()) ordered.push_back(v);
    return ordered;
}

}  // namespace

std::vector<IntegrityRule> derive_transition_rules(const CorrespondenceMap& map,
                                                   const TransitionGraph& graph,
                                                   const std::set<StateId>& initials) {
    auto attrs = collect_attributes(map);
    std::vector<IntegrityRule> out;
    for (const auto& key : attribute_keys_in_binding_order(map)) {
        const auto& info = attrs[key];

        // (old, new) pairs over paths whose interior states do not bind this
        // attribute. With every state bound this is exactly the edge image.
        std::set<std::pair<int, int>> pair_indices;
        for (const auto& [from, from_value] : info.value_of) {
            std::set<StateId> visited;
            std::deque<StateId> work{from};
            while (!work.empty()) {
                StateId cur = work.front();
                work.pop_front();
                for (const auto& e : graph.edges) {
                    if (e.from != cur) continue;
                    auto it = info.value_of.find(e.to);
                    if (it != info.value_of.end()) {
                        pair_indices.insert(
                            {info.order.index(from_value), info.order.index(it->second)});
                    } else if (visited.insert(e.to).second) {
                        work.push_back(e.to);
                    }
                }
            }
        }

        TransitionPayload p;
        p.table = key.first;
        p.attribute = key.second;
        std::vector<std::pair<int, int>> sorted(pair_indices.begin(), pair_indices.end());
        std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
            return a.second != b.second ? a.second < b.second : a.first < b.first;
        });
        for (const auto& [oldi, newi] : sorted)
            p.allowed_pairs.emplace_back(info.order.values[oldi], info.order.values[newi]);
        p.initial_values = first_bound_values(info, graph, initials);
        out.push_back(finish_rule(RuleVariant::Transition, std::move(p)));
    }
    return out;
}

std::vector<IntegrityRule> derive_status_link_rules(const CorrespondenceMap& map,
                                                    const DbSchema& schema,
                                                    const TransitionGraph& graph) {
    auto attrs = collect_attributes(map);
    std::vector<IntegrityRule> out;
    for (const auto& state : graph.nodes) {
        auto parts = attribute_parts_of(map, state);
        auto links = link_refs_of(map, schema, state);
        if (parts.empty() || links.empty()) continue;
        auto reach = reachable(graph, state);
        for (const auto& part : parts) {
            const auto& info = attrs[{part.table, part.attribute}];
            std::vector<Value> reach_values{part.value};
            for (const auto& v : info.order.values) {
                for (const auto& [s, sv] : info.value_of)
                    if (sv == v && reach.count(s) &&
                        std::find(reach_values.begin(), reach_values.end(), v) == reach_values.end())
                        reach_values.push_back(v);
            }
            for (const auto& link : links) {
                StatusLinkPayload p;
                p.state = state;
                p.attribute = part;
                p.link = resolve_link_ref(schema, link);
                p.reachable_values = reach_values;
                p.attribute_domain = info.order.values;
                out.push_back(finish_rule(RuleVariant::StatusLink, std::move(p)));
            }
        }
    }
    return out;
}

std::vector<IntegrityRule> derive_link_order_rules(const CorrespondenceMap& map,
                                                   const DbSchema& schema,
                                                   const std::map<StateId, std::set<StateId>>& doms) {
    std::vector<StateId> link_bound;
    for (const auto& [state, _] : doms)
        if (!link_refs_of(map, schema, state).empty()) link_bound.push_back(state);

    auto dominates = [&](const StateId& a, const StateId& b) {
        auto it = doms.find(b);
        return it != doms.end() && it->second.count(a) > 0;
    };

    std::vector<IntegrityRule> out;
    for (const auto& earlier : link_bound) {
        for (const auto& later : link_bound) {
            if (earlier == later || !dominates(earlier, later)) continue;
            // Transitive reduction: skip when a link-bound state sits between.
            bool implied = false;
            for (const auto& mid : link_bound) {
                if (mid == earlier || mid == later) continue;
                if (dominates(earlier, mid) && dominates(mid, later)) {
                    implied = true;
                    break;
                }
            }
            if (implied) continue;
            for (const auto& eref : link_refs_of(map, schema, earlier)) {
                for (const auto& lref : link_refs_of(map, schema, later)) {
                    LinkOrderPayload p;
                    p.earlier_state = earlier;
                    p.later_state = later;
                    p.earlier = resolve_link_ref(schema, eref);
                    p.later = resolve_link_ref(schema, lref);
                    p.identity_table = map.identity.table;
                    out.push_back(finish_rule(RuleVariant::LinkOrder, std::move(p)));
                }
            }
        }
    }
    return out;
}

std::vector<IntegrityRule> derive_exclusive_rules(const CorrespondenceMap& map, const DbSchema& schema,
                                                  const std::set<StatePair>& pairs,
                                                  const std::vector<StateId>& state_order) {
    auto position = [&](const StateId& s) {
        auto it = std::find(state_order.begin(), state_order.end(), s);
        return it - state_order.begin();
    };
    std::vector<IntegrityRule> out;
    for (const auto& pair : pairs) {
        StateId a = pair.first, b = pair.second;
        if (position(b) < position(a)) std::swap(a, b);
        auto refs_a = link_refs_of(map, schema, a);
        auto refs_b = link_refs_of(map, schema, b);
        for (const auto& ra : refs_a) {
            for (const auto& rb : refs_b) {
                ExclusivePayload p;
                p.state_a = a;
                p.state_b = b;
                p.link_a = resolve_link_ref(schema, ra);
                p.link_b = resolve_link_ref(schema, rb);
                p.identity_table = map.identity.table;
                out.push_back(finish_rule(RuleVariant::ExclusiveLink, std::move(p)));
            }
        }
    }
    return out;
}

RuleSet derive_all(const OlcModel& olc, const DbSchema& schema, const CorrespondenceMap& map,
                   Provenance provenance) {
    if (auto d = validate_olc(olc); !d.empty()) throw ValidationError(std::move(d));
    if (auto d = validate_schema(schema); !d.empty()) throw ValidationError(std::move(d));
    if (auto d = validate_correspondence(map, schema, olc); !d.empty())
        throw ValidationError(std::move(d));

    auto graph = transition_graph(olc);
    auto doms = dominators(graph, olc.initial);
    auto exclusives = exclusive_pairs(olc, graph);

    RuleSet rules;
    auto append = [&](std::vector<IntegrityRule> batch) {
        for (auto& r : batch) rules.rules.push_back(std::move(r));
    };
    append(derive_domain_rules(map));
    append(derive_transition_rules(map, graph, olc.initial));
    append(derive_status_link_rules(map, schema, graph));
    append(derive_link_order_rules(map, schema, doms));
    append(derive_exclusive_rules(map, schema, exclusives, olc.states));

    std::sort(rules.rules.begin(), rules.rules.end(), [](const IntegrityRule& a, const IntegrityRule& b) {
        if (a.template_no() != b.template_no()) return a.template_no() < b.template_no();
        return a.id < b.id;
    });
    rules.provenance = std::move(provenance);
    if (rules.provenance.derived_at.empty()) rules.provenance.derived_at = current_timestamp_utc();
    return rules;
}

// --- rendering -------------------------------------------------------------

namespace {

// "∃ receipt, receipt.OrderNo = order.OrderNo" for one path; multi-hop
// chains conjoin the intermediate equalities.
std::string render_path_exists(const LinkPath& path, const std::string& identity_alias) {
    std::string quantifiers;
    std::string clauses;
    for (std::size_t i = 0; i < path.hops.size(); ++i) {
        const auto& hop = path.hops[i];
        std::string hop_alias = alias_of(hop.table);
        std::string next_alias =
            i + 1 < path.hops.size() ? alias_of(path.hops[i + 1].table) : identity_alias;
        quantifiers += "∃ " + hop_alias + ", ";
        for (std::size_t c = 0; c < hop.fk_columns.size(); ++c) {
            if (!clauses.empty()) clauses += " ∧ ";
            std::string ref =
                c < hop.ref_columns.size() ? hop.ref_columns[c] : hop.fk_columns[c];
            clauses += hop_alias + "." + hop.fk_columns[c] + " = " + next_alias + "." + ref;
        }
    }
    return quantifiers + clauses;
}

std::string render_link_exists(const LinkRef& ref, const std::string& identity_alias) {
    std::string out;
    for (const auto& path : ref.paths) {
        if (!out.empty()) out += " ∧ ";
        out += render_path_exists(path, identity_alias);
    }
    for (const auto& a : ref.attributes) {
        if (!out.empty()) out += " ∧ ";
        out += identity_alias + "." + a.attribute + " = " + render_value(a.value);
    }
    return out;
}

// Single-column one-hop evidence negates into the readable forall-form;
// everything else falls back to an explicit negation.
std::string render_link_absent(const LinkRef& ref, const std::string& identity_alias) {
    if (ref.paths.size() == 1 && ref.attributes.empty() && ref.paths[0].hops.size() == 1 &&
        ref.paths[0].hops[0].fk_columns.size() == 1) {
        const auto& hop = ref.paths[0].hops[0];
        std::string hop_alias = alias_of(hop.table);
        std::string ref_col = hop.ref_columns.empty() ? hop.fk_columns[0] : hop.ref_columns[0];
        return "∀ " + hop_alias + ", " + hop_alias + "." + hop.fk_columns[0] + " ≠ " +
               identity_alias + "." + ref_col;
    }
    return "¬(" + render_link_exists(ref, identity_alias) + ")";
}

}  // namespace

std::string render_rule(const IntegrityRule& rule) {
    struct V {
        std::string operator()(const DomainPayload& p) const {
            std::string alias = alias_of(p.table);
            return "∀ " + alias + ", " + alias + "." + p.attribute + " ∈ " +
                   render_value_list(p.allowed);
        }
        std::string operator()(const TransitionPayload& p) const {
            std::string alias = alias_of(p.table);
            std::string attr = alias + "." + p.attribute;
            std::string out =
                "∀ " + alias + ", on insert " + attr + " ∈ " + render_value_list(p.initial_values);
            // Fragments grouped by new value, in pair order.
            std::vector<Value> new_values;
            for (const auto& [oldv, newv] : p.allowed_pairs)
                if (std::find(new_values.begin(), new_values.end(), newv) == new_values.end())
                    new_values.push_back(newv);
            for (const auto& nv : new_values) {
                std::vector<Value> olds;
                for (const auto& [oldv, newv] : p.allowed_pairs)
                    if (newv == nv) olds.push_back(oldv);
                out += "; if " + attr + ".New = " + render_value(nv) + " then " + attr + ".Old ∈ " +
                       render_value_list(olds);
            }
            return out;
        }
        std::string operator()(const StatusLinkPayload& p) const {
            std::string alias = alias_of(p.attribute.table);
            std::string attr = alias + "." + p.attribute.attribute;
            std::string exists = render_link_exists(p.link, alias);
            return "∀ " + alias + ", if " + attr + " = " + render_value(p.attribute.value) +
                   " then " + exists + "; if " + exists + " then " + attr + " ∈ " +
                   render_value_list(p.reachable_values);
        }
        std::string operator()(const LinkOrderPayload& p) const {
            std::string alias = alias_of(p.identity_table);
            return "∀ " + alias + ", if " + render_link_exists(p.later, alias) + " then " +
                   render_link_exists(p.earlier, alias);
        }
        std::string operator()(const ExclusivePayload& p) const {
            std::string alias = alias_of(p.identity_table);
            return "∀ " + alias + ", if " + render_link_exists(p.link_a, alias) + " then " +
                   render_link_absent(p.link_b, alias);
        }
    };
    return std::visit(V{}, rule.payload);
}

std::string rule_target_table(const IntegrityRule& rule) {
    struct V {
        std::string operator()(const DomainPayload& p) const { return p.table; }
        std::string operator()(const TransitionPayload& p) const { return p.table; }
        std::string operator()(const StatusLinkPayload& p) const { return p.attribute.table; }
        std::string operator()(const LinkOrderPayload& p) const { return p.identity_table; }
        std::string operator()(const ExclusivePayload& p) const { return p.identity_table; }
    };
    return std::visit(V{}, rule.payload);
}

// --- repository --------------------------------------------------------------

std::string serialize_rules(const RuleSet& rules) {
    nlohmann::json j;
    j["provenance"] = {{"olc_digest", rules.provenance.olc_digest},
                       {"schema_digest", rules.provenance.schema_digest},
                       {"correspondence_digest", rules.provenance.correspondence_digest},
                       {"derived_at", rules.provenance.derived_at}};
    auto arr = nlohmann::json::array();
    for (const auto& r : rules.rules) {
        arr.push_back({{"id", r.id},
                       {"template", r.template_no()},
                       {"variant", rule_variant_name(r.variant)},
                       {"payload", payload_to_json(r)},
                       {"rendered", render_rule(r)}});
    }
    j["rules"] = arr;
    return j.dump(2) + "\n";
}

RuleSet parse_rules(const std::string& document) {
    auto j = parse_json_text(document);
    require_keys(j, {"provenance", "rules"}, "rules repository");

    RuleSet out;
    const auto& prov = require_field(j, "provenance", "rules repository");
    require_keys(prov, {"olc_digest", "schema_digest", "correspondence_digest", "derived_at"},
                 "provenance");
    out.provenance.olc_digest = prov.value("olc_digest", "");
    out.provenance.schema_digest = prov.value("schema_digest", "");
    out.provenance.correspondence_digest = prov.value("correspondence_digest", "");
    out.provenance.derived_at = prov.value("derived_at", "");

    std::set<std::string> ids;
    for (const auto& rj : require_field(j, "rules", "rules repository")) {
        require_keys(rj, {"id", "template", "variant", "payload", "rendered"}, "rule");
        auto variant = rule_variant_from_name(require_string(rj, "variant", "rule"));
        if (!variant) throw ParseError("rule: unknown variant");
        IntegrityRule rule = finish_rule(*variant, payload_from_json(*variant, rj["payload"]));
        std::string stored_id = require_string(rj, "id", "rule");
        if (stored_id != rule.id)
            throw ParseError("rule " + stored_id + ": id does not match payload content");
        if (require_field(rj, "template", "rule").get<int>() != rule.template_no())
            throw ParseError("rule " + stored_id + ": template number does not match variant");
        if (require_string(rj, "rendered", "rule") != render_rule(rule))
            throw ParseError("rule " + stored_id + ": rendered text does not match payload");
        if (!ids.insert(rule.id).second) throw ParseError("rule " + stored_id + ": duplicate id");
        out.rules.push_back(std::move(rule));
    }
    return out;
}

void save_rules(const RuleSet& rules, const std::string& path) {
    write_file(path, serialize_rules(rules));
}

RuleSet load_rules(const std::string& path) { return parse_rules(read_file(path)); }

std::vector<std::string> staleness_warnings(const Provenance& stored, const Provenance& current) {
    std::vector<std::string> out;
    auto check = [&](const std::string& name, const std::string& was, const std::string& now) {
        if (!was.empty() && !now.empty() && was != now)
            out.push_back("stale rules: " + name + " changed since derivation (was " + was +
                          ", now " + now + ")");
    };
    check("olc", stored.olc_digest, current.olc_digest);
    check("schema", stored.schema_digest, current.schema_digest);
    check("correspondence", stored.correspondence_digest, current.correspondence_digest);
    return out;
}

std::string current_timestamp_utc() {
    std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace dq
