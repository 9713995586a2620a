#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "dq/correspondence.hpp"
#include "dq/olc.hpp"
#include "dq/schema.hpp"

namespace dq {

enum class RuleVariant { Domain, Transition, StatusLink, LinkOrder, ExclusiveLink };

const char* rule_variant_name(RuleVariant v);
int rule_template_no(RuleVariant v);

// Template 1: non-null values of a status attribute stay within the bound set.
struct DomainPayload {
    std::string table;
    std::string attribute;
    std::vector<Value> allowed;  // state declaration order

    bool operator==(const DomainPayload&) const = default;
};

// Template 2: status updates follow the life cycle. `allowed_pairs` holds
// (old, new) over paths whose interior states do not bind this attribute,
// which reduces to the plain edge image when every state is bound.
// `initial_values` are the first values an object may take on insert (or on
// a first update from NULL).
struct TransitionPayload {
    std::string table;
    std::string attribute;
    std::vector<std::pair<Value, Value>> allowed_pairs;
    std::vector<Value> initial_values;

    bool operator==(const TransitionPayload&) const = default;
};

// Template 3: status value and link establishment agree. Forward: rows at
// exactly `value` must satisfy `link`. Reverse: rows satisfying `link` must
// hold a status in `reachable_values`; rows whose status lies outside
// `attribute_domain` are the Domain rule's finding, not this one's.
struct StatusLinkPayload {
    StateId state;
    AttributePart attribute;  // the status value at `state` is attribute.value
    LinkRef link;
    std::vector<Value> reachable_values;   // value at `state` plus reachable bound values
    std::vector<Value> attribute_domain;   // every value bound to this attribute

    bool operator==(const StatusLinkPayload&) const = default;
};

// Template 4: evidence of a later state implies evidence of a state that
// dominates it.
struct LinkOrderPayload {
    StateId earlier_state;
    StateId later_state;
    LinkRef earlier;
    LinkRef later;
    std::string identity_table;

    bool operator==(const LinkOrderPayload&) const = default;
};

// Template 5: link evidence of exclusive states may not co-occur.
struct ExclusivePayload {
    StateId state_a;
    StateId state_b;
    LinkRef link_a;
    LinkRef link_b;
    std::string identity_table;

    bool operator==(const ExclusivePayload&) const = default;
};

using RulePayload =
    std::variant<DomainPayload, TransitionPayload, StatusLinkPayload, LinkOrderPayload, ExclusivePayload>;

struct IntegrityRule {
    std::string id;  // content-derived: t<template>-<digest>
    RuleVariant variant = RuleVariant::Domain;
    RulePayload payload;

    int template_no() const { return rule_template_no(variant); }
    bool operator==(const IntegrityRule&) const = default;
};

struct Provenance {
    std::string olc_digest;
    std::string schema_digest;
    std::string correspondence_digest;
    std::string derived_at;  // ISO-8601 UTC

    bool operator==(const Provenance&) const = default;
};

struct RuleSet {
    std::vector<IntegrityRule> rules;  // sorted by (template_no, id)
    Provenance provenance;

    const IntegrityRule* find(const std::string& id) const;
    bool operator==(const RuleSet&) const = default;
};

// --- derivation ----------------------------------------------------------

std::vector<IntegrityRule> derive_domain_rules(const CorrespondenceMap& map);

std::vector<IntegrityRule> derive_transition_rules(const CorrespondenceMap& map,
                                                   const TransitionGraph& graph,
                                                   const std::set<StateId>& initials);

std::vector<IntegrityRule> derive_status_link_rules(const CorrespondenceMap& map,
                                                    const DbSchema& schema,
                                                    const TransitionGraph& graph);

std::vector<IntegrityRule> derive_link_order_rules(const CorrespondenceMap& map,
                                                   const DbSchema& schema,
                                                   const std::map<StateId, std::set<StateId>>& doms);

// `state_order` (the OLC declaration order) orients each unordered pair so
// renderings and ids stay deterministic.
std::vector<IntegrityRule> derive_exclusive_rules(const CorrespondenceMap& map, const DbSchema& schema,
                                                  const std::set<StatePair>& pairs,
                                                  const std::vector<StateId>& state_order);

// All five templates over validated inputs, deterministic order. Throws
// ValidationError when any input fails its validation.
RuleSet derive_all(const OlcModel& olc, const DbSchema& schema, const CorrespondenceMap& map,
                   Provenance provenance = {});

// Canonical one-line predicate-logic rendering. Injective over rules
// derived from a validated correspondence.
std::string render_rule(const IntegrityRule& rule);

// The table a rule's findings are keyed on (the identity table for link
// rules, the status table otherwise).
std::string rule_target_table(const IntegrityRule& rule);

// --- repository ----------------------------------------------------------

std::string serialize_rules(const RuleSet& rules);
RuleSet parse_rules(const std::string& document);

void save_rules(const RuleSet& rules, const std::string& path);
RuleSet load_rules(const std::string& path);

// One warning line per differing digest; empty strings skip the check.
std::vector<std::string> staleness_warnings(const Provenance& stored, const Provenance& current);

std::string current_timestamp_utc();

}  // namespace dq
