#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "dq/olc.hpp"
#include "dq/schema.hpp"
#include "dq/value.hpp"

namespace dq {

enum class BindingKind { Table, Attribute, Link, Combined };

const char* binding_kind_name(BindingKind k);

// Status-attribute equality on the identity table.
struct AttributePart {
    std::string table;
    std::string attribute;
    Value value;

    auto operator<=>(const AttributePart&) const = default;
};

// One analyst-specified way a state shows up in the data.
//   Table     - row existence in `table_name` (resolved to a one-hop path).
//   Attribute - exactly one AttributePart.
//   Link      - exactly one LinkPath into the identity table.
//   Combined  - conjunction of >=1 parts across `attributes` and `links`.
struct StateBinding {
    StateId state;
    BindingKind kind = BindingKind::Attribute;
    std::vector<AttributePart> attributes;
    std::vector<LinkPath> links;
    std::string table_name;  // Table kind only: original table, kept for round-trips

    bool operator==(const StateBinding&) const = default;
};

struct IdentityRef {
    std::string table;
    std::vector<std::string> key_columns;

    bool operator==(const IdentityRef&) const = default;
};

struct CorrespondenceMap {
    std::string object_name;
    IdentityRef identity;
    std::vector<StateBinding> bindings;    // file order
    std::set<StateId> unbound_allowance;

    bool operator==(const CorrespondenceMap&) const = default;
};

// Syntax pass: shape-checks the JSON only; no schema/OLC resolution.
CorrespondenceMap parse_correspondence_syntax(const std::string& document);

// Resolution + consistency diagnostics:
//   unknown state / table / attribute / FK hop,
//   value literal vs column type,
//   attribute part outside the identity table,
//   duplicate (table, attribute, value) across states,
//   same-attribute states that can coexist through a retained pair,
//   two states with identical discriminating content,
//   unbound states without an `unbound` allowance.
std::vector<Diagnostic> validate_correspondence(const CorrespondenceMap& map, const DbSchema& schema,
                                                const OlcModel& olc);

// Syntax + resolution; throws ParseError / ValidationError.
CorrespondenceMap parse_correspondence(const std::string& document, const DbSchema& schema,
                                       const OlcModel& olc);

std::string serialize_correspondence(const CorrespondenceMap& map);

// --- derived views used by rule derivation -------------------------------

// Link-flavored evidence of one state: every path must resolve and every
// attribute part must match on the identity row. Pure link and table
// bindings carry one path and no attribute parts.
struct LinkRef {
    std::vector<LinkPath> paths;
    std::vector<AttributePart> attributes;

    auto operator<=>(const LinkRef&) const = default;
};

// Status-attribute parts of a state (pure attribute bindings plus combined
// attribute parts), in binding order.
std::vector<AttributePart> attribute_parts_of(const CorrespondenceMap& map, const StateId& state);

// Link evidence of a state in binding order: link bindings, table bindings
// (as their resolved one-hop path) and combined bindings.
std::vector<LinkRef> link_refs_of(const CorrespondenceMap& map, const DbSchema& schema,
                                  const StateId& state);

}  // namespace dq
