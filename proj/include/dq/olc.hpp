#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "dq/diagnostics.hpp"

namespace dq {

using StateId = std::string;
using StatePair = std::pair<StateId, StateId>;

struct ProcessDef {
    std::string name;
    std::set<StateId> inputs;
    std::set<StateId> outputs;
    std::optional<std::string> precondition;   // opaque, never evaluated
    std::optional<std::string> postcondition;  // opaque, never evaluated

    bool operator==(const ProcessDef&) const = default;
};

// Object life cycle as a node-star net: states plus processes whose
// input/output sets induce the transitions. `loops` lists permitted
// back-transitions (s_j, s_i), i.e. an edge s_j -> s_i to a predecessor.
// `retained` lists (s_j, s_i) pairs where entering s_j does NOT leave s_i,
// so the object holds both states at once. `declared_exclusive` holds
// analyst-asserted exclusive pairs, stored normalized (first < second).
struct OlcModel {
    std::string object_name;
    std::vector<StateId> states;  // declaration order, unique
    std::vector<ProcessDef> processes;
    std::set<StatePair> loops;
    std::set<StatePair> retained;
    std::set<StateId> initial;
    std::set<StatePair> declared_exclusive;

    bool has_state(const StateId& s) const;
    bool operator==(const OlcModel&) const = default;
};

enum class EdgeKind { Process, Loop };

struct Edge {
    StateId from;
    StateId to;
    EdgeKind kind;
    // False when (to, from) is retained, i.e. taking this edge keeps the
    // object in `from` as well.
    bool leaving = true;

    bool operator==(const Edge&) const = default;
};

struct TransitionGraph {
    std::vector<StateId> nodes;  // model state order
    std::vector<Edge> edges;     // sorted by (from, to), unique per pair

    std::set<StateId> successors(const StateId& s) const;
    bool has_edge(const StateId& from, const StateId& to) const;
};

// --- file format ------------------------------------------------------

// Syntax pass only: shape-checks the JSON document (types, unknown keys)
// but performs no cross-reference validation.
OlcModel parse_olc_syntax(const std::string& document);

// Invariant check; empty result means the model is valid.
std::vector<Diagnostic> validate_olc(const OlcModel& model);

// Full parse: syntax pass plus validation. Throws ParseError on malformed
// documents, ValidationError when invariants fail.
OlcModel parse_olc(const std::string& document);

std::string serialize_olc(const OlcModel& model);

// --- graph analysis ----------------------------------------------------

// Requires a validated model.
TransitionGraph transition_graph(const OlcModel& model);

// Direct predecessors of s. Throws ValidationError on unknown state.
std::set<StateId> predecessors(const TransitionGraph& graph, const StateId& s);

// States reachable from s via one or more edges (s itself only when it
// lies on a cycle through s).
std::set<StateId> reachable(const TransitionGraph& graph, const StateId& s);

// Dominators over the graph extended with a virtual entry into every
// initial state. dom(s) contains s. States unreachable from the initials
// map to the full node set.
std::map<StateId, std::set<StateId>> dominators(const TransitionGraph& graph,
                                                const std::set<StateId>& initials);

// Declared exclusive pairs plus derived ones: two states branching from a
// common direct predecessor via leaving edges, neither reachable from the
// other. Pairs are normalized (first < second).
std::set<StatePair> exclusive_pairs(const OlcModel& model, const TransitionGraph& graph);

}  // namespace dq
