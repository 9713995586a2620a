#include "dq/olc.hpp"

#include <algorithm>
#include <deque>
#include <map>

#include "dq/json_util.hpp"

namespace dq {

bool OlcModel::has_state(const StateId& s) const {
    return std::find(states.begin(), states.end(), s) != states.end();
}

std::set<StateId> TransitionGraph::successors(const StateId& s) const {
    std::set<StateId> out;
    for (const auto& e : edges)
        if (e.from == s) out.insert(e.to);
    return out;
}

bool TransitionGraph::has_edge(const StateId& from, const StateId& to) const {
    for (const auto& e : edges)
        if (e.from == from && e.to == to) return true;
    return false;
}

namespace {

std::set<StatePair> parse_pair_list(const nlohmann::json& j, const std::string& context,
                                    bool normalize) {
    std::set<StatePair> out;
    if (!j.is_array()) throw ParseError(context + ": expected an array of [from, to] pairs");
    for (const auto& entry : j) {
        auto pair = require_string_array(entry, context);
        if (pair.size() != 2) throw ParseError(context + ": each entry must name exactly two states");
        StatePair p{pair[0], pair[1]};
        if (normalize && p.second < p.first) std::swap(p.first, p.second);
        out.insert(p);
    }
    return out;
}

nlohmann::json pair_list_to_json(const std::set<StatePair>& pairs) {
    auto out = nlohmann::json::array();
    for (const auto& [a, b] : pairs) out.push_back({a, b});
    return out;
}

}  // namespace

OlcModel parse_olc_syntax(const std::string& document) {
    auto j = parse_json_text(document);
    require_keys(j, {"object", "states", "initial", "processes", "loops", "retained", "exclusive"},
                 "olc document");

    OlcModel model;
    model.object_name = require_string(j, "object", "olc document");
    model.states = require_string_array(require_field(j, "states", "olc document"), "states");

    const auto& processes = require_field(j, "processes", "olc document");
    if (!processes.is_array()) throw ParseError("processes: expected an array");
    for (const auto& pj : processes) {
        require_keys(pj, {"name", "inputs", "outputs", "pre", "post"}, "process");
        ProcessDef p;
        p.name = require_string(pj, "name", "process");
        auto inputs = require_string_array(require_field(pj, "inputs", "process " + p.name), "inputs");
        auto outputs =
            require_string_array(require_field(pj, "outputs", "process " + p.name), "outputs");
        p.inputs.insert(inputs.begin(), inputs.end());
        p.outputs.insert(outputs.begin(), outputs.end());
        if (pj.contains("pre")) p.precondition = require_string(pj, "pre", "process " + p.name);
        if (pj.contains("post")) p.postcondition = require_string(pj, "post", "process " + p.name);
        model.processes.push_back(std::move(p));
    }

    if (j.contains("loops")) model.loops = parse_pair_list(j["loops"], "loops", false);
    if (j.contains("retained")) model.retained = parse_pair_list(j["retained"], "retained", false);
    if (j.contains("exclusive"))
        model.declared_exclusive = parse_pair_list(j["exclusive"], "exclusive", true);

    if (j.contains("initial")) {
        auto initial = require_string_array(j["initial"], "initial");
        model.initial.insert(initial.begin(), initial.end());
    } else {
        // Default: states no process produces.
        std::set<StateId> produced;
        for (const auto& p : model.processes) produced.insert(p.outputs.begin(), p.outputs.end());
        for (const auto& s : model.states)
            if (!produced.count(s)) model.initial.insert(s);
    }
    return model;
}

namespace {

// Transitive predecessors over process-derived edges only. Loop edges are
// excluded on purpose: loop/retained entries are validated against the
// order the processes install, not against the back-edges they add.
std::set<StateId> process_ancestors(const OlcModel& model, const StateId& target) {
    std::map<StateId, std::set<StateId>> preds;
    for (const auto& p : model.processes)
        for (const auto& in : p.inputs)
            for (const auto& out : p.outputs)
                if (model.has_state(in) && model.has_state(out)) preds[out].insert(in);

    std::set<StateId> seen;
    std::deque<StateId> work{target};
    while (!work.empty()) {
        StateId s = work.front();
        work.pop_front();
        for (const auto& p : preds[s])
            if (seen.insert(p).second) work.push_back(p);
    }
    return seen;
}

void check_pair_set(const OlcModel& model, const std::set<StatePair>& pairs, const std::string& what,
                    bool require_predecessor, std::vector<Diagnostic>& out) {
    for (const auto& [a, b] : pairs) {
        std::string element = what + "(" + a + ", " + b + ")";
        if (!model.has_state(a) || !model.has_state(b)) {
            out.push_back({"unknown-state", element, "pair references a state not in the model"});
            continue;
        }
        if (a == b) {
            out.push_back({"degenerate-pair", element, "pair members must be distinct"});
            continue;
        }
        if (require_predecessor && !process_ancestors(model, a).count(b))
            out.push_back({what + "-target-not-predecessor", element,
                           b + " is not a predecessor of " + a + " in the transition graph"});
    }
}

}  // namespace

std::vector<Diagnostic> validate_olc(const OlcModel& model) {
    std::vector<Diagnostic> out;
    if (model.object_name.empty())
        out.push_back({"empty-object-name", "olc", "object name must be non-empty"});
    if (model.states.empty()) out.push_back({"empty-state-set", "olc", "model declares no states"});

    std::set<StateId> seen;
    for (const auto& s : model.states) {
        if (s.empty()) out.push_back({"empty-state-name", "olc", "state names must be non-empty"});
        if (!seen.insert(s).second)
            out.push_back({"duplicate-state", s, "state declared more than once"});
    }

    std::set<std::string> process_names;
    for (const auto& p : model.processes) {
        if (!process_names.insert(p.name).second)
            out.push_back({"duplicate-process", p.name, "process declared more than once"});
        if (p.inputs.empty())
            out.push_back({"empty-process-inputs", p.name, "process needs at least one input state"});
        if (p.outputs.empty())
            out.push_back(
                {"empty-process-outputs", p.name, "process needs at least one output state"});
        for (const auto& s : p.inputs)
            if (!model.has_state(s))
                out.push_back({"unknown-state", p.name, "input state " + s + " is not declared"});
        for (const auto& s : p.outputs)
            if (!model.has_state(s))
                out.push_back({"unknown-state", p.name, "output state " + s + " is not declared"});
    }

    check_pair_set(model, model.loops, "loop", true, out);
    check_pair_set(model, model.retained, "retained", true, out);
    check_pair_set(model, model.declared_exclusive, "exclusive", false, out);

    for (const auto& s : model.initial)
        if (!model.has_state(s))
            out.push_back({"unknown-state", s, "initial state is not declared"});
    return out;
}

OlcModel parse_olc(const std::string& document) {
    OlcModel model = parse_olc_syntax(document);
    auto diagnostics = validate_olc(model);
    if (!diagnostics.empty()) throw ValidationError(std::move(diagnostics));
    return model;
}

std::string serialize_olc(const OlcModel& model) {
    nlohmann::json j;
    j["object"] = model.object_name;
    j["states"] = model.states;
    j["initial"] = std::vector<StateId>(model.initial.begin(), model.initial.end());
    auto processes = nlohmann::json::array();
    for (const auto& p : model.processes) {
        nlohmann::json pj;
        pj["name"] = p.name;
        pj["inputs"] = std::vector<StateId>(p.inputs.begin(), p.inputs.end());
        pj["outputs"] = std::vector<StateId>(p.outputs.begin(), p.outputs.end());
        if (p.precondition) pj["pre"] = *p.precondition;
        if (p.postcondition) pj["post"] = *p.postcondition;
        processes.push_back(pj);
    }
    j["processes"] = processes;
    if (!model.loops.empty()) j["loops"] = pair_list_to_json(model.loops);
    if (!model.retained.empty()) j["retained"] = pair_list_to_json(model.retained);
    if (!model.declared_exclusive.empty()) j["exclusive"] = pair_list_to_json(model.declared_exclusive);
    return j.dump(2) + "\n";
}

TransitionGraph transition_graph(const OlcModel& model) {
    TransitionGraph g;
    g.nodes = model.states;

    std::map<StatePair, EdgeKind> edges;
    for (const auto& p : model.processes)
        for (const auto& in : p.inputs)
            for (const auto& out : p.outputs) edges.insert({{in, out}, EdgeKind::Process});
    // A loops entry (s_j, s_i) grants the back-transition edge s_j -> s_i.
    for (const auto& pair : model.loops) edges.insert({pair, EdgeKind::Loop});

    for (const auto& [pair, kind] : edges)
        g.edges.push_back({pair.first, pair.second, kind, !model.retained.count({pair.second, pair.first})});
    return g;
}

namespace {

void require_node(const TransitionGraph& graph, const StateId& s) {
    if (std::find(graph.nodes.begin(), graph.nodes.end(), s) == graph.nodes.end())
        throw ValidationError({{"unknown-state", s, "state is not a node of the transition graph"}});
}

}  // namespace

std::set<StateId> predecessors(const TransitionGraph& graph, const StateId& s) {
    require_node(graph, s);
    std::set<StateId> out;
    for (const auto& e : graph.edges)
        if (e.to == s) out.insert(e.from);
    return out;
}

std::set<StateId> reachable(const TransitionGraph& graph, const StateId& s) {
    require_node(graph, s);
    std::set<StateId> out;
    std::deque<StateId> work{s};
    while (!work.empty()) {
        StateId cur = work.front();
        work.pop_front();
        for (const auto& e : graph.edges)
            if (e.from == cur && out.insert(e.to).second) work.push_back(e.to);
    }
    return out;
}

std::map<StateId, std::set<StateId>> dominators(const TransitionGraph& graph,
                                                const std::set<StateId>& initials) {
    if (initials.empty())
        throw ValidationError({{"empty-initial-set", "dominators", "at least one initial state required"}});
    for (const auto& s : initials) require_node(graph, s);

    std::set<StateId> live;  // reachable from the virtual entry
    for (const auto& s : initials) {
        live.insert(s);
        auto r = reachable(graph, s);
        live.insert(r.begin(), r.end());
    }

    const std::set<StateId> all(graph.nodes.begin(), graph.nodes.end());
    std::map<StateId, std::set<StateId>> dom;
    for (const auto& s : graph.nodes) dom[s] = live.count(s) ? (initials.count(s) ? std::set<StateId>{s} : live) : all;

    std::map<StateId, std::set<StateId>> preds;
    for (const auto& e : graph.edges)
        if (live.count(e.from) && live.count(e.to)) preds[e.to].insert(e.from);

    // Iterative dataflow; graphs are small enough that sets of names do fine.
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& s : graph.nodes) {
            if (!live.count(s)) continue;
            std::set<StateId> next;
            bool first = true;
            for (const auto& p : preds[s]) {
                if (first) {
                    next = dom[p];
                    first = false;
                } else {
                    std::set<StateId> merged;
                    std::set_intersection(next.begin(), next.end(), dom[p].begin(), dom[p].end(),
                                          std::inserter(merged, merged.begin()));
                    next = std::move(merged);
                }
            }
            // Initial states also hang off the virtual entry, whose dominator
            // set is empty, so the meet over their predecessors stays empty.
            if (initials.count(s)) next.clear();
            next.insert(s);
            if (next != dom[s]) {
                dom[s] = std::move(next);
                changed = true;
            }
        }
    }
    return dom;
}

std::set<StatePair> exclusive_pairs(const OlcModel& model, const TransitionGraph& graph) {
    std::set<StatePair> out = model.declared_exclusive;

    std::map<StateId, std::set<StateId>> reach;
    for (const auto& s : graph.nodes) reach[s] = reachable(graph, s);

    for (const auto& s : graph.nodes) {
        std::vector<Edge> branches;
        for (const auto& e : graph.edges)
            if (e.from == s && e.leaving) branches.push_back(e);
        for (std::size_t i = 0; i < branches.size(); ++i) {
            for (std::size_t k = i + 1; k < branches.size(); ++k) {
                const StateId& s1 = branches[i].to;
                const StateId& s2 = branches[k].to;
                if (s1 == s2) continue;
                if (reach[s1].count(s2) || reach[s2].count(s1)) continue;
                out.insert(s1 < s2 ? StatePair{s1, s2} : StatePair{s2, s1});
            }
        }
    }
    return out;
}

}  // namespace dq
