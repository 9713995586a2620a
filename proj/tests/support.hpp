#pragma once

#include <algorithm>
#include <deque>
#include <filesystem>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "dq/correspondence.hpp"
#include "dq/io.hpp"
#include "dq/olc.hpp"
#include "dq/schema.hpp"

namespace dqtest {

using namespace dq;

inline std::string fixture_path(const std::string& name) {
    return std::string(DQ_FIXTURE_DIR) + "/" + name;
}

inline std::string fixture_text(const std::string& name) { return read_file(fixture_path(name)); }

inline OlcModel ecommerce_olc() { return parse_olc(fixture_text("ecommerce/olc.json")); }
inline DbSchema ecommerce_schema() { return parse_schema(fixture_text("ecommerce/schema.json")); }
inline CorrespondenceMap ecommerce_map() {
    return parse_correspondence(fixture_text("ecommerce/map.json"), ecommerce_schema(),
                                ecommerce_olc());
}

inline std::filesystem::path fresh_temp_dir(const std::string& tag) {
    auto dir = std::filesystem::temp_directory_path() / ("dq_test_" + tag);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

// --- independent oracles ---------------------------------------------------

// Process edges by exhaustive (state, process, state) triple enumeration.
inline std::set<std::pair<StateId, StateId>> oracle_process_edges(const OlcModel& model) {
    std::set<std::pair<StateId, StateId>> out;
    for (const auto& s : model.states)
        for (const auto& p : model.processes)
            for (const auto& t : model.states)
                if (p.inputs.count(s) && p.outputs.count(t)) out.insert({s, t});
    return out;
}

inline std::set<StateId> oracle_predecessors(const TransitionGraph& g, const StateId& s) {
    std::set<StateId> out;
    for (const auto& e : g.edges)
        if (e.to == s) out.insert(e.from);
    return out;
}

inline void oracle_reach_dfs(const TransitionGraph& g, const StateId& at, std::set<StateId>& seen) {
    for (const auto& e : g.edges) {
        if (e.from != at) continue;
        if (seen.insert(e.to).second) oracle_reach_dfs(g, e.to, seen);
    }
}

inline std::set<StateId> oracle_reachable(const TransitionGraph& g, const StateId& s) {
    std::set<StateId> seen;
    oracle_reach_dfs(g, s, seen);
    return seen;
}

// Reachability from the initials with one node removed. s' dominates s
// exactly when removing s' cuts every entry path, which enumerates the same
// fact as checking all paths.
inline std::set<StateId> oracle_reachable_from_initials(const TransitionGraph& g,
                                                        const std::set<StateId>& initials,
                                                        const StateId& removed) {
    std::set<StateId> seen;
    std::deque<StateId> work;
    for (const auto& s : initials)
        if (s != removed && seen.insert(s).second) work.push_back(s);
    while (!work.empty()) {
        StateId cur = work.front();
        work.pop_front();
        for (const auto& e : g.edges) {
            if (e.from != cur || e.to == removed) continue;
            if (seen.insert(e.to).second) work.push_back(e.to);
        }
    }
    return seen;
}

inline std::map<StateId, std::set<StateId>> oracle_dominators(const TransitionGraph& g,
                                                              const std::set<StateId>& initials) {
    std::set<StateId> all(g.nodes.begin(), g.nodes.end());
    auto live = oracle_reachable_from_initials(g, initials, "");
    std::map<StateId, std::set<StateId>> out;
    for (const auto& s : g.nodes) {
        if (!live.count(s)) {
            out[s] = all;
            continue;
        }
        std::set<StateId> dom{s};
        for (const auto& candidate : g.nodes) {
            if (candidate == s) continue;
            if (!oracle_reachable_from_initials(g, initials, candidate).count(s))
                dom.insert(candidate);
        }
        out[s] = dom;
    }
    return out;
}

// All FK chains by plain DFS, as a cross-check for find_link_paths.
inline void oracle_paths_dfs(const DbSchema& schema, const std::string& at, const std::string& to,
                             int hops_left, std::vector<LinkHop>& prefix,
                             std::set<std::string>& visited, std::vector<LinkPath>& out) {
    if (hops_left == 0) return;
    const Table* t = schema.find_table(at);
    for (const auto& fk : t->foreign_keys) {
        if (visited.count(fk.ref_table)) continue;
        prefix.push_back({at, fk.columns, {}});
        if (fk.ref_table == to) out.push_back({prefix, to});
        else {
            visited.insert(fk.ref_table);
            oracle_paths_dfs(schema, fk.ref_table, to, hops_left - 1, prefix, visited, out);
            visited.erase(fk.ref_table);
        }
        prefix.pop_back();
    }
}

inline std::vector<LinkPath> oracle_link_paths(const DbSchema& schema, const std::string& from,
                                               const std::string& to, int max_hops) {
    if (from == to) return {};
    std::vector<LinkPath> out;
    std::vector<LinkHop> prefix;
    std::set<std::string> visited{from};
    oracle_paths_dfs(schema, from, to, max_hops, prefix, visited, out);
    std::sort(out.begin(), out.end());
    return out;
}

// --- random instances --------------------------------------------------------

struct TestRng {
    std::mt19937_64 engine;
    explicit TestRng(std::uint64_t seed) : engine(seed) {}
    std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : engine() % n; }
    bool chance(int percent) { return below(100) < static_cast<std::uint64_t>(percent); }
};

// Structurally valid random model: <= max_states states, <= max_processes
// processes, loops/retained only on transitive-predecessor pairs.
inline OlcModel random_olc(TestRng& rng, int max_states = 8, int max_processes = 10,
                           bool with_exclusive_decls = false) {
    OlcModel m;
    m.object_name = "Obj";
    int n_states = 2 + static_cast<int>(rng.below(max_states - 1));
    for (int i = 0; i < n_states; ++i) m.states.push_back("S" + std::to_string(i));

    int n_procs = 1 + static_cast<int>(rng.below(max_processes));
    for (int i = 0; i < n_procs; ++i) {
        ProcessDef p;
        p.name = "P" + std::to_string(i);
        int n_in = 1 + static_cast<int>(rng.below(2));
        int n_out = 1 + static_cast<int>(rng.below(2));
        for (int k = 0; k < n_in; ++k) p.inputs.insert(m.states[rng.below(m.states.size())]);
        for (int k = 0; k < n_out; ++k) p.outputs.insert(m.states[rng.below(m.states.size())]);
        m.processes.push_back(std::move(p));
    }

    // initial: states no process produces, else an arbitrary one
    std::set<StateId> produced;
    for (const auto& p : m.processes) produced.insert(p.outputs.begin(), p.outputs.end());
    for (const auto& s : m.states)
        if (!produced.count(s)) m.initial.insert(s);
    if (m.initial.empty()) m.initial.insert(m.states[0]);

    // candidate (s_j, s_i) pairs with s_i a transitive process predecessor of s_j
    auto edges = oracle_process_edges(m);
    TransitionGraph g;
    g.nodes = m.states;
    for (const auto& [a, b] : edges) g.edges.push_back({a, b, EdgeKind::Process, true});
    std::vector<StatePair> candidates;
    for (const auto& sj : m.states) {
        for (const auto& si : m.states) {
            if (si == sj) continue;
            if (oracle_reachable(g, si).count(sj)) candidates.push_back({sj, si});
        }
    }
    for (const auto& c : candidates) {
        if (rng.chance(12)) m.loops.insert(c);
        if (rng.chance(12)) m.retained.insert(c);
    }
    if (with_exclusive_decls && m.states.size() >= 2 && rng.chance(30)) {
        StateId a = m.states[rng.below(m.states.size())];
        StateId b = m.states[rng.below(m.states.size())];
        if (a != b) m.declared_exclusive.insert(a < b ? StatePair{a, b} : StatePair{b, a});
    }
    return m;
}

inline Column make_column(const std::string& name, ColumnType type) { return {name, type}; }

// Random schema with FKs pointing only at earlier tables (guaranteed valid).
inline DbSchema random_schema(TestRng& rng, int max_tables = 6) {
    static const ColumnType types[] = {ColumnType::String, ColumnType::Integer, ColumnType::Decimal,
                                       ColumnType::Date, ColumnType::Boolean};
    DbSchema schema;
    int n = 1 + static_cast<int>(rng.below(max_tables));
    for (int i = 0; i < n; ++i) {
        Table t;
        t.name = "T" + std::to_string(i);
        t.columns.push_back(make_column("Id", ColumnType::Integer));
        int extra = static_cast<int>(rng.below(3));
        for (int c = 0; c < extra; ++c)
            t.columns.push_back(make_column("C" + std::to_string(c), types[rng.below(5)]));
        t.primary_key = {"Id"};
        if (i > 0) {
            int n_fks = static_cast<int>(rng.below(3));
            std::set<int> targets;
            for (int f = 0; f < n_fks; ++f) targets.insert(static_cast<int>(rng.below(i)));
            for (int target : targets) {
                std::string col = "FkT" + std::to_string(target);
                t.columns.push_back(make_column(col, ColumnType::Integer));
                t.foreign_keys.push_back({{col}, "T" + std::to_string(target), {"Id"}});
            }
        }
        schema.tables.push_back(std::move(t));
    }
    return schema;
}

// Random (OLC, schema, correspondence) triple that passes validation:
// identity table plus one evidence table per link-bound state; attribute
// bindings colored so retained pairs never share a status column.
struct RandomArtifacts {
    OlcModel olc;
    DbSchema schema;
    CorrespondenceMap map;
};

inline RandomArtifacts random_artifacts(TestRng& rng) {
    RandomArtifacts art;
    art.olc = random_olc(rng);

    // color states so no retained pair shares an attribute
    std::map<StateId, int> color;
    int max_color = 0;
    for (const auto& s : art.olc.states) {
        std::set<int> banned;
        for (const auto& [sj, si] : art.olc.retained) {
            if (sj == s && color.count(si)) banned.insert(color[si]);
            if (si == s && color.count(sj)) banned.insert(color[sj]);
        }
        int c = 0;
        while (banned.count(c)) ++c;
        color[s] = c;
        max_color = std::max(max_color, c);
    }

    Table identity;
    identity.name = "Obj";
    identity.columns.push_back(make_column("ObjId", ColumnType::Integer));
    for (int c = 0; c <= max_color; ++c)
        identity.columns.push_back(make_column("Status" + std::to_string(c), ColumnType::String));
    identity.columns.push_back(make_column("Note", ColumnType::String));
    identity.primary_key = {"ObjId"};
    art.schema.tables.push_back(identity);

    art.map.object_name = art.olc.object_name;
    art.map.identity = {"Obj", {"ObjId"}};

    // per-state flag columns used by combined bindings
    std::vector<StateBinding> bindings;
    for (const auto& s : art.olc.states) {
        bool unbound = rng.chance(15);
        if (unbound) {
            art.map.unbound_allowance.insert(s);
            continue;
        }
        StateBinding attr;
        attr.state = s;
        attr.kind = BindingKind::Attribute;
        attr.attributes.push_back(
            {"Obj", "Status" + std::to_string(color[s]), Value("val_" + s)});
        bindings.push_back(attr);

        if (rng.chance(50)) {
            Table ev;
            ev.name = "Ev" + s;
            ev.columns.push_back(make_column("Id", ColumnType::Integer));
            ev.columns.push_back(make_column("ObjId", ColumnType::Integer));
            ev.primary_key = {"Id"};
            ev.foreign_keys.push_back({{"ObjId"}, "Obj", {"ObjId"}});
            art.schema.tables.push_back(ev);

            StateBinding link;
            link.state = s;
            switch (rng.below(3)) {
                case 0:
                    link.kind = BindingKind::Table;
                    link.table_name = ev.name;
                    break;
                case 1:
                    link.kind = BindingKind::Link;
                    link.links.push_back({{{ev.name, {"ObjId"}, {}}}, "Obj"});
                    break;
                default:
                    link.kind = BindingKind::Combined;
                    link.attributes.push_back({"Obj", "Flag" + s, Value("on")});
                    link.links.push_back({{{ev.name, {"ObjId"}, {}}}, "Obj"});
                    art.schema.tables[0].columns.push_back(
                        make_column("Flag" + s, ColumnType::String));
                    break;
            }
            bindings.push_back(link);
        }
    }
    art.map.bindings = std::move(bindings);
    return art;
}

}  // namespace dqtest
