#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cctype>

#include "dq/digest.hpp"
#include "dq/rules.hpp"
#include "support.hpp"

using namespace dq;
using namespace dqtest;

namespace {

// Collapse whitespace runs and fold ASCII case, so comparisons survive
// wrapping and sentence-initial capitalization.
std::string normalize(const std::string& s) {
    std::string out;
    bool in_space = true;
    for (char c : s) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            if (!in_space) out += ' ';
            in_space = true;
        } else {
            out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
            in_space = false;
        }
    }
    while (!out.empty() && out.back() == ' ') out.pop_back();
    return out;
}

bool any_rendering_contains(const RuleSet& rules, const std::string& fragment) {
    std::string needle = normalize(fragment);
    for (const auto& r : rules.rules)
        if (normalize(render_rule(r)).find(needle) != std::string::npos) return true;
    return false;
}

RuleSet fixture_rules() {
    return derive_all(ecommerce_olc(), ecommerce_schema(), ecommerce_map());
}

const IntegrityRule& single_transition_rule(const RuleSet& rules) {
    const IntegrityRule* found = nullptr;
    for (const auto& r : rules.rules)
        if (r.variant == RuleVariant::Transition) {
            REQUIRE(found == nullptr);
            found = &r;
        }
    REQUIRE(found != nullptr);
    return *found;
}

}  // namespace

TEST_CASE("golden: the five example rules come out of the fixture") {
    RuleSet rules = fixture_rules();
    CHECK(any_rendering_contains(
        rules,
        "∀ order, order.OrderStatus ∈ (\"Paid\", \"Packaged\", \"Shipped\", \"Closed\", "
        "\"Returned\", \"Cancelled\")"));
    CHECK(any_rendering_contains(
        rules, "if order.OrderStatus.New = \"Shipped\" then order.OrderStatus.Old ∈ (\"Packaged\")"));
    CHECK(any_rendering_contains(
        rules, "if order.OrderStatus = \"Paid\" then ∃ receipt, receipt.OrderNo = order.OrderNo"));
    CHECK(any_rendering_contains(
        rules, "if order.OrderStatus = \"Shipped\" then ∃ delivery, delivery.OrderNo = order.OrderNo"));
    CHECK(any_rendering_contains(rules,
                                 "∀ order, if ∃ delivery, delivery.OrderNo = order.OrderNo then ∃ "
                                 "receipt, receipt.OrderNo = order.OrderNo"));
    CHECK(any_rendering_contains(
        rules, "If ∃ x, x.OrderNo = order.OrderNo then ∀ y, y.OrderNo ≠ order.OrderNo"));
}

TEST_CASE("derive_domain_rules: fixture, empty map, two attributes") {
    CorrespondenceMap map = ecommerce_map();
    auto rules = derive_domain_rules(map);
    REQUIRE(rules.size() == 1);
    const auto& p = std::get<DomainPayload>(rules[0].payload);
    CHECK(p.table == "Order");
    CHECK(p.attribute == "OrderStatus");
    CHECK(p.allowed == std::vector<Value>{Value("Paid"), Value("Packaged"), Value("Shipped"),
                                          Value("Closed"), Value("Returned"), Value("Cancelled")});

    CorrespondenceMap empty = map;
    empty.bindings.clear();
    for (const auto& s : ecommerce_olc().states) empty.unbound_allowance.insert(s);
    CHECK(derive_domain_rules(empty).empty());

    // second status attribute: two Domain rules (manual enumeration oracle:
    // one rule per bound attribute, values in binding order)
    CorrespondenceMap two = map;
    StateBinding extra;
    extra.state = "Closed";
    extra.kind = BindingKind::Attribute;
    extra.attributes.push_back({"Order", "OrderDate", Value("2025-01-03")});
    two.bindings.push_back(extra);
    auto two_rules = derive_domain_rules(two);
    REQUIRE(two_rules.size() == 2);
    CHECK(std::get<DomainPayload>(two_rules[1].payload).attribute == "OrderDate");
}

TEST_CASE("derive_transition_rules: fixture pairs follow the life cycle") {
    RuleSet rules = fixture_rules();
    const auto& p = std::get<TransitionPayload>(single_transition_rule(rules).payload);

    auto has_pair = [&](const char* a, const char* b) {
        return std::find(p.allowed_pairs.begin(), p.allowed_pairs.end(),
                         std::make_pair(Value(a), Value(b))) != p.allowed_pairs.end();
    };
    CHECK(has_pair("Packaged", "Shipped"));
    CHECK(has_pair("Paid", "Cancelled"));
    CHECK_FALSE(has_pair("Paid", "Returned"));
    CHECK_FALSE(has_pair("Shipped", "Paid"));
    CHECK(p.initial_values == std::vector<Value>{Value("Paid")});
    // edge image oracle: all states bound, so pairs = value image of edges
    auto graph = transition_graph(ecommerce_olc());
    CHECK(p.allowed_pairs.size() == graph.edges.size());
}

TEST_CASE("derive_transition_rules: a loop edge contributes its back pair") {
    OlcModel olc;
    olc.object_name = "O";
    olc.states = {"A", "B"};
    olc.processes = {{"p", {"A"}, {"B"}, {}, {}}};
    olc.initial = {"A"};
    olc.loops = {{"B", "A"}};
    REQUIRE(validate_olc(olc).empty());

    DbSchema schema = parse_schema(R"({
      "tables": [{"name": "Obj",
        "columns": [{"name": "Id", "type": "integer"}, {"name": "St", "type": "string"}],
        "primary_key": ["Id"], "foreign_keys": []}]
    })");
    CorrespondenceMap map;
    map.object_name = "O";
    map.identity = {"Obj", {"Id"}};
    map.bindings = {{"A", BindingKind::Attribute, {{"Obj", "St", Value("a")}}, {}, ""},
                    {"B", BindingKind::Attribute, {{"Obj", "St", Value("b")}}, {}, ""}};
    REQUIRE(validate_correspondence(map, schema, olc).empty());

    auto graph = transition_graph(olc);
    auto rules = derive_transition_rules(map, graph, olc.initial);
    REQUIRE(rules.size() == 1);
    const auto& p = std::get<TransitionPayload>(rules[0].payload);
    // brute-force oracle over the graph edges
    std::set<std::pair<Value, Value>> expected;
    for (const auto& e : graph.edges) expected.insert({Value(e.from == "A" ? "a" : "b"),
                                                       Value(e.to == "A" ? "a" : "b")});
    std::set<std::pair<Value, Value>> actual(p.allowed_pairs.begin(), p.allowed_pairs.end());
    CHECK(actual == expected);
    CHECK(actual.count({Value("b"), Value("a")}) == 1);
}

TEST_CASE("derive_transition_rules: unbound interior states are contracted") {
    // A(bound) -> U(unbound) -> C(bound): the legal value change is a -> c,
    // oracle = path enumeration with unbound interiors.
    OlcModel olc;
    olc.object_name = "O";
    olc.states = {"A", "U", "C"};
    olc.processes = {{"p1", {"A"}, {"U"}, {}, {}}, {"p2", {"U"}, {"C"}, {}, {}}};
    olc.initial = {"A"};

    DbSchema schema = parse_schema(R"({
      "tables": [{"name": "Obj",
        "columns": [{"name": "Id", "type": "integer"}, {"name": "St", "type": "string"}],
        "primary_key": ["Id"], "foreign_keys": []}]
    })");
    CorrespondenceMap map;
    map.object_name = "O";
    map.identity = {"Obj", {"Id"}};
    map.unbound_allowance = {"U"};
    map.bindings = {{"A", BindingKind::Attribute, {{"Obj", "St", Value("a")}}, {}, ""},
                    {"C", BindingKind::Attribute, {{"Obj", "St", Value("c")}}, {}, ""}};
    REQUIRE(validate_correspondence(map, schema, olc).empty());

    auto rules = derive_transition_rules(map, transition_graph(olc), olc.initial);
    const auto& p = std::get<TransitionPayload>(rules[0].payload);
    CHECK(p.allowed_pairs == std::vector<std::pair<Value, Value>>{{Value("a"), Value("c")}});
    CHECK(p.initial_values == std::vector<Value>{Value("a")});

    // unbound initial: the first bound state downstream provides the value
    CorrespondenceMap partial = map;
    partial.bindings.erase(partial.bindings.begin());
    partial.unbound_allowance.insert("A");
    auto rules2 = derive_transition_rules(partial, transition_graph(olc), olc.initial);
    const auto& p2 = std::get<TransitionPayload>(rules2[0].payload);
    CHECK(p2.initial_values == std::vector<Value>{Value("c")});
    CHECK(p2.allowed_pairs.empty());
}

TEST_CASE("derive_status_link_rules: fixture emits rules only for doubly bound states") {
    RuleSet rules = fixture_rules();
    std::set<StateId> with_rule;
    for (const auto& r : rules.rules)
        if (r.variant == RuleVariant::StatusLink)
            with_rule.insert(std::get<StatusLinkPayload>(r.payload).state);
    CHECK(with_rule == std::set<StateId>{"Paid", "Shipped", "Closed", "Returned", "Cancelled"});
    // Packaged has an attribute binding only: no rule
    CHECK(with_rule.count("Packaged") == 0);
}

TEST_CASE("derive_status_link_rules: reverse value sets follow reachability") {
    RuleSet rules = fixture_rules();
    for (const auto& r : rules.rules) {
        if (r.variant != RuleVariant::StatusLink) continue;
        const auto& p = std::get<StatusLinkPayload>(r.payload);
        if (p.state == "Paid") {
            CHECK(p.reachable_values.size() == 6);  // everything is reachable from Paid
        } else if (p.state == "Shipped") {
            CHECK(p.reachable_values ==
                  std::vector<Value>{Value("Shipped"), Value("Closed"), Value("Returned")});
        } else if (p.state == "Closed") {
            CHECK(p.reachable_values == std::vector<Value>{Value("Closed")});
        }
        CHECK(p.attribute_domain.size() == 6);
    }
}

TEST_CASE("derive_link_order_rules: fixture set is the dominator reduction") {
    RuleSet rules = fixture_rules();
    std::set<std::pair<StateId, StateId>> pairs;
    for (const auto& r : rules.rules)
        if (r.variant == RuleVariant::LinkOrder) {
            const auto& p = std::get<LinkOrderPayload>(r.payload);
            pairs.insert({p.earlier_state, p.later_state});
        }
    // oracle: dominator pairs over link-bound states, transitively reduced
    // (path enumeration backs the dominator map, see test_olc)
    std::set<std::pair<StateId, StateId>> expected{
        {"Paid", "Shipped"}, {"Paid", "Cancelled"}, {"Shipped", "Closed"}, {"Shipped", "Returned"}};
    CHECK(pairs == expected);
}

TEST_CASE("derive_link_order_rules: a diamond branch state orders nothing") {
    // A -> B -> D, A -> C -> D: B is on only one path to D, so no rule B->D.
    OlcModel olc;
    olc.object_name = "O";
    olc.states = {"A", "B", "C", "D"};
    olc.processes = {{"p1", {"A"}, {"B"}, {}, {}},
                     {"p2", {"A"}, {"C"}, {}, {}},
                     {"p3", {"B"}, {"D"}, {}, {}},
                     {"p4", {"C"}, {"D"}, {}, {}}};
    olc.initial = {"A"};

    DbSchema schema;
    Table obj;
    obj.name = "Obj";
    obj.columns = {{"Id", ColumnType::Integer}, {"St", ColumnType::String}};
    obj.primary_key = {"Id"};
    schema.tables.push_back(obj);
    for (const char* s : {"B", "D"}) {
        Table ev;
        ev.name = std::string("Ev") + s;
        ev.columns = {{"Id", ColumnType::Integer}, {"ObjId", ColumnType::Integer}};
        ev.primary_key = {"Id"};
        ev.foreign_keys = {{{"ObjId"}, "Obj", {"Id"}}};
        schema.tables.push_back(ev);
    }

    CorrespondenceMap map;
    map.object_name = "O";
    map.identity = {"Obj", {"Id"}};
    map.unbound_allowance = {"A", "C"};
    map.bindings = {
        {"B", BindingKind::Link, {}, {{{{"EvB", {"ObjId"}, {}}}, "Obj"}}, ""},
        {"D", BindingKind::Link, {}, {{{{"EvD", {"ObjId"}, {}}}, "Obj"}}, ""},
    };
    REQUIRE(validate_correspondence(map, schema, olc).empty());

    auto doms = dominators(transition_graph(olc), olc.initial);
    CHECK(derive_link_order_rules(map, schema, doms).empty());

    // a single link-bound state orders nothing either
    CorrespondenceMap single = map;
    single.bindings.pop_back();
    single.unbound_allowance.insert("D");
    CHECK(derive_link_order_rules(single, schema, doms).empty());
}

TEST_CASE("derive_exclusive_rules: fixture emits x/y and x/return rules") {
    RuleSet rules = fixture_rules();
    std::set<std::pair<StateId, StateId>> pairs;
    for (const auto& r : rules.rules)
        if (r.variant == RuleVariant::ExclusiveLink) {
            const auto& p = std::get<ExclusivePayload>(r.payload);
            pairs.insert({p.state_a, p.state_b});
        }
    // {Packaged, Cancelled} is exclusive too, but Packaged is not link-bound
    CHECK(pairs == std::set<std::pair<StateId, StateId>>{{"Closed", "Cancelled"},
                                                         {"Closed", "Returned"}});
}

TEST_CASE("derive_all yields exactly the fixture rule families") {
    RuleSet rules = fixture_rules();
    std::map<int, int> per_template;
    for (const auto& r : rules.rules) per_template[r.template_no()] += 1;
    CHECK(per_template[1] == 1);
    CHECK(per_template[2] == 1);
    CHECK(per_template[3] == 5);
    CHECK(per_template[4] == 4);
    CHECK(per_template[5] == 2);

    // ordering invariant
    for (std::size_t i = 1; i < rules.rules.size(); ++i) {
        const auto& a = rules.rules[i - 1];
        const auto& b = rules.rules[i];
        CHECK((a.template_no() < b.template_no() ||
               (a.template_no() == b.template_no() && a.id < b.id)));
    }
}

TEST_CASE("derive_all with no bindings but full unbound allowance is empty") {
    OlcModel olc = ecommerce_olc();
    DbSchema schema = ecommerce_schema();
    CorrespondenceMap map;
    map.object_name = "Order";
    map.identity = {"Order", {"OrderNo"}};
    for (const auto& s : olc.states) map.unbound_allowance.insert(s);
    RuleSet rules = derive_all(olc, schema, map);
    CHECK(rules.rules.empty());
}

TEST_CASE("derive_all is deterministic") {
    Provenance prov{"d1", "d2", "d3", "2025-06-01T00:00:00Z"};
    RuleSet a = derive_all(ecommerce_olc(), ecommerce_schema(), ecommerce_map(), prov);
    RuleSet b = derive_all(ecommerce_olc(), ecommerce_schema(), ecommerce_map(), prov);
    CHECK(serialize_rules(a) == serialize_rules(b));
}

TEST_CASE("derive_all rejects invalid inputs") {
    OlcModel olc = ecommerce_olc();
    olc.states.push_back("Paid");  // duplicate
    CHECK_THROWS_AS(derive_all(olc, ecommerce_schema(), ecommerce_map()), ValidationError);
}

TEST_CASE("rule ids are content-derived and stable") {
    RuleSet a = fixture_rules();
    RuleSet b = fixture_rules();
    for (std::size_t i = 0; i < a.rules.size(); ++i) {
        CHECK(a.rules[i].id == b.rules[i].id);
        CHECK(a.rules[i].id.substr(0, 2) == "t" + std::to_string(a.rules[i].template_no()));
    }
    std::set<std::string> ids;
    for (const auto& r : a.rules) CHECK(ids.insert(r.id).second);
}

TEST_CASE("transition pairs equal the edge image when every state is bound") {
    TestRng rng(67);
    int rounds = 0;
    for (int i = 0; i < 80 && rounds < 50; ++i) {
        OlcModel olc = random_olc(rng);
        if (!validate_olc(olc).empty()) continue;

        // bind every state to one fully populated status attribute
        DbSchema schema;
        Table obj;
        obj.name = "Obj";
        obj.columns = {{"Id", ColumnType::Integer}, {"St", ColumnType::String}};
        obj.primary_key = {"Id"};
        schema.tables.push_back(obj);
        CorrespondenceMap map;
        map.object_name = olc.object_name;
        map.identity = {"Obj", {"Id"}};
        for (const auto& s : olc.states)
            map.bindings.push_back(
                {s, BindingKind::Attribute, {{"Obj", "St", Value("v_" + s)}}, {}, ""});
        if (!validate_correspondence(map, schema, olc).empty()) continue;  // retained conflicts
        ++rounds;

        auto graph = transition_graph(olc);
        auto rules = derive_transition_rules(map, graph, olc.initial);
        REQUIRE(rules.size() == 1);
        const auto& p = std::get<TransitionPayload>(rules[0].payload);

        std::set<std::pair<Value, Value>> expected;
        for (const auto& e : graph.edges) expected.insert({Value("v_" + e.from), Value("v_" + e.to)});
        std::set<std::pair<Value, Value>> actual(p.allowed_pairs.begin(), p.allowed_pairs.end());
        CHECK(actual == expected);

        std::set<Value> expected_initial;
        for (const auto& s : olc.initial) expected_initial.insert(Value("v_" + s));
        std::set<Value> actual_initial(p.initial_values.begin(), p.initial_values.end());
        CHECK(actual_initial == expected_initial);
    }
    CHECK(rounds >= 30);
}

TEST_CASE("link order rules equal the reduced dominator pairs on random models") {
    TestRng rng(73);
    int rounds = 0;
    for (int i = 0; i < 80 && rounds < 40; ++i) {
        RandomArtifacts art = random_artifacts(rng);
        if (!validate_olc(art.olc).empty()) continue;
        ++rounds;
        auto graph = transition_graph(art.olc);
        auto doms = dominators(graph, art.olc.initial);
        auto rules = derive_link_order_rules(art.map, art.schema, doms);

        std::set<StateId> link_bound;
        for (const auto& s : art.olc.states)
            if (!link_refs_of(art.map, art.schema, s).empty()) link_bound.insert(s);

        // oracle: dominator pairs from the removal-based dominator oracle,
        // transitively reduced over link-bound states
        auto oracle_doms = oracle_dominators(graph, art.olc.initial);
        std::set<std::pair<StateId, StateId>> expected;
        for (const auto& e : link_bound) {
            for (const auto& l : link_bound) {
                if (e == l || !oracle_doms[l].count(e)) continue;
                bool implied = false;
                for (const auto& m : link_bound)
                    if (m != e && m != l && oracle_doms[m].count(e) && oracle_doms[l].count(m))
                        implied = true;
                if (!implied) expected.insert({e, l});
            }
        }
        std::set<std::pair<StateId, StateId>> actual;
        for (const auto& r : rules) {
            const auto& p = std::get<LinkOrderPayload>(r.payload);
            actual.insert({p.earlier_state, p.later_state});
        }
        CHECK(actual == expected);
    }
    CHECK(rounds >= 30);
}

TEST_CASE("render_rule is injective over derived rules") {
    TestRng rng(59);
    int rounds = 0;
    for (int i = 0; i < 60; ++i) {
        RandomArtifacts art = random_artifacts(rng);
        if (!validate_olc(art.olc).empty()) continue;
        ++rounds;
        RuleSet rules = derive_all(art.olc, art.schema, art.map);
        std::set<std::string> renderings;
        for (const auto& r : rules.rules) CHECK(renderings.insert(render_rule(r)).second);
    }
    CHECK(rounds >= 40);
}

TEST_CASE("rule repository round-trips and verifies integrity") {
    Provenance prov{"abc", "def", "123", "2025-06-01T00:00:00Z"};
    RuleSet rules = derive_all(ecommerce_olc(), ecommerce_schema(), ecommerce_map(), prov);
    RuleSet back = parse_rules(serialize_rules(rules));
    CHECK(back == rules);

    // tampered rendering is rejected
    std::string doc = serialize_rules(rules);
    auto pos = doc.find("∀ order, order.OrderStatus");
    REQUIRE(pos != std::string::npos);
    std::string tampered = doc;
    tampered.replace(pos, std::string("∀ order").size(), "∀ ordre");
    CHECK_THROWS_AS(parse_rules(tampered), ParseError);

    // truncated file is a parse error
    CHECK_THROWS_AS(parse_rules(doc.substr(0, doc.size() / 2)), ParseError);
}

TEST_CASE("staleness warnings name the changed sources") {
    Provenance stored{"aaa", "bbb", "ccc", "2025-06-01T00:00:00Z"};
    Provenance current{"aaa", "zzz", "ccc", ""};
    auto warnings = staleness_warnings(stored, current);
    REQUIRE(warnings.size() == 1);
    CHECK(warnings[0].find("schema") != std::string::npos);
    CHECK(staleness_warnings(stored, stored).empty());
    // unknown current digests are skipped
    CHECK(staleness_warnings(stored, Provenance{}).empty());
}

TEST_CASE("save/load round-trips through a file") {
    auto dir = fresh_temp_dir("rules_io");
    RuleSet rules = derive_all(ecommerce_olc(), ecommerce_schema(), ecommerce_map());
    std::string path = (dir / "rules.json").string();
    save_rules(rules, path);
    CHECK(load_rules(path) == rules);
}
