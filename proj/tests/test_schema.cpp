#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dq/schema.hpp"
#include "support.hpp"

using namespace dq;
using namespace dqtest;

TEST_CASE("parse_schema accepts the e-commerce fixture") {
    DbSchema s = parse_schema(fixture_text("ecommerce/schema.json"));
    CHECK(s.tables.size() == 6);
    const Table* receipt = s.find_table("Receipt");
    REQUIRE(receipt != nullptr);
    REQUIRE(receipt->foreign_keys.size() == 1);
    CHECK(receipt->foreign_keys[0].ref_table == "Order");
    const Table* ret = s.find_table("Return");
    REQUIRE(ret != nullptr);
    CHECK(ret->foreign_keys[0].ref_table == "Delivery");
}

TEST_CASE("parse_schema accepts an empty table list") {
    CHECK(parse_schema(R"({"tables": []})").tables.empty());
}

TEST_CASE("parse_schema rejects a foreign key to a missing table") {
    std::string doc = R"({
      "tables": [{
        "name": "A",
        "columns": [{"name": "id", "type": "integer"}, {"name": "b", "type": "integer"}],
        "primary_key": ["id"],
        "foreign_keys": [{"columns": ["b"], "ref_table": "Ghost", "ref_columns": ["id"]}]
      }]
    })";
    CHECK_THROWS_WITH_AS(parse_schema(doc), doctest::Contains("Ghost"), ValidationError);
}

TEST_CASE("parse_schema rejects arity mismatches and non-PK references") {
    std::string base = R"({
      "tables": [
        {"name": "P", "columns": [{"name": "id", "type": "integer"}], "primary_key": ["id"],
         "foreign_keys": []},
        {"name": "C", "columns": [{"name": "id", "type": "integer"}, {"name": "p", "type": "integer"}],
         "primary_key": ["id"],
         "foreign_keys": [{"columns": ["p"], "ref_table": "P", "ref_columns": ["id", "id"]}]}
      ]
    })";
    CHECK_THROWS_WITH_AS(parse_schema(base), doctest::Contains("fk-arity-mismatch"),
                         ValidationError);
}

TEST_CASE("parse_ddl on the fixture DDL equals the declarative fixture") {
    DbSchema declarative = parse_schema(fixture_text("ecommerce/schema.json"));
    DbSchema ddl = parse_ddl(fixture_text("ecommerce/schema.sql"));
    CHECK(ddl == declarative);
}

TEST_CASE("parse_ddl handles a minimal table") {
    DbSchema s = parse_ddl("CREATE TABLE t (id integer, PRIMARY KEY (id));");
    REQUIRE(s.tables.size() == 1);
    CHECK(s.tables[0].name == "t");
    CHECK(s.tables[0].foreign_keys.empty());
    CHECK(s.tables[0].primary_key == std::vector<std::string>{"id"});
}

TEST_CASE("parse_ddl keywords are case-insensitive") {
    DbSchema s = parse_ddl("create table T (id INTEGER, primary key (id));");
    CHECK(s.tables[0].columns[0].type == ColumnType::Integer);
}

TEST_CASE("parse_ddl rejects constructs outside the subset") {
    CHECK_THROWS_WITH_AS(
        parse_ddl("CREATE TABLE t (id integer, CHECK (id > 0), PRIMARY KEY (id));"),
        doctest::Contains("unsupported construct"), ParseError);
    CHECK_THROWS_AS(parse_ddl("DROP TABLE t;"), ParseError);
    CHECK_THROWS_AS(parse_ddl("CREATE TABLE t (id integer);"), ParseError);  // no PK
    CHECK_THROWS_AS(parse_ddl("CREATE TABLE t (\"id\" integer, PRIMARY KEY (id));"), ParseError);
    // positioned
    try {
        parse_ddl("CREATE TABLE t (\n  id wat,\n  PRIMARY KEY (id)\n);");
        CHECK(false);
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
    }
}

TEST_CASE("DDL and declarative parsers agree on rendered random schemas") {
    TestRng rng(31);
    for (int round = 0; round < 120; ++round) {
        DbSchema s = random_schema(rng);
        REQUIRE(validate_schema(s).empty());
        CHECK(parse_ddl(render_ddl(s)) == s);
    }
}

TEST_CASE("schema serialize/parse round-trips") {
    TestRng rng(37);
    for (int round = 0; round < 120; ++round) {
        DbSchema s = random_schema(rng);
        CHECK(parse_schema(serialize_schema(s)) == s);
    }
    DbSchema fixture = ecommerce_schema();
    CHECK(parse_schema(serialize_schema(fixture)) == fixture);
}

TEST_CASE("find_link_paths finds the two-hop return chain") {
    DbSchema s = ecommerce_schema();
    auto paths = find_link_paths(s, "Return", "Order", 2);
    REQUIRE(paths.size() == 1);
    REQUIRE(paths[0].hops.size() == 2);
    CHECK(paths[0].hops[0].table == "Return");
    CHECK(paths[0].hops[0].fk_columns == std::vector<std::string>{"DeliveryNo"});
    CHECK(paths[0].hops[1].table == "Delivery");
    CHECK(paths[0].target_table == "Order");

    // too few hops allowed: no path
    CHECK(find_link_paths(s, "Return", "Order", 1).empty());
}

TEST_CASE("find_link_paths with identical source and target is empty") {
    DbSchema s = ecommerce_schema();
    CHECK(find_link_paths(s, "Order", "Order", 3).empty());
}

TEST_CASE("find_link_paths rejects unknown tables") {
    DbSchema s = ecommerce_schema();
    CHECK_THROWS_AS(find_link_paths(s, "Nope", "Order", 3), ValidationError);
    CHECK_THROWS_AS(find_link_paths(s, "Order", "Nope", 3), ValidationError);
    CHECK_THROWS_AS(find_link_paths(s, "Return", "Order", 0), ValidationError);
}

TEST_CASE("find_link_paths equals the DFS oracle on random schemas") {
    TestRng rng(41);
    for (int round = 0; round < 150; ++round) {
        DbSchema s = random_schema(rng);
        for (const auto& from : s.tables) {
            for (const auto& to : s.tables) {
                if (from.name == to.name) continue;
                auto got = find_link_paths(s, from.name, to.name, 3);
                auto want = oracle_link_paths(s, from.name, to.name, 3);
                CHECK(got == want);
                // paths chain correctly and are unique
                std::set<LinkPath> unique(got.begin(), got.end());
                CHECK(unique.size() == got.size());
                for (const auto& p : got) {
                    std::string err;
                    CHECK(link_path_resolves(s, p, &err));
                }
            }
        }
    }
}

TEST_CASE("link_path_resolves reports the broken hop") {
    DbSchema s = ecommerce_schema();
    LinkPath bad{{{"Return", {"DeliveryNo"}, {}}}, "Order"};  // skips Delivery
    std::string err;
    CHECK_FALSE(link_path_resolves(s, bad, &err));
    CHECK(err.find("Return") != std::string::npos);
}
