#pragma once

#include <string>
#include <vector>

#include "dq/diagnostics.hpp"
#include "dq/value.hpp"

namespace dq {

struct Column {
    std::string name;
    ColumnType type = ColumnType::String;

    bool operator==(const Column&) const = default;
};

struct ForeignKey {
    std::vector<std::string> columns;
    std::string ref_table;
    std::vector<std::string> ref_columns;

    bool operator==(const ForeignKey&) const = default;
};

struct Table {
    std::string name;
    std::vector<Column> columns;
    std::vector<std::string> primary_key;
    std::vector<ForeignKey> foreign_keys;

    const Column* find_column(const std::string& column_name) const;
    int column_index(const std::string& column_name) const;  // -1 when absent
    bool operator==(const Table&) const = default;
};

struct DbSchema {
    std::vector<Table> tables;

    const Table* find_table(const std::string& table_name) const;
    bool operator==(const DbSchema&) const = default;
};

// One step of a foreign-key chain: the FK columns of `table` point at the
// next hop's table (or at the path target for the last hop). ref_columns
// holds the referenced primary key once the path has been resolved against
// a schema; correspondence files leave it empty.
struct LinkHop {
    std::string table;
    std::vector<std::string> fk_columns;
    std::vector<std::string> ref_columns;

    auto operator<=>(const LinkHop&) const = default;
};

// FK chain directed child -> parent, from hops.front().table to target_table.
struct LinkPath {
    std::vector<LinkHop> hops;
    std::string target_table;

    std::string source_table() const { return hops.empty() ? std::string() : hops.front().table; }
    auto operator<=>(const LinkPath&) const = default;
};

// --- declarative file format -------------------------------------------

DbSchema parse_schema_syntax(const std::string& document);
std::vector<Diagnostic> validate_schema(const DbSchema& schema);
// Syntax + validation; throws ParseError / ValidationError.
DbSchema parse_schema(const std::string& document);
std::string serialize_schema(const DbSchema& schema);

// --- DDL subset ----------------------------------------------------------
// CREATE TABLE name (col type, ..., PRIMARY KEY (cols)
//     [, FOREIGN KEY (cols) REFERENCES table(cols)]*);
// Keywords case-insensitive, identifiers unquoted, statements ';'-separated.
// Anything outside the subset is rejected with a positioned ParseError.
DbSchema parse_ddl(const std::string& text);
std::string render_ddl(const DbSchema& schema);

// --- link discovery ------------------------------------------------------

// All FK chains child->parent from `from_table` to `to_table` visiting no
// table twice, at most max_hops long, ordered lexicographically by hop
// (table, fk columns) sequences. from == to yields the empty list.
std::vector<LinkPath> find_link_paths(const DbSchema& schema, const std::string& from_table,
                                      const std::string& to_table, int max_hops);

// True when every hop names an existing FK and the chain ends at
// path.target_table. Used by correspondence resolution.
bool link_path_resolves(const DbSchema& schema, const LinkPath& path, std::string* error);

}  // namespace dq
