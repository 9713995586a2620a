#include "dq/schema.hpp"

#include <algorithm>
#include <set>

#include "dq/json_util.hpp"

namespace dq {

const Column* Table::find_column(const std::string& column_name) const {
    for (const auto& c : columns)
        if (c.name == column_name) return &c;
    return nullptr;
}

int Table::column_index(const std::string& column_name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i].name == column_name) return static_cast<int>(i);
    return -1;
}

const Table* DbSchema::find_table(const std::string& table_name) const {
    for (const auto& t : tables)
        if (t.name == table_name) return &t;
    return nullptr;
}

DbSchema parse_schema_syntax(const std::string& document) {
    auto j = parse_json_text(document);
    require_keys(j, {"tables"}, "schema document");

    DbSchema schema;
    const auto& tables = require_field(j, "tables", "schema document");
    if (!tables.is_array()) throw ParseError("tables: expected an array");
    for (const auto& tj : tables) {
        require_keys(tj, {"name", "columns", "primary_key", "foreign_keys"}, "table");
        Table t;
        t.name = require_string(tj, "name", "table");
        const auto& cols = require_field(tj, "columns", "table " + t.name);
        if (!cols.is_array()) throw ParseError("table " + t.name + ": columns must be an array");
        for (const auto& cj : cols) {
            require_keys(cj, {"name", "type"}, "column");
            Column c;
            c.name = require_string(cj, "name", "column");
            auto type_name = require_string(cj, "type", "column " + c.name);
            auto type = column_type_from_name(type_name);
            if (!type)
                throw ParseError("column " + t.name + "." + c.name + ": unknown type \"" + type_name +
                                 "\"");
            c.type = *type;
            t.columns.push_back(std::move(c));
        }
        t.primary_key =
            require_string_array(require_field(tj, "primary_key", "table " + t.name), "primary_key");
        if (tj.contains("foreign_keys")) {
            const auto& fks = tj["foreign_keys"];
            if (!fks.is_array())
                throw ParseError("table " + t.name + ": foreign_keys must be an array");
            for (const auto& fj : fks) {
                require_keys(fj, {"columns", "ref_table", "ref_columns"}, "foreign key");
                ForeignKey fk;
                fk.columns = require_string_array(require_field(fj, "columns", "foreign key"),
                                                  "foreign key columns");
                fk.ref_table = require_string(fj, "ref_table", "foreign key");
                fk.ref_columns = require_string_array(
                    require_field(fj, "ref_columns", "foreign key"), "foreign key ref_columns");
                t.foreign_keys.push_back(std::move(fk));
            }
        }
        schema.tables.push_back(std::move(t));
    }
    return schema;
}

std::vector<Diagnostic> validate_schema(const DbSchema& schema) {
    std::vector<Diagnostic> out;
    std::set<std::string> names;
    for (const auto& t : schema.tables) {
        if (!names.insert(t.name).second)
            out.push_back({"duplicate-table", t.name, "table declared more than once"});

        std::set<std::string> cols;
        for (const auto& c : t.columns)
            if (!cols.insert(c.name).second)
                out.push_back({"duplicate-column", t.name + "." + c.name,
                               "column declared more than once"});

        if (t.primary_key.empty())
            out.push_back({"empty-primary-key", t.name, "table needs a primary key"});
        for (const auto& k : t.primary_key)
            if (!t.find_column(k))
                out.push_back({"unknown-column", t.name + "." + k,
                               "primary key names a column the table lacks"});
    }

    for (const auto& t : schema.tables) {
        for (const auto& fk : t.foreign_keys) {
            std::string element = t.name + " -> " + fk.ref_table;
            const Table* target = schema.find_table(fk.ref_table);
            if (!target) {
                out.push_back({"dangling-fk", element,
                               "foreign key references unknown table " + fk.ref_table});
                continue;
            }
            if (fk.columns.size() != fk.ref_columns.size()) {
                out.push_back({"fk-arity-mismatch", element,
                               "foreign key column lists differ in length"});
                continue;
            }
            for (const auto& c : fk.columns)
                if (!t.find_column(c))
                    out.push_back({"unknown-column", t.name + "." + c,
                                   "foreign key names a column the table lacks"});
            if (fk.ref_columns != target->primary_key)
                out.push_back({"fk-not-primary-key", element,
                               "foreign key must reference the target's primary key"});
        }
    }
    return out;
}

DbSchema parse_schema(const std::string& document) {
    DbSchema schema = parse_schema_syntax(document);
    auto diagnostics = validate_schema(schema);
    if (!diagnostics.empty()) throw ValidationError(std::move(diagnostics));
    return schema;
}

std::string serialize_schema(const DbSchema& schema) {
    nlohmann::json j;
    auto tables = nlohmann::json::array();
    for (const auto& t : schema.tables) {
        nlohmann::json tj;
        tj["name"] = t.name;
        auto cols = nlohmann::json::array();
        for (const auto& c : t.columns)
            cols.push_back({{"name", c.name}, {"type", column_type_name(c.type)}});
        tj["columns"] = cols;
        tj["primary_key"] = t.primary_key;
        auto fks = nlohmann::json::array();
        for (const auto& fk : t.foreign_keys)
            fks.push_back({{"columns", fk.columns},
                           {"ref_table", fk.ref_table},
                           {"ref_columns", fk.ref_columns}});
        tj["foreign_keys"] = fks;
        tables.push_back(tj);
    }
    j["tables"] = tables;
    return j.dump(2) + "\n";
}

bool link_path_resolves(const DbSchema& schema, const LinkPath& path, std::string* error) {
    auto fail = [&](const std::string& msg) {
        if (error) *error = msg;
        return false;
    };
    if (path.hops.empty()) return fail("link path has no hops");
    for (std::size_t i = 0; i < path.hops.size(); ++i) {
        const auto& hop = path.hops[i];
        const Table* t = schema.find_table(hop.table);
        if (!t) return fail("unknown table " + hop.table);
        std::string next =
            i + 1 < path.hops.size() ? path.hops[i + 1].table : path.target_table;
        bool found = false;
        for (const auto& fk : t->foreign_keys)
            if (fk.columns == hop.fk_columns && fk.ref_table == next) found = true;
        if (!found)
            return fail("table " + hop.table + " has no foreign key on the given columns into " +
                        next);
    }
    if (!schema.find_table(path.target_table)) return fail("unknown table " + path.target_table);
    return true;
}

namespace {

void extend_paths(const DbSchema& schema, const std::string& at, const std::string& to, int hops_left,
                  std::vector<LinkHop>& prefix, std::set<std::string>& visited,
                  std::vector<LinkPath>& out) {
    if (hops_left == 0) return;
    const Table* t = schema.find_table(at);
    if (!t) return;
    for (const auto& fk : t->foreign_keys) {
        if (visited.count(fk.ref_table)) continue;
        prefix.push_back({at, fk.columns, {}});
        if (fk.ref_table == to) {
            out.push_back({prefix, to});
        } else {
            visited.insert(fk.ref_table);
            extend_paths(schema, fk.ref_table, to, hops_left - 1, prefix, visited, out);
            visited.erase(fk.ref_table);
        }
        prefix.pop_back();
    }
}

}  // namespace

std::vector<LinkPath> find_link_paths(const DbSchema& schema, const std::string& from_table,
                                      const std::string& to_table, int max_hops) {
    if (!schema.find_table(from_table))
        throw ValidationError({{"unknown-table", from_table, "link path source does not exist"}});
    if (!schema.find_table(to_table))
        throw ValidationError({{"unknown-table", to_table, "link path target does not exist"}});
    if (max_hops < 1)
        throw ValidationError({{"bad-max-hops", std::to_string(max_hops), "max_hops must be >= 1"}});
    if (from_table == to_table) return {};

    std::vector<LinkPath> out;
    std::vector<LinkHop> prefix;
    std::set<std::string> visited{from_table};
    extend_paths(schema, from_table, to_table, max_hops, prefix, visited, out);
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace dq
