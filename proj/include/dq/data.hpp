#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "dq/schema.hpp"
#include "dq/value.hpp"

namespace dq {

using KeyTuple = std::vector<Value>;

struct Row {
    std::vector<Value> fields;  // aligned with the table's schema columns
    int line = 0;               // source CSV line, for messages

    bool operator==(const Row& o) const { return fields == o.fields; }
};

struct TableData {
    std::string name;
    std::vector<Row> rows;

    bool operator==(const TableData&) const = default;
};

// Typed tabular state of every schema table. Tables allowed to be missing
// load as empty. Keys are unique per table (enforced on load).
struct Snapshot {
    DbSchema schema;
    std::vector<TableData> tables;  // same order as schema.tables

    const TableData* find_table(const std::string& name) const;
    std::size_t total_rows() const;
    std::map<std::string, std::size_t> row_counts() const;
};

enum class ChangeKind { Insert, Update, Delete };

const char* change_kind_name(ChangeKind k);

struct ChangeEvent {
    std::int64_t seq = 0;
    std::string timestamp;  // ISO-8601
    std::string table;
    std::map<std::string, Value> key;
    ChangeKind kind = ChangeKind::Insert;
    std::optional<std::string> attribute;  // required for updates
    Value old_value;                       // updates: previous value (may be null)
    Value new_value;                       // updates and optionally inserts

    bool has_attribute() const { return attribute.has_value(); }
    bool operator==(const ChangeEvent&) const = default;
};

struct ChangeLog {
    std::vector<ChangeEvent> events;  // seq strictly increasing

    bool operator==(const ChangeLog&) const = default;
};

// --- CSV (RFC 4180) -------------------------------------------------------

// Parsed records, quotes and embedded separators handled per RFC 4180.
// An unquoted empty field stands for NULL, a quoted empty field ("") for
// the empty string; parse_csv reports that distinction via `quoted`.
struct CsvField {
    std::string text;
    bool quoted = false;
};
std::vector<std::vector<CsvField>> parse_csv(const std::string& text);

std::string csv_escape(const std::string& field);

// --- loading ---------------------------------------------------------------

// Reads `<table>.csv` per schema table from `directory`. Header must equal
// the schema column list. Throws ParseError on malformed files, duplicate
// keys and uncoercible values.
Snapshot load_snapshot(const std::string& directory, const DbSchema& schema,
                       const std::set<std::string>& allow_missing = {});

void write_snapshot(const Snapshot& snapshot, const std::string& directory);

// Newline-delimited JSON events; validates monotone seq, table/column
// existence, per-kind field requirements and value/column type agreement.
ChangeLog parse_changelog(const std::string& text, const DbSchema& schema);
ChangeLog load_changelog(const std::string& path, const DbSchema& schema);
std::string serialize_changelog(const ChangeLog& log);

nlohmann::json event_to_json(const ChangeEvent& ev);

}  // namespace dq
