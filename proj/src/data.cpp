#include "dq/data.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "dq/io.hpp"
#include "dq/json_util.hpp"

namespace dq {

namespace fs = std::filesystem;

const TableData* Snapshot::find_table(const std::string& name) const {
    for (const auto& t : tables)
        if (t.name == name) return &t;
    return nullptr;
}

std::size_t Snapshot::total_rows() const {
    std::size_t n = 0;
    for (const auto& t : tables) n += t.rows.size();
    return n;
}

std::map<std::string, std::size_t> Snapshot::row_counts() const {
    std::map<std::string, std::size_t> out;
    for (const auto& t : tables) out[t.name] = t.rows.size();
    return out;
}

const char* change_kind_name(ChangeKind k) {
    switch (k) {
        case ChangeKind::Insert: return "insert";
        case ChangeKind::Update: return "update";
        case ChangeKind::Delete: return "delete";
    }
    return "insert";
}

// --- files -------------------------------------------------------------------

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot read file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
    fs::path p(path);
    if (p.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(p.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ParseError("cannot write file: " + path);
    out << content;
    if (!out) throw ParseError("write failed: " + path);
}

// --- CSV ----------------------------------------------------------------------

std::vector<std::vector<CsvField>> parse_csv(const std::string& text) {
    std::vector<std::vector<CsvField>> records;
    std::vector<CsvField> record;
    CsvField field;
    enum { StartOfField, Unquoted, Quoted, QuoteInQuoted } state = StartOfField;
    int line = 1;

    auto end_field = [&] {
        record.push_back(field);
        field = CsvField{};
        state = StartOfField;
    };
    auto end_record = [&] {
        end_field();
        records.push_back(std::move(record));
        record.clear();
    };

    std::size_t i = 0;
    while (i < text.size()) {
        char c = text[i];
        switch (state) {
            case StartOfField:
                if (c == '"') {
                    field.quoted = true;
                    state = Quoted;
                } else if (c == ',') {
                    end_field();
                } else if (c == '\n') {
                    end_record();
                    ++line;
                } else if (c == '\r') {
                    // handled with the following \n
                    if (i + 1 >= text.size() || text[i + 1] != '\n')
                        throw ParseError("bare carriage return", line);
                } else {
                    field.text += c;
                    state = Unquoted;
                }
                break;
            case Unquoted:
                if (c == ',') {
                    end_field();
                } else if (c == '\n') {
                    end_record();
                    ++line;
                } else if (c == '\r') {
                    if (i + 1 >= text.size() || text[i + 1] != '\n')
                        throw ParseError("bare carriage return", line);
                } else if (c == '"') {
                    throw ParseError("quote inside an unquoted field", line);
                } else {
                    field.text += c;
                }
                break;
            case Quoted:
                if (c == '"') {
                    state = QuoteInQuoted;
                } else {
                    if (c == '\n') ++line;
                    field.text += c;
                }
                break;
            case QuoteInQuoted:
                if (c == '"') {
                    field.text += '"';
                    state = Quoted;
                } else if (c == ',') {
                    end_field();
                } else if (c == '\n') {
                    end_record();
                    ++line;
                } else if (c == '\r') {
                    if (i + 1 >= text.size() || text[i + 1] != '\n')
                        throw ParseError("bare carriage return", line);
                } else {
                    throw ParseError("text after a closing quote", line);
                }
                break;
        }
        ++i;
    }
    if (state == Quoted) throw ParseError("unterminated quoted field", line);
    if (state != StartOfField || !field.text.empty() || field.quoted || !record.empty()) end_record();
    // A trailing newline leaves one empty pending record; the loop above
    // already avoids emitting it.
    return records;
}

std::string csv_escape(const std::string& field) {
    bool needs_quotes = field.find_first_of(",\"\r\n") != std::string::npos;
    if (!needs_quotes) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += "\"";
    return out;
}

// --- snapshot -------------------------------------------------------------------

namespace {

KeyTuple key_of_row(const Table& table, const Row& row) {
    KeyTuple key;
    for (const auto& k : table.primary_key) key.push_back(row.fields[table.column_index(k)]);
    return key;
}

TableData load_table_csv(const std::string& path, const Table& table) {
    auto records = parse_csv(read_file(path));
    if (records.empty()) throw ParseError(table.name + ".csv: missing header row");

    std::vector<std::string> header;
    for (const auto& f : records[0]) header.push_back(f.text);
    std::vector<std::string> expected;
    for (const auto& c : table.columns) expected.push_back(c.name);
    if (header != expected) {
        std::string msg = table.name + ".csv: header mismatch, expected ";
        for (const auto& c : expected) msg += c + ",";
        throw ParseError(msg, 1);
    }

    TableData data;
    data.name = table.name;
    std::map<KeyTuple, int> seen_keys;
    for (std::size_t r = 1; r < records.size(); ++r) {
        const auto& rec = records[r];
        int line = static_cast<int>(r + 1);
        if (rec.size() != table.columns.size())
            throw ParseError(table.name + ".csv: expected " + std::to_string(table.columns.size()) +
                                 " fields, found " + std::to_string(rec.size()),
                             line);
        Row row;
        row.line = line;
        for (std::size_t c = 0; c < rec.size(); ++c) {
            const auto& f = rec[c];
            if (f.text.empty() && !f.quoted) {
                row.fields.emplace_back(std::monostate{});
                continue;
            }
            auto v = coerce_text(f.text, table.columns[c].type);
            if (!v)
                throw ParseError(table.name + ".csv: value \"" + f.text + "\" does not fit column " +
                                     table.columns[c].name + " (" +
                                     column_type_name(table.columns[c].type) + ")",
                                 line);
            row.fields.push_back(std::move(*v));
        }
        KeyTuple key = key_of_row(table, row);
        for (const auto& kv : key)
            if (is_null(kv))
                throw ParseError(table.name + ".csv: primary key contains NULL", line);
        auto [it, inserted] = seen_keys.emplace(key, line);
        if (!inserted)
            throw ParseError(table.name + ".csv: duplicate key (also on line " +
                                 std::to_string(it->second) + ")",
                             line);
        data.rows.push_back(std::move(row));
    }
    return data;
}

}  // namespace

Snapshot load_snapshot(const std::string& directory, const DbSchema& schema,
                       const std::set<std::string>& allow_missing) {
    Snapshot snapshot;
    snapshot.schema = schema;
    for (const auto& table : schema.tables) {
        fs::path path = fs::path(directory) / (table.name + ".csv");
        if (!fs::exists(path)) {
            if (!allow_missing.count(table.name))
                throw ParseError("missing snapshot file: " + path.string());
            snapshot.tables.push_back({table.name, {}});
            continue;
        }
        snapshot.tables.push_back(load_table_csv(path.string(), table));
    }
    return snapshot;
}

void write_snapshot(const Snapshot& snapshot, const std::string& directory) {
    for (std::size_t i = 0; i < snapshot.tables.size(); ++i) {
        const auto& table = snapshot.schema.tables[i];
        const auto& data = snapshot.tables[i];
        std::ostringstream out;
        for (std::size_t c = 0; c < table.columns.size(); ++c)
            out << (c ? "," : "") << csv_escape(table.columns[c].name);
        out << "\n";
        for (const auto& row : data.rows) {
            for (std::size_t c = 0; c < row.fields.size(); ++c) {
                if (c) out << ",";
                const auto& v = row.fields[c];
                if (is_null(v)) continue;  // null -> empty unquoted field
                std::string text = value_to_text(v);
                // A present-but-empty string must stay distinguishable from null.
                out << (text.empty() ? "\"\"" : csv_escape(text));
            }
            out << "\n";
        }
        write_file((fs::path(directory) / (table.name + ".csv")).string(), out.str());
    }
}

// --- changelog --------------------------------------------------------------------

namespace {

ChangeEvent parse_event(const nlohmann::json& j, const DbSchema& schema, int line) {
    require_keys(j, {"seq", "ts", "table", "key", "kind", "attribute", "old", "new"}, "event");
    ChangeEvent ev;
    const auto& seq = require_field(j, "seq", "event");
    if (!seq.is_number_integer()) throw ParseError("event seq must be an integer", line);
    ev.seq = seq.get<std::int64_t>();
    ev.timestamp = require_string(j, "ts", "event");
    ev.table = require_string(j, "table", "event");

    const Table* table = schema.find_table(ev.table);
    if (!table) throw ParseError("event references unknown table " + ev.table, line);

    const auto& key = require_field(j, "key", "event");
    if (!key.is_object() || key.empty()) throw ParseError("event key must be a non-empty object", line);
    for (auto it = key.begin(); it != key.end(); ++it) {
        const Column* col = table->find_column(it.key());
        if (!col)
            throw ParseError("event key names unknown column " + ev.table + "." + it.key(), line);
        if (!json_matches_type(it.value(), col->type))
            throw ParseError("event key value for " + it.key() + " does not fit column type", line);
        ev.key[it.key()] = value_from_json(it.value());
    }
    for (const auto& pk : table->primary_key)
        if (!ev.key.count(pk))
            throw ParseError("event key misses primary key column " + pk, line);

    std::string kind = require_string(j, "kind", "event");
    if (kind == "insert") ev.kind = ChangeKind::Insert;
    else if (kind == "update") ev.kind = ChangeKind::Update;
    else if (kind == "delete") ev.kind = ChangeKind::Delete;
    else throw ParseError("unknown event kind \"" + kind + "\"", line);

    const Column* attr_col = nullptr;
    if (j.contains("attribute")) {
        ev.attribute = require_string(j, "attribute", "event");
        attr_col = table->find_column(*ev.attribute);
        if (!attr_col)
            throw ParseError("event references unknown column " + ev.table + "." + *ev.attribute, line);
    }

    switch (ev.kind) {
        case ChangeKind::Update:
            if (!ev.attribute) throw ParseError("update event misses \"attribute\"", line);
            if (!j.contains("old")) throw ParseError("update event misses \"old\"", line);
            if (!j.contains("new")) throw ParseError("update event misses \"new\"", line);
            break;
        case ChangeKind::Insert:
            if (j.contains("old")) throw ParseError("insert event cannot carry \"old\"", line);
            if (ev.attribute && !j.contains("new"))
                throw ParseError("insert event with \"attribute\" misses \"new\"", line);
            if (!ev.attribute && j.contains("new"))
                throw ParseError("insert event with \"new\" misses \"attribute\"", line);
            break;
        case ChangeKind::Delete:
            if (ev.attribute || j.contains("old") || j.contains("new"))
                throw ParseError("delete event carries no attribute or values", line);
            break;
    }
    if (j.contains("old")) {
        if (attr_col && !json_matches_type(j["old"], attr_col->type))
            throw ParseError("event old value does not fit column type", line);
        ev.old_value = value_from_json(j["old"]);
    }
    if (j.contains("new")) {
        if (attr_col && !json_matches_type(j["new"], attr_col->type))
            throw ParseError("event new value does not fit column type", line);
        ev.new_value = value_from_json(j["new"]);
    }
    return ev;
}

}  // namespace

ChangeLog parse_changelog(const std::string& text, const DbSchema& schema) {
    ChangeLog log;
    std::istringstream in(text);
    std::string line_text;
    int line = 0;
    std::optional<std::int64_t> last_seq;
    while (std::getline(in, line_text)) {
        ++line;
        if (line_text.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line_text);
        } catch (const nlohmann::json::parse_error& e) {
            throw ParseError(std::string("malformed event: ") + e.what(), line);
        }
        ChangeEvent ev = parse_event(j, schema, line);
        if (last_seq && ev.seq <= *last_seq)
            throw ParseError("seq " + std::to_string(ev.seq) + " does not increase (previous " +
                                 std::to_string(*last_seq) + ")",
                             line);
        last_seq = ev.seq;
        log.events.push_back(std::move(ev));
    }
    return log;
}

ChangeLog load_changelog(const std::string& path, const DbSchema& schema) {
    return parse_changelog(read_file(path), schema);
}

nlohmann::json event_to_json(const ChangeEvent& ev) {
    nlohmann::json j;
    j["seq"] = ev.seq;
    j["ts"] = ev.timestamp;
    j["table"] = ev.table;
    nlohmann::json key;
    for (const auto& [col, v] : ev.key) key[col] = value_to_json(v);
    j["key"] = key;
    j["kind"] = change_kind_name(ev.kind);
    if (ev.attribute) j["attribute"] = *ev.attribute;
    if (ev.kind == ChangeKind::Update) {
        j["old"] = value_to_json(ev.old_value);
        j["new"] = value_to_json(ev.new_value);
    } else if (ev.kind == ChangeKind::Insert && ev.attribute) {
        j["new"] = value_to_json(ev.new_value);
    }
    return j;
}

std::string serialize_changelog(const ChangeLog& log) {
    std::string out;
    for (const auto& ev : log.events) out += event_to_json(ev).dump() + "\n";
    return out;
}

}  // namespace dq
