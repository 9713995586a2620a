#include "dq/cli.hpp"

#include <filesystem>
#include <ostream>

#include "dq/correspondence.hpp"
#include "dq/data.hpp"
#include "dq/digest.hpp"
#include "dq/evaluate.hpp"
#include "dq/generate.hpp"
#include "dq/io.hpp"
#include "dq/olc.hpp"
#include "dq/report.hpp"
#include "dq/rules.hpp"
#include "dq/schema.hpp"

namespace dq {

namespace {

namespace fs = std::filesystem;

bool schema_is_ddl(const RunConfig& config) {
    if (config.schema_kind == "ddl") return true;
    if (config.schema_kind == "json") return false;
    return fs::path(config.schema_path).extension() == ".sql";
}

void print_diagnostics(const std::vector<Diagnostic>& ds, std::ostream& out) {
    for (const auto& d : ds) out << d.code << " [" << d.element << "]: " << d.message << "\n";
}

struct ParsedInputs {
    OlcModel olc;
    DbSchema schema;
    CorrespondenceMap map;
    Provenance provenance;
};

// Full parse of the three model inputs; ParseError propagates (exit 2),
// semantic problems come back as diagnostics (exit 1).
ParsedInputs parse_inputs(const RunConfig& config, std::vector<Diagnostic>& diagnostics) {
    ParsedInputs in;
    std::string olc_text = read_file(config.olc_path);
    std::string schema_text = read_file(config.schema_path);
    std::string map_text = read_file(config.map_path);
    in.provenance.olc_digest = digest_hex(olc_text);
    in.provenance.schema_digest = digest_hex(schema_text);
    in.provenance.correspondence_digest = digest_hex(map_text);

    in.olc = parse_olc_syntax(olc_text);
    auto olc_diags = validate_olc(in.olc);

    std::vector<Diagnostic> schema_diags;
    if (schema_is_ddl(config)) {
        try {
            in.schema = parse_ddl(schema_text);
        } catch (const ValidationError& e) {
            schema_diags = e.diagnostics();
        }
    } else {
        in.schema = parse_schema_syntax(schema_text);
        schema_diags = validate_schema(in.schema);
    }

    in.map = parse_correspondence_syntax(map_text);
    diagnostics.insert(diagnostics.end(), olc_diags.begin(), olc_diags.end());
    diagnostics.insert(diagnostics.end(), schema_diags.begin(), schema_diags.end());
    if (olc_diags.empty() && schema_diags.empty()) {
        auto map_diags = validate_correspondence(in.map, in.schema, in.olc);
        diagnostics.insert(diagnostics.end(), map_diags.begin(), map_diags.end());
    }
    return in;
}

std::string default_path(const std::string& configured, const std::string& dir,
                         const std::string& name) {
    if (!configured.empty()) return configured;
    return (fs::path(dir) / name).string();
}

}  // namespace

std::map<std::string, std::size_t> parse_inject_spec(const std::string& spec) {
    std::map<std::string, std::size_t> out;
    if (spec.empty()) return out;
    std::size_t pos = 0;
    while (pos < spec.size()) {
        std::size_t comma = spec.find(',', pos);
        std::string item = spec.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        std::size_t eq = item.find('=');
        if (eq == std::string::npos) throw ParseError("inject spec needs class=count: " + item);
        std::string klass = item.substr(0, eq);
        const auto& known = injection_class_names();
        if (std::find(known.begin(), known.end(), klass) == known.end())
            throw ParseError("unknown injection class: " + klass);
        try {
            std::size_t used = 0;
            long long n = std::stoll(item.substr(eq + 1), &used);
            if (used != item.size() - eq - 1 || n < 0) throw std::invalid_argument("count");
            out[klass] = static_cast<std::size_t>(n);
        } catch (const std::exception&) {
            throw ParseError("bad injection count in: " + item);
        }
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

int cmd_check_model(const RunConfig& config, std::ostream& out, std::ostream& err) {
    try {
        std::vector<Diagnostic> diagnostics;
        ParsedInputs in = parse_inputs(config, diagnostics);
        for (const auto& b : in.map.bindings)
            for (const auto& path : b.links)
                if (static_cast<int>(path.hops.size()) > config.max_hops)
                    diagnostics.push_back({"link-path-too-long", b.state,
                                           "path has " + std::to_string(path.hops.size()) +
                                               " hops, limit " + std::to_string(config.max_hops)});
        if (diagnostics.empty()) {
            out << "ok: OLC, schema and correspondence are consistent\n";
            return exit_clean;
        }
        print_diagnostics(diagnostics, out);
        return exit_findings;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << "\n";
        return exit_failure;
    }
}

int cmd_derive(const RunConfig& config, std::ostream& out, std::ostream& err) {
    try {
        std::vector<Diagnostic> diagnostics;
        ParsedInputs in = parse_inputs(config, diagnostics);
        if (!diagnostics.empty()) {
            print_diagnostics(diagnostics, out);
            return exit_findings;
        }
        RuleSet rules = derive_all(in.olc, in.schema, in.map, in.provenance);
        save_rules(rules, config.rules_path);
        for (const auto& r : rules.rules) out << "[" << r.id << "] " << render_rule(r) << "\n";
        out << rules.rules.size() << " rules written to " << config.rules_path << "\n";
        return exit_clean;
    } catch (const ValidationError& e) {
        print_diagnostics(e.diagnostics(), out);
        return exit_findings;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << "\n";
        return exit_failure;
    }
}

int cmd_validate(const RunConfig& config, std::ostream& out, std::ostream& err) {
    try {
        RuleSet rules = load_rules(config.rules_path);

        std::string schema_text = read_file(config.schema_path);
        DbSchema schema =
            schema_is_ddl(config) ? parse_ddl(schema_text) : parse_schema(schema_text);

        Provenance current;
        current.schema_digest = digest_hex(schema_text);
        if (!config.olc_path.empty()) current.olc_digest = digest_hex(read_file(config.olc_path));
        if (!config.map_path.empty())
            current.correspondence_digest = digest_hex(read_file(config.map_path));
        for (const auto& w : staleness_warnings(rules.provenance, current))
            err << "warning: " << w << "\n";

        Snapshot snapshot = load_snapshot(config.data_dir, schema, config.allow_missing);
        ChangeLog changelog;
        bool has_log = !config.log_path.empty();
        if (has_log) changelog = load_changelog(config.log_path, schema);

        EvalOptions options;
        options.strict_null = config.strict_null;
        EvaluationResult result =
            evaluate_all(rules, snapshot, has_log ? &changelog : nullptr, options);
        ViolationReport report =
            aggregate(result, rules, snapshot.row_counts(), changelog.events.size());
        out << (config.format == "json" ? emit_json(report) : emit_text(report));
        return (report.violations.empty() && report.dangling.empty()) ? exit_clean : exit_findings;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return exit_failure;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return exit_failure;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << "\n";
        return exit_failure;
    }
}

int cmd_gen(const RunConfig& config, std::ostream& out, std::ostream& err) {
    try {
        std::vector<Diagnostic> diagnostics;
        ParsedInputs in = parse_inputs(config, diagnostics);
        if (!diagnostics.empty()) {
            print_diagnostics(diagnostics, out);
            return exit_findings;
        }
        RuleSet rules = derive_all(in.olc, in.schema, in.map, in.provenance);

        GenOptions options;
        options.seed = config.seed;
        options.count = config.count;
        options.inject = config.inject;
        GeneratedData data = generate(in.olc, in.schema, in.map, rules, options);

        write_snapshot(data.snapshot, config.data_dir);
        std::string log_path = default_path(config.log_path, config.data_dir, "changelog.ndjson");
        write_file(log_path, serialize_changelog(data.changelog));
        out << data.snapshot.total_rows() << " rows across " << data.snapshot.tables.size()
            << " tables, " << data.changelog.events.size() << " events -> " << config.data_dir
            << "\n";
        if (!config.inject.empty()) {
            std::string manifest_path =
                default_path(config.manifest_path, config.data_dir, "manifest.json");
            write_file(manifest_path, serialize_manifest(data.manifest));
            out << data.manifest.size() << " corruptions planted, ground truth -> " << manifest_path
                << "\n";
        }
        return exit_clean;
    } catch (const ValidationError& e) {
        print_diagnostics(e.diagnostics(), out);
        return exit_findings;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return exit_failure;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << "\n";
        return exit_failure;
    }
}

}  // namespace dq
