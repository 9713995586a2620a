#include <iostream>

#include <CLI11.hpp>

#include "dq/cli.hpp"
#include "dq/diagnostics.hpp"

int main(int argc, char** argv) {
    CLI::App app{"dq - life-cycle driven data quality analyzer"};
    app.require_subcommand(1);

    dq::RunConfig config;
    std::string inject_spec;

    auto add_model_flags = [&](CLI::App* cmd) {
        cmd->add_option("--olc", config.olc_path, "object life cycle file (JSON)")->required();
        cmd->add_option("--schema", config.schema_path, "schema file (.json or .sql)")->required();
        cmd->add_option("--map", config.map_path, "correspondence file (JSON)")->required();
        cmd->add_option("--schema-kind", config.schema_kind, "schema format: auto|json|ddl")
            ->check(CLI::IsMember({"auto", "json", "ddl"}));
    };

    auto* check = app.add_subcommand("check-model", "validate OLC, schema and correspondence");
    add_model_flags(check);
    check->add_option("--max-hops", config.max_hops, "longest allowed link path")
        ->check(CLI::Range(1, 16));

    auto* derive = app.add_subcommand("derive", "derive dynamic integrity rules");
    add_model_flags(derive);
    derive->add_option("--rules", config.rules_path, "rule repository output file")->required();

    auto* validate = app.add_subcommand("validate", "evaluate rules against a snapshot");
    validate->add_option("--rules", config.rules_path, "rule repository file")->required();
    validate->add_option("--schema", config.schema_path, "schema file (.json or .sql)")->required();
    validate->add_option("--data", config.data_dir, "snapshot directory with <table>.csv")->required();
    validate->add_option("--log", config.log_path, "changelog file (NDJSON)");
    validate->add_option("--olc", config.olc_path, "OLC file, for staleness checking");
    validate->add_option("--map", config.map_path, "correspondence file, for staleness checking");
    validate->add_option("--format", config.format, "report format")
        ->check(CLI::IsMember({"text", "json"}));
    validate->add_option("--schema-kind", config.schema_kind, "schema format: auto|json|ddl")
        ->check(CLI::IsMember({"auto", "json", "ddl"}));
    validate->add_flag("--strict-null", config.strict_null,
                       "NULL status values violate domain rules");
    validate->add_option("--allow-missing", config.allow_missing,
                         "tables whose CSV may be absent (loaded empty)");

    auto* gen = app.add_subcommand("gen", "generate life-cycle conformant fixture data");
    add_model_flags(gen);
    gen->add_option("--data", config.data_dir, "output snapshot directory")->required();
    gen->add_option("--log", config.log_path, "output changelog path (default <data>/changelog.ndjson)");
    gen->add_option("--manifest", config.manifest_path,
                    "ground-truth manifest path (default <data>/manifest.json)");
    gen->add_option("--seed", config.seed, "random seed");
    gen->add_option("--count", config.count, "number of objects");
    gen->add_option("--inject", inject_spec,
                    "corruptions per class, e.g. domain=2,transition=3");

    CLI11_PARSE(app, argc, argv);

    try {
        config.inject = dq::parse_inject_spec(inject_spec);
    } catch (const dq::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return dq::exit_failure;
    }

    if (check->parsed()) return dq::cmd_check_model(config, std::cout, std::cerr);
    if (derive->parsed()) return dq::cmd_derive(config, std::cout, std::cerr);
    if (validate->parsed()) return dq::cmd_validate(config, std::cout, std::cerr);
    if (gen->parsed()) return dq::cmd_gen(config, std::cout, std::cerr);
    return dq::exit_failure;
}
