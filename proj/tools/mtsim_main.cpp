#include <iostream>

#include <CLI11.hpp>

#include "mtsim/report.hpp"

namespace {

int cmd_run(const std::string& scenario_path, const std::string& relation,
            int repeats, std::optional<std::uint64_t> seed, const std::string& seed_policy,
            const std::string& trace_dir, const std::string& report_format) {
    mtsim::Scenario scenario = mtsim::load_scenario(scenario_path);
    mtsim::RelationRegistry registry = mtsim::builtin_registry();

    mtsim::CampaignOptions options;
    options.repeats = repeats;
    options.seed_policy = seed_policy == "incrementing" ? mtsim::SeedPolicy::Incrementing
                                                        : mtsim::SeedPolicy::Fixed;
    options.seed_override = seed;
    if (!relation.empty()) options.relation_override = relation;
    options.trace_dir = trace_dir;

    const mtsim::CampaignReport report = mtsim::run_campaign(scenario, registry, options);
    const auto format = report_format == "machine" ? mtsim::ReportFormat::Machine
                                                   : mtsim::ReportFormat::Console;
    std::cout << mtsim::emit_report(report, format);
    return mtsim::exit_code_for(report);
}

int cmd_list_relations() {
    const mtsim::RelationRegistry registry = mtsim::builtin_registry();
    for (const auto& id : registry.ids())
        std::cout << id << "  -  " << registry.get(id).description << "\n";
    return 0;
}

int cmd_validate(const std::string& scenario_path) {
    const mtsim::Scenario scenario = mtsim::load_scenario(scenario_path);
    std::cout << "OK: " << scenario.input.scenario_id << " (" << scenario.input.plans.size()
              << " drone(s), " << scenario.input.world.obstacles.size() << " obstacle(s)";
    if (scenario.relation_id) std::cout << ", relation " << *scenario.relation_id;
    std::cout << ")\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"mtsim - metamorphic testing harness for a multi-drone avoidance simulator"};
    app.require_subcommand(1);

    std::string scenario_path;
    std::string relation;
    int repeats = 1;
    std::uint64_t seed_value = 0;
    bool seed_given = false;
    std::string seed_policy = "fixed";
    std::string trace_dir;
    std::string report_format = "console";

    auto* run = app.add_subcommand("run", "Execute a metamorphic test campaign");
    run->add_option("--scenario", scenario_path, "Scenario file")->required();
    run->add_option("--relation", relation, "Relation id (overrides the scenario file)");
    run->add_option("--repeats", repeats, "Number of campaign repeats")->check(CLI::PositiveNumber);
    run->add_option("--seed", seed_value, "Base seed (overrides the scenario file)")
        ->each([&](const std::string&) { seed_given = true; });
    run->add_option("--seed-policy", seed_policy, "fixed | incrementing")
        ->check(CLI::IsMember({"fixed", "incrementing"}));
    run->add_option("--trace-dir", trace_dir, "Directory for per-run trace CSV files");
    run->add_option("--report", report_format, "console | machine")
        ->check(CLI::IsMember({"console", "machine"}));

    auto* list = app.add_subcommand("list-relations", "List registered metamorphic relations");

    auto* validate = app.add_subcommand("validate", "Parse and validate a scenario file");
    std::string validate_path;
    validate->add_option("--scenario", validate_path, "Scenario file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 3;
    }

    try {
        if (run->parsed())
            return cmd_run(scenario_path, relation, repeats,
                           seed_given ? std::optional<std::uint64_t>(seed_value) : std::nullopt,
                           seed_policy, trace_dir, report_format);
        if (list->parsed()) return cmd_list_relations();
        if (validate->parsed()) return cmd_validate(validate_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 3;
}
