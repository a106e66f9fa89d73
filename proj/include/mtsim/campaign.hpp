#pragma once

#include <filesystem>
#include <fstream>
#include <iomanip>

#include "mtsim/scenario.hpp"

namespace mtsim {

enum class SeedPolicy { Fixed, Incrementing };

inline const char* to_string(SeedPolicy p) {
    return p == SeedPolicy::Fixed ? "fixed" : "incrementing";
}

struct CampaignOptions {
    int repeats = 1;
    SeedPolicy seed_policy = SeedPolicy::Fixed;
    std::optional<std::uint64_t> seed_override;
    std::optional<std::string> relation_override;
    std::filesystem::path trace_dir;  // empty: no trace files written
};

struct GroupRecord {
    int repeat = 0;  // 1-based
    std::uint64_t seed = 0;
    MetamorphicGroup group;
};

struct CampaignReport {
    std::string scenario_id;
    std::string relation_id;
    int repeats = 1;
    SeedPolicy seed_policy = SeedPolicy::Fixed;
    std::uint64_t base_seed = 0;
    Tolerances tolerances;
    std::vector<GroupRecord> groups;

    int count(VerdictKind kind) const {
        int n = 0;
        for (const auto& g : groups)
            if (g.group.verdict.kind == kind) ++n;
        return n;
    }
};

inline std::string sanitize_filename(const std::string& s) {
    std::string out;
    for (char c : s)
        out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_') ? c : '_';
    return out;
}

inline void write_trace_file(const std::filesystem::path& path, const Trace& trace) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write trace file '" + path.string() + "'");
    out << "sim_time,drone_id,x,y,z,vx,vy,phase,avoidance_active,cumulative_distance,"
           "maneuver_count\n";
    out << std::setprecision(9) << std::fixed;
    for (const auto& row : trace) {
        out << std::setprecision(3) << row.sim_time << ',' << row.drone_id << ','
            << std::setprecision(6) << row.x << ',' << row.y << ',' << row.z << ',' << row.vx
            << ',' << row.vy << ',' << to_string(row.phase) << ','
            << (row.avoidance_active ? 1 : 0) << ',' << row.cumulative_distance << ','
            << row.maneuver_count << '\n';
    }
}

/// Executes the scenario's metamorphic group `repeats` times, optionally
/// writing one trace file per run, and aggregates the verdicts.
inline CampaignReport run_campaign(const Scenario& scenario, const RelationRegistry& registry,
                                   const CampaignOptions& options) {
    if (options.repeats < 1) throw std::invalid_argument("repeats must be >= 1");
    std::string relation_id;
    if (options.relation_override)
        relation_id = *options.relation_override;
    else if (scenario.relation_id)
        relation_id = *scenario.relation_id;
    else
        throw std::invalid_argument("scenario file names no relation; pass --relation");
    const MetamorphicRelation& relation = registry.get(relation_id);

    CampaignReport report;
    report.scenario_id = scenario.input.scenario_id;
    report.relation_id = relation_id;
    report.repeats = options.repeats;
    report.seed_policy = options.seed_policy;
    report.base_seed = options.seed_override.value_or(scenario.input.seed);
    report.tolerances = scenario.tolerances;

    const bool write_traces = !options.trace_dir.empty();
    if (write_traces) std::filesystem::create_directories(options.trace_dir);

    for (int repeat = 0; repeat < options.repeats; ++repeat) {
        const std::uint64_t seed =
            options.seed_policy == SeedPolicy::Incrementing
                ? report.base_seed + static_cast<std::uint64_t>(repeat)
                : report.base_seed;
        TestInput source = scenario.input;
        source.seed = seed;

        const auto runner = [&](const TestInput& input) {
            return run_mission(input.plans, input.world, input.configs, input.clock, input.seed);
        };
        MetamorphicGroup group = execute_group(relation, source, runner, report.tolerances);

        if (write_traces) {
            for (std::size_t run = 0; run < group.outputs.size(); ++run) {
                const std::string name = sanitize_filename(report.scenario_id) + "_rep" +
                                         std::to_string(repeat + 1) + "_run" +
                                         std::to_string(run + 1) + ".csv";
                write_trace_file(options.trace_dir / name, group.outputs[run].trace);
            }
        }
        report.groups.push_back({repeat + 1, seed, std::move(group)});
    }
    return report;
}

/// 0: every repeat Satisfied; 1: any Violated; 2: otherwise (any Inconclusive).
inline int exit_code_for(const CampaignReport& report) {
    if (report.count(VerdictKind::Violated) > 0) return 1;
    if (report.count(VerdictKind::Inconclusive) > 0) return 2;
    return 0;
}

}  // namespace mtsim
