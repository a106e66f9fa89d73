#pragma once

#include <cstdio>

#include "mtsim/campaign.hpp"

namespace mtsim {

enum class ReportFormat { Console, Machine };

namespace report_detail {

inline std::string stat_line(const char* label, double value, const char* unit) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%-35s%7.3f %s", label, value, unit);
    return buf;
}

inline std::string count_line(const char* label, int value) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%-35s%3d", label, value);
    return buf;
}

/// "R1" renders as "MR 1" to match the console's validation block; other ids
/// are shown verbatim.
inline std::string display_relation(const std::string& id) {
    if (id.size() > 1 && id[0] == 'R' &&
        std::all_of(id.begin() + 1, id.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
        return "MR " + id.substr(1);
    return "MR " + id;
}

inline void render_run(std::ostringstream& os, const TestOutput& output) {
    for (const auto& tel : output.telemetry) {
        os << "Drone " << tel.drone_id << ":\n";
        for (const auto& leg : tel.legs) {
            if (leg.reached)
                os << "Waypoint " << leg.leg << " has been reached!\n";
            else
                os << "Waypoint " << leg.leg << " has not been reached.\n";
            os << stat_line("Shortest path to Waypoint:", leg.shortest_path, "m") << "\n";
            os << stat_line("Distance travelled:", leg.distance_travelled, "m") << "\n";
            os << stat_line("Elapsed wall clock time:", leg.elapsed_time, "s") << "\n";
            os << count_line("Number of avoidance manoeuvres:", leg.avoidance_count) << "\n";
        }
        os << stat_line("Total distance travelled:", tel.distance_travelled, "m") << "\n";
        os << stat_line("Total elapsed time:", tel.elapsed_time, "s") << "\n";
        os << count_line("Total avoidance manoeuvres:", tel.avoidance_count) << "\n";
    }
    os << "Mission outcome: " << to_string(output.outcome);
    if (!output.fault_detail.empty()) os << " (" << output.fault_detail << ")";
    os << "\n";
}

}  // namespace report_detail

inline std::string render_console_report(const CampaignReport& report) {
    using namespace report_detail;
    std::ostringstream os;
    os << "Scenario:    " << report.scenario_id << "\n";
    os << "Relation:    " << report.relation_id << "\n";
    os << "Repeats:     " << report.repeats << "\n";
    os << "Seed policy: " << to_string(report.seed_policy) << "\n";
    os << "Base seed:   " << report.base_seed << "\n";

    for (const auto& record : report.groups) {
        os << "\n=== Repeat " << record.repeat << " (seed " << record.seed << ") ===\n";
        for (std::size_t run = 0; run < record.group.outputs.size(); ++run) {
            const char* role = run == 0 ? "source" : "follow-up";
            os << "--- Run " << run + 1 << " (" << role
               << "): " << record.group.inputs[run].scenario_id << " ---\n";
            render_run(os, record.group.outputs[run]);
        }
        os << "---------- MR Validation ----------\n";
        const Verdict& verdict = record.group.verdict;
        os << display_relation(report.relation_id) << ": ";
        switch (verdict.kind) {
            case VerdictKind::Satisfied: os << "True\n"; break;
            case VerdictKind::Violated: os << "False\n"; break;
            case VerdictKind::Inconclusive: os << "Inconclusive (" << verdict.reason << ")\n"; break;
        }
        if (verdict.kind == VerdictKind::Violated)
            for (const auto& clause : verdict.clauses)
                if (!clause.passed)
                    os << "  failed clause: " << clause.description << " [" << clause.detail << "]\n";
    }

    os << "\n=== Campaign Summary ===\n";
    os << "Repeats:      " << report.repeats << "\n";
    os << "Satisfied:    " << report.count(VerdictKind::Satisfied) << "\n";
    os << "Violated:     " << report.count(VerdictKind::Violated) << "\n";
    os << "Inconclusive: " << report.count(VerdictKind::Inconclusive) << "\n";
    if (!report.groups.empty()) {
        const std::size_t runs = report.groups.front().group.outputs.size();
        os << "Manoeuvre counts per run across repeats:\n";
        for (std::size_t run = 0; run < runs; ++run) {
            os << "  run " << run + 1 << ":";
            for (const auto& record : report.groups) {
                if (run >= record.group.outputs.size()) continue;
                for (const auto& tel : record.group.outputs[run].telemetry)
                    os << " " << tel.avoidance_count;
            }
            os << "\n";
        }
    }
    return os.str();
}

inline std::string render_machine_report(const CampaignReport& report) {
    using json = nlohmann::json;
    json doc;
    doc["scenario_id"] = report.scenario_id;
    doc["relation_id"] = report.relation_id;
    doc["repeats"] = report.repeats;
    doc["seed_policy"] = to_string(report.seed_policy);
    doc["base_seed"] = report.base_seed;
    doc["tolerances"]["delta_d"] = report.tolerances.delta_d;
    doc["tolerances"]["delta_t"] = report.tolerances.delta_t;
    doc["groups"] = json::array();
    for (const auto& record : report.groups) {
        json jg;
        jg["repeat"] = record.repeat;
        jg["seed"] = record.seed;
        jg["verdict"] = to_string(record.group.verdict.kind);
        jg["reason"] = record.group.verdict.reason;
        jg["clauses"] = json::array();
        for (const auto& clause : record.group.verdict.clauses)
            jg["clauses"].push_back(
                {{"description", clause.description}, {"passed", clause.passed}, {"detail", clause.detail}});
        jg["runs"] = json::array();
        for (std::size_t run = 0; run < record.group.outputs.size(); ++run) {
            const TestOutput& out = record.group.outputs[run];
            json jr;
            jr["scenario_id"] = record.group.inputs[run].scenario_id;
            jr["role"] = run == 0 ? "source" : "follow-up";
            jr["outcome"] = to_string(out.outcome);
            if (!out.fault_detail.empty()) jr["fault_detail"] = out.fault_detail;
            jr["drones"] = json::array();
            for (const auto& tel : out.telemetry) {
                json jd;
                jd["id"] = tel.drone_id;
                jd["distance_travelled"] = tel.distance_travelled;
                jd["elapsed_time"] = tel.elapsed_time;
                jd["avoidance_count"] = tel.avoidance_count;
                jd["legs"] = json::array();
                for (const auto& leg : tel.legs)
                    jd["legs"].push_back({{"leg", leg.leg},
                                          {"shortest_path", leg.shortest_path},
                                          {"distance_travelled", leg.distance_travelled},
                                          {"elapsed_time", leg.elapsed_time},
                                          {"avoidance_count", leg.avoidance_count},
                                          {"reached", leg.reached}});
                jr["drones"].push_back(jd);
            }
            jg["runs"].push_back(jr);
        }
        doc["groups"].push_back(jg);
    }
    doc["summary"]["satisfied"] = report.count(VerdictKind::Satisfied);
    doc["summary"]["violated"] = report.count(VerdictKind::Violated);
    doc["summary"]["inconclusive"] = report.count(VerdictKind::Inconclusive);
    return doc.dump(2) + "\n";
}

inline std::string emit_report(const CampaignReport& report, ReportFormat format) {
    return format == ReportFormat::Console ? render_console_report(report)
                                           : render_machine_report(report);
}

}  // namespace mtsim
