#pragma once

#include <functional>
#include <map>
#include <sstream>
#include <utility>

#include "mtsim/simulator.hpp"

namespace mtsim {

/// A runnable scenario: the world, the mission plans, and every knob that
/// influences the run.
struct TestInput {
    std::string scenario_id;
    WorldModel world;
    std::vector<MissionPlan> plans;
    SimConfigs configs;
    SimClock clock;
    std::uint64_t seed = 0;
};

/// The observable result of one run; carries per-drone telemetry, the run
/// outcome and the sampled trace.
using TestOutput = RunResult;

struct Tolerances {
    double delta_d = 1.0;   // metres
    double delta_t = 10.0;  // seconds
};

inline void validate_tolerances(const Tolerances& tol) {
    if (tol.delta_d < 0.0 || tol.delta_t < 0.0)
        throw std::invalid_argument("tolerances must be >= 0");
}

struct ClauseResult {
    std::string description;
    bool passed = false;
    std::string detail;
};

enum class VerdictKind { Satisfied, Violated, Inconclusive };

inline const char* to_string(VerdictKind v) {
    switch (v) {
        case VerdictKind::Satisfied: return "Satisfied";
        case VerdictKind::Violated: return "Violated";
        case VerdictKind::Inconclusive: return "Inconclusive";
    }
    return "?";
}

struct Verdict {
    VerdictKind kind = VerdictKind::Inconclusive;
    std::string reason;
    std::vector<ClauseResult> clauses;
};

/// One conjunct of a relation's predicate. Outputs arrive in group order
/// (source first, then the follow-ups).
struct Clause {
    std::string description;
    std::function<std::pair<bool, std::string>(const std::vector<TestOutput>&, const Tolerances&)>
        check;
};

struct MetamorphicRelation {
    std::string id;
    std::string description;
    int required_drones = 0;  // 0 = any
    std::function<std::vector<TestInput>(const TestInput&)> derive_followups;
    std::vector<Clause> clauses;
    Tolerances default_tolerances;
};

/// Follow-up derivation for the reverse-path relations: swaps start pad and
/// waypoint for every drone. Defined only over single-leg plans; applying it
/// twice yields the original input.
inline TestInput derive_followup_reverse_path(const TestInput& source) {
    TestInput followup = source;
    followup.scenario_id = source.scenario_id + "-reversed";
    for (auto& plan : followup.plans) {
        if (plan.waypoints.size() != 1)
            throw std::invalid_argument(
                "reverse-path derivation requires single-leg plans; drone '" + plan.drone_id +
                "' has " + std::to_string(plan.waypoints.size()) + " waypoints");
        std::swap(plan.start_pad, plan.waypoints[0]);
    }
    // Stripping a previous "-reversed" keeps the involution exact.
    const std::string suffix = "-reversed";
    if (source.scenario_id.size() > suffix.size() &&
        source.scenario_id.ends_with(suffix))
        followup.scenario_id = source.scenario_id.substr(0, source.scenario_id.size() - suffix.size());
    return followup;
}

namespace clauses {

inline std::string format_counts(const std::vector<TestOutput>& outputs) {
    std::ostringstream os;
    for (std::size_t r = 0; r < outputs.size(); ++r) {
        if (r > 0) os << "; ";
        os << "run " << r + 1 << ":";
        for (const auto& tel : outputs[r].telemetry)
            os << " " << tel.drone_id << "=" << tel.avoidance_count;
    }
    return os.str();
}

/// Every run, every drone: avoidance manoeuvre count >= min_count.
inline Clause min_maneuvers(int min_count) {
    return {"every run records at least " + std::to_string(min_count) +
                " avoidance manoeuvre(s) per drone",
            [min_count](const std::vector<TestOutput>& outputs, const Tolerances&) {
                bool ok = true;
                for (const auto& out : outputs)
                    for (const auto& tel : out.telemetry)
                        if (tel.avoidance_count < min_count) ok = false;
                return std::make_pair(ok, format_counts(outputs));
            }};
}

/// Every run, every drone: avoidance manoeuvre count is exactly zero.
inline Clause zero_maneuvers() {
    return {"avoidance manoeuvre count stays zero for every drone",
            [](const std::vector<TestOutput>& outputs, const Tolerances&) {
                bool ok = true;
                for (const auto& out : outputs)
                    for (const auto& tel : out.telemetry)
                        if (tel.avoidance_count != 0) ok = false;
                return std::make_pair(ok, format_counts(outputs));
            }};
}

/// Per drone: identical manoeuvre counts across all runs.
inline Clause equal_maneuvers_across_runs() {
    return {"avoidance manoeuvre counts are identical across runs",
            [](const std::vector<TestOutput>& outputs, const Tolerances&) {
                bool ok = true;
                for (std::size_t r = 1; r < outputs.size(); ++r)
                    for (std::size_t d = 0; d < outputs[r].telemetry.size(); ++d)
                        if (outputs[r].telemetry[d].avoidance_count !=
                            outputs[0].telemetry[d].avoidance_count)
                            ok = false;
                return std::make_pair(ok, format_counts(outputs));
            }};
}

/// Per drone: |distance(source) - distance(follow-up)| <= delta_d for every follow-up.
inline Clause distance_within_tolerance() {
    return {"per drone, travelled distances differ by at most delta_d",
            [](const std::vector<TestOutput>& outputs, const Tolerances& tol) {
                bool ok = true;
                std::ostringstream os;
                for (std::size_t r = 1; r < outputs.size(); ++r)
                    for (std::size_t d = 0; d < outputs[r].telemetry.size(); ++d) {
                        const double diff = std::abs(outputs[r].telemetry[d].distance_travelled -
                                                     outputs[0].telemetry[d].distance_travelled);
                        if (d > 0 || r > 1) os << "; ";
                        os << outputs[r].telemetry[d].drone_id << ": |delta d| = " << diff;
                        if (diff > tol.delta_d) ok = false;
                    }
                return std::make_pair(ok, os.str());
            }};
}

/// Per drone: |time(source) - time(follow-up)| <= delta_t for every follow-up.
inline Clause time_within_tolerance() {
    return {"per drone, elapsed times differ by at most delta_t",
            [](const std::vector<TestOutput>& outputs, const Tolerances& tol) {
                bool ok = true;
                std::ostringstream os;
                for (std::size_t r = 1; r < outputs.size(); ++r)
                    for (std::size_t d = 0; d < outputs[r].telemetry.size(); ++d) {
                        const double diff = std::abs(outputs[r].telemetry[d].elapsed_time -
                                                     outputs[0].telemetry[d].elapsed_time);
                        if (d > 0 || r > 1) os << "; ";
                        os << outputs[r].telemetry[d].drone_id << ": |delta t| = " << diff;
                        if (diff > tol.delta_t) ok = false;
                    }
                return std::make_pair(ok, os.str());
            }};
}

}  // namespace clauses

/// R1: one drone, obstacles, path A->B vs B->A; both runs must record at
/// least one avoidance manoeuvre.
inline MetamorphicRelation make_relation_r1() {
    MetamorphicRelation rel;
    rel.id = "R1";
    rel.description =
        "single drone over a reversed path; both directions must perform at least one "
        "avoidance manoeuvre";
    rel.required_drones = 1;
    rel.derive_followups = [](const TestInput& src) {
        return std::vector<TestInput>{derive_followup_reverse_path(src)};
    };
    rel.clauses = {clauses::min_maneuvers(1)};
    return rel;
}

/// R2: two drones on separate paths, reversed; per drone the manoeuvre count
/// stays zero and distance/time agree within the tolerances.
inline MetamorphicRelation make_relation_r2() {
    MetamorphicRelation rel;
    rel.id = "R2";
    rel.description =
        "two drones on separate reversed paths; zero avoidance manoeuvres and matching "
        "distance/time within tolerances";
    rel.required_drones = 2;
    rel.derive_followups = [](const TestInput& src) {
        return std::vector<TestInput>{derive_followup_reverse_path(src)};
    };
    rel.clauses = {clauses::zero_maneuvers(), clauses::distance_within_tolerance(),
                   clauses::time_within_tolerance()};
    return rel;
}

/// Deliberately strict alteration of R1 demanding equal manoeuvre counts in
/// both directions. Asymmetric worlds are expected to violate it.
inline MetamorphicRelation make_relation_r1_equal_counts() {
    MetamorphicRelation rel;
    rel.id = "R1eq";
    rel.description =
        "alteration of R1 requiring equal manoeuvre counts in both directions (expected to "
        "be violated for asymmetric obstacle layouts)";
    rel.required_drones = 1;
    rel.derive_followups = [](const TestInput& src) {
        return std::vector<TestInput>{derive_followup_reverse_path(src)};
    };
    rel.clauses = {clauses::equal_maneuvers_across_runs()};
    return rel;
}

/// Pure predicate evaluation over stored outputs; groups can be re-judged
/// under different tolerances without re-simulation.
inline Verdict evaluate_relation(const MetamorphicRelation& relation,
                                 const std::vector<TestOutput>& outputs, const Tolerances& tol) {
    validate_tolerances(tol);
    Verdict verdict;
    for (std::size_t r = 0; r < outputs.size(); ++r) {
        if (outputs[r].outcome != RunOutcome::Completed) {
            verdict.kind = VerdictKind::Inconclusive;
            verdict.reason = std::string(r == 0 ? "source" : "follow-up") +
                             " run ended with outcome " + to_string(outputs[r].outcome);
            if (!outputs[r].fault_detail.empty())
                verdict.reason += " (" + outputs[r].fault_detail + ")";
            return verdict;
        }
    }
    bool all_ok = true;
    for (const auto& clause : relation.clauses) {
        auto [ok, detail] = clause.check(outputs, tol);
        verdict.clauses.push_back({clause.description, ok, detail});
        if (!ok) {
            all_ok = false;
            if (!verdict.reason.empty()) verdict.reason += "; ";
            verdict.reason += clause.description;
        }
    }
    verdict.kind = all_ok ? VerdictKind::Satisfied : VerdictKind::Violated;
    return verdict;
}

struct MetamorphicGroup {
    std::string relation_id;
    std::vector<TestInput> inputs;    // source first, then follow-ups
    std::vector<TestOutput> outputs;  // aligned with inputs
    Verdict verdict;
};

/// The full procedure for one group: run the source, derive and run the
/// follow-ups, judge the predicate. Runs that do not complete make the group
/// Inconclusive with the outcome recorded.
template <typename Runner>
MetamorphicGroup execute_group(const MetamorphicRelation& relation, const TestInput& source,
                               Runner&& runner, const Tolerances& tol) {
    if (relation.required_drones > 0 &&
        static_cast<int>(source.plans.size()) != relation.required_drones)
        throw std::invalid_argument("relation " + relation.id + " requires " +
                                    std::to_string(relation.required_drones) +
                                    " drone(s); scenario has " +
                                    std::to_string(source.plans.size()));
    MetamorphicGroup group;
    group.relation_id = relation.id;
    group.inputs.push_back(source);
    for (auto& followup : relation.derive_followups(source))
        group.inputs.push_back(std::move(followup));
    for (const auto& input : group.inputs) group.outputs.push_back(runner(input));
    group.verdict = evaluate_relation(relation, group.outputs, tol);
    return group;
}

class RelationRegistry {
public:
    void register_relation(MetamorphicRelation relation) {
        if (relation.id.empty()) throw std::invalid_argument("relation id must be non-empty");
        if (relations_.contains(relation.id))
            throw std::invalid_argument("relation '" + relation.id + "' is already registered");
        relations_.emplace(relation.id, std::move(relation));
    }
    bool contains(const std::string& id) const { return relations_.contains(id); }
    const MetamorphicRelation& get(const std::string& id) const {
        const auto it = relations_.find(id);
        if (it == relations_.end())
            throw std::invalid_argument("unknown relation '" + id + "'");
        return it->second;
    }
    std::vector<std::string> ids() const {
        std::vector<std::string> out;
        out.reserve(relations_.size());
        for (const auto& [id, rel] : relations_) out.push_back(id);
        return out;
    }

private:
    std::map<std::string, MetamorphicRelation> relations_;
};

inline RelationRegistry builtin_registry() {
    RelationRegistry registry;
    registry.register_relation(make_relation_r1());
    registry.register_relation(make_relation_r2());
    registry.register_relation(make_relation_r1_equal_counts());
    return registry;
}

}  // namespace mtsim
