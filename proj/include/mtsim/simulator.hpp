#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mtsim/potential_field.hpp"

namespace mtsim {

/// Magnitude bound of the seeded symmetry-breaking perturbation applied to
/// commands while avoidance is active.
inline constexpr double kSymmetryBreakSpeed = 1e-3;

struct MissionPlan {
    std::string drone_id;
    Vec2 start_pad;
    std::vector<Vec2> waypoints;
    double takeoff_altitude = 2.0;
    double waypoint_tolerance = 0.5;
    double body_radius = 0.5;
    double delay_at_waypoint = 0.0;  // hover time after each reached waypoint, seconds
};

inline void validate_plan(const MissionPlan& plan) {
    if (plan.drone_id.empty()) throw std::invalid_argument("mission plan needs a drone id");
    if (plan.waypoints.empty())
        throw std::invalid_argument("drone '" + plan.drone_id + "': waypoints must be non-empty");
    if (!(plan.takeoff_altitude > 0.0))
        throw std::invalid_argument("drone '" + plan.drone_id + "': takeoff_altitude must be > 0");
    if (!(plan.waypoint_tolerance > 0.0))
        throw std::invalid_argument("drone '" + plan.drone_id + "': waypoint_tolerance must be > 0");
    if (!(plan.body_radius > 0.0))
        throw std::invalid_argument("drone '" + plan.drone_id + "': body_radius must be > 0");
    if (plan.delay_at_waypoint < 0.0)
        throw std::invalid_argument("drone '" + plan.drone_id + "': delay_at_waypoint must be >= 0");
}

enum class FlightPhase { Grounded, TakingOff, Enroute, Landing, Landed };

inline const char* to_string(FlightPhase p) {
    switch (p) {
        case FlightPhase::Grounded: return "Grounded";
        case FlightPhase::TakingOff: return "TakingOff";
        case FlightPhase::Enroute: return "Enroute";
        case FlightPhase::Landing: return "Landing";
        case FlightPhase::Landed: return "Landed";
    }
    return "?";
}

struct DroneState {
    Pose pose;
    FlightPhase phase = FlightPhase::Grounded;
    std::size_t waypoint_index = 0;
    double body_radius = 0.5;
    double hover_until = 0.0;  // waypoint-delay bookkeeping
};

struct SimClock {
    double dt = 0.1;
    double telemetry_sample_period = 1.0;
    double sim_time = 0.0;
    double max_sim_time = 3600.0;
    std::int64_t tick = 0;
};

inline void validate_clock(const SimClock& clock) {
    if (!(clock.dt > 0.0)) throw std::invalid_argument("clock dt must be > 0");
    if (!(clock.telemetry_sample_period >= clock.dt))
        throw std::invalid_argument("telemetry_sample_period must be >= dt");
    if (!(clock.max_sim_time > 0.0)) throw std::invalid_argument("max_sim_time must be > 0");
}

struct SimConfigs {
    AvoidanceConfig avoidance;
    LidarConfig lidar;
};

struct LegTelemetry {
    int leg = 0;  // 1-based
    double shortest_path = 0.0;
    double distance_travelled = 0.0;  // horizontal, sampled
    double elapsed_time = 0.0;
    int avoidance_count = 0;
    bool reached = false;
};

/// The output parameters the metamorphic relations consume: distance travelled,
/// elapsed time and the avoidance manoeuvre count, with a per-leg breakdown.
struct Telemetry {
    std::string drone_id;
    double distance_travelled = 0.0;  // 3D, sampled at the telemetry period
    double elapsed_time = 0.0;
    int avoidance_count = 0;
    std::vector<LegTelemetry> legs;
};

struct TraceRow {
    double sim_time = 0.0;
    std::string drone_id;
    double x = 0.0, y = 0.0, z = 0.0;
    double vx = 0.0, vy = 0.0;
    FlightPhase phase = FlightPhase::Grounded;
    bool avoidance_active = false;
    double cumulative_distance = 0.0;
    int maneuver_count = 0;
};

using Trace = std::vector<TraceRow>;

enum class RunOutcome { Completed, Timeout, CollisionFault };

inline const char* to_string(RunOutcome o) {
    switch (o) {
        case RunOutcome::Completed: return "Completed";
        case RunOutcome::Timeout: return "Timeout";
        case RunOutcome::CollisionFault: return "CollisionFault";
    }
    return "?";
}

struct TickRecord {
    Vec2 velocity;  // horizontal
    bool avoidance_active = false;
};

struct StepResult {
    std::vector<TickRecord> records;
    std::optional<std::string> fault;
};

namespace detail {

constexpr std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

inline double to_unit_interval(std::uint64_t h) {
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

/// Counter-based draw keyed on (seed, drone, tick): drones get independent,
/// order-free perturbation streams, so permuting drone ids cannot change a run.
inline Vec2 symmetry_break_velocity(std::uint64_t seed, std::string_view drone_id,
                                    std::int64_t tick) {
    const std::uint64_t key =
        splitmix64(seed ^ splitmix64(fnv1a64(drone_id)) ^
                   (static_cast<std::uint64_t>(tick) * 0xd6e8feb86659fd93ull));
    const std::uint64_t key2 = splitmix64(key);
    const double angle = 2.0 * M_PI * to_unit_interval(key);
    const double magnitude = kSymmetryBreakSpeed * to_unit_interval(key2);
    return {magnitude * std::cos(angle), magnitude * std::sin(angle)};
}

}  // namespace detail

/// Advances every drone by one control tick. All scans are built from a
/// snapshot of the previous tick's poses, so the drone update order never
/// matters. Returns per-drone tick records plus a fault description if two
/// drones came closer than their body radii at overlapping altitude or a drone
/// ended up inside an in-plane obstacle footprint.
inline StepResult step(std::vector<DroneState>& states, const std::vector<MissionPlan>& plans,
                       const WorldModel& world, const SimConfigs& configs, SimClock& clock,
                       std::uint64_t seed) {
    if (states.size() != plans.size())
        throw std::invalid_argument("step: states and plans must be aligned");
    const double dt = clock.dt;
    const double cruise = configs.avoidance.cruise_speed;

    std::vector<Pose> snapshot;
    snapshot.reserve(states.size());
    for (const auto& s : states) snapshot.push_back(s.pose);

    StepResult result;
    result.records.resize(states.size());

    for (std::size_t i = 0; i < states.size(); ++i) {
        DroneState& st = states[i];
        const MissionPlan& plan = plans[i];
        Vec2 v{0.0, 0.0};
        bool active = false;

        const auto scan_here = [&]() {
            std::vector<OtherDrone> others;
            others.reserve(snapshot.size() - 1);
            for (std::size_t j = 0; j < snapshot.size(); ++j)
                if (j != i) others.push_back({snapshot[j], states[j].body_radius});
            return scan(st.pose, world, others, configs.lidar);
        };
        const auto avoidance_flag = [&]() {
            // Sensing is disabled close to the ground during the vertical phases.
            if (st.pose.z < 0.5 * plan.takeoff_altitude) return false;
            return nearest_reading(scan_here()).first < configs.avoidance.d0;
        };

        switch (st.phase) {
            case FlightPhase::Grounded:
                st.phase = FlightPhase::TakingOff;
                break;
            case FlightPhase::TakingOff:
                active = avoidance_flag();
                st.pose.z += cruise * dt;
                if (st.pose.z >= plan.takeoff_altitude - 1e-12) {
                    st.pose.z = plan.takeoff_altitude;
                    st.phase = FlightPhase::Enroute;
                    st.waypoint_index = 0;
                }
                break;
            case FlightPhase::Enroute: {
                const LidarScan sc = scan_here();
                if (clock.sim_time + 1e-12 < st.hover_until) {
                    active = nearest_reading(sc).first < configs.avoidance.d0;
                    break;
                }
                const Vec2 wp = plan.waypoints[st.waypoint_index];
                const VelocityCommand cmd = command(st.pose, wp, sc, configs.avoidance);
                v = {cmd.vx, cmd.vy};
                active = cmd.avoidance_active;
                if (active) {
                    v += detail::symmetry_break_velocity(seed, plan.drone_id, clock.tick);
                    const double n = norm(v);
                    if (n > cruise) v = v * (cruise / n);
                }
                st.pose.x += v.x * dt;
                st.pose.y += v.y * dt;
                if (norm(v) > 1e-12) st.pose.psi = heading_degrees(v);
                if (distance(st.pose.position(), wp) <= plan.waypoint_tolerance) {
                    st.hover_until = static_cast<double>(clock.tick + 1) * dt + plan.delay_at_waypoint;
                    ++st.waypoint_index;
                    if (st.waypoint_index == plan.waypoints.size()) st.phase = FlightPhase::Landing;
                }
                break;
            }
            case FlightPhase::Landing:
                active = avoidance_flag();
                if (clock.sim_time + 1e-12 >= st.hover_until) {
                    st.pose.z -= cruise * dt;
                    if (st.pose.z <= 1e-12) {
                        st.pose.z = 0.0;
                        st.phase = FlightPhase::Landed;
                    }
                }
                break;
            case FlightPhase::Landed:
                break;
        }
        result.records[i] = {v, active};
    }

    clock.tick += 1;
    clock.sim_time = static_cast<double>(clock.tick) * dt;

    for (std::size_t i = 0; i < states.size() && !result.fault; ++i) {
        for (std::size_t j = i + 1; j < states.size(); ++j) {
            const double sep = distance(states[i].pose.position(), states[j].pose.position());
            const bool same_band =
                std::abs(states[i].pose.z - states[j].pose.z) <= 2.0 * kBodyHalfHeight;
            if (same_band && sep < states[i].body_radius + states[j].body_radius) {
                result.fault = "drones '" + plans[i].drone_id + "' and '" + plans[j].drone_id +
                               "' collided at separation " + std::to_string(sep) + " m";
                break;
            }
        }
    }
    for (std::size_t i = 0; i < states.size() && !result.fault; ++i) {
        for (const auto& o : world.obstacles) {
            if (min_obstacle_distance(states[i].pose, o) == 0.0) {
                result.fault = "drone '" + plans[i].drone_id + "' entered obstacle '" + o.id + "'";
                break;
            }
        }
    }
    return result;
}

/// Rising-edge count over the sampled avoidance series: one manoeuvre per
/// contiguous episode of active avoidance, with an implicit false before the
/// first sample.
inline int count_avoidance_manoeuvres(const std::vector<bool>& samples) {
    int count = 0;
    bool prev = false;
    for (bool s : samples) {
        if (s && !prev) ++count;
        prev = s;
    }
    return count;
}

struct SamplePoint {
    double x = 0.0, y = 0.0, z = 0.0;
};

inline double accumulate_distance(const std::vector<SamplePoint>& positions) {
    if (positions.empty()) throw std::invalid_argument("accumulate_distance: needs >= 1 sample");
    double total = 0.0;
    for (std::size_t i = 1; i < positions.size(); ++i) {
        const double dx = positions[i].x - positions[i - 1].x;
        const double dy = positions[i].y - positions[i - 1].y;
        const double dz = positions[i].z - positions[i - 1].z;
        total += std::sqrt(dx * dx + dy * dy + dz * dz);
    }
    return total;
}

struct RunResult {
    RunOutcome outcome = RunOutcome::Completed;
    std::string fault_detail;
    std::vector<Telemetry> telemetry;  // one entry per plan, in plan order
    Trace trace;
};

/// Executes the whole mission set: takeoff, waypoint pursuit with avoidance,
/// landing. Steps until every drone has landed or max_sim_time is reached
/// (Timeout). Telemetry is accumulated from samples taken once per
/// telemetry_sample_period plus a final sample at termination.
inline RunResult run_mission(const std::vector<MissionPlan>& plans, const WorldModel& world,
                             const SimConfigs& configs, SimClock clock, std::uint64_t seed) {
    if (plans.empty()) throw std::invalid_argument("run_mission: needs at least one plan");
    for (const auto& p : plans) validate_plan(p);
    for (std::size_t i = 0; i < plans.size(); ++i)
        for (std::size_t j = i + 1; j < plans.size(); ++j)
            if (plans[i].drone_id == plans[j].drone_id)
                throw std::invalid_argument("duplicate drone id '" + plans[i].drone_id + "'");
    validate_clock(clock);
    validate_lidar_config(configs.lidar);

    struct Accounting {
        std::vector<bool> flag_samples;
        std::vector<SamplePoint> position_samples;
        double cumulative = 0.0;
        int maneuvers = 0;
        bool prev_flag = false;
        int prev_leg = -1;  // leg active at the previous sample, -1 outside Enroute
        double finish_time = -1.0;
        std::vector<LegTelemetry> legs;
        std::vector<double> leg_start;
    };

    std::vector<DroneState> states;
    std::vector<Accounting> books(plans.size());
    states.reserve(plans.size());
    for (std::size_t i = 0; i < plans.size(); ++i) {
        const auto& plan = plans[i];
        DroneState st;
        st.pose = {plan.start_pad.x, plan.start_pad.y, 0.0, 0.0};
        st.body_radius = plan.body_radius;
        states.push_back(st);

        books[i].legs.resize(plan.waypoints.size());
        books[i].leg_start.assign(plan.waypoints.size(), -1.0);
        Vec2 from = plan.start_pad;
        for (std::size_t leg = 0; leg < plan.waypoints.size(); ++leg) {
            books[i].legs[leg].leg = static_cast<int>(leg) + 1;
            books[i].legs[leg].shortest_path = shortest_path_length(from, plan.waypoints[leg]);
            from = plan.waypoints[leg];
        }
    }

    RunResult result;
    std::vector<TickRecord> last_records(plans.size());

    const auto current_leg = [&](std::size_t i) -> int {
        if (states[i].phase != FlightPhase::Enroute) return -1;
        return static_cast<int>(
            std::min(states[i].waypoint_index, plans[i].waypoints.size() - 1));
    };

    const auto take_sample = [&](double t) {
        for (std::size_t i = 0; i < plans.size(); ++i) {
            Accounting& book = books[i];
            const DroneState& st = states[i];
            const SamplePoint pos{st.pose.x, st.pose.y, st.pose.z};
            const bool flag = last_records[i].avoidance_active;

            // Sample intervals spanning a leg boundary belong to the leg that was
            // active at the earlier sample.
            const int leg = book.prev_leg >= 0 ? book.prev_leg : current_leg(i);
            if (!book.position_samples.empty()) {
                const SamplePoint& prev = book.position_samples.back();
                const double dx = pos.x - prev.x, dy = pos.y - prev.y, dz = pos.z - prev.z;
                book.cumulative += std::sqrt(dx * dx + dy * dy + dz * dz);
                if (leg >= 0)
                    book.legs[static_cast<std::size_t>(leg)].distance_travelled +=
                        std::sqrt(dx * dx + dy * dy);
            }
            const bool edge = flag && !book.prev_flag;
            if (edge) {
                ++book.maneuvers;
                if (leg >= 0) ++book.legs[static_cast<std::size_t>(leg)].avoidance_count;
            }
            book.position_samples.push_back(pos);
            book.flag_samples.push_back(flag);
            book.prev_flag = flag;
            book.prev_leg = current_leg(i);

            result.trace.push_back({t, plans[i].drone_id, st.pose.x, st.pose.y, st.pose.z,
                                    last_records[i].velocity.x, last_records[i].velocity.y,
                                    st.phase, flag, book.cumulative, book.maneuvers});
        }
    };

    take_sample(0.0);
    double next_sample = clock.telemetry_sample_period;
    double last_sample_time = 0.0;

    const auto all_landed = [&]() {
        for (const auto& st : states)
            if (st.phase != FlightPhase::Landed) return false;
        return true;
    };

    while (true) {
        if (all_landed()) {
            result.outcome = RunOutcome::Completed;
            break;
        }
        if (clock.sim_time >= clock.max_sim_time - 1e-9) {
            result.outcome = RunOutcome::Timeout;
            break;
        }

        std::vector<std::size_t> pre_wp(plans.size());
        std::vector<FlightPhase> pre_phase(plans.size());
        for (std::size_t i = 0; i < plans.size(); ++i) {
            pre_wp[i] = states[i].waypoint_index;
            pre_phase[i] = states[i].phase;
        }

        const StepResult sr = step(states, plans, world, configs, clock, seed);
        last_records = sr.records;

        for (std::size_t i = 0; i < plans.size(); ++i) {
            Accounting& book = books[i];
            if (pre_phase[i] != FlightPhase::Enroute && states[i].phase == FlightPhase::Enroute &&
                book.leg_start[states[i].waypoint_index] < 0.0)
                book.leg_start[states[i].waypoint_index] = clock.sim_time;
            if (states[i].waypoint_index > pre_wp[i]) {
                LegTelemetry& leg = book.legs[pre_wp[i]];
                leg.reached = true;
                leg.elapsed_time = clock.sim_time - std::max(book.leg_start[pre_wp[i]], 0.0);
                if (states[i].waypoint_index < plans[i].waypoints.size())
                    book.leg_start[states[i].waypoint_index] = clock.sim_time;
            }
            if (states[i].phase == FlightPhase::Landed && book.finish_time < 0.0)
                book.finish_time = clock.sim_time;
        }

        if (sr.fault) {
            result.outcome = RunOutcome::CollisionFault;
            result.fault_detail = *sr.fault;
            break;
        }
        if (clock.sim_time >= next_sample - 1e-9) {
            take_sample(clock.sim_time);
            last_sample_time = clock.sim_time;
            next_sample += clock.telemetry_sample_period;
        }
    }

    if (clock.sim_time > last_sample_time + 1e-9) take_sample(clock.sim_time);

    for (std::size_t i = 0; i < plans.size(); ++i) {
        Accounting& book = books[i];
        Telemetry tel;
        tel.drone_id = plans[i].drone_id;
        tel.distance_travelled = book.cumulative;
        tel.elapsed_time = book.finish_time >= 0.0 ? book.finish_time : clock.sim_time;
        tel.avoidance_count = book.maneuvers;
        for (std::size_t leg = 0; leg < book.legs.size(); ++leg) {
            if (!book.legs[leg].reached && book.leg_start[leg] >= 0.0)
                book.legs[leg].elapsed_time = clock.sim_time - book.leg_start[leg];
        }
        tel.legs = book.legs;
        result.telemetry.push_back(std::move(tel));
    }
    return result;
}

}  // namespace mtsim
