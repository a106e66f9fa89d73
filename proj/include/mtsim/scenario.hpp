#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <set>

#include <json.hpp>

#include "mtsim/metamorphic.hpp"

namespace mtsim {

struct ScenarioError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Scenario {
    TestInput input;
    std::optional<std::string> relation_id;
    Tolerances tolerances;
};

namespace scenario_detail {

using json = nlohmann::json;

inline void require_keys(const json& obj, const std::string& context,
                         std::initializer_list<const char*> allowed) {
    for (const auto& [key, value] : obj.items()) {
        bool known = false;
        for (const char* a : allowed)
            if (key == a) known = true;
        if (!known)
            throw ScenarioError(context + ": unknown key '" + key + "'");
    }
}

inline const json& require(const json& obj, const std::string& context, const char* key) {
    if (!obj.contains(key)) throw ScenarioError(context + ": missing key '" + key + "'");
    return obj.at(key);
}

inline double number(const json& v, const std::string& context) {
    if (!v.is_number()) throw ScenarioError(context + ": expected a number");
    return v.get<double>();
}

inline Vec2 point(const json& v, const std::string& context) {
    if (!v.is_array() || v.size() != 2)
        throw ScenarioError(context + ": expected a point [x, y]");
    return {number(v[0], context), number(v[1], context)};
}

inline WorldModel parse_world(const json& w) {
    require_keys(w, "world", {"bounds", "obstacles", "pads"});
    WorldModel world;

    const json& bounds = require(w, "world", "bounds");
    require_keys(bounds, "world.bounds", {"min", "max"});
    world.bounds.min = point(require(bounds, "world.bounds", "min"), "world.bounds.min");
    world.bounds.max = point(require(bounds, "world.bounds", "max"), "world.bounds.max");

    if (w.contains("obstacles")) {
        for (const json& jo : w.at("obstacles")) {
            require_keys(jo, "world.obstacles[]", {"id", "circle", "polygon", "height"});
            Obstacle o;
            o.id = require(jo, "obstacle", "id").get<std::string>();
            const std::string ctx = "obstacle '" + o.id + "'";
            if (jo.contains("circle") == jo.contains("polygon"))
                throw ScenarioError(ctx + ": needs exactly one of 'circle' or 'polygon'");
            if (jo.contains("circle")) {
                const json& c = jo.at("circle");
                require_keys(c, ctx + ".circle", {"center", "radius"});
                CircleFootprint fp;
                fp.center = point(require(c, ctx, "center"), ctx + ".center");
                fp.radius = number(require(c, ctx, "radius"), ctx + ".radius");
                o.footprint = fp;
            } else {
                PolygonFootprint fp;
                for (const json& v : jo.at("polygon")) fp.vertices.push_back(point(v, ctx + ".polygon"));
                o.footprint = fp;
            }
            const json& h = require(jo, ctx, "height");
            if (!h.is_array() || h.size() != 2)
                throw ScenarioError(ctx + ".height: expected [z_min, z_max]");
            o.height = {number(h[0], ctx + ".height"), number(h[1], ctx + ".height")};
            world.obstacles.push_back(std::move(o));
        }
    }
    if (w.contains("pads")) {
        for (const json& jp : w.at("pads")) {
            require_keys(jp, "world.pads[]", {"name", "position", "kind"});
            Pad pad;
            pad.name = require(jp, "pad", "name").get<std::string>();
            pad.position = point(require(jp, "pad '" + pad.name + "'", "position"),
                                 "pad '" + pad.name + "'.position");
            if (jp.contains("kind")) {
                pad.kind = jp.at("kind").get<std::string>();
                if (pad.kind != "start" && pad.kind != "destination")
                    throw ScenarioError("pad '" + pad.name +
                                        "': kind must be 'start' or 'destination'");
            }
            world.pads.push_back(std::move(pad));
        }
    }
    return world;
}

inline void parse_parameters(const json& params, TestInput& input) {
    require_keys(params, "parameters",
                 {"cruise_speed", "d0", "k_obst", "suspend_pursuit_during_avoidance",
                  "delay_at_waypoint", "lidar_ray_count", "lidar_min_range", "lidar_max_range",
                  "takeoff_altitude", "waypoint_tolerance", "dt", "telemetry_sample_period",
                  "max_sim_time"});
    auto& avoidance = input.configs.avoidance;
    auto& lidar = input.configs.lidar;
    auto& clock = input.clock;
    const auto num = [&](const char* key, double fallback) {
        return params.contains(key) ? number(params.at(key), std::string("parameters.") + key)
                                    : fallback;
    };
    avoidance.cruise_speed = num("cruise_speed", avoidance.cruise_speed);
    avoidance.d0 = num("d0", avoidance.d0);
    avoidance.k_obst = num("k_obst", avoidance.k_obst);
    if (params.contains("suspend_pursuit_during_avoidance")) {
        const json& v = params.at("suspend_pursuit_during_avoidance");
        if (!v.is_boolean())
            throw ScenarioError("parameters.suspend_pursuit_during_avoidance: expected a boolean");
        avoidance.suspend_pursuit_during_avoidance = v.get<bool>();
    }
    lidar.ray_count = params.contains("lidar_ray_count")
                          ? params.at("lidar_ray_count").get<int>()
                          : lidar.ray_count;
    lidar.min_range = num("lidar_min_range", lidar.min_range);
    lidar.max_range = num("lidar_max_range", lidar.max_range);
    clock.dt = num("dt", clock.dt);
    clock.telemetry_sample_period = num("telemetry_sample_period", clock.telemetry_sample_period);
    clock.max_sim_time = num("max_sim_time", clock.max_sim_time);

    const double takeoff_altitude = num("takeoff_altitude", 2.0);
    const double waypoint_tolerance = num("waypoint_tolerance", 0.5);
    const double delay_at_waypoint = num("delay_at_waypoint", 0.0);
    for (auto& plan : input.plans) {
        plan.takeoff_altitude = takeoff_altitude;
        plan.waypoint_tolerance = waypoint_tolerance;
        plan.delay_at_waypoint = delay_at_waypoint;
    }
}

}  // namespace scenario_detail

/// Cross-module invariants a parsed scenario must satisfy, checked before any run.
inline void validate_scenario(const Scenario& scenario) {
    const TestInput& input = scenario.input;
    if (input.scenario_id.empty()) throw ScenarioError("scenario_id must be non-empty");
    validate_world(input.world);
    if (input.plans.empty()) throw ScenarioError("scenario needs at least one drone");
    std::set<std::string> ids;
    for (const auto& plan : input.plans) {
        validate_plan(plan);
        if (!ids.insert(plan.drone_id).second)
            throw ScenarioError("duplicate drone id '" + plan.drone_id + "'");
    }
    validate_lidar_config(input.configs.lidar);
    const auto& avoidance = input.configs.avoidance;
    if (avoidance.k_obst < 0.0) throw ScenarioError("parameters.k_obst must be >= 0");
    if (!(avoidance.cruise_speed > 0.0)) throw ScenarioError("parameters.cruise_speed must be > 0");
    if (!(avoidance.d0 > input.configs.lidar.min_range))
        throw ScenarioError("parameters.d0 must exceed lidar_min_range");
    if (avoidance.d0 > input.configs.lidar.max_range)
        throw ScenarioError(
            "parameters.d0 must not exceed lidar_max_range (readings clamp there, so a larger "
            "threshold keeps avoidance active in free space)");
    validate_clock(input.clock);
    validate_tolerances(scenario.tolerances);
}

inline Scenario parse_scenario(const std::string& text, const std::string& origin) {
    using scenario_detail::json;
    using scenario_detail::number;
    using scenario_detail::point;
    using scenario_detail::require;
    using scenario_detail::require_keys;

    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ScenarioError(origin + ": parse error: " + e.what());
    }
    try {
        require_keys(doc, origin, {"scenario_id", "world", "drones", "parameters", "relation", "seed"});
        Scenario scenario;
        TestInput& input = scenario.input;
        input.scenario_id = require(doc, origin, "scenario_id").get<std::string>();
        input.world = scenario_detail::parse_world(require(doc, origin, "world"));

        for (const json& jd : require(doc, origin, "drones")) {
            require_keys(jd, "drones[]", {"id", "start_pad", "waypoints", "body_radius"});
            MissionPlan plan;
            plan.drone_id = require(jd, "drone", "id").get<std::string>();
            const std::string ctx = "drone '" + plan.drone_id + "'";
            const std::string pad_name = require(jd, ctx, "start_pad").get<std::string>();
            const Pad* pad = input.world.find_pad(pad_name);
            if (!pad) throw ScenarioError(ctx + ": start_pad '" + pad_name + "' does not exist");
            plan.start_pad = pad->position;
            for (const json& jw : require(jd, ctx, "waypoints")) {
                if (jw.is_string()) {
                    const Pad* wp = input.world.find_pad(jw.get<std::string>());
                    if (!wp)
                        throw ScenarioError(ctx + ": waypoint pad '" + jw.get<std::string>() +
                                            "' does not exist");
                    plan.waypoints.push_back(wp->position);
                } else {
                    plan.waypoints.push_back(point(jw, ctx + ".waypoints"));
                }
            }
            if (jd.contains("body_radius"))
                plan.body_radius = number(jd.at("body_radius"), ctx + ".body_radius");
            input.plans.push_back(std::move(plan));
        }

        if (doc.contains("parameters")) scenario_detail::parse_parameters(doc.at("parameters"), input);

        if (doc.contains("relation")) {
            const json& jr = doc.at("relation");
            require_keys(jr, "relation", {"id", "delta_d", "delta_t"});
            scenario.relation_id = require(jr, "relation", "id").get<std::string>();
            if (jr.contains("delta_d"))
                scenario.tolerances.delta_d = number(jr.at("delta_d"), "relation.delta_d");
            if (jr.contains("delta_t"))
                scenario.tolerances.delta_t = number(jr.at("delta_t"), "relation.delta_t");
        }
        if (doc.contains("seed")) {
            const json& js = doc.at("seed");
            if (!js.is_number_unsigned())
                throw ScenarioError("seed: expected a non-negative integer");
            input.seed = js.get<std::uint64_t>();
        }

        validate_scenario(scenario);
        return scenario;
    } catch (const json::exception& e) {
        throw ScenarioError(origin + ": " + e.what());
    } catch (const std::invalid_argument& e) {
        throw ScenarioError(origin + ": " + e.what());
    }
}

inline Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioError("cannot open scenario file '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str(), path.filename().string());
}

/// Canonical serialization; waypoint pad references are emitted as resolved
/// coordinates. load(serialize(s)) reproduces s exactly.
inline std::string serialize_scenario(const Scenario& scenario) {
    using scenario_detail::json;
    const TestInput& input = scenario.input;
    json doc;
    doc["scenario_id"] = input.scenario_id;
    doc["world"]["bounds"]["min"] = {input.world.bounds.min.x, input.world.bounds.min.y};
    doc["world"]["bounds"]["max"] = {input.world.bounds.max.x, input.world.bounds.max.y};
    doc["world"]["obstacles"] = json::array();
    for (const auto& o : input.world.obstacles) {
        json jo;
        jo["id"] = o.id;
        if (const auto* circle = std::get_if<CircleFootprint>(&o.footprint)) {
            jo["circle"]["center"] = {circle->center.x, circle->center.y};
            jo["circle"]["radius"] = circle->radius;
        } else {
            json verts = json::array();
            for (const Vec2 v : std::get<PolygonFootprint>(o.footprint).vertices)
                verts.push_back({v.x, v.y});
            jo["polygon"] = verts;
        }
        jo["height"] = {o.height.z_min, o.height.z_max};
        doc["world"]["obstacles"].push_back(jo);
    }
    doc["world"]["pads"] = json::array();
    for (const auto& p : input.world.pads) {
        json jp;
        jp["name"] = p.name;
        jp["position"] = {p.position.x, p.position.y};
        if (!p.kind.empty()) jp["kind"] = p.kind;
        doc["world"]["pads"].push_back(jp);
    }
    doc["drones"] = json::array();
    for (const auto& plan : input.plans) {
        json jd;
        jd["id"] = plan.drone_id;
        const Pad* pad = nullptr;
        for (const auto& p : input.world.pads)
            if (p.position == plan.start_pad) pad = &p;
        if (!pad) throw ScenarioError("drone '" + plan.drone_id + "': start pad has no pad entry");
        jd["start_pad"] = pad->name;
        json wps = json::array();
        for (const Vec2 w : plan.waypoints) wps.push_back({w.x, w.y});
        jd["waypoints"] = wps;
        jd["body_radius"] = plan.body_radius;
        doc["drones"].push_back(jd);
    }
    const auto& avoidance = input.configs.avoidance;
    const auto& lidar = input.configs.lidar;
    json params;
    params["cruise_speed"] = avoidance.cruise_speed;
    params["d0"] = avoidance.d0;
    params["k_obst"] = avoidance.k_obst;
    params["suspend_pursuit_during_avoidance"] = avoidance.suspend_pursuit_during_avoidance;
    params["lidar_ray_count"] = lidar.ray_count;
    params["lidar_min_range"] = lidar.min_range;
    params["lidar_max_range"] = lidar.max_range;
    params["takeoff_altitude"] = input.plans.front().takeoff_altitude;
    params["waypoint_tolerance"] = input.plans.front().waypoint_tolerance;
    params["delay_at_waypoint"] = input.plans.front().delay_at_waypoint;
    params["dt"] = input.clock.dt;
    params["telemetry_sample_period"] = input.clock.telemetry_sample_period;
    params["max_sim_time"] = input.clock.max_sim_time;
    doc["parameters"] = params;
    if (scenario.relation_id) {
        doc["relation"]["id"] = *scenario.relation_id;
        doc["relation"]["delta_d"] = scenario.tolerances.delta_d;
        doc["relation"]["delta_t"] = scenario.tolerances.delta_t;
    }
    doc["seed"] = input.seed;
    return doc.dump(2) + "\n";
}

inline void save_scenario(const Scenario& scenario, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ScenarioError("cannot write scenario file '" + path.string() + "'");
    out << serialize_scenario(scenario);
}

}  // namespace mtsim
