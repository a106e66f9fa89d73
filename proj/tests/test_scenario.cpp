#include <catch_amalgamated.hpp>

#include <random>

#include "mtsim/scenario.hpp"

using namespace mtsim;

namespace {

const std::filesystem::path kScenarioDir = MTSIM_SCENARIO_DIR;

std::string minimal_scenario(const std::string& params_json,
                             const std::string& extra_top_level = "") {
    return R"({
  "scenario_id": "mini",
  "world": {
    "bounds": { "min": [-20, -20], "max": [120, 20] },
    "obstacles": [],
    "pads": [
      { "name": "A", "position": [0, 0], "kind": "start" },
      { "name": "B", "position": [100, 0], "kind": "destination" }
    ]
  },
  "drones": [ { "id": "d1", "start_pad": "A", "waypoints": ["B"] } ],
  "parameters": {)" +
           params_json + "}" + extra_top_level + R"(,
  "seed": 3
})";
}

}  // namespace

TEST_CASE("the bundled R1 fixture loads into a validated input") {
    const Scenario sc = load_scenario(kScenarioDir / "r1_obstacle_course.json");
    CHECK(sc.input.scenario_id == "r1_obstacle_course");
    REQUIRE(sc.input.plans.size() == 1);
    CHECK(sc.input.plans[0].start_pad == Vec2{0, 0});
    CHECK(sc.input.plans[0].waypoints[0] == Vec2{100, 0});
    CHECK(shortest_path_length(sc.input.plans[0].start_pad, sc.input.plans[0].waypoints[0]) ==
          100.0);
    CHECK(sc.input.world.obstacles.size() == 1);
    REQUIRE(sc.relation_id.has_value());
    CHECK(*sc.relation_id == "R1");
    CHECK(sc.tolerances.delta_d == 1.0);
    CHECK(sc.tolerances.delta_t == 10.0);
    CHECK(sc.input.seed == 7);
    CHECK(sc.input.configs.avoidance.d0 == 10.0);
    CHECK(sc.input.configs.lidar.min_range == 0.35);
}

TEST_CASE("every bundled fixture validates") {
    for (const auto& entry : std::filesystem::directory_iterator(kScenarioDir)) {
        if (entry.path().extension() != ".json") continue;
        INFO(entry.path().string());
        CHECK_NOTHROW(load_scenario(entry.path()));
    }
}

TEST_CASE("an influence threshold at or below min_range is a validation error") {
    const std::string text = minimal_scenario(R"( "d0": 0.3, "lidar_min_range": 0.35 )");
    CHECK_THROWS_WITH(parse_scenario(text, "mini"),
                      Catch::Matchers::ContainsSubstring("d0"));
}

TEST_CASE("an influence threshold beyond the sensor's reach is a validation error") {
    const std::string text = minimal_scenario(R"( "d0": 35.0, "lidar_max_range": 30.0 )");
    CHECK_THROWS_WITH(parse_scenario(text, "mini"),
                      Catch::Matchers::ContainsSubstring("lidar_max_range"));
}

TEST_CASE("unknown keys are parse errors naming the key") {
    const std::string text = minimal_scenario(R"( "velocty": 1.0 )");
    CHECK_THROWS_WITH(parse_scenario(text, "mini"),
                      Catch::Matchers::ContainsSubstring("velocty"));
}

TEST_CASE("malformed JSON is a parse error with diagnostics") {
    CHECK_THROWS_WITH(parse_scenario("{ not json", "broken.json"),
                      Catch::Matchers::ContainsSubstring("parse error"));
}

TEST_CASE("missing pads referenced by drones are rejected") {
    std::string text = minimal_scenario(R"( "d0": 10.0 )");
    const auto pos = text.find("\"waypoints\": [\"B\"]");
    REQUIRE(pos != std::string::npos);
    text.replace(pos, std::string("\"waypoints\": [\"B\"]").size(), "\"waypoints\": [\"C\"]");
    CHECK_THROWS_WITH(parse_scenario(text, "mini"), Catch::Matchers::ContainsSubstring("'C'"));
}

TEST_CASE("negative k_obst is rejected but zero is allowed for fault injection") {
    CHECK_THROWS_WITH(parse_scenario(minimal_scenario(R"( "k_obst": -1.0 )"), "mini"),
                      Catch::Matchers::ContainsSubstring("k_obst"));
    CHECK_NOTHROW(parse_scenario(minimal_scenario(R"( "k_obst": 0.0 )"), "mini"));
}

TEST_CASE("waypoints accept raw coordinates as well as pad names") {
    std::string text = minimal_scenario(R"( "d0": 10.0 )");
    const auto pos = text.find("[\"B\"]");
    text.replace(pos, 5, "[[50, 5], \"B\"]");
    const Scenario sc = parse_scenario(text, "mini");
    REQUIRE(sc.input.plans[0].waypoints.size() == 2);
    CHECK(sc.input.plans[0].waypoints[0] == Vec2{50, 5});
    CHECK(sc.input.plans[0].waypoints[1] == Vec2{100, 0});
}

TEST_CASE("save and load round-trip is the identity on validated scenarios") {
    const Scenario sc = load_scenario(kScenarioDir / "r2_parallel_drones.json");
    const std::string once = serialize_scenario(sc);
    const Scenario reloaded = parse_scenario(once, "roundtrip");
    const std::string twice = serialize_scenario(reloaded);
    CHECK(once == twice);
    CHECK(reloaded.input.scenario_id == sc.input.scenario_id);
    CHECK(reloaded.input.seed == sc.input.seed);
    CHECK(reloaded.input.plans.size() == sc.input.plans.size());
    CHECK(reloaded.input.configs.avoidance.d0 == sc.input.configs.avoidance.d0);
    CHECK(reloaded.tolerances.delta_d == sc.tolerances.delta_d);
}

TEST_CASE("scenario without a relation block loads with no relation id") {
    const Scenario sc = load_scenario(kScenarioDir / "head_on.json");
    CHECK_FALSE(sc.relation_id.has_value());
    CHECK(sc.input.plans.size() == 2);
    // and still round-trips
    const std::string once = serialize_scenario(sc);
    CHECK(serialize_scenario(parse_scenario(once, "roundtrip")) == once);
}

TEST_CASE("randomized scenarios survive the save/load round trip") {
    std::mt19937_64 rng(555);
    std::uniform_real_distribution<double> coord(2.0, 70.0);
    std::uniform_real_distribution<double> radius(0.5, 4.0);
    std::uniform_int_distribution<int> counts(0, 4);
    std::uniform_int_distribution<std::uint64_t> seeds(0, 1'000'000);
    for (int trial = 0; trial < 25; ++trial) {
        Scenario sc;
        TestInput& input = sc.input;
        input.scenario_id = "random" + std::to_string(trial);
        input.world.bounds = {{-100, -100}, {100, 100}};
        const int obstacles = counts(rng);
        for (int i = 0; i < obstacles; ++i)
            input.world.obstacles.push_back({"o" + std::to_string(i),
                                             CircleFootprint{{coord(rng), coord(rng)}, radius(rng)},
                                             {0.0, 1.0 + radius(rng)}});
        input.world.pads.push_back({"A", {-coord(rng), -coord(rng)}, "start"});
        input.world.pads.push_back({"B", {coord(rng), coord(rng)}, "destination"});
        MissionPlan plan;
        plan.drone_id = "d1";
        plan.start_pad = input.world.pads[0].position;
        plan.waypoints = {{coord(rng), coord(rng)}, input.world.pads[1].position};
        input.plans.push_back(plan);
        input.seed = seeds(rng);
        input.configs.avoidance.d0 = 4.0 + radius(rng);
        if (trial % 2 == 0) {
            sc.relation_id = "R1";
            sc.tolerances = {radius(rng), radius(rng) * 5.0};
        }
        validate_scenario(sc);
        const std::string once = serialize_scenario(sc);
        const Scenario reloaded = parse_scenario(once, "random");
        REQUIRE(serialize_scenario(reloaded) == once);
        REQUIRE(reloaded.input.seed == input.seed);
        REQUIRE(reloaded.input.plans[0].waypoints == plan.waypoints);
    }
}
