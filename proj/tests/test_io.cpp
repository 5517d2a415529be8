#include "vosa/error.hpp"
#include "vosa/io.hpp"

#include <doctest.h>

#include <sstream>

using namespace vosa;

TEST_CASE("shipped scenario files match the built-in scenarios")
{
  for (const auto& name : builtin_scenario_names()) {
    INFO(name);
    const ScenarioSpec file = load_scenario_file(std::string(VOSA_SCENARIO_DIR) + "/" + name + ".json");
    CHECK(to_json(file) == to_json(builtin_scenario(name)));
  }
}

TEST_CASE("scenario JSON round-trips")
{
  for (const auto& name : builtin_scenario_names()) {
    const ScenarioSpec s = builtin_scenario(name);
    const ScenarioSpec back = scenario_from_json(Json::parse(to_json(s).dump()));
    CHECK(to_json(back) == to_json(s));
    CHECK(back.sag_intents == s.sag_intents);
    REQUIRE(back.scene.pending_events.size() == s.scene.pending_events.size());
  }
}

TEST_CASE("human models round-trip")
{
  const ScenarioSpec spec = builtin_scenario("pick_and_place");
  for (const std::string kind : {"goal_directed", "stubborn", "compliant"}) {
    HumanModel m = make_human(spec, kind);
    m.traits.switch_ticks = 4;
    const HumanModel back = human_from_json(to_json(m), spec.plan);
    CHECK(to_json(back) == to_json(m));
    CHECK(back.traits.switch_ticks == 4);
  }
  CHECK_THROWS_AS(human_from_json(Json{{"kind", "sleepy"}}, {}), ConfigError);
}

TEST_CASE("malformed scenarios are rejected with the right category")
{
  Json j = to_json(builtin_scenario("pick_and_place"));

  SUBCASE("missing field")
  {
    j.erase("scene");
    CHECK_THROWS_AS(scenario_from_json(j), ParseError);
  }
  SUBCASE("wrong vector arity")
  {
    j["sag_intents"][0] = Json::array({1, 2});
    CHECK_THROWS_AS(scenario_from_json(j), ParseError);
  }
  SUBCASE("unknown shape")
  {
    j["scene"]["objects"][0]["shape"]["type"] = "torus";
    CHECK_THROWS_AS(scenario_from_json(j), ParseError);
  }
  SUBCASE("plan names an unknown object")
  {
    j["plan"][0]["object"] = "ghost";
    CHECK_THROWS_AS(validate(scenario_from_json(j)), ConfigError);
  }
  SUBCASE("unknown scenario name")
  {
    CHECK_THROWS_AS(resolve_scenario("no_such_scenario"), ConfigError);
  }
}

TEST_CASE("malformed logs are parse errors")
{
  const ScenarioSpec spec = builtin_scenario("pick_and_place");
  const EpisodeLog log = run_episode(spec, "teleop", make_human(spec, "stubborn"), 0);
  std::ostringstream os;
  write_log(os, log);
  const std::string text = os.str();

  auto parse = [](const std::string& s) {
    std::istringstream is(s);
    return read_log(is);
  };
  CHECK_NOTHROW(parse(text));
  CHECK_THROWS_AS(parse(""), ParseError);
  CHECK_THROWS_AS(parse("not json\n"), ParseError);
  // Drop the summary line.
  const std::string no_summary = text.substr(0, text.rfind('\n', text.size() - 2) + 1);
  CHECK_THROWS_AS(parse(no_summary), ParseError);
  CHECK_THROWS_AS(parse(text + R"({"type":"tick"})" + "\n"), ParseError);
}

TEST_CASE("tick records round-trip exactly")
{
  const ScenarioSpec spec = builtin_scenario("shelving");
  const EpisodeLog log = run_episode(spec, "vosa", make_human(spec, "goal_directed"), 0);
  for (std::size_t i = 0; i < log.ticks.size(); i += 37) {
    const TickRecord back = tick_from_json(Json::parse(to_json(log.ticks[i]).dump()));
    CHECK(to_json(back).dump() == to_json(log.ticks[i]).dump());
    CHECK(back.blend.u == log.ticks[i].blend.u);
  }
}
