#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "capkit/harvest.hpp"
#include "capkit/induction.hpp"
#include "test_util.hpp"

using namespace capkit;
using tu::abstract_run;
using tu::load_world;
using tu::play;

TEST_CASE("search agent plans shortest keystroke routes") {
  World w = load_world("zelda.domain", "zelda_5x5.inst");
  SearchAgent agent(w);
  ConcreteState s0 = initial_state(w);

  auto plan = agent.solve_task(s0, {GoalLiteral{true, "alive", {"ganon"}}});
  REQUIRE(plan.has_value());
  CHECK(*plan == std::vector<Action>{Action::Right, Action::Right, Action::Use});

  // A goal that already holds needs no keystrokes.
  auto idle = agent.solve_task(s0, {GoalLiteral{false, "alive", {"ganon"}}});
  REQUIRE(idle.has_value());
  CHECK(idle->empty());

  // No reachable state has a wall at a floor cell.
  CHECK_FALSE(agent.solve_task(s0, {GoalLiteral{false, "wall", {"cell0"}}}).has_value());
  CHECK(agent.stats().tasks == 3);
}

TEST_CASE("search agent reachability answers carry the sensor stream") {
  World w = load_world("zelda.domain", "zelda_5x5.inst");
  SearchAgent agent(w);
  ConcreteState s0 = initial_state(w);
  AbstractState a0 = abstract_state(w, s0);
  AbstractState a1 = abstract_state(w, play(w, s0, "DD"));

  ReachabilityAnswer ans = agent.answer_reachability(a0, {a1});
  CHECK(ans.success);
  CHECK(ans.definite);
  CHECK(ans.plan == std::vector<Action>{Action::Right, Action::Right});
  REQUIRE(ans.trajectory.size() == 3);  // start, rotation (invisible), arrival
  CHECK(ans.trajectory[0] == a0);
  CHECK(ans.trajectory[1] == a0);
  CHECK(ans.trajectory[2] == a1);

  // Chained waypoints work leg by leg.
  AbstractState a2 = abstract_state(w, play(w, s0, "DDE"));
  ReachabilityAnswer two = agent.answer_reachability(a0, {a1, a2});
  CHECK(two.success);
  CHECK(two.plan.size() == 3);

  // An impossible image is refuted by exhausting the reachable set.
  AbstractState bogus = a1;
  bogus.insert(GroundAtom{"has_key", {}});
  bogus.insert(GroundAtom{"escaped", {}});
  ReachabilityAnswer no = agent.answer_reachability(a0, {bogus});
  CHECK_FALSE(no.success);
  CHECK(no.definite);

  // A reset state no concrete state matches is definite evidence too.
  AbstractState impossible = a0;
  impossible.erase(GroundAtom{"at", {"player", "cell0"}});
  ReachabilityAnswer nr = agent.answer_reachability(impossible, {a1});
  CHECK_FALSE(nr.success);
  CHECK(nr.definite);
  CHECK(agent.stats().queries == 4);
  CHECK(agent.stats().query_time_us > 0);
}

TEST_CASE("search agent respects the node cap without claiming proof") {
  World w = load_world("zelda.domain", "zelda_5x5.inst");
  SearchAgent capped(w, 3);
  ConcreteState s0 = initial_state(w);
  AbstractState a0 = abstract_state(w, s0);
  AbstractState bogus = a0;
  bogus.insert(GroundAtom{"escaped", {}});
  ReachabilityAnswer ans = capped.answer_reachability(a0, {bogus});
  CHECK_FALSE(ans.success);
  CHECK_FALSE(ans.definite);
}

TEST_CASE("policy agent replays its rehearsed route and nothing else") {
  World w = load_world("zelda.domain", "zelda_5x5.inst");
  PolicyAgent agent(w);
  ConcreteState s0 = initial_state(w);

  auto plan = agent.solve_task(s0, {GoalLiteral{true, "alive", {"ganon"}}});
  REQUIRE(plan.has_value());
  CHECK(*plan == std::vector<Action>{Action::Right, Action::Right, Action::Use});

  ConcreteState afterKill = play(w, s0, "DDE");
  auto plan2 = agent.solve_task(afterKill, {GoalLiteral{false, "has_key", {}}});
  REQUIRE(plan2.has_value());
  CHECK(*plan2 == std::vector<Action>{Action::Down, Action::Down, Action::Use});

  // Anywhere off the rehearsed route it just gives up.
  ConcreteState off = play(w, s0, "SSSSS");  // bottom edge, never on the route
  CHECK_FALSE(agent.solve_task(off, {GoalLiteral{true, "alive", {"ganon"}}}).has_value());

  // Reachability from the initial state follows the table to the waypoint.
  AbstractState a0 = abstract_state(w, s0);
  AbstractState a1 = abstract_state(w, play(w, s0, "DD"));
  ReachabilityAnswer ans = agent.answer_reachability(a0, {a1});
  CHECK(ans.success);
  CHECK_FALSE(ans.definite);  // policy evidence never proves anything

  // From a synthetic state the rote performer fails indefinitely.
  AbstractState synth = abstract_state(w, play(w, s0, "SS"));
  AbstractState synthNext = abstract_state(w, play(w, s0, "SSS"));
  ReachabilityAnswer miss = agent.answer_reachability(synth, {synthNext});
  CHECK_FALSE(miss.success);
  CHECK_FALSE(miss.definite);
}

TEST_CASE("model answerer accepts exactly single-hop-explainable legs") {
  World w = load_world("zelda.domain", "zelda_5x5.inst");
  std::vector<AbstractState> trace = abstract_run(w, initial_state(w), "DDESSEDDE");
  CapabilityModel m = induce_model(w, {trace});
  ModelAnswerer oracle(w, m);

  AbstractState a0 = trace.front();
  AbstractState a1 = abstract_state(w, play(w, initial_state(w), "DD"));
  AbstractState a2 = abstract_state(w, play(w, initial_state(w), "DDE"));

  ReachabilityAnswer one = oracle.answer_reachability(a0, {a1});
  CHECK(one.success);
  CHECK(one.definite);
  CHECK(one.trajectory == std::vector<AbstractState>{a0, a1});

  ReachabilityAnswer chain = oracle.answer_reachability(a0, {a1, a2});
  CHECK(chain.success);

  // Skipping the middle state is not a single capability application.
  ReachabilityAnswer skip = oracle.answer_reachability(a0, {a2});
  CHECK_FALSE(skip.success);
  CHECK(skip.definite);
}

TEST_CASE("harvest walks the goal cycle deterministically") {
  World w = load_world("zelda.domain", "zelda_5x5.inst");

  SearchAgent s1(w);
  HarvestResult h1 = harvest_traces(w, s1, 7, 42);
  CHECK(h1.solved == 7);
  REQUIRE(h1.traces.size() == 7);
  CHECK(h1.traces[0].size() == 4);  // rotate, step, strike
  CHECK(h1.traces[2].back().contains(GroundAtom{"escaped", {}}));
  // Task four begins a fresh episode after the terminal win.
  CHECK(h1.traces[3].front() == h1.traces[0].front());

  // The route is forced, so the tie-break shuffle cannot matter.
  SearchAgent s2(w);
  HarvestResult h2 = harvest_traces(w, s2, 7, 1337);
  CHECK(h2.traces == h1.traces);

  // The rote policy performs the identical routine.
  PolicyAgent p(w);
  HarvestResult hp = harvest_traces(w, p, 7, 42);
  CHECK(hp.traces == h1.traces);

  // One task shows only the first two capabilities; five expose all six.
  CapabilityModel one = induce_model(w, {h1.traces[0]});
  CHECK(one.caps.size() == 2);
  CapabilityModel five =
      induce_model(w, {h1.traces.begin(), h1.traces.begin() + 5});
  CHECK(five.caps.size() == 6);
  CapabilityModel seven = induce_model(w, h1.traces);
  CHECK(seven.caps.size() == 6);
  for (const auto& c : seven.caps) CHECK(c.groundings.size() >= 1);
}
