#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <set>

#include "capkit/harvest.hpp"
#include "capkit/induction.hpp"
#include "capkit/query.hpp"
#include "capkit/verify.hpp"
#include "test_util.hpp"

using namespace capkit;
using tu::load_world;

static LiftedAtom la(std::string pred, std::vector<int> args = {}) {
  return LiftedAtom{std::move(pred), std::move(args)};
}

// One full discovery run on the 4x4 zelda board, shared across the cases
// below. Discovery is deterministic, so computing it once is safe.
static const World& z4() {
  static World w = load_world("zelda.domain", "zelda_4x4.inst");
  return w;
}

static const DiscoverResult& z4_run() {
  static DiscoverResult r = [] {
    SearchAgent agent(z4());
    DiscoverConfig cfg;
    cfg.trace_budget = 12;
    cfg.seed = 7;
    return discover(z4(), agent, cfg);
  }();
  return r;
}

TEST_CASE("consistency holds for a learned model on its own harvest") {
  const DiscoverResult& r = z4_run();
  VerificationReport v = check_consistency(z4(), r.model, r.traces);
  CHECK(v.pass);
  CHECK(v.examined > 0);
  CHECK(v.unexplained.empty());
}

TEST_CASE("consistency with no traces is a vacuous pass") {
  const DiscoverResult& r = z4_run();
  VerificationReport v = check_consistency(z4(), r.model, {});
  CHECK(v.pass);
  CHECK(v.examined == 0);
}

TEST_CASE("deleting one capability breaks consistency with a replayable witness") {
  const DiscoverResult& r = z4_run();
  CapabilityModel cut = r.model;
  cut.caps.erase(cut.caps.begin() + 1);  // the defeat capability

  VerificationReport v = check_consistency(z4(), cut, r.traces);
  REQUIRE_FALSE(v.pass);
  REQUIRE_FALSE(v.unexplained.empty());

  // The witness replays: the full model produces the transition, the cut
  // model does not, checked from scratch against the definitional layer.
  const auto& [src, dst] = v.unexplained.front();
  bool full_produces = false;
  for (const auto& c : r.model.caps)
    if (!bindings_explaining(z4(), c, src, dst).empty()) full_produces = true;
  CHECK(full_produces);
  for (const auto& c : cut.caps) CHECK(bindings_explaining(z4(), c, src, dst).empty());
}

TEST_CASE("the finished model is maximally consistent with its evidence") {
  const DiscoverResult& r = z4_run();
  VerificationReport v = check_maximal_consistency(z4(), r.model, r.traces, r.evidence, r.prunes);
  CHECK(v.pass);
  CHECK(v.unrefuted.empty());
  CHECK(v.examined > 100);  // every absent literal in both polarities
}

TEST_CASE("a partial model with open mode sets is not maximal") {
  const DiscoverResult& r = z4_run();
  CapabilityModel raw = induce_model(z4(), r.traces);
  VerificationReport v = check_maximal_consistency(z4(), raw, r.traces, {}, {});
  CHECK_FALSE(v.pass);
  CHECK(!v.unrefuted.empty());
  CHECK(v.detail.find("unsettled") != std::string::npos);
}

TEST_CASE("committing by observation alone, with nothing asked, is not maximal") {
  const DiscoverResult& r = z4_run();
  CapabilityModel def = induce_model(z4(), r.traces);
  for (auto& c : def.caps)
    for (auto& [k, ms] : c.sites)
      if (ms.count() != 1) {
        Mode keep = (k.loc == Loc::Pre && ms.has(Mode::Pos)) ? Mode::Pos : Mode::Off;
        ms = ModeSet::of(keep);
      }
  VerificationReport v = check_maximal_consistency(z4(), def, r.traces, {}, {});
  CHECK_FALSE(v.pass);
  CHECK(v.unrefuted.size() > 50);
}

TEST_CASE("the settlement log is load-bearing for maximality") {
  // Some additions are refutable only by the learner's recorded settlements
  // (the board geometry admits no separating transition). Withholding the
  // log must therefore flip the verdict.
  const DiscoverResult& r = z4_run();
  VerificationReport v = check_maximal_consistency(z4(), r.model, r.traces, r.evidence, {});
  CHECK_FALSE(v.pass);
  CHECK(!v.unrefuted.empty());
}

TEST_CASE("every satisfiable grounding of the learned model is realizable") {
  const DiscoverResult& r = z4_run();
  VerificationReport v = check_realizability(z4(), r.model);
  CHECK(v.pass);
  CHECK_FALSE(v.partial);  // small board: exhaustive
  CHECK(v.examined > 1000);
  CHECK(v.skipped > 0);  // claims whose image leaves the induced space
  CHECK(v.unrealizable.empty());
}

TEST_CASE("a capability claiming to undo an irreversible step fails realizability") {
  const DiscoverResult& r = z4_run();
  CapabilityModel bad = r.model;

  // "put the key back": satisfiable after pickup, image is a real reachable
  // abstraction (the pre-pickup world), but no action sequence returns there.
  Capability undo;
  undo.name = "undo";
  undo.param_types = {"player", "key", "cell", "cell"};
  undo.sites[{Loc::Pre, la("at", {0, 2})}] = ModeSet::of(Mode::Pos);
  undo.sites[{Loc::Pre, la("has_key")}] = ModeSet::of(Mode::Pos);
  undo.sites[{Loc::Pre, la("clear", {3})}] = ModeSet::of(Mode::Pos);
  undo.sites[{Loc::Eff, la("at", {1, 3})}] = ModeSet::of(Mode::Pos);
  undo.sites[{Loc::Eff, la("clear", {3})}] = ModeSet::of(Mode::Neg);
  undo.sites[{Loc::Eff, la("has_key")}] = ModeSet::of(Mode::Neg);
  bad.caps.push_back(undo);

  VerificationReport v = check_realizability(z4(), bad);
  REQUIRE_FALSE(v.pass);
  REQUIRE_FALSE(v.unrealizable.empty());
  CHECK(v.unrealizable.front().cap == "undo");
  // the witness names a concrete member whose abstraction is the source
  CHECK(abstract_state(z4(), v.unrealizable.front().member) == v.unrealizable.front().src);
}

TEST_CASE("a capability whose precondition never holds is reported vacuous") {
  const DiscoverResult& r = z4_run();
  CapabilityModel odd = r.model;
  Capability ghost;
  ghost.name = "ghost";
  ghost.param_types = {"player", "cell"};
  ghost.sites[{Loc::Pre, la("at", {0, 1})}] = ModeSet::of(Mode::Pos);
  ghost.sites[{Loc::Pre, la("wall", {1})}] = ModeSet::of(Mode::Pos);  // stand inside a wall
  ghost.sites[{Loc::Eff, la("escaped")}] = ModeSet::of(Mode::Pos);
  odd.caps.push_back(ghost);

  VerificationReport v = check_realizability(z4(), odd);
  CHECK(v.pass);  // vacuous claims do not fail the check
  CHECK(v.detail.find("ghost") != std::string::npos);
  CHECK(v.detail.find("vacuous") != std::string::npos);
}

TEST_CASE("a tight sample budget marks the report partial, not failed") {
  const DiscoverResult& r = z4_run();
  VerificationReport v = check_realizability(z4(), r.model, 10);
  CHECK(v.partial);
  CHECK(v.examined <= 10);
}

TEST_CASE("abstraction partitions of the 4x4 board are strongly connected") {
  VerificationReport v = check_local_connectivity(z4());
  CHECK(v.pass);
  CHECK_FALSE(v.partial);
  CHECK(v.examined > 0);
}

TEST_CASE("a vocabulary blind to an irreversible change breaks connectivity") {
  // Position-only vocabulary over pushless block-clearing: destroying the
  // block changes nothing the abstraction can see, and cannot be undone.
  DomainSpec d = parse_domain(
      "domain escape_blind\n"
      "mechanics escape\n"
      "predicate at 2 any cell\n"
      "goals win\n");
  InstanceSpec i = parse_instance(
      "instance blind_3x3\n"
      "domain escape_blind\n"
      "grid 3 3\n"
      "map\n"
      "A.B\n"
      "...\n"
      ".G.\n"
      "endmap\n"
      "goal win\n",
      d);
  World w = build_world(d, i);

  VerificationReport v = check_local_connectivity(w);
  REQUIRE_FALSE(v.pass);
  REQUIRE_FALSE(v.disconnected.empty());
  const auto& [a, b] = v.disconnected.front();
  CHECK(abstract_state(w, a) == abstract_state(w, b));
  CHECK(a != b);
}

TEST_CASE("a state cap makes connectivity coverage partial") {
  VerificationReport v = check_local_connectivity(z4(), 5);
  CHECK(v.partial);
}

TEST_CASE("coverage curves are monotone per seed and complete at high budget") {
  const DiscoverResult& r = z4_run();
  SearchAgent agent(z4());
  for (uint64_t seed = 0; seed < 5; ++seed) {
    auto curve = coverage_curve(z4(), agent, r.model, {0, 1, 5, 20, 100}, seed);
    REQUIRE(curve.size() == 5);
    CHECK(curve[0].second == 0.0);
    for (size_t i = 1; i < curve.size(); ++i) CHECK(curve[i].second >= curve[i - 1].second);
    CHECK(curve.back().second == 1.0);
  }
}

TEST_CASE("coverage is immediately complete when the gold came from the same harvest") {
  World w = load_world("zelda.domain", "zelda_4x4.inst");
  SearchAgent agent(w);
  HarvestResult h = harvest_traces(w, agent, 3, 11);
  CapabilityModel gold = induce_model(w, h.traces);
  auto curve = coverage_curve(w, agent, gold, {3}, 11);
  REQUIRE(curve.size() == 1);
  CHECK(curve[0].second == 1.0);
}

TEST_CASE("coverage without a gold model is a usage error") {
  SearchAgent agent(z4());
  CHECK_THROWS_AS(coverage_curve(z4(), agent, CapabilityModel{}, {1}, 0), UsageError);
}

TEST_CASE("the escape model verifies end to end") {
  World w = load_world("escape.domain", "escape_4x4.inst");
  SearchAgent agent(w);
  DiscoverConfig cfg;
  cfg.trace_budget = 12;
  cfg.seed = 7;
  DiscoverResult r = discover(w, agent, cfg);

  CHECK(check_consistency(w, r.model, r.traces).pass);
  CHECK(check_maximal_consistency(w, r.model, r.traces, r.evidence, r.prunes).pass);
  CHECK(check_realizability(w, r.model).pass);
  CHECK(check_local_connectivity(w).pass);
}
