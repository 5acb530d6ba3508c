#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <fstream>
#include <random>
#include <sstream>

#include "capkit/dsl.hpp"

using namespace capkit;

static std::string read_file(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

static std::string asset(const std::string& rel) {
  return std::string(CAPKIT_ASSET_DIR) + "/" + rel;
}

TEST_CASE("zelda domain parses with full vocabulary") {
  DomainSpec d = parse_domain(read_file(asset("domains/zelda.domain")));
  CHECK(d.name == "zelda");
  CHECK(d.mechanics == Mechanics::Zelda);
  CHECK(d.predicates.size() == 7);
  CHECK(d.types == std::vector<std::string>{"monster", "key", "door"});
  const PredicateSpec* at = d.find_predicate("at");
  REQUIRE(at != nullptr);
  CHECK(at->arity == 2);
  CHECK(at->arg_types == std::vector<std::string>{"any", "cell"});
  const PredicateSpec* alive = d.find_predicate("alive");
  REQUIRE(alive != nullptr);
  CHECK(alive->arg_types == std::vector<std::string>{"monster"});
  CHECK(d.goal_predicates == std::vector<std::string>{"alive", "has_key", "escaped"});
  CHECK(d.find_predicate("next_to") != nullptr);
  CHECK(d.find_predicate("is_door") == nullptr);
}

TEST_CASE("snowman domain has eight predicates and no next_to") {
  DomainSpec d = parse_domain(read_file(asset("domains/snowman.domain")));
  CHECK(d.predicates.size() == 8);
  CHECK(d.find_predicate("next_to") == nullptr);
  CHECK(d.find_predicate("player_has") != nullptr);
  CHECK(d.find_predicate("placed") != nullptr);
}

TEST_CASE("escape domain declares the win goal") {
  DomainSpec d = parse_domain(read_file(asset("domains/escape.domain")));
  CHECK(d.predicates.size() == 6);
  CHECK(d.types.empty());
  CHECK(d.goal_predicates == std::vector<std::string>{"win"});
}

TEST_CASE("domain parse errors carry line numbers") {
  CHECK_THROWS_WITH_AS(parse_domain(""), "expected 'domain <name>' at line 1", ParseError);
  CHECK_THROWS_WITH_AS(parse_domain("domain x\npredicate at 2 any cell"),
                       "missing 'mechanics <name>' directive at line 3", ParseError);
  CHECK_THROWS_WITH_AS(
      parse_domain("domain x\nmechanics zelda\npredicate p 1 cell\npredicate p 0"),
      "duplicate predicate 'p' at line 4", ParseError);
  CHECK_THROWS_WITH_AS(parse_domain("domain x\nmechanics zelda\nfrobnicate y"),
                       "unknown directive 'frobnicate' at line 3", ParseError);
  CHECK_THROWS_WITH_AS(parse_domain("domain x\nmechanics zelda\npredicate p 3 cell cell cell"),
                       "predicate arity must be 0, 1 or 2 at line 3", ParseError);
  CHECK_THROWS_WITH_AS(parse_domain("domain x\nmechanics zelda\npredicate p 1 widget"),
                       "unknown argument type 'widget' at line 3", ParseError);
  CHECK_THROWS_WITH_AS(parse_domain("domain x\nmechanics zelda\ngoals q"),
                       "goal predicate 'q' is not declared at line 3", ParseError);
}

TEST_CASE("domain serialization round-trips all bundled vocabularies") {
  for (const char* f : {"zelda.domain", "pasta.domain", "escape.domain", "snowman.domain"}) {
    DomainSpec d = parse_domain(read_file(asset(std::string("domains/") + f)));
    std::string s1 = serialize_domain(d);
    DomainSpec d2 = parse_domain(s1);
    CHECK(serialize_domain(d2) == s1);
    CHECK(d2.name == d.name);
    CHECK(d2.predicates.size() == d.predicates.size());
  }
}

TEST_CASE("instance parse, feature decoding and round-trip") {
  DomainSpec dom = parse_domain(read_file(asset("domains/zelda.domain")));
  InstanceSpec inst = parse_instance(read_file(asset("domains/zelda_5x5.inst")), dom);
  CHECK(inst.name == "zelda_5x5");
  CHECK(inst.width == 5);
  CHECK(inst.height == 5);
  CHECK(inst.agent_row == 0);
  CHECK(inst.agent_col == 0);
  REQUIRE(inst.objects.size() == 3);
  CHECK(inst.objects[0].name == "ganon");
  CHECK(inst.objects[0].row == 0);
  CHECK(inst.objects[0].col == 2);
  REQUIRE(inst.goals.size() == 3);
  CHECK(inst.goals[0].negated);
  CHECK(inst.goals[0].pred == "alive");
  CHECK(inst.goals[0].args == std::vector<std::string>{"ganon"});

  std::string s1 = serialize_instance(inst);
  InstanceSpec back = parse_instance(s1, dom);
  CHECK(back == inst);
  CHECK(serialize_instance(back) == s1);
}

TEST_CASE("escape features decode from map glyphs") {
  DomainSpec dom = parse_domain(read_file(asset("domains/escape.domain")));
  InstanceSpec inst = parse_instance(read_file(asset("domains/escape_4x4.inst")), dom);
  auto feat = [&](int r, int c) { return inst.features[r * inst.width + c]; };
  CHECK(feat(1, 2) == CellFeature::Block);
  CHECK(feat(2, 0) == CellFeature::Hole);
  CHECK(feat(2, 2) == CellFeature::Goal);
  CHECK(feat(3, 0) == CellFeature::Wall);
  CHECK(feat(0, 0) == CellFeature::None);
}

TEST_CASE("instance parse errors") {
  DomainSpec dom = parse_domain(read_file(asset("domains/zelda.domain")));
  std::string base =
      "instance t\ndomain zelda\ngrid 3 3\nmap\nA.g\n.kd\n...\nendmap\n"
      "object g monster ganon\nobject k key key1\nobject d door door1\n";

  CHECK_THROWS_WITH_AS(parse_instance("", dom), "expected 'instance <name>' at line 1",
                       ParseError);
  CHECK_THROWS_WITH_AS(
      parse_instance("instance t\ndomain zelda\ngrid 3 3\nmap\nA.A\n...\n...\nendmap\n", dom),
      "multiple agent placements at line 5", ParseError);
  CHECK_THROWS_WITH_AS(
      parse_instance("instance t\ndomain zelda\ngrid 3 3\nmap\nA..\n....\n...\nendmap\n", dom),
      "map row 2 has 4 characters, expected 3 at line 6", ParseError);
  CHECK_THROWS_WITH_AS(
      parse_instance("instance t\ndomain pasta\ngrid 2 2\nmap\nA.\n..\nendmap\n", dom),
      "instance declares domain 'pasta' but was parsed against 'zelda' at line 2", ParseError);
  CHECK_THROWS_AS(parse_instance(base + "goal clear cell0\n", dom), ParseError);
  CHECK_THROWS_WITH_AS(parse_instance(base + "goal alive ganon kilroy\n", dom),
                       "goal predicate 'alive' expects 1 arguments at line 12", ParseError);
  CHECK_THROWS_WITH_AS(parse_instance(base + "goal alive cell99\n", dom),
                       "goal argument 'cell99' is not a declared object at line 8", ParseError);
  // Unbound map glyph.
  CHECK_THROWS_AS(
      parse_instance("instance t\ndomain zelda\ngrid 2 2\nmap\nAz\n..\nendmap\n", dom),
      ParseError);
  // Declared object missing from the map.
  CHECK_THROWS_AS(
      parse_instance("instance t\ndomain zelda\ngrid 2 2\nmap\nA.\n..\nendmap\n"
                     "object g monster ganon\n",
                     dom),
      ParseError);
}

TEST_CASE("generated instances respect wall budget and parse back") {
  DomainSpec dom = parse_domain(read_file(asset("domains/zelda.domain")));
  InstanceSpec inst = generate_instance(dom, 7, 7, 0.2, 1234);
  CHECK(inst.width == 7);
  CHECK(inst.height == 7);
  int walls = 0;
  for (auto f : inst.features)
    if (f == CellFeature::Wall) ++walls;
  CHECK(walls == 9);  // floor(0.2 * 49)
  CHECK(inst.objects.size() == 3);
  InstanceSpec back = parse_instance(serialize_instance(inst), dom);
  CHECK(back == inst);
}

TEST_CASE("generator round-trip fuzz across mechanics") {
  std::vector<DomainSpec> doms;
  for (const char* f : {"zelda.domain", "pasta.domain", "escape.domain", "snowman.domain"})
    doms.push_back(parse_domain(read_file(asset(std::string("domains/") + f))));
  std::mt19937_64 rng(20240817u);
  for (int i = 0; i < 100; ++i) {
    const DomainSpec& dom = doms[i % doms.size()];
    int w = 5 + static_cast<int>(rng() % 4);
    int h = 5 + static_cast<int>(rng() % 4);
    double frac = static_cast<double>(rng() % 25) / 100.0;
    InstanceSpec inst = generate_instance(dom, w, h, frac, rng());
    std::string s1 = serialize_instance(inst);
    InstanceSpec back = parse_instance(s1, dom);
    CHECK(back == inst);
    CHECK(serialize_instance(back) == s1);
  }
}
