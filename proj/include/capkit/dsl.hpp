#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "capkit/common.hpp"

namespace capkit {

// Which built-in rule set drives the simulator. The vocabulary is declared in
// the domain file; the mechanics name picks the interaction rules.
enum class Mechanics : uint8_t { Zelda, Pasta, Escape, Snowman };

std::string mechanics_name(Mechanics m);

struct PredicateSpec {
  std::string name;
  int arity = 0;                       // 0, 1 or 2
  std::vector<std::string> arg_types;  // "cell", "player", "any", or a declared type

  auto operator<=>(const PredicateSpec&) const = default;
};

struct DomainSpec {
  std::string name;
  Mechanics mechanics = Mechanics::Zelda;
  std::vector<std::string> types;            // object types beyond built-in "player"/"cell"
  std::vector<PredicateSpec> predicates;     // declaration order
  std::vector<std::string> goal_predicates;  // predicates usable in instance goals

  const PredicateSpec* find_predicate(const std::string& n) const {
    for (const auto& p : predicates)
      if (p.name == n) return &p;
    return nullptr;
  }
  bool has_type(const std::string& t) const {
    if (t == "player" || t == "cell") return true;
    for (const auto& x : types)
      if (x == t) return true;
    return false;
  }
};

enum class CellFeature : uint8_t { None = 0, Wall, Door, Hole, Goal, Block };

struct ObjectDecl {
  char symbol = 0;
  std::string name;
  std::string type;
  int row = -1, col = -1;  // map placement

  auto operator<=>(const ObjectDecl&) const = default;
};

struct GoalLiteral {
  bool negated = false;
  std::string pred;
  std::vector<std::string> args;  // object names or cell names

  auto operator<=>(const GoalLiteral&) const = default;
};

struct InstanceSpec {
  std::string name;
  std::string domain_name;
  int width = 0, height = 0;
  std::vector<std::string> rows;  // raw map rows, height strings of width chars
  std::vector<ObjectDecl> objects;
  std::vector<GoalLiteral> goals;
  int agent_row = -1, agent_col = -1;

  // Features decoded from the map (row-major, width*height entries).
  std::vector<CellFeature> features;

  auto operator<=>(const InstanceSpec&) const = default;
};

// Parsers. Both throw ParseError with messages ending "at line <N>".
DomainSpec parse_domain(const std::string& text);
InstanceSpec parse_instance(const std::string& text, const DomainSpec& domain);

// Writers. parse(serialize(x)) == x.
std::string serialize_domain(const DomainSpec& d);
std::string serialize_instance(const InstanceSpec& inst);

// Deterministic random instance: border-implicit grid with
// floor(obstacle_fraction * width * height) interior walls, the mechanics'
// standard cast of objects, and its standard goal cycle. Regenerates until
// every non-wall, non-hole cell is mutually connected (walls and holes are the
// only permanent blockers; doors, blocks and objects are removable).
InstanceSpec generate_instance(const DomainSpec& d, int width, int height,
                               double obstacle_fraction, uint64_t seed);

}  // namespace capkit
