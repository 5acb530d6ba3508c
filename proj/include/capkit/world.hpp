#pragma once

#include <map>
#include <string>
#include <vector>

#include "capkit/dsl.hpp"

namespace capkit {

// Object location sentinels (ConcreteState::obj_pos values < 0).
inline constexpr int16_t kHeld = -2;    // carried by the player
inline constexpr int16_t kGone = -3;    // consumed / defeated / assembled away
inline constexpr int16_t kPlaced = -4;  // snowman part placed on the goal

enum class Dir : uint8_t { North = 0, West = 1, South = 2, East = 3 };

struct ObjectInfo {
  std::string name;
  std::string type;
  int start_cell = -1;
  int rank = 0;  // placement order for snowman parts (declaration order)
};

// One ground atom lowered to an opcode over concrete-state fields. Built once
// per world by finalize_vocabulary, interpreted by abstract_state.
struct CompiledAtom {
  uint8_t op = 0;
  int16_t x = -1, y = -1;
};

// Compiled, immutable view of one domain + instance pair.
struct World {
  DomainSpec domain;
  InstanceSpec inst;
  int W = 0, H = 0;

  std::vector<uint8_t> wall;       // static, per cell
  std::vector<uint8_t> hole;       // static, per cell
  std::vector<uint8_t> goal_cell;  // static, per cell
  std::vector<ObjectInfo> objects;
  std::map<std::string, int> object_index;
  std::vector<GroundAtom> vocab;  // sorted; parallel to `compiled`
  std::vector<CompiledAtom> compiled;

  int cells() const { return W * H; }
  std::string cell_name(int c) const { return "cell" + std::to_string(c); }
  // -1 if the name is not a cell of this grid.
  int cell_of_name(const std::string& n) const;
  bool in_bounds(int r, int c) const { return r >= 0 && r < H && c >= 0 && c < W; }
  int find_object(const std::string& name) const {
    auto it = object_index.find(name);
    return it == object_index.end() ? -1 : it->second;
  }
};

// Full dynamic state. Value-compares; usable as a map key.
struct ConcreteState {
  int8_t prow = -1, pcol = -1;  // player cell; (-1,-1) means off the grid
  Dir pdir = Dir::North;
  bool win = false;  // terminal; iff player is off the grid
  std::vector<int16_t> obj_pos;
  std::vector<uint8_t> obj_alive;
  std::vector<uint8_t> door_at;   // dynamic per-cell feature
  std::vector<uint8_t> block_at;  // dynamic per-cell feature

  auto operator<=>(const ConcreteState&) const = default;

  bool player_on_grid() const { return prow >= 0; }
  int player_cell(int W) const { return prow * W + pcol; }
};

// Throws UsageError when the instance references things the domain lacks or a
// declared predicate has no built-in evaluator.
World build_world(const DomainSpec& domain, const InstanceSpec& inst);

ConcreteState initial_state(const World& w);

}  // namespace capkit
