#include "capkit/world.hpp"

#include <array>

#include "capkit/abstraction.hpp"

namespace capkit {

int World::cell_of_name(const std::string& n) const {
  if (n.rfind("cell", 0) != 0) return -1;
  try {
    size_t pos = 0;
    int v = std::stoi(n.substr(4), &pos);
    if (pos != n.size() - 4 && n.size() > 4) return -1;
    return (v >= 0 && v < cells()) ? v : -1;
  } catch (const std::exception&) {
    return -1;
  }
}

static const std::array<std::string, 14> kEvaluatorNames = {
    "at",      "wall",    "clear",   "has_key",      "escaped", "alive",   "next_to",
    "is_door", "is_hole", "is_goal", "pasta_cooked", "is_block", "player_has", "placed"};

World build_world(const DomainSpec& domain, const InstanceSpec& inst) {
  World w;
  w.domain = domain;
  w.inst = inst;
  w.W = inst.width;
  w.H = inst.height;

  for (const auto& p : domain.predicates) {
    bool known = false;
    for (const auto& n : kEvaluatorNames) known = known || n == p.name;
    if (!known) throw UsageError("predicate '" + p.name + "' has no evaluator");
  }

  size_t n = static_cast<size_t>(w.W) * w.H;
  w.wall.assign(n, 0);
  w.hole.assign(n, 0);
  w.goal_cell.assign(n, 0);
  for (size_t i = 0; i < n; ++i) {
    switch (inst.features[i]) {
      case CellFeature::Wall: w.wall[i] = 1; break;
      case CellFeature::Hole: w.hole[i] = 1; break;
      case CellFeature::Goal: w.goal_cell[i] = 1; break;
      default: break;
    }
  }

  int part_rank = 0;
  for (const auto& o : inst.objects) {
    ObjectInfo info;
    info.name = o.name;
    info.type = o.type;
    info.start_cell = o.row * w.W + o.col;
    info.rank = (o.type == "part") ? part_rank++ : 0;
    w.object_index[info.name] = static_cast<int>(w.objects.size());
    w.objects.push_back(std::move(info));
  }
  finalize_vocabulary(w);
  return w;
}

ConcreteState initial_state(const World& w) {
  ConcreteState s;
  s.prow = static_cast<int8_t>(w.inst.agent_row);
  s.pcol = static_cast<int8_t>(w.inst.agent_col);
  s.pdir = Dir::North;
  s.obj_pos.resize(w.objects.size());
  s.obj_alive.assign(w.objects.size(), 1);
  for (size_t i = 0; i < w.objects.size(); ++i)
    s.obj_pos[i] = static_cast<int16_t>(w.objects[i].start_cell);
  size_t n = static_cast<size_t>(w.W) * w.H;
  s.door_at.assign(n, 0);
  s.block_at.assign(n, 0);
  for (size_t i = 0; i < n; ++i) {
    if (w.inst.features[i] == CellFeature::Door) s.door_at[i] = 1;
    if (w.inst.features[i] == CellFeature::Block) s.block_at[i] = 1;
  }
  return s;
}

}  // namespace capkit
