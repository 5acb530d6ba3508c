#include "capkit/abstraction.hpp"

#include <algorithm>
#include <cstdlib>
#include <functional>

namespace capkit {

std::vector<std::string> names_of_type(const World& w, const std::string& type) {
  std::vector<std::string> out;
  if (type == "cell") {
    for (int c = 0; c < w.cells(); ++c) out.push_back(w.cell_name(c));
    return out;
  }
  if (type == "player" || type == "any") out.push_back("player");
  if (type != "player")
    for (const auto& o : w.objects)
      if (type == "any" || o.type == type) out.push_back(o.name);
  return out;
}

const std::vector<GroundAtom>& ground_vocabulary(const World& w) {
  if (w.vocab.empty() && !w.domain.predicates.empty())
    throw UsageError("world is missing its vocabulary; call finalize_vocabulary");
  return w.vocab;
}

namespace {

// -1: not an on-grid entity reference. Player gets index kPlayerRef.
constexpr int kPlayerRef = -100;

int entity_ref(const World& w, const std::string& name) {
  if (name == "player") return kPlayerRef;
  return w.find_object(name);
}

int entity_cell(const World& w, const ConcreteState& s, int ref) {
  if (ref == kPlayerRef) return s.player_on_grid() ? s.player_cell(w.W) : -1;
  int16_t p = s.obj_pos[ref];
  return p >= 0 ? p : -1;
}

bool adjacent(const World& w, int cell_a, int cell_b) {
  if (cell_a < 0 || cell_b < 0) return false;
  int ra = cell_a / w.W, ca = cell_a % w.W;
  int rb = cell_b / w.W, cb = cell_b % w.W;
  return std::abs(ra - rb) + std::abs(ca - cb) == 1;
}

// Legal off-grid positions for an object of this type.
std::vector<int16_t> off_grid_options(const std::string& type) {
  std::vector<int16_t> out;
  if (type == "key" || type == "part") out.push_back(kHeld);
  if (type == "monster" || type == "ingredient" || type == "pasta") out.push_back(kGone);
  if (type == "part") out.push_back(kPlaced);
  return out;
}

// Opcodes for CompiledAtom. x/y hold an object index (or kPlayerRef) and/or a
// cell, per the comments; Never covers atoms false in every state.
enum AtomOp : uint8_t {
  kOpNever = 0,
  kOpAtPlayer,   // x = cell
  kOpAtObject,   // x = object, y = cell
  kOpWall,       // x = cell
  kOpClear,      // x = cell
  kOpHeld,       // x = object
  kOpWin,        //
  kOpAlive,      // x = object
  kOpNextTo,     // x = object
  kOpIsDoor,     // x = cell
  kOpIsHole,     // x = cell
  kOpIsGoal,     // x = cell
  kOpIsBlock,    // x = cell
  kOpPlaced,     // x = object
};

CompiledAtom compile_atom(const World& w, const GroundAtom& atom) {
  const std::string& p = atom.pred;
  auto cell_arg = [&](int i) { return static_cast<int16_t>(w.cell_of_name(atom.args[i])); };
  auto obj_arg = [&](int i) -> std::optional<int16_t> {
    // nullopt for the player: these predicates are identically false on it
    int r = entity_ref(w, atom.args[i]);
    if (r == kPlayerRef) return std::nullopt;
    if (r < 0) throw UsageError("unknown object '" + atom.args[i] + "' in " + atom.str());
    return static_cast<int16_t>(r);
  };

  if (p == "at") {
    if (atom.args[0] == "player") return {kOpAtPlayer, cell_arg(1), -1};
    return {kOpAtObject, *obj_arg(0), cell_arg(1)};
  }
  if (p == "wall") return {kOpWall, cell_arg(0), -1};
  if (p == "clear") return {kOpClear, cell_arg(0), -1};
  if (p == "has_key") {
    int16_t ref = -1;
    for (size_t i = 0; i < w.objects.size(); ++i)
      if (w.objects[i].type == "key") ref = static_cast<int16_t>(i);
    return ref < 0 ? CompiledAtom{kOpNever, -1, -1} : CompiledAtom{kOpHeld, ref, -1};
  }
  if (p == "player_has") {
    auto r = obj_arg(0);
    return r ? CompiledAtom{kOpHeld, *r, -1} : CompiledAtom{kOpNever, -1, -1};
  }
  if (p == "escaped" || p == "pasta_cooked") return {kOpWin, -1, -1};
  if (p == "alive") {
    auto r = obj_arg(0);
    return r ? CompiledAtom{kOpAlive, *r, -1} : CompiledAtom{kOpNever, -1, -1};
  }
  if (p == "next_to") {
    auto r = obj_arg(0);
    return r ? CompiledAtom{kOpNextTo, *r, -1} : CompiledAtom{kOpNever, -1, -1};
  }
  if (p == "is_door") return {kOpIsDoor, cell_arg(0), -1};
  if (p == "is_hole") return {kOpIsHole, cell_arg(0), -1};
  if (p == "is_goal") return {kOpIsGoal, cell_arg(0), -1};
  if (p == "is_block") return {kOpIsBlock, cell_arg(0), -1};
  if (p == "placed") {
    auto r = obj_arg(0);
    return r ? CompiledAtom{kOpPlaced, *r, -1} : CompiledAtom{kOpNever, -1, -1};
  }
  throw UsageError("predicate '" + p + "' has no evaluator");
}

bool eval_compiled(const World& w, const ConcreteState& s, const CompiledAtom& a) {
  switch (a.op) {
    case kOpAtPlayer: return s.player_on_grid() && s.player_cell(w.W) == a.x;
    case kOpAtObject: return s.obj_pos[a.x] == a.y;
    case kOpWall: return w.wall[a.x];
    case kOpClear: {
      if (w.wall[a.x] || s.door_at[a.x] || s.block_at[a.x]) return false;
      if (s.player_on_grid() && s.player_cell(w.W) == a.x) return false;
      for (int16_t op : s.obj_pos)
        if (op == a.x) return false;
      return true;
    }
    case kOpHeld: return s.obj_pos[a.x] == kHeld;
    case kOpWin: return s.win;
    case kOpAlive: return s.obj_alive[a.x];
    case kOpNextTo:
      return s.player_on_grid() &&
             adjacent(w, s.player_cell(w.W), s.obj_pos[a.x] >= 0 ? s.obj_pos[a.x] : -1);
    case kOpIsDoor: return s.door_at[a.x];
    case kOpIsHole: return w.hole[a.x];
    case kOpIsGoal: return w.goal_cell[a.x];
    case kOpIsBlock: return s.block_at[a.x];
    case kOpPlaced: return s.obj_pos[a.x] == kPlaced;
    default: return false;
  }
}

}  // namespace

void finalize_vocabulary(World& w) {
  w.vocab.clear();
  for (const auto& p : w.domain.predicates) {
    if (p.arity == 0) {
      w.vocab.push_back({p.name, {}});
    } else if (p.arity == 1) {
      for (const auto& a : names_of_type(w, p.arg_types[0])) w.vocab.push_back({p.name, {a}});
    } else {
      for (const auto& a : names_of_type(w, p.arg_types[0]))
        for (const auto& b : names_of_type(w, p.arg_types[1])) w.vocab.push_back({p.name, {a, b}});
    }
  }
  std::sort(w.vocab.begin(), w.vocab.end());
  w.compiled.clear();
  for (const auto& atom : w.vocab) w.compiled.push_back(compile_atom(w, atom));
}

bool evaluate(const World& w, const ConcreteState& s, const GroundAtom& atom) {
  const std::string& p = atom.pred;
  auto cell_arg = [&](int i) {
    int c = w.cell_of_name(atom.args[i]);
    if (c < 0) throw UsageError("'" + atom.args[i] + "' is not a cell in " + atom.str());
    return c;
  };
  auto ref_arg = [&](int i) {
    int r = entity_ref(w, atom.args[i]);
    if (r == -1) throw UsageError("unknown object '" + atom.args[i] + "' in " + atom.str());
    return r;
  };

  if (p == "at") return entity_cell(w, s, ref_arg(0)) == cell_arg(1);
  if (p == "wall") return w.wall[cell_arg(0)];
  if (p == "clear") {
    int c = cell_arg(0);
    if (w.wall[c] || s.door_at[c] || s.block_at[c]) return false;
    if (s.player_on_grid() && s.player_cell(w.W) == c) return false;
    for (int16_t op : s.obj_pos)
      if (op == c) return false;
    return true;
  }
  if (p == "has_key" || p == "player_has") {
    int ref;
    if (p == "has_key") {
      ref = -1;
      for (size_t i = 0; i < w.objects.size(); ++i)
        if (w.objects[i].type == "key") ref = static_cast<int>(i);
      if (ref < 0) return false;
    } else {
      ref = ref_arg(0);
      if (ref == kPlayerRef) return false;
    }
    return s.obj_pos[ref] == kHeld;
  }
  if (p == "escaped" || p == "pasta_cooked") return s.win;
  if (p == "alive") {
    int ref = ref_arg(0);
    return ref != kPlayerRef && s.obj_alive[ref];
  }
  if (p == "next_to") {
    int ref = ref_arg(0);
    if (ref == kPlayerRef || !s.player_on_grid()) return false;
    return adjacent(w, s.player_cell(w.W), entity_cell(w, s, ref));
  }
  if (p == "is_door") return s.door_at[cell_arg(0)];
  if (p == "is_hole") return w.hole[cell_arg(0)];
  if (p == "is_goal") return w.goal_cell[cell_arg(0)];
  if (p == "is_block") return s.block_at[cell_arg(0)];
  if (p == "placed") {
    int ref = ref_arg(0);
    return ref != kPlayerRef && s.obj_pos[ref] == kPlaced;
  }
  throw UsageError("predicate '" + p + "' has no evaluator");
}

AbstractState abstract_state(const World& w, const ConcreteState& s) {
  const auto& vocab = ground_vocabulary(w);
  AbstractState out;
  for (size_t i = 0; i < vocab.size(); ++i)
    if (eval_compiled(w, s, w.compiled[i])) out.atoms.push_back(vocab[i]);
  // the vocabulary is sorted, so out.atoms already is.
  return out;
}

// ---------------------------------------------------------------------------
// Concretization: constraint propagation over entity placements, then a small
// deterministic backtracking search, validated by direct evaluation.

namespace {

struct Placement {
  // Candidate positions per object, in try order. Cells are >= 0.
  std::vector<std::vector<int16_t>> obj_options;
  std::vector<int> player_options;  // cells; -1 means off grid (terminal)
  std::vector<uint8_t> alive;
  std::vector<uint8_t> door_at, block_at;
  bool win_forced_true = false, win_forced_false = false;
};

bool cell_can_hold_entity(const World& w, const Placement& pl, int c) {
  return !w.wall[c] && !w.hole[c] && !pl.door_at[c] && !pl.block_at[c];
}

}  // namespace

std::optional<ConcreteState> concretize(const World& w,
                                        const std::vector<GroundLiteral>& requirements) {
  const int N = w.cells();
  Placement pl;
  pl.alive.assign(w.objects.size(), 1);
  ConcreteState init = initial_state(w);
  pl.door_at = init.door_at;
  pl.block_at = init.block_at;

  // Dynamic features first: they decide which cells may hold entities.
  for (const auto& lit : requirements) {
    const auto& a = lit.atom;
    if (a.pred != "is_door" && a.pred != "is_block") continue;
    int c = w.cell_of_name(a.args[0]);
    if (c < 0) throw UsageError("'" + a.args[0] + "' is not a cell in " + a.str());
    uint8_t& slot = (a.pred == "is_door") ? pl.door_at[c] : pl.block_at[c];
    slot = lit.negated ? 0 : 1;
  }
  for (int c = 0; c < N; ++c) {
    int kinds = (w.wall[c] ? 1 : 0) + (w.hole[c] ? 1 : 0) + (w.goal_cell[c] ? 1 : 0) +
                (pl.door_at[c] ? 1 : 0) + (pl.block_at[c] ? 1 : 0);
    if (kinds > 1) return std::nullopt;
  }

  // Initial candidate sets.
  auto cells_for_entities = [&]() {
    std::vector<int16_t> cs;
    for (int c = 0; c < N; ++c)
      if (cell_can_hold_entity(w, pl, c)) cs.push_back(static_cast<int16_t>(c));
    return cs;
  };
  std::vector<int16_t> open_cells = cells_for_entities();

  pl.obj_options.resize(w.objects.size());
  for (size_t i = 0; i < w.objects.size(); ++i) {
    std::vector<int16_t> opts;
    // Prefer the instance's own placement, then other cells, then off-grid.
    int16_t home = static_cast<int16_t>(w.objects[i].start_cell);
    if (cell_can_hold_entity(w, pl, home)) opts.push_back(home);
    for (int16_t c : open_cells)
      if (c != home) opts.push_back(c);
    for (int16_t off : off_grid_options(w.objects[i].type)) opts.push_back(off);
    pl.obj_options[i] = std::move(opts);
  }
  bool player_pinned = false;
  bool player_off_allowed = true;

  auto pin_object = [&](int oi, int16_t pos) {
    auto& opts = pl.obj_options[oi];
    if (std::find(opts.begin(), opts.end(), pos) == opts.end()) return false;
    opts = {pos};
    return true;
  };
  auto forbid_object = [&](int oi, int16_t pos) {
    auto& opts = pl.obj_options[oi];
    opts.erase(std::remove(opts.begin(), opts.end(), pos), opts.end());
    return !opts.empty();
  };

  std::optional<int> player_cell_req;
  for (const auto& lit : requirements) {
    const auto& a = lit.atom;
    const std::string& p = a.pred;
    if (p == "wall" || p == "is_hole" || p == "is_goal") {
      int c = w.cell_of_name(a.args[0]);
      if (c < 0) return std::nullopt;
      bool truth = (p == "wall") ? w.wall[c] : (p == "is_hole" ? w.hole[c] : w.goal_cell[c]);
      if (truth == lit.negated) return std::nullopt;  // static, can't be changed
    } else if (p == "escaped" || p == "pasta_cooked") {
      (lit.negated ? pl.win_forced_false : pl.win_forced_true) = true;
    } else if (p == "alive") {
      int ref = entity_ref(w, a.args[0]);
      if (ref < 0 || ref == kPlayerRef) {
        if (!lit.negated) return std::nullopt;
        continue;
      }
      pl.alive[ref] = lit.negated ? 0 : 1;
    } else if (p == "has_key" || p == "player_has") {
      int ref = -1;
      if (p == "has_key") {
        for (size_t i = 0; i < w.objects.size(); ++i)
          if (w.objects[i].type == "key") ref = static_cast<int>(i);
      } else {
        ref = entity_ref(w, a.args[0]);
        if (ref == kPlayerRef) ref = -1;
      }
      if (ref < 0) {
        if (!lit.negated) return std::nullopt;
        continue;
      }
      if (!lit.negated ? !pin_object(ref, kHeld) : !forbid_object(ref, kHeld))
        return std::nullopt;
    } else if (p == "placed") {
      int ref = entity_ref(w, a.args[0]);
      if (ref < 0 || ref == kPlayerRef) {
        if (!lit.negated) return std::nullopt;
        continue;
      }
      if (!lit.negated ? !pin_object(ref, kPlaced) : !forbid_object(ref, kPlaced))
        return std::nullopt;
    } else if (p == "at") {
      int ref = entity_ref(w, a.args[0]);
      int c = w.cell_of_name(a.args[1]);
      if (ref == -1 || c < 0) return std::nullopt;
      if (ref == kPlayerRef) {
        if (!lit.negated) {
          if (player_cell_req && *player_cell_req != c) return std::nullopt;
          player_cell_req = c;
          player_pinned = true;
          player_off_allowed = false;
        }
        // Negated player cells are filtered when options are built.
      } else {
        if (!lit.negated ? !pin_object(ref, static_cast<int16_t>(c))
                         : !forbid_object(ref, static_cast<int16_t>(c)))
          return std::nullopt;
      }
    }
    // clear and next_to are handled by search-time pruning + final validation.
  }
  if (pl.win_forced_true && pl.win_forced_false) return std::nullopt;
  if (pl.win_forced_true && player_pinned) return std::nullopt;

  // Player candidate list.
  if (player_pinned) {
    if (!cell_can_hold_entity(w, pl, *player_cell_req)) return std::nullopt;
    pl.player_options = {*player_cell_req};
  } else {
    if (!pl.win_forced_true) {
      for (int16_t c : open_cells) {
        bool banned = false;
        for (const auto& lit : requirements)
          if (lit.negated && lit.atom.pred == "at" && lit.atom.args[0] == "player" &&
              w.cell_of_name(lit.atom.args[1]) == c)
            banned = true;
        if (w.domain.mechanics == Mechanics::Escape && w.goal_cell[c]) continue;
        if (!banned) pl.player_options.push_back(c);
      }
    }
    if (player_off_allowed && !pl.win_forced_false) pl.player_options.push_back(-1);
  }
  if (pl.win_forced_true) pl.player_options = {-1};
  if (w.domain.mechanics == Mechanics::Escape && player_pinned &&
      w.goal_cell[*player_cell_req])
    return std::nullopt;  // standing on the escape goal is instantly terminal

  // next_to constraints restrict object cells once the player cell is fixed.
  struct NextToReq {
    int ref;
    bool negated;
  };
  std::vector<NextToReq> next_to_reqs;
  for (const auto& lit : requirements)
    if (lit.atom.pred == "next_to") {
      int ref = entity_ref(w, lit.atom.args[0]);
      if (ref == -1) return std::nullopt;
      if (ref == kPlayerRef) {
        if (!lit.negated) return std::nullopt;  // never next to itself
        continue;
      }
      next_to_reqs.push_back({ref, lit.negated});
    }

  // clear(c) positives exclude entities from c.
  std::vector<int> must_be_clear;
  for (const auto& lit : requirements)
    if (!lit.negated && lit.atom.pred == "clear") {
      int c = w.cell_of_name(lit.atom.args[0]);
      if (c < 0 || w.wall[c] || pl.door_at[c] || pl.block_at[c]) return std::nullopt;
      must_be_clear.push_back(c);
    }

  // Deterministic backtracking over player, then objects (most constrained
  // first), validating every requirement by evaluation at the leaves.
  std::vector<size_t> order(w.objects.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return pl.obj_options[a].size() < pl.obj_options[b].size();
  });

  ConcreteState cand;
  cand.obj_pos.assign(w.objects.size(), kGone);
  cand.obj_alive = pl.alive;
  cand.door_at = pl.door_at;
  cand.block_at = pl.block_at;
  cand.pdir = Dir::North;

  size_t leaf_budget = 2000000;
  std::vector<uint8_t> occupied(static_cast<size_t>(N), 0);

  auto violates_next_to = [&](int ref, int16_t pos) {
    for (const auto& q : next_to_reqs) {
      if (q.ref != ref) continue;
      bool adj = cand.player_on_grid() && pos >= 0 && adjacent(w, cand.player_cell(w.W), pos);
      if (q.negated == adj) return true;
    }
    return false;
  };

  std::function<std::optional<ConcreteState>(size_t)> assign =
      [&](size_t k) -> std::optional<ConcreteState> {
    if (k == order.size()) {
      if (leaf_budget-- == 0) throw UsageError("concretize search exploded");
      for (const auto& lit : requirements)
        if (evaluate(w, cand, lit.atom) == lit.negated) return std::nullopt;
      return cand;
    }
    size_t oi = order[k];
    for (int16_t pos : pl.obj_options[oi]) {
      if (pos >= 0) {
        if (occupied[pos]) continue;
        bool clear_conflict = false;
        for (int c : must_be_clear) clear_conflict = clear_conflict || c == pos;
        if (clear_conflict) continue;
        if (violates_next_to(static_cast<int>(oi), pos)) continue;
        occupied[pos] = 1;
      } else if (violates_next_to(static_cast<int>(oi), pos)) {
        continue;
      }
      cand.obj_pos[oi] = pos;
      auto res = assign(k + 1);
      if (pos >= 0) occupied[pos] = 0;
      if (res) return res;
    }
    return std::nullopt;
  };

  for (int pc : pl.player_options) {
    if (pc >= 0) {
      bool clear_conflict = false;
      for (int c : must_be_clear) clear_conflict = clear_conflict || c == pc;
      if (clear_conflict) continue;
      cand.prow = static_cast<int8_t>(pc / w.W);
      cand.pcol = static_cast<int8_t>(pc % w.W);
      cand.win = false;
      occupied.assign(static_cast<size_t>(N), 0);
      occupied[pc] = 1;
    } else {
      cand.prow = cand.pcol = -1;
      cand.win = true;
      occupied.assign(static_cast<size_t>(N), 0);
    }
    auto res = assign(0);
    if (res) return res;
  }
  return std::nullopt;
}

std::optional<ConcreteState> concretize_exact(const World& w, const AbstractState& target) {
  std::vector<GroundLiteral> reqs;
  for (const auto& atom : ground_vocabulary(w))
    reqs.push_back({!target.contains(atom), atom});
  return concretize(w, reqs);
}

std::vector<ConcreteState> concrete_neighbors(const World& w, const ConcreteState& s) {
  const int N = w.cells();
  std::vector<ConcreteState> out;
  std::vector<uint8_t> occ(static_cast<size_t>(N), 0);
  for (int c = 0; c < N; ++c) occ[c] = w.wall[c] || w.hole[c] || s.door_at[c] || s.block_at[c];
  for (int16_t p : s.obj_pos)
    if (p >= 0) occ[p] = 1;
  int pc = s.player_on_grid() ? s.player_cell(w.W) : -1;
  if (pc >= 0) occ[pc] = 1;

  // Relocate the player; the terminal flag travels with its grid presence.
  for (int c = 0; c < N; ++c) {
    if (occ[c]) continue;
    ConcreteState n = s;
    n.prow = static_cast<int8_t>(c / w.W);
    n.pcol = static_cast<int8_t>(c % w.W);
    n.win = false;
    out.push_back(std::move(n));
  }
  if (pc >= 0) {
    ConcreteState n = s;
    n.prow = n.pcol = -1;
    n.win = true;
    out.push_back(std::move(n));
  }

  // Relocate one object, or toggle its liveness.
  for (size_t i = 0; i < w.objects.size(); ++i) {
    std::vector<int16_t> targets;
    for (int c = 0; c < N; ++c)
      if (!occ[c]) targets.push_back(static_cast<int16_t>(c));
    for (int16_t off : off_grid_options(w.objects[i].type)) targets.push_back(off);
    for (int16_t pos : targets) {
      if (pos == s.obj_pos[i]) continue;
      ConcreteState n = s;
      n.obj_pos[i] = pos;
      out.push_back(std::move(n));
    }
    ConcreteState n = s;
    n.obj_alive[i] = n.obj_alive[i] ? 0 : 1;
    out.push_back(std::move(n));
  }

  // A movable feature appears on a free cell or disappears where it stands.
  for (int f = 0; f < 2; ++f)
    for (int c = 0; c < N; ++c) {
      const std::vector<uint8_t>& field = f == 0 ? s.door_at : s.block_at;
      if (!field[c] && occ[c]) continue;
      ConcreteState n = s;
      (f == 0 ? n.door_at : n.block_at)[c] ^= 1;
      out.push_back(std::move(n));
    }
  return out;
}

}  // namespace capkit
