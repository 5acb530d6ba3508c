#include "capkit/sim.hpp"

#include <deque>
#include <set>

namespace capkit {

char action_char(Action a) {
  switch (a) {
    case Action::Up: return 'W';
    case Action::Left: return 'A';
    case Action::Down: return 'S';
    case Action::Right: return 'D';
    case Action::Use: return 'E';
  }
  return '?';
}

namespace {

void dir_delta(Dir d, int& dr, int& dc) {
  switch (d) {
    case Dir::North: dr = -1; dc = 0; break;
    case Dir::West: dr = 0; dc = -1; break;
    case Dir::South: dr = 1; dc = 0; break;
    case Dir::East: dr = 0; dc = 1; break;
  }
}

int object_at(const ConcreteState& s, int cell) {
  for (size_t i = 0; i < s.obj_pos.size(); ++i)
    if (s.obj_pos[i] == cell) return static_cast<int>(i);
  return -1;
}

int key_index(const World& w) {
  for (size_t i = 0; i < w.objects.size(); ++i)
    if (w.objects[i].type == "key") return static_cast<int>(i);
  return -1;
}

bool key_held(const World& w, const ConcreteState& s) {
  int k = key_index(w);
  return k >= 0 && s.obj_pos[k] == kHeld;
}

bool passable(const World& w, const ConcreteState& s, int r, int c) {
  if (!w.in_bounds(r, c)) return false;
  int cell = r * w.W + c;
  if (w.wall[cell] || w.hole[cell]) return false;
  if (s.door_at[cell] || s.block_at[cell]) return false;
  if (object_at(s, cell) >= 0) return false;
  return true;
}

void make_terminal(ConcreteState& s) {
  s.win = true;
  s.prow = -1;
  s.pcol = -1;
  s.pdir = Dir::North;  // terminal states are canonical: facing is unobservable once off-grid
}

void interact(const World& w, ConcreteState& s, int cell) {
  int oi = object_at(s, cell);
  switch (w.domain.mechanics) {
    case Mechanics::Zelda: {
      if (oi >= 0) {
        const std::string& t = w.objects[oi].type;
        if (t == "monster" && s.obj_alive[oi]) {
          s.obj_alive[oi] = 0;
          s.obj_pos[oi] = kGone;
        } else if (t == "key") {
          s.obj_pos[oi] = kHeld;
        } else if (t == "door" && key_held(w, s)) {
          make_terminal(s);
        }
      }
      break;
    }
    case Mechanics::Pasta: {
      if (s.door_at[cell]) {
        if (key_held(w, s)) s.door_at[cell] = 0;
        break;
      }
      if (oi >= 0) {
        const std::string& t = w.objects[oi].type;
        if (t == "key") {
          s.obj_pos[oi] = kHeld;
        } else if (t == "ingredient") {
          s.obj_pos[oi] = kGone;
        } else if (t == "pasta") {
          bool ready = true;
          for (size_t i = 0; i < w.objects.size(); ++i)
            if (w.objects[i].type == "ingredient" && s.obj_pos[i] != kGone) ready = false;
          if (ready) {
            s.obj_pos[oi] = kGone;
            make_terminal(s);
          }
        }
      }
      break;
    }
    case Mechanics::Escape: {
      if (s.block_at[cell]) s.block_at[cell] = 0;
      break;
    }
    case Mechanics::Snowman: {
      if (s.door_at[cell]) {
        if (key_held(w, s)) s.door_at[cell] = 0;
        break;
      }
      if (oi >= 0) {
        const std::string& t = w.objects[oi].type;
        if (t == "part" || t == "key") s.obj_pos[oi] = kHeld;
        break;
      }
      if (w.goal_cell[cell]) {
        // Place the lowest-rank part not yet assembled, if the player holds it.
        int next = -1;
        for (size_t i = 0; i < w.objects.size(); ++i) {
          if (w.objects[i].type != "part" || s.obj_pos[i] == kPlaced) continue;
          if (next < 0 || w.objects[i].rank < w.objects[next].rank) next = static_cast<int>(i);
        }
        if (next >= 0 && s.obj_pos[next] == kHeld) {
          s.obj_pos[next] = kPlaced;
          bool done = true;
          for (size_t i = 0; i < w.objects.size(); ++i)
            if (w.objects[i].type == "part" && s.obj_pos[i] != kPlaced) done = false;
          if (done) make_terminal(s);
        }
      }
      break;
    }
  }
}

}  // namespace

ConcreteState step(const World& w, const ConcreteState& s, Action a) {
  if (s.win || !s.player_on_grid()) return s;
  ConcreteState out = s;

  if (a == Action::Use) {
    int dr = 0, dc = 0;
    dir_delta(s.pdir, dr, dc);
    int fr = s.prow + dr, fc = s.pcol + dc;
    if (w.in_bounds(fr, fc)) interact(w, out, fr * w.W + fc);
    return out;
  }

  Dir want = static_cast<Dir>(a);
  if (s.pdir != want) {
    out.pdir = want;
    return out;
  }
  int dr = 0, dc = 0;
  dir_delta(want, dr, dc);
  int nr = s.prow + dr, nc = s.pcol + dc;
  if (!passable(w, s, nr, nc)) return out;
  out.prow = static_cast<int8_t>(nr);
  out.pcol = static_cast<int8_t>(nc);
  if (w.domain.mechanics == Mechanics::Escape && w.goal_cell[nr * w.W + nc]) make_terminal(out);
  return out;
}

std::vector<Action> legal_actions(const World& w, const ConcreteState& s) {
  std::vector<Action> out;
  for (Action a : kAllActions)
    if (step(w, s, a) != s) out.push_back(a);
  return out;
}

ReachResult enumerate_reachable(const World& w, const ConcreteState& start, size_t cap) {
  ReachResult res;
  std::set<ConcreteState> seen;
  std::deque<ConcreteState> frontier;
  seen.insert(start);
  frontier.push_back(start);
  res.states.push_back(start);
  while (!frontier.empty()) {
    ConcreteState cur = frontier.front();
    frontier.pop_front();
    for (Action a : kAllActions) {
      ConcreteState nxt = step(w, cur, a);
      if (seen.count(nxt)) continue;
      if (res.states.size() >= cap) {
        res.truncated = true;
        return res;
      }
      seen.insert(nxt);
      res.states.push_back(nxt);
      frontier.push_back(nxt);
    }
  }
  return res;
}

}  // namespace capkit
