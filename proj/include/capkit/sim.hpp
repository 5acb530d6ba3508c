#pragma once

#include "capkit/world.hpp"

namespace capkit {

// The five keystrokes. Up/Left/Down/Right first rotate the player to face that
// way; a second press moves one cell if the target is passable. Use interacts
// with the faced cell. Every action is total: anything else is a self-loop.
enum class Action : uint8_t { Up = 0, Left = 1, Down = 2, Right = 3, Use = 4 };

inline constexpr Action kAllActions[5] = {Action::Up, Action::Left, Action::Down, Action::Right,
                                          Action::Use};

char action_char(Action a);  // W A S D E

ConcreteState step(const World& w, const ConcreteState& s, Action a);

// Actions that change the state. Terminal states have none.
std::vector<Action> legal_actions(const World& w, const ConcreteState& s);

struct ReachResult {
  std::vector<ConcreteState> states;  // deterministic BFS discovery order
  bool truncated = false;             // hit the cap before closure
};

ReachResult enumerate_reachable(const World& w, const ConcreteState& start, size_t cap);

}  // namespace capkit
