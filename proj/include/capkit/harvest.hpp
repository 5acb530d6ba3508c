#pragma once

#include "capkit/agents.hpp"

namespace capkit {

struct HarvestResult {
  std::vector<std::vector<AbstractState>> traces;  // one per task, start state included
  size_t solved = 0;
};

// Drive the agent through `task_budget` tasks drawn from the instance's goal
// cycle: each task asks for the next goal literal from wherever the last one
// ended, with an environment reset after terminal states. Unsolvable draws
// are skipped by advancing the cycle (at most 50 tries per task). Each task
// shuffles the planner's keystroke tie-break order from `seed`.
HarvestResult harvest_traces(const World& w, Agent& agent, int task_budget, uint64_t seed);

}  // namespace capkit
