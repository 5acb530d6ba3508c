#include "capkit/harvest.hpp"

#include <algorithm>
#include <random>

namespace capkit {

HarvestResult harvest_traces(const World& w, Agent& agent, int task_budget, uint64_t seed) {
  if (w.inst.goals.empty())
    throw UsageError("instance '" + w.inst.name + "' declares no goals to harvest from");

  std::mt19937_64 rng(seed);
  HarvestResult out;
  ConcreteState cur = initial_state(w);
  size_t gi = 0;

  for (int t = 0; t < task_budget; ++t) {
    std::vector<Action> order(kAllActions, kAllActions + 5);
    std::shuffle(order.begin(), order.end(), rng);
    agent.set_action_order(order);

    std::optional<std::vector<Action>> plan;
    for (int attempt = 0; attempt < 50 && !plan; ++attempt) {
      if (cur.win) cur = initial_state(w);  // episode ended: the world resets
      plan = agent.solve_task(cur, {w.inst.goals[gi]});
      gi = (gi + 1) % w.inst.goals.size();
    }
    if (!plan)
      throw UsageError("no goal of instance '" + w.inst.name + "' is solvable from here");

    std::vector<AbstractState> trace{abstract_state(w, cur)};
    for (Action a : *plan) {
      cur = step(w, cur, a);
      trace.push_back(abstract_state(w, cur));
    }
    out.traces.push_back(std::move(trace));
    ++out.solved;
  }
  return out;
}

}  // namespace capkit
