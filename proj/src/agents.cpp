#include "capkit/agents.hpp"

#include <chrono>
#include <deque>
#include <map>
#include <set>

namespace capkit {

bool goal_holds(const World& w, const ConcreteState& s, const GoalLiteral& g) {
  bool truth = g.pred == "win" ? s.win : evaluate(w, s, GroundAtom{g.pred, g.args});
  return truth != g.negated;
}

bool goal_holds(const World& w, const ConcreteState& s, const std::vector<GoalLiteral>& gs) {
  for (const auto& g : gs)
    if (!goal_holds(w, s, g)) return false;
  return true;
}

namespace {

struct Bfs {
  // Search from `start` until `is_goal`; returns the plan, or nullopt with
  // `exhausted` telling whether the whole reachable set was covered.
  template <typename GoalFn>
  static std::optional<std::vector<Action>> run(const World& w, const ConcreteState& start,
                                                const std::vector<Action>& order, size_t node_cap,
                                                GoalFn is_goal, bool& exhausted,
                                                uint64_t& expanded, ConcreteState* found) {
    exhausted = false;
    if (is_goal(start)) {
      if (found) *found = start;
      return std::vector<Action>{};
    }
    std::map<ConcreteState, std::pair<ConcreteState, Action>> parent;
    std::set<ConcreteState> seen{start};
    std::deque<ConcreteState> frontier{start};
    size_t nodes = 0;
    while (!frontier.empty()) {
      if (++nodes > node_cap) return std::nullopt;  // gave up, not exhausted
      ConcreteState cur = frontier.front();
      frontier.pop_front();
      ++expanded;
      for (Action a : order) {
        ConcreteState nxt = step(w, cur, a);
        if (nxt == cur || seen.count(nxt)) continue;
        seen.insert(nxt);
        parent.emplace(nxt, std::make_pair(cur, a));
        if (is_goal(nxt)) {
          std::vector<Action> plan;
          ConcreteState at = nxt;
          while (!(at == start)) {
            auto& [prev, act] = parent.at(at);
            plan.push_back(act);
            at = prev;
          }
          std::reverse(plan.begin(), plan.end());
          if (found) *found = nxt;
          return plan;
        }
        frontier.push_back(nxt);
      }
    }
    exhausted = true;
    return std::nullopt;
  }
};

}  // namespace

std::optional<std::vector<Action>> SearchAgent::solve_task(const ConcreteState& start,
                                                           const std::vector<GoalLiteral>& goal) {
  ++stats_.tasks;
  bool exhausted = false;
  return Bfs::run(
      w_, start, order_, node_cap_,
      [&](const ConcreteState& s) { return goal_holds(w_, s, goal); }, exhausted,
      stats_.nodes_expanded, nullptr);
}

ReachabilityAnswer SearchAgent::answer_reachability(const AbstractState& init,
                                                    const std::vector<AbstractState>& waypoints) {
  auto t0 = std::chrono::steady_clock::now();
  ++stats_.queries;
  ReachabilityAnswer ans;

  auto start = concretize_exact(w_, init);
  if (start) {
    ans.trajectory.push_back(init);
    ConcreteState cur = *start;
    bool ok = true;
    bool definite = true;
    for (const auto& wp : waypoints) {
      bool exhausted = false;
      ConcreteState hit;
      auto leg = Bfs::run(
          w_, cur, order_, node_cap_,
          [&](const ConcreteState& s) { return abstract_state(w_, s) == wp; }, exhausted,
          stats_.nodes_expanded, &hit);
      if (!leg) {
        ok = false;
        definite = exhausted;
        break;
      }
      for (Action a : *leg) {
        cur = step(w_, cur, a);
        ans.plan.push_back(a);
        ans.trajectory.push_back(abstract_state(w_, cur));
      }
      cur = hit;
    }
    ans.success = ok;
    ans.definite = ok || definite;
  } else {
    // The reset state cannot exist in this environment; that is proof.
    ans.success = false;
    ans.definite = true;
  }

  auto t1 = std::chrono::steady_clock::now();
  stats_.query_time_us +=
      std::chrono::duration_cast<std::chrono::microseconds>(t1 - t0).count();
  return ans;
}

PolicyAgent::PolicyAgent(const World& w) : Agent(w) {
  // Canonical route: breadth-first legs through the instance's goal cycle,
  // fixed keystroke order.
  std::vector<Action> order(kAllActions, kAllActions + 5);
  ConcreteState cur = initial_state(w);
  for (const auto& g : w.inst.goals) {
    bool exhausted = false;
    uint64_t expanded = 0;
    auto leg = Bfs::run(
        w, cur, order, 1000000, [&](const ConcreteState& s) { return goal_holds(w, s, g); },
        exhausted, expanded, nullptr);
    if (!leg) throw UsageError("instance goal cycle is unreachable for the policy route");
    for (Action a : *leg) {
      table_.emplace(cur, a);  // first write wins on revisits
      cur = step(w, cur, a);
    }
  }
}

std::optional<std::vector<Action>> PolicyAgent::solve_task(const ConcreteState& start,
                                                           const std::vector<GoalLiteral>& goal) {
  ++stats_.tasks;
  size_t budget = static_cast<size_t>(w_.cells()) * 4;
  ConcreteState cur = start;
  std::vector<Action> plan;
  for (size_t i = 0; i <= budget; ++i) {
    if (goal_holds(w_, cur, goal)) return plan;
    auto it = table_.find(cur);
    if (it == table_.end()) return std::nullopt;  // off the rehearsed route
    plan.push_back(it->second);
    cur = step(w_, cur, it->second);
  }
  return std::nullopt;
}

ReachabilityAnswer PolicyAgent::answer_reachability(const AbstractState& init,
                                                    const std::vector<AbstractState>& waypoints) {
  auto t0 = std::chrono::steady_clock::now();
  ++stats_.queries;
  ReachabilityAnswer ans;

  auto start = concretize_exact(w_, init);
  if (start) {
    ans.trajectory.push_back(init);
    size_t budget = static_cast<size_t>(w_.cells()) * 4;
    ConcreteState cur = *start;
    size_t next_wp = 0;
    for (size_t i = 0; i <= budget && next_wp < waypoints.size(); ++i) {
      if (abstract_state(w_, cur) == waypoints[next_wp]) {
        ++next_wp;
        continue;
      }
      auto it = table_.find(cur);
      if (it == table_.end()) break;
      cur = step(w_, cur, it->second);
      ans.plan.push_back(it->second);
      ans.trajectory.push_back(abstract_state(w_, cur));
      ++stats_.nodes_expanded;
    }
    if (next_wp < waypoints.size() && abstract_state(w_, cur) == waypoints[next_wp]) ++next_wp;
    ans.success = next_wp == waypoints.size();
  }
  ans.definite = false;  // a rote performer proves nothing by failing

  auto t1 = std::chrono::steady_clock::now();
  stats_.query_time_us +=
      std::chrono::duration_cast<std::chrono::microseconds>(t1 - t0).count();
  return ans;
}

ReachabilityAnswer ModelAnswerer::answer_reachability(
    const AbstractState& init, const std::vector<AbstractState>& waypoints) {
  auto t0 = std::chrono::steady_clock::now();
  ++stats_.queries;
  ReachabilityAnswer ans;
  ans.trajectory.push_back(init);
  ans.definite = true;

  const AbstractState* cur = &init;
  bool ok = true;
  for (const auto& wp : waypoints) {
    bool leg = false;
    for (const auto& cap : ref_.caps) {
      if (!bindings_explaining(w_, cap, *cur, wp).empty()) {
        leg = true;
        break;
      }
    }
    if (!leg) {
      ok = false;
      break;
    }
    ans.trajectory.push_back(wp);
    cur = &wp;
  }
  ans.success = ok;

  auto t1 = std::chrono::steady_clock::now();
  stats_.query_time_us +=
      std::chrono::duration_cast<std::chrono::microseconds>(t1 - t0).count();
  return ans;
}

}  // namespace capkit
