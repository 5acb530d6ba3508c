#pragma once

#include <memory>
#include <optional>

#include "capkit/model.hpp"

namespace capkit {

bool goal_holds(const World& w, const ConcreteState& s, const GoalLiteral& g);
bool goal_holds(const World& w, const ConcreteState& s, const std::vector<GoalLiteral>& gs);

struct AgentStats {
  uint64_t tasks = 0;
  uint64_t queries = 0;
  uint64_t query_time_us = 0;
  uint64_t nodes_expanded = 0;
};

struct ReachabilityAnswer {
  bool success = false;
  // A failed answer is definite when the agent exhausted every reachable
  // state; only definite failures are evidence.
  bool definite = false;
  std::vector<Action> plan;
  // The execution as the learner's sensors saw it, starting state included.
  std::vector<AbstractState> trajectory;
};

class Agent {
 public:
  explicit Agent(const World& w) : w_(w) {}
  virtual ~Agent() = default;

  virtual std::string kind() const = 0;
  virtual bool complete_reasoner() const = 0;

  // Keystroke plan reaching the goal conjunction in the live environment;
  // empty when the goal already holds, nullopt when the agent gives up.
  virtual std::optional<std::vector<Action>> solve_task(const ConcreteState& start,
                                                        const std::vector<GoalLiteral>& goal) = 0;

  // Drive through the waypoint states in order from a (possibly synthetic)
  // reset state.
  virtual ReachabilityAnswer answer_reachability(const AbstractState& init,
                                                 const std::vector<AbstractState>& waypoints) = 0;

  // Tie-break order for planners that search; ignored by the rest.
  virtual void set_action_order(const std::vector<Action>&) {}

  AgentStats& stats() { return stats_; }
  const World& world() const { return w_; }

 protected:
  const World& w_;
  AgentStats stats_;
};

// Breadth-first planner over keystrokes; a complete reasoner.
class SearchAgent : public Agent {
 public:
  explicit SearchAgent(const World& w, size_t node_cap = 200000)
      : Agent(w), node_cap_(node_cap), order_(kAllActions, kAllActions + 5) {}

  std::string kind() const override { return "search"; }
  bool complete_reasoner() const override { return true; }
  void set_action_order(const std::vector<Action>& o) override { order_ = o; }

  std::optional<std::vector<Action>> solve_task(const ConcreteState& start,
                                                const std::vector<GoalLiteral>& goal) override;
  ReachabilityAnswer answer_reachability(const AbstractState& init,
                                         const std::vector<AbstractState>& waypoints) override;

 private:
  size_t node_cap_;
  std::vector<Action> order_;
};

// Replays one fixed route (the instance's goal cycle); anything off that
// route makes it give up immediately. Not a complete reasoner.
class PolicyAgent : public Agent {
 public:
  explicit PolicyAgent(const World& w);

  std::string kind() const override { return "policy"; }
  bool complete_reasoner() const override { return false; }

  std::optional<std::vector<Action>> solve_task(const ConcreteState& start,
                                                const std::vector<GoalLiteral>& goal) override;
  ReachabilityAnswer answer_reachability(const AbstractState& init,
                                         const std::vector<AbstractState>& waypoints) override;

 private:
  std::map<ConcreteState, Action> table_;
};

// Answers straight from a reference capability model: a waypoint leg succeeds
// when some grounded capability maps one state exactly onto the next.
class ModelAnswerer : public Agent {
 public:
  ModelAnswerer(const World& w, CapabilityModel reference)
      : Agent(w), ref_(std::move(reference)) {}

  std::string kind() const override { return "model"; }
  bool complete_reasoner() const override { return true; }

  std::optional<std::vector<Action>> solve_task(const ConcreteState&,
                                                const std::vector<GoalLiteral>&) override {
    throw UsageError("the reference answerer only serves reachability queries");
  }
  ReachabilityAnswer answer_reachability(const AbstractState& init,
                                         const std::vector<AbstractState>& waypoints) override;

  const CapabilityModel& reference() const { return ref_; }

 private:
  CapabilityModel ref_;
};

}  // namespace capkit
