#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "capkit/abstraction.hpp"

namespace tu {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in.good()) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string asset(const std::string& rel) {
  return std::string(CAPKIT_ASSET_DIR) + "/" + rel;
}

inline capkit::World load_world(const std::string& dom_file, const std::string& inst_file) {
  capkit::DomainSpec d = capkit::parse_domain(read_file(asset("domains/" + dom_file)));
  capkit::InstanceSpec i = capkit::parse_instance(read_file(asset("domains/" + inst_file)), d);
  return capkit::build_world(d, i);
}

inline capkit::World load_world_text(const std::string& dom_file, const std::string& inst_text) {
  capkit::DomainSpec d = capkit::parse_domain(read_file(asset("domains/" + dom_file)));
  capkit::InstanceSpec i = capkit::parse_instance(inst_text, d);
  return capkit::build_world(d, i);
}

inline capkit::ConcreteState play(const capkit::World& w, const capkit::ConcreteState& s0,
                                  const std::string& keys) {
  using capkit::Action;
  capkit::ConcreteState s = s0;
  for (char k : keys) {
    Action a;
    switch (k) {
      case 'W': a = Action::Up; break;
      case 'A': a = Action::Left; break;
      case 'S': a = Action::Down; break;
      case 'D': a = Action::Right; break;
      default: a = Action::Use; break;
    }
    s = step(w, s, a);
  }
  return s;
}

// Abstract trajectory of a keystroke script, including the start state.
inline std::vector<capkit::AbstractState> abstract_run(const capkit::World& w,
                                                       const capkit::ConcreteState& s0,
                                                       const std::string& keys) {
  std::vector<capkit::AbstractState> out{abstract_state(w, s0)};
  capkit::ConcreteState s = s0;
  for (char k : keys) {
    s = play(w, s, std::string(1, k));
    out.push_back(abstract_state(w, s));
  }
  return out;
}

inline bool holds(const capkit::World& w, const capkit::ConcreteState& s, const std::string& pred,
                  std::vector<std::string> args = {}) {
  return evaluate(w, s, capkit::GroundAtom{pred, std::move(args)});
}

}  // namespace tu
