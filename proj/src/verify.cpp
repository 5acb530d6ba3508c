#include "capkit/verify.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <random>
#include <set>
#include <sstream>

#include "capkit/abstraction.hpp"
#include "capkit/harvest.hpp"
#include "capkit/induction.hpp"

namespace capkit {

namespace {

using Clock = std::chrono::steady_clock;

long long us_since(Clock::time_point t0) {
  return std::chrono::duration_cast<std::chrono::microseconds>(Clock::now() - t0).count();
}

// Consecutive distinct abstract pairs of every trace, duplicates removed
// globally. Re-derived here rather than borrowed from the induction layer.
std::vector<std::pair<AbstractState, AbstractState>> trace_pairs(
    const std::vector<std::vector<AbstractState>>& traces) {
  std::vector<std::pair<AbstractState, AbstractState>> out;
  std::set<std::pair<AbstractState, AbstractState>> seen;
  for (const auto& tr : traces)
    for (size_t i = 0; i + 1 < tr.size(); ++i) {
      size_t j = i;
      while (j + 1 < tr.size() && tr[j + 1] == tr[i]) ++j;
      if (j + 1 == tr.size()) break;
      std::pair<AbstractState, AbstractState> p{tr[i], tr[j + 1]};
      if (seen.insert(p).second) out.push_back(p);
      i = j;
    }
  return out;
}

bool produces(const World& w, const Capability& c, const AbstractState& a, const AbstractState& b,
              const Overrides& ov = {}) {
  return !bindings_explaining(w, c, a, b, ov).empty();
}

std::string transition_str(const std::pair<AbstractState, AbstractState>& p) {
  return p.first.str() + " -> " + p.second.str();
}

}  // namespace

VerificationReport check_consistency(const World& w, const CapabilityModel& m,
                                     const std::vector<std::vector<AbstractState>>& traces) {
  auto t0 = Clock::now();
  VerificationReport r;
  r.check = "consistency";
  for (const auto& p : trace_pairs(traces)) {
    ++r.examined;
    bool ok = false;
    for (const auto& c : m.caps)
      if (produces(w, c, p.first, p.second)) {
        ok = true;
        break;
      }
    if (!ok) r.unexplained.push_back(p);
  }
  r.pass = r.unexplained.empty();
  std::ostringstream d;
  if (r.pass)
    d << r.examined << " distinct transitions, each produced by some grounding"
      << (r.examined == 0 ? " (no transitions: vacuous)" : "");
  else
    d << r.unexplained.size() << " of " << r.examined
      << " transitions have no producing grounding; first: " << transition_str(r.unexplained[0]);
  r.detail = d.str();
  r.elapsed_us = us_since(t0);
  return r;
}

VerificationReport check_maximal_consistency(const World& w, const CapabilityModel& m,
                                             const std::vector<std::vector<AbstractState>>& traces,
                                             const std::vector<EvidenceRecord>& evidence,
                                             const std::vector<PruneEvent>& prunes) {
  auto t0 = Clock::now();
  VerificationReport r;
  r.check = "maximal-consistency";

  // A model with unsettled sites never committed to a maximum.
  for (const auto& c : m.caps)
    for (const auto& [k, ms] : c.sites)
      if (ms.count() != 1)
        for (Mode mode : ms.modes()) r.unrefuted.push_back({c.name, k, mode});
  if (!r.unrefuted.empty()) {
    r.detail = std::to_string(r.unrefuted.size()) +
               " mode readings remain unsettled; first open site: " +
               r.unrefuted[0].cap + " " +
               m.find(r.unrefuted[0].cap)->site_str(r.unrefuted[0].key);
    r.elapsed_us = us_since(t0);
    return r;
  }

  auto pairs = trace_pairs(traces);

  // Producers of every harvested transition under the model as given. An
  // addition to one capability can only orphan transitions that capability
  // alone produces, so record the sole producers.
  std::vector<std::vector<size_t>> sole_pairs(m.caps.size());
  for (size_t pi = 0; pi < pairs.size(); ++pi) {
    int count = 0;
    size_t last = 0;
    for (size_t ci = 0; ci < m.caps.size(); ++ci)
      if (produces(w, m.caps[ci], pairs[pi].first, pairs[pi].second)) {
        ++count;
        last = ci;
      }
    if (count == 0)
      r.unexplained.push_back(pairs[pi]);
    else if (count == 1)
      sole_pairs[last].push_back(pi);
  }
  if (!r.unexplained.empty()) {
    r.detail = "the model does not even produce its own harvest; first orphan: " +
               transition_str(r.unexplained[0]);
    r.elapsed_us = us_since(t0);
    return r;
  }

  // The recorded answers the finished model must agree with: every one-hop
  // success must be producible, and no definitely refused leg may be claimed.
  std::vector<const EvidenceRecord*> hops, refusals;
  for (const auto& e : evidence) {
    if (e.success && e.single_hop)
      hops.push_back(&e);
    else if (!e.success && e.definite)
      refusals.push_back(&e);
  }
  std::vector<std::pair<int, size_t>> hop_producers(hops.size(), {0, 0});
  for (size_t hi = 0; hi < hops.size(); ++hi) {
    for (size_t ci = 0; ci < m.caps.size(); ++ci)
      if (produces(w, m.caps[ci], hops[hi]->src, hops[hi]->dst)) {
        ++hop_producers[hi].first;
        hop_producers[hi].second = ci;
      }
    if (hop_producers[hi].first == 0) {
      r.unexplained.push_back({hops[hi]->src, hops[hi]->dst});
      r.detail = "a recorded one-hop success has no producing grounding: " +
                 transition_str(r.unexplained.back());
      r.elapsed_us = us_since(t0);
      return r;
    }
  }
  for (const auto* e : refusals)
    for (const auto& c : m.caps)
      if (produces(w, c, e->src, e->dst)) {
        r.unexplained.push_back({e->src, e->dst});
        r.detail = "the model claims a leg the agent definitely refused: " +
                   transition_str(r.unexplained.back()) + " (via " + c.name + ")";
        r.elapsed_us = us_since(t0);
        return r;
      }

  long long by_trace = 0, by_answer = 0, by_log = 0;
  for (size_t ci = 0; ci < m.caps.size(); ++ci) {
    const Capability& c = m.caps[ci];
    for (const auto& [k, ms] : c.sites) {
      if (ms.sole() != Mode::Off) continue;
      for (Mode mode : {Mode::Pos, Mode::Neg}) {
        if (k.loc == Loc::Eff) {
          auto pre = c.sites.find(SiteKey{Loc::Pre, k.atom});
          if (pre != c.sites.end() && pre->second.count() == 1 && pre->second.sole() == mode) {
            ++r.skipped;  // restates what the precondition already pins
            continue;
          }
        }
        ++r.examined;
        Overrides ov{{k, mode}};
        bool covered = false;
        for (size_t pi : sole_pairs[ci])
          if (!produces(w, c, pairs[pi].first, pairs[pi].second, ov)) {
            ++by_trace;
            covered = true;
            break;
          }
        if (!covered)
          for (size_t hi = 0; hi < hops.size() && !covered; ++hi) {
            if (hop_producers[hi].first != 1 || hop_producers[hi].second != ci) continue;
            if (!produces(w, c, hops[hi]->src, hops[hi]->dst, ov)) {
              ++by_answer;
              covered = true;
            }
          }
        if (!covered)
          for (const auto* e : refusals)
            if (produces(w, c, e->src, e->dst, ov)) {
              ++by_answer;
              covered = true;
              break;
            }
        if (!covered)
          for (const auto& p : prunes)
            if (p.cap == c.name && p.key == k && p.mode == mode &&
                (p.reason == "endgame" || p.reason == "unseparable")) {
              ++by_log;
              covered = true;
              break;
            }
        if (!covered) r.unrefuted.push_back({c.name, k, mode});
      }
    }
  }

  r.pass = r.unrefuted.empty();
  std::ostringstream d;
  d << r.examined << " additions: " << by_trace << " orphan a harvested transition, " << by_answer
    << " contradict a recorded answer, " << by_log << " match a logged settlement; " << r.skipped
    << " vacuous restatements skipped";
  if (!r.pass)
    d << "; " << r.unrefuted.size() << " unrefuted, first: " << r.unrefuted[0].cap << " "
      << m.find(r.unrefuted[0].cap)->site_str(r.unrefuted[0].key) << " as '"
      << mode_char(r.unrefuted[0].mode) << "'";
  r.detail = d.str();
  r.elapsed_us = us_since(t0);
  return r;
}

namespace {

// The world's reachable concrete envelope with successor indices, abstraction
// groups, and lazily memoized per-source reachability closures.
struct Envelope {
  const World& w;
  std::vector<ConcreteState> states;
  std::map<ConcreteState, int> index;
  std::vector<std::array<int, 5>> succ;
  std::vector<AbstractState> abs;
  std::map<AbstractState, std::vector<int>> groups;
  bool truncated = false;
  std::map<int, std::vector<bool>> closures;

  explicit Envelope(const World& world, size_t cap) : w(world) {
    ReachResult rr = enumerate_reachable(w, initial_state(w), cap);
    states = std::move(rr.states);
    truncated = rr.truncated;
    for (size_t i = 0; i < states.size(); ++i) index.emplace(states[i], static_cast<int>(i));
    succ.resize(states.size());
    abs.reserve(states.size());
    for (size_t i = 0; i < states.size(); ++i) {
      for (int a = 0; a < 5; ++a) {
        ConcreteState n = step(w, states[i], kAllActions[a]);
        auto it = index.find(n);
        succ[i][a] = it == index.end() ? -1 : it->second;  // -1 only when truncated
      }
      abs.push_back(abstract_state(w, states[i]));
      groups[abs.back()].push_back(static_cast<int>(i));
    }
  }

  const std::vector<bool>& closure(int from) {
    auto it = closures.find(from);
    if (it != closures.end()) return it->second;
    std::vector<bool> seen(states.size(), false);
    std::vector<int> frontier{from};
    seen[from] = true;
    while (!frontier.empty()) {
      int i = frontier.back();
      frontier.pop_back();
      for (int n : succ[i])
        if (n >= 0 && !seen[n]) {
          seen[n] = true;
          frontier.push_back(n);
        }
    }
    return closures.emplace(from, std::move(seen)).first->second;
  }
};

// All type-correct bindings of a capability over the world's objects.
std::vector<std::vector<std::string>> all_bindings(const World& w, const Capability& c) {
  std::vector<std::vector<std::string>> out;
  std::vector<std::string> bind(c.param_types.size());
  std::function<void(size_t)> rec = [&](size_t p) {
    if (p == bind.size()) {
      out.push_back(bind);
      return;
    }
    for (const auto& n : names_of_type(w, c.param_types[p])) {
      bind[p] = n;
      rec(p + 1);
    }
  };
  rec(0);
  return out;
}

}  // namespace

VerificationReport check_realizability(const World& w, const CapabilityModel& m,
                                       long long sample_budget) {
  auto t0 = Clock::now();
  VerificationReport r;
  r.check = "realizability";

  Envelope env(w, 250000);
  if (env.truncated) r.partial = true;
  bool exhaustive = !env.truncated && env.states.size() <= 10000;
  std::mt19937 rng(0x5eed);

  std::vector<std::string> vacuous;
  long long image_outside = 0;
  bool budget_hit = false;

  for (const auto& c : m.caps) {
    bool satisfied_any = false;
    auto bindings = all_bindings(w, c);
    for (const auto& [sa, members] : env.groups) {
      for (const auto& th : bindings) {
        auto img = apply_grounded(c, th, sa);
        if (!img) continue;  // precondition fails here
        satisfied_any = true;
        auto target = env.groups.find(*img);
        if (target == env.groups.end()) {
          ++image_outside;  // the claim leaves the induced state space
          ++r.skipped;
          continue;
        }
        std::vector<int> picks = members;
        if (!exhaustive && picks.size() > 3) {
          std::shuffle(picks.begin(), picks.end(), rng);
          picks.resize(3);
        }
        for (int mi : picks) {
          if (r.examined >= sample_budget) {
            r.partial = true;
            budget_hit = true;
            break;
          }
          ++r.examined;
          const std::vector<bool>& reach = env.closure(mi);
          bool hit = false;
          for (int ti : target->second)
            if (reach[ti]) {
              hit = true;
              break;
            }
          if (!hit) {
            r.unrealizable.push_back({c.name, th, sa, env.states[mi], *img});
            break;
          }
        }
        if (budget_hit || !r.unrealizable.empty()) break;
      }
      if (budget_hit || !r.unrealizable.empty()) break;
    }
    if (!satisfied_any) vacuous.push_back(c.name);
    if (budget_hit || !r.unrealizable.empty()) break;
  }

  r.pass = r.unrealizable.empty();
  std::ostringstream d;
  d << r.examined << " members checked over " << env.states.size() << " reachable states ("
    << (exhaustive ? "exhaustive" : "sampled") << "); " << image_outside
    << " claims skipped with no reachable image";
  if (!vacuous.empty()) {
    d << "; vacuous (no satisfying grounding):";
    for (const auto& n : vacuous) d << " " << n;
  }
  if (!r.pass) {
    const auto& u = r.unrealizable[0];
    d << "; no primitive path refines " << u.cap << " from a member of " << u.src.str();
  }
  if (budget_hit) d << "; sample budget exhausted";
  r.detail = d.str();
  r.elapsed_us = us_since(t0);
  return r;
}

VerificationReport check_local_connectivity(const World& w, size_t state_cap) {
  auto t0 = Clock::now();
  VerificationReport r;
  r.check = "local-connectivity";

  Envelope env(w, state_cap);
  r.partial = env.truncated;

  std::string where;
  for (const auto& [sa, members] : env.groups) {
    if (members.size() < 2) continue;
    for (size_t i = 0; i < members.size() && r.disconnected.empty(); ++i) {
      const std::vector<bool>& reach = env.closure(members[i]);
      for (size_t j = 0; j < members.size(); ++j) {
        if (i == j) continue;
        ++r.examined;
        if (!reach[members[j]]) {
          r.disconnected.push_back({env.states[members[i]], env.states[members[j]]});
          where = sa.str();
          break;
        }
      }
    }
    if (!r.disconnected.empty()) break;
  }

  r.pass = r.disconnected.empty();
  std::ostringstream d;
  if (r.pass)
    d << env.groups.size() << " abstract partitions over " << env.states.size()
      << " reachable states, each strongly connected";
  else
    d << "two concrete states share the abstract state " << where
      << " but cannot reach each other";
  if (r.partial) d << "; state cap reached, coverage partial";
  r.detail = d.str();
  r.elapsed_us = us_since(t0);
  return r;
}

std::vector<std::pair<int, double>> coverage_curve(const World& w, Agent& agent,
                                                   const CapabilityModel& gold,
                                                   const std::vector<int>& budgets,
                                                   uint64_t seed) {
  if (gold.caps.empty()) throw UsageError("coverage needs a gold model with capabilities");
  std::set<std::string> want;
  for (const auto& c : gold.caps) want.insert(skeleton_signature(c));

  std::vector<std::pair<int, double>> out;
  for (int b : budgets) {
    HarvestResult h = harvest_traces(w, agent, b, seed);
    CapabilityModel got = induce_model(w, h.traces);
    size_t matched = 0;
    for (const auto& c : got.caps)
      if (want.count(skeleton_signature(c))) ++matched;
    out.emplace_back(b, static_cast<double>(matched) / static_cast<double>(want.size()));
  }
  return out;
}

}  // namespace capkit
