#pragma once

#include "capkit/query.hpp"
#include "capkit/sim.hpp"

namespace capkit {

// Outcome of one brute-force audit. The checks re-derive everything from the
// model-application semantics and the simulator; they share only that
// definitional layer with the learner, never its search machinery, so a bug
// on either side surfaces as a failed report instead of agreeing with itself.
struct VerificationReport {
  std::string check;
  bool pass = false;
  bool partial = false;    // a budget or state cap cut coverage short
  long long examined = 0;  // instances the check actually inspected
  long long skipped = 0;   // instances noted as vacuous and not inspected
  long long elapsed_us = 0;
  std::string detail;  // tallies, or the counterexample in words

  // Replayable witnesses; the member matching the failed check is non-empty.
  std::vector<std::pair<AbstractState, AbstractState>> unexplained;
  struct Addition {
    std::string cap;
    SiteKey key;
    Mode mode = Mode::Off;
  };
  std::vector<Addition> unrefuted;
  struct Refinement {
    std::string cap;
    std::vector<std::string> binding;
    AbstractState src;
    ConcreteState member;
    AbstractState image;
  };
  std::vector<Refinement> unrealizable;
  std::vector<std::pair<ConcreteState, ConcreteState>> disconnected;
};

// Every consecutive abstract transition of every trace must be produced by
// some grounding of some capability; the grounding search is exhaustive over
// the world's objects. An empty trace set passes vacuously.
VerificationReport check_consistency(const World& w, const CapabilityModel& m,
                                     const std::vector<std::vector<AbstractState>>& traces);

// Every addable literal-mode — positive or negative, at every absent site of
// every capability — must be struck down by the recorded evidence: adding it
// either orphans some harvested transition, contradicts a recorded answer (a
// one-hop success it can no longer produce, or a refused leg it would newly
// claim), or matches a logged unseparable/endgame settlement of exactly that
// mode. An effect restating a pinned precondition of the same atom is
// tallied as vacuous: it changes no image the precondition admits. Unsettled
// sites fail outright — such a model never committed to a maximum — and a
// model contradicting its own recorded evidence fails before any addition is
// tried.
VerificationReport check_maximal_consistency(const World& w, const CapabilityModel& m,
                                             const std::vector<std::vector<AbstractState>>& traces,
                                             const std::vector<EvidenceRecord>& evidence,
                                             const std::vector<PruneEvent>& prunes);

// Every grounded capability claim must refine: from every reachable concrete
// member of every reachable abstract state satisfying the grounded
// precondition, some primitive-action sequence must end in a concrete state
// abstracting exactly to the predicted image. Claims whose image matches no
// reachable abstract state are skipped and tallied (the claim leaves the
// induced state space, so there is no refinement target); capabilities with
// no satisfying grounding at all are named in `detail` as vacuous. Coverage
// is exhaustive when the reachable space holds at most 10^4 concrete states,
// otherwise members are sampled with a fixed seed; exceeding `sample_budget`
// sets `partial`.
VerificationReport check_realizability(const World& w, const CapabilityModel& m,
                                       long long sample_budget = 2000000);

// Partition the reachable concrete states by their abstraction; every two
// states sharing an abstract state must reach each other through primitive
// actions (intermediate states may leave the partition). Exceeding
// `state_cap` sets `partial`.
VerificationReport check_local_connectivity(const World& w, size_t state_cap = 100000);

// Fraction of the gold model's capabilities — matched by skeleton signature,
// so display names play no part — recovered from harvests of growing size,
// one run per budget, all from the same seed. Harvests are deterministic and
// prefix-monotone in the budget, so each seed's curve is non-decreasing.
std::vector<std::pair<int, double>> coverage_curve(const World& w, Agent& agent,
                                                   const CapabilityModel& gold,
                                                   const std::vector<int>& budgets,
                                                   uint64_t seed = 0);

}  // namespace capkit
