#pragma once

#include <functional>

#include "capkit/agents.hpp"

namespace capkit {

// One literal site of one capability whose mode is still in question.
struct RefinementSite {
  std::string cap;
  SiteKey key;

  auto operator<=>(const RefinementSite&) const = default;
};

// The base model with one site forced to one mode.
struct ModelVariant {
  RefinementSite site;
  Mode mode = Mode::Off;

  Overrides overrides() const { return {{site.key, mode}}; }
};

// One grounded capability application inside a query plan.
struct QueryStep {
  std::string cap;
  std::vector<std::string> binding;
};

// "Starting from s0, run this grounded plan" — the experiment whose predicted
// outcome separates two model variants.
struct Query {
  AbstractState s0;
  std::vector<QueryStep> plan;
};

// The query expanded to per-step states: the predicted abstract images plus
// concrete witnesses that re-abstract to them exactly.
struct WaypointPlan {
  std::vector<QueryStep> steps;          // steps.size() + 1 == abstract.size()
  std::vector<AbstractState> abstract;
  std::vector<ConcreteState> concrete;
};

// Outcome of posing one plan: how many consecutive waypoint pairs the agent
// traversed, with the raw answers needed to interpret the evidence.
struct PoseResult {
  int theta = 0;
  std::vector<ReachabilityAnswer> answers;  // one per pair asked
};

// Fired just before a mode is removed from a site. reason is one of:
// "single-hop" (the agent realized a transition the mode cannot produce),
// "definite-failure" (a complete reasoner refuted the mode's prediction),
// "pair-redundancy" (a resolved precondition makes the effect mode moot),
// "unseparable" / "endgame" (settled by the observed-pattern default).
struct PruneEvent {
  std::string cap;
  SiteKey key;
  Mode mode = Mode::Off;
  std::string reason;
};
using PruneObserver = std::function<void(const PruneEvent&)>;

// Modes removed by one pruning step, in order. Entries beyond the queried
// site come from pair-redundancy propagation.
struct PruneOutcome {
  std::vector<std::pair<RefinementSite, Mode>> removed;
};

// One transcript line. theta == -1 marks a site settled without posing
// anything (note says why); the timing column stays 0 unless log_timings is
// on, keeping default transcripts replay-identical.
struct QueryLogRow {
  std::string cap;
  std::string site;      // "pre:(alive ?monster1)"
  std::string variants;  // modes allowed when the row was written, "+|0"
  int waypoints = 0;
  int theta = -1;
  std::string pruned;    // mode chars removed here, "none" when nothing was
  std::string note;
  long long elapsed_us = 0;
};

// Machine-readable record of one answered leg of one posed experiment, kept
// alongside the transcript so audits can re-check the finished model against
// what the agent actually said rather than against the learner's conclusions.
struct EvidenceRecord {
  std::string site_cap;  // the site under investigation when the leg was posed
  SiteKey site_key;
  AbstractState src, dst;  // the leg asked about
  std::string step_cap;    // the grounded step that predicted the leg
  std::vector<std::string> step_binding;
  bool success = false;     // the agent realized dst from src
  bool single_hop = false;  // success whose sensor stream was exactly src -> dst
  bool definite = false;    // failure backed by a complete reasoner
};

struct DiscoverConfig {
  int trace_budget = 12;
  uint64_t seed = 0;
  int max_plan_len = 4;        // waypoint plans longer than this are rejected
  int max_poses_per_site = 3;  // retries before a site is deferred
  bool log_timings = false;
};

struct RunStats {
  int tasks = 0;
  int tasks_solved = 0;
  int traces = 0;
  int transitions = 0;  // distinct abstract transitions fed to induction
  int caps = 0;
  int sites = 0;
  int sites_seeded = 0;  // resolved by observation alone
  int queries = 0;       // plans posed to the agent
  int regenerations = 0;
  int deferred = 0;
  long long query_time_us = 0;
  long long wall_us = 0;
  long long agent_nodes = 0;
};

struct DiscoverResult {
  CapabilityModel model;
  std::vector<QueryLogRow> log;
  RunStats stats;
  // The raw material audits need: the harvested abstract traces, every
  // answered experiment leg, and every mode removal with its reason.
  std::vector<std::vector<AbstractState>> traces;
  std::vector<EvidenceRecord> evidence;
  std::vector<PruneEvent> prunes;
};

// One variant per still-allowed mode of the site. Errors when the site is
// unknown or already resolved.
std::vector<ModelVariant> make_variants(const Capability& c, const RefinementSite& site);

// A satisfiable experiment whose predicted outcome differs between the two
// variants, or nullopt when none exists. `skip` returns the (skip+1)-th
// candidate in the generator's canonical order, for retries.
std::optional<Query> generate_distinguishing_query(const World& w, const CapabilityModel& m,
                                                   const ModelVariant& vx, const ModelVariant& vy,
                                                   int skip = 0);

// Predicted state sequence of the query (first entry q.s0), applying each
// step under the variant's interpretation. Errors when a step's precondition
// fails at its predecessor.
std::vector<AbstractState> generate_waypoints(const CapabilityModel& m, const Query& q,
                                              const std::optional<ModelVariant>& v = std::nullopt);

// Concretize every waypoint; nullopt when any is unsatisfiable. Every witness
// is checked to re-abstract onto its waypoint exactly.
std::optional<WaypointPlan> refine_waypoints(const World& w, const Query& q,
                                             const std::vector<AbstractState>& waypoints);

// Ask the agent each consecutive waypoint pair in order, stopping at the
// first failure.
PoseResult pose_query(Agent& agent, const WaypointPlan& plan);

// Interpret one pose outcome and shrink the site's allowed modes:
//  - a success whose sensor stream realizes its pair as exactly one abstract
//    transition removes every mode that cannot produce that transition by any
//    single grounded application;
//  - a definite failure from a complete reasoner removes every mode that
//    predicted the failing leg succeeds.
// Anything else (multi-hop successes, indefinite failures) is not evidence.
// Throws InexpressibleError when a site would lose its last mode.
PruneOutcome prune_modes(const World& w, CapabilityModel& model, const RefinementSite& site,
                         const std::vector<ModelVariant>& variants, const WaypointPlan& plan,
                         const PoseResult& result, bool complete_reasoner,
                         const PruneObserver& observer = {});

// The full pipeline: harvest traces with `actor`, induce the capability
// skeletons, then resolve every site by querying `answerer` (the actor itself
// when null). Deterministic for a fixed config and seed.
DiscoverResult discover(const World& w, Agent& actor, const DiscoverConfig& cfg = {},
                        const PruneObserver& observer = {}, Agent* answerer = nullptr);

}  // namespace capkit
