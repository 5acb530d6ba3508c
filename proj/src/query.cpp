#include "capkit/query.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <set>
#include <tuple>

#include "capkit/harvest.hpp"
#include "capkit/induction.hpp"

namespace capkit {

namespace {

std::string name_kind(const World& w, const std::string& n) {
  if (n == "player") return "player";
  if (w.cell_of_name(n) >= 0) return "cell";
  int oi = w.find_object(n);
  return oi < 0 ? std::string() : w.objects[oi].type;
}

// Every distinct abstract state any capability was observed in, in
// first-appearance order. The shared pool all experiments start from.
std::vector<AbstractState> observed_states(const CapabilityModel& m) {
  std::vector<AbstractState> out;
  auto push = [&](const AbstractState& s) {
    if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
  };
  for (const auto& c : m.caps)
    for (const auto& g : c.groundings) {
      push(g.src);
      push(g.dst);
    }
  return out;
}

// All bindings whose grounded precondition holds in `s` under `ov`.
// Positive atoms anchor parameters against the state; leftover parameters
// range over their type universe; negative atoms are checked last.
std::vector<std::vector<std::string>> pre_satisfying_bindings(const World& w, const Capability& c,
                                                              const Overrides& ov,
                                                              const AbstractState& s) {
  std::vector<LiftedAtom> pos, neg;
  for (const auto& [k, ms] : c.sites) {
    if (k.loc != Loc::Pre) continue;
    Mode m = c.read(k, ov);
    if (m == Mode::Pos) pos.push_back(k.atom);
    if (m == Mode::Neg) neg.push_back(k.atom);
  }

  std::set<std::vector<std::string>> found;
  std::vector<std::string> bind(c.param_types.size());

  std::function<void(size_t)> enumerate_free = [&](size_t p) {
    if (p == bind.size()) {
      for (const auto& a : pos)
        if (!s.contains(instantiate(a, c, bind))) return;
      for (const auto& a : neg)
        if (s.contains(instantiate(a, c, bind))) return;
      found.insert(bind);
      return;
    }
    if (!bind[p].empty()) {
      enumerate_free(p + 1);
      return;
    }
    for (const auto& n : names_of_type(w, c.param_types[p])) {
      bind[p] = n;
      enumerate_free(p + 1);
      bind[p].clear();
    }
  };

  std::function<void(size_t)> match = [&](size_t i) {
    if (i == pos.size()) {
      enumerate_free(0);
      return;
    }
    const LiftedAtom& la = pos[i];
    for (const auto& ga : s.atoms) {
      if (ga.pred != la.pred || ga.args.size() != la.args.size()) continue;
      std::vector<int> touched;
      bool ok = true;
      for (size_t j = 0; j < la.args.size() && ok; ++j) {
        int p = la.args[j];
        if (bind[p].empty()) {
          if (c.param_types[p] != name_kind(w, ga.args[j])) {
            ok = false;
          } else {
            bind[p] = ga.args[j];
            touched.push_back(p);
          }
        } else if (bind[p] != ga.args[j]) {
          ok = false;
        }
      }
      if (ok) match(i + 1);
      for (int t : touched) bind[t].clear();
    }
  };

  match(0);
  return {found.begin(), found.end()};
}

// Can any capability of `model` — with `site` forced to `mode` — map s0 onto
// s1 by a single grounded application?
bool hop_explainable(const World& w, const CapabilityModel& model, const RefinementSite& site,
                     Mode mode, const AbstractState& s0, const AbstractState& s1) {
  for (const auto& c : model.caps) {
    Overrides ov;
    if (c.name == site.cap) ov = {{site.key, mode}};
    if (!bindings_explaining(w, c, s0, s1, ov).empty()) return true;
  }
  return false;
}

struct QueryCandidate {
  AbstractState s0;
  ConcreteState c0;
  std::vector<std::string> binding;
  AbstractState s1;
  ConcreteState c1;
  int travel = 0;  // predicted player relocation, for ranking
};

int abstract_player_cell(const World& w, const AbstractState& s) {
  for (const auto& a : s.atoms)
    if (a.pred == "at" && a.args.size() == 2 && a.args[0] == "player")
      return w.cell_of_name(a.args[1]);
  return -1;
}

int player_travel(const World& w, const AbstractState& a, const AbstractState& b) {
  int ca = abstract_player_cell(w, a), cb = abstract_player_cell(w, b);
  if (ca < 0 || cb < 0) return 0;
  return std::abs(ca / w.W - cb / w.W) + std::abs(ca % w.W - cb % w.W);
}

// The shared state pool experiments draw from: every observed state, plus the
// abstractions of single-edit perturbations of their concrete witnesses, each
// tagged with the predicates whose groundings the edit changed.
struct StatePool {
  std::vector<AbstractState> observed;
  std::vector<std::pair<AbstractState, std::set<std::string>>> synthetic;
};

std::set<std::string> changed_preds(const AbstractState& a, const AbstractState& b) {
  std::set<std::string> out;
  size_t i = 0, j = 0;
  while (i < a.atoms.size() || j < b.atoms.size()) {
    if (j == b.atoms.size() || (i < a.atoms.size() && a.atoms[i] < b.atoms[j]))
      out.insert(a.atoms[i++].pred);
    else if (i == a.atoms.size() || b.atoms[j] < a.atoms[i])
      out.insert(b.atoms[j++].pred);
    else
      ++i, ++j;
  }
  return out;
}

StatePool build_pool(const World& w, const CapabilityModel& model) {
  StatePool pool;
  pool.observed = observed_states(model);
  std::map<AbstractState, size_t> index;
  for (const auto& s : pool.observed) {
    auto c0 = concretize_exact(w, s);
    if (!c0) continue;
    for (const auto& n : concrete_neighbors(w, *c0)) {
      AbstractState sn = abstract_state(w, n);
      if (sn == s) continue;  // the edit was invisible to the vocabulary
      std::set<std::string> ch = changed_preds(s, sn);
      auto [it, fresh] = index.try_emplace(sn, pool.synthetic.size());
      if (fresh)
        pool.synthetic.emplace_back(std::move(sn), std::move(ch));
      else
        pool.synthetic[it->second].second.insert(ch.begin(), ch.end());
    }
  }
  return pool;
}

// Satisfiable experiments separating the site's modes, best-first: ranked by
// how far the predicted transition relocates the player (short hops are
// realizable as one abstract transition), ties kept in generation order —
// observed states first, then the synthetic perturbations that touch the
// disputed predicate. Both endpoints must refine to concrete witnesses: a
// query is only posable once its waypoints exist at the agent's level.
std::vector<QueryCandidate> build_candidates(const World& w, const Capability& c,
                                             const SiteKey& key, const std::vector<Mode>& modes,
                                             size_t limit, const StatePool& pool) {
  std::vector<QueryCandidate> out;
  std::set<std::tuple<AbstractState, std::vector<std::string>, AbstractState>> seen;

  // Predicted images per mode; a candidate needs at least two to disagree.
  // Self-loop images make useless waypoints (reaching where you stand proves
  // nothing). Every divergent non-loop prediction is a potential waypoint:
  // when one mode's image has no witness the other's may still be posable.
  auto divergent_images = [&](const AbstractState& s, const std::vector<std::string>& th) {
    std::vector<std::optional<AbstractState>> imgs;
    for (Mode m : modes) imgs.push_back(apply_grounded(c, th, s, {{key, m}}));
    std::vector<AbstractState> out2;
    for (const auto& img : imgs) {
      if (!img || *img == s) continue;
      if (std::find(out2.begin(), out2.end(), *img) != out2.end()) continue;
      for (const auto& other : imgs)
        if (other != img) {
          out2.push_back(*img);
          break;
        }
    }
    return out2;
  };

  auto admit = [&](const AbstractState& s0, const std::vector<std::string>& th,
                   const AbstractState& s1) -> bool {
    if (!seen.insert({s0, th, s1}).second) return false;
    auto c0 = concretize_exact(w, s0);
    if (!c0) return false;
    auto c1 = concretize_exact(w, s1);
    if (!c1) return false;
    out.push_back({s0, *c0, th, s1, *c1, player_travel(w, s0, s1)});
    return true;
  };

  const Overrides relax = {{key, Mode::Off}};

  auto admit_first = [&](const AbstractState& s, const std::vector<std::string>& th) {
    for (const auto& img : divergent_images(s, th))
      if (admit(s, th, img)) return;
  };

  // Pass 1: experiments living entirely inside observed states.
  for (const auto& s : pool.observed) {
    if (out.size() >= limit) break;
    for (const auto& th : pre_satisfying_bindings(w, c, relax, s)) {
      if (out.size() >= limit) break;
      admit_first(s, th);
    }
  }

  // Pass 2: synthetic states whose defining edit changed the disputed
  // predicate somewhere — the only way to manufacture the flipped polarity
  // consistently (a held key turns into a placed one, a monster into a
  // corpse) when no observed state carries it.
  for (const auto& [sn, preds] : pool.synthetic) {
    if (out.size() >= limit) break;
    if (!preds.count(key.atom.pred)) continue;
    for (const auto& th : pre_satisfying_bindings(w, c, relax, sn)) {
      if (out.size() >= limit) break;
      admit_first(sn, th);
    }
  }

  std::stable_sort(out.begin(), out.end(),
                   [](const QueryCandidate& a, const QueryCandidate& b) { return a.travel < b.travel; });
  return out;
}

std::vector<AbstractState> dedup_stream(const std::vector<AbstractState>& t) {
  std::vector<AbstractState> out;
  for (const auto& s : t)
    if (out.empty() || out.back() != s) out.push_back(s);
  return out;
}

}  // namespace

std::vector<ModelVariant> make_variants(const Capability& c, const RefinementSite& site) {
  auto it = c.sites.find(site.key);
  if (it == c.sites.end())
    throw UsageError("capability '" + c.name + "' has no site " + c.site_str(site.key));
  if (it->second.count() < 2)
    throw UsageError("site " + c.site_str(site.key) + " of '" + c.name + "' is already resolved");
  std::vector<ModelVariant> out;
  for (Mode m : it->second.modes()) out.push_back({site, m});
  return out;
}

std::optional<Query> generate_distinguishing_query(const World& w, const CapabilityModel& m,
                                                   const ModelVariant& vx, const ModelVariant& vy,
                                                   int skip) {
  if (vx.site != vy.site) throw UsageError("variants must target the same site");
  if (vx.mode == vy.mode) throw UsageError("variants must assign different modes");
  const Capability* c = m.find(vx.site.cap);
  if (!c) throw UsageError("unknown capability '" + vx.site.cap + "'");
  auto it = c->sites.find(vx.site.key);
  if (it == c->sites.end())
    throw UsageError("capability '" + c->name + "' has no site " + c->site_str(vx.site.key));
  for (Mode mode : {vx.mode, vy.mode})
    if (!it->second.has(mode))
      throw UsageError("mode '" + std::string(1, mode_char(mode)) + "' of site " +
                       c->site_str(vx.site.key) + " was already eliminated");

  auto cands = build_candidates(w, *c, vx.site.key, {vx.mode, vy.mode},
                                std::max<size_t>(128, skip + 1), build_pool(w, m));
  if (static_cast<int>(cands.size()) <= skip) return std::nullopt;
  return Query{cands[skip].s0, {QueryStep{c->name, cands[skip].binding}}};
}

std::vector<AbstractState> generate_waypoints(const CapabilityModel& m, const Query& q,
                                              const std::optional<ModelVariant>& v) {
  std::vector<AbstractState> out{q.s0};
  for (size_t i = 0; i < q.plan.size(); ++i) {
    const Capability* c = m.find(q.plan[i].cap);
    if (!c) throw UsageError("unknown capability '" + q.plan[i].cap + "' in query");
    Overrides ov;
    if (v && v->site.cap == c->name) ov = v->overrides();
    auto img = apply_grounded(*c, q.plan[i].binding, out.back(), ov);
    if (!img)
      throw UsageError("query step " + std::to_string(i + 1) +
                       " is not applicable at its predecessor");
    out.push_back(std::move(*img));
  }
  return out;
}

std::optional<WaypointPlan> refine_waypoints(const World& w, const Query& q,
                                             const std::vector<AbstractState>& waypoints) {
  WaypointPlan plan;
  plan.steps = q.plan;
  plan.abstract = waypoints;
  for (const auto& a : waypoints) {
    auto s = concretize_exact(w, a);
    if (!s) return std::nullopt;
    if (abstract_state(w, *s) != a) return std::nullopt;  // witness must round-trip
    plan.concrete.push_back(std::move(*s));
  }
  return plan;
}

PoseResult pose_query(Agent& agent, const WaypointPlan& plan) {
  if (plan.abstract.size() < 2) throw UsageError("a waypoint plan needs at least two states");
  PoseResult r;
  for (size_t i = 0; i + 1 < plan.abstract.size(); ++i) {
    ReachabilityAnswer ans = agent.answer_reachability(plan.abstract[i], {plan.abstract[i + 1]});
    r.answers.push_back(std::move(ans));
    if (!r.answers.back().success) break;
    ++r.theta;
  }
  return r;
}

namespace {

Capability* find_mutable(CapabilityModel& m, const std::string& name) {
  for (auto& c : m.caps)
    if (c.name == name) return &c;
  return nullptr;
}

// Remove one mode, fire the observer, and propagate the redundancy rule: a
// precondition resolved to +/− makes the same atom's effect mode +/−
// meaningless (adding what must hold, deleting what must not).
void remove_mode(CapabilityModel& model, const RefinementSite& site, Mode m, const char* reason,
                 const PruneObserver& observer, PruneOutcome& out) {
  Capability* cap = find_mutable(model, site.cap);
  if (!cap) throw UsageError("unknown capability '" + site.cap + "'");
  ModeSet& ms = cap->sites.at(site.key);
  if (!ms.has(m)) return;
  if (ms.count() == 1)
    throw InexpressibleError("every interpretation of " + cap->site_str(site.key) + " in '" +
                             cap->name + "' is inconsistent with the agent's answers");
  if (observer) observer(PruneEvent{site.cap, site.key, m, reason});
  ms.remove(m);
  out.removed.push_back({site, m});

  if (site.key.loc != Loc::Pre || ms.count() != 1) return;
  Mode sole = ms.sole();
  if (sole == Mode::Off) return;
  SiteKey ek{Loc::Eff, site.key.atom};
  auto it = cap->sites.find(ek);
  if (it != cap->sites.end() && it->second.count() >= 2 && it->second.has(sole))
    remove_mode(model, {site.cap, ek}, sole, "pair-redundancy", observer, out);
}

}  // namespace

PruneOutcome prune_modes(const World& w, CapabilityModel& model, const RefinementSite& site,
                         const std::vector<ModelVariant>& variants, const WaypointPlan& plan,
                         const PoseResult& result, bool complete_reasoner,
                         const PruneObserver& observer) {
  PruneOutcome out;
  const Capability* cap = model.find(site.cap);
  if (!cap) throw UsageError("unknown capability '" + site.cap + "'");

  for (size_t i = 0; i < result.answers.size(); ++i) {
    const ReachabilityAnswer& ans = result.answers[i];
    const AbstractState& s0 = plan.abstract[i];
    const AbstractState& s1 = plan.abstract[i + 1];

    if (ans.success) {
      auto hops = dedup_stream(ans.trajectory);
      if (hops.size() != 2 || hops.front() != s0 || hops.back() != s1) continue;
      for (const auto& v : variants) {
        if (!cap->sites.at(site.key).has(v.mode)) continue;
        if (!hop_explainable(w, model, site, v.mode, s0, s1))
          remove_mode(model, site, v.mode, "single-hop", observer, out);
      }
    } else if (ans.definite && complete_reasoner) {
      if (plan.steps[i].cap != site.cap) continue;  // leg prediction is mode-independent
      for (const auto& v : variants) {
        if (!cap->sites.at(site.key).has(v.mode)) continue;
        auto img = apply_grounded(*cap, plan.steps[i].binding, s0, v.overrides());
        if (img && *img == s1) remove_mode(model, site, v.mode, "definite-failure", observer, out);
      }
    }
  }
  return out;
}

namespace {

struct SiteRef {
  size_t cap_idx;
  SiteKey key;
};

}  // namespace

DiscoverResult discover(const World& w, Agent& actor, const DiscoverConfig& cfg,
                        const PruneObserver& user_observer, Agent* answerer_ptr) {
  auto t0 = std::chrono::steady_clock::now();
  Agent& answerer = answerer_ptr ? *answerer_ptr : actor;
  DiscoverResult out;
  RunStats& st = out.stats;
  PruneObserver observer = [&](const PruneEvent& e) {
    out.prunes.push_back(e);
    if (user_observer) user_observer(e);
  };

  HarvestResult h = harvest_traces(w, actor, cfg.trace_budget, cfg.seed);
  st.tasks = cfg.trace_budget;
  st.tasks_solved = static_cast<int>(h.solved);
  st.traces = static_cast<int>(h.traces.size());
  out.traces = h.traces;

  CapabilityModel& model = out.model;
  model = induce_model(w, h.traces);
  st.caps = static_cast<int>(model.caps.size());
  for (const auto& c : model.caps) st.transitions += static_cast<int>(c.groundings.size());

  std::vector<SiteRef> pending;
  for (size_t ci = 0; ci < model.caps.size(); ++ci)
    for (const auto& [k, ms] : model.caps[ci].sites) {
      ++st.sites;
      if (ms.count() == 1)
        ++st.sites_seeded;
      else
        pending.push_back({ci, k});
    }

  auto log_settled = [&](const Capability& c, const SiteKey& k, const std::string& before,
                         const PruneOutcome& po, const std::string& note) {
    QueryLogRow row{c.name, c.site_str(k), before, 0, -1, "", note, 0};
    for (const auto& [s2, m] : po.removed)
      if (s2.cap == c.name && s2.key == k) row.pruned += mode_char(m);
    if (row.pruned.empty()) row.pruned = "none";
    out.log.push_back(row);
    // propagated removals at other sites get their own rows
    for (const auto& [s2, m] : po.removed)
      if (!(s2.cap == c.name && s2.key == k)) {
        const Capability* c2 = model.find(s2.cap);
        out.log.push_back({s2.cap, c2->site_str(s2.key), std::string(1, mode_char(m)) + "|0", 0,
                           -1, std::string(1, mode_char(m)), "pair-redundancy", 0});
      }
  };

  // The observed-pattern default: a precondition keeps the polarity it was
  // always seen with; an undetermined effect is no effect.
  auto resolve_default = [&](const SiteRef& sr, const char* reason) {
    Capability& c = model.caps[sr.cap_idx];
    ModeSet ms = c.sites.at(sr.key);
    if (ms.count() < 2) return;
    Mode keep = (sr.key.loc == Loc::Pre && ms.has(Mode::Pos)) ? Mode::Pos : Mode::Off;
    std::string before = ms.str();
    PruneOutcome po;
    for (Mode m : ms.modes())
      if (m != keep) remove_mode(model, {c.name, sr.key}, m, reason, observer, po);
    log_settled(c, sr.key, before, po, reason);
  };

  const StatePool pool = build_pool(w, model);
  std::vector<SiteRef> deferred;
  for (const SiteRef& sr : pending) {
    Capability& c = model.caps[sr.cap_idx];
    if (c.sites.at(sr.key).count() < 2) continue;  // settled by propagation
    RefinementSite site{c.name, sr.key};
    std::vector<ModelVariant> variants = make_variants(c, site);
    std::vector<Mode> modes;
    for (const auto& v : variants) modes.push_back(v.mode);

    auto cands = build_candidates(w, c, sr.key, modes, 128, pool);
    int poses = 0;
    for (const auto& cand : cands) {
      if (c.sites.at(sr.key).count() < 2 || poses >= cfg.max_poses_per_site) break;
      WaypointPlan plan{{QueryStep{c.name, cand.binding}},
                        {cand.s0, cand.s1},
                        {cand.c0, cand.c1}};
      ++poses;
      ++st.queries;
      auto q0 = answerer.stats().query_time_us;
      PoseResult pr = pose_query(answerer, plan);
      long long spent = static_cast<long long>(answerer.stats().query_time_us - q0);

      for (size_t i = 0; i < pr.answers.size(); ++i) {
        const ReachabilityAnswer& a = pr.answers[i];
        auto hops = a.success ? dedup_stream(a.trajectory) : std::vector<AbstractState>{};
        bool one_hop = hops.size() == 2 && hops.front() == plan.abstract[i] &&
                       hops.back() == plan.abstract[i + 1];
        out.evidence.push_back({c.name, sr.key, plan.abstract[i], plan.abstract[i + 1],
                                plan.steps[i].cap, plan.steps[i].binding, a.success, one_hop,
                                !a.success && a.definite && answerer.complete_reasoner()});
      }

      std::string before = c.sites.at(sr.key).str();
      PruneOutcome po = prune_modes(w, model, site, variants, plan, pr,
                                    answerer.complete_reasoner(), observer);

      const ReachabilityAnswer& last = pr.answers.back();
      std::string note;
      if (last.success)
        note = dedup_stream(last.trajectory).size() == 2 ? "single-hop" : "multi-hop";
      else
        note = last.definite && answerer.complete_reasoner() ? "definite-failure"
                                                             : "indefinite-failure";
      if (po.removed.empty()) ++st.regenerations;

      QueryLogRow row{c.name,
                      c.site_str(sr.key),
                      before,
                      static_cast<int>(plan.abstract.size()),
                      pr.theta,
                      "",
                      note,
                      cfg.log_timings ? spent : 0};
      for (const auto& [s2, m] : po.removed)
        if (s2.cap == c.name && s2.key == sr.key) row.pruned += mode_char(m);
      if (row.pruned.empty()) row.pruned = "none";
      out.log.push_back(row);
      for (const auto& [s2, m] : po.removed)
        if (!(s2.cap == c.name && s2.key == sr.key)) {
          const Capability* c2 = model.find(s2.cap);
          out.log.push_back({s2.cap, c2->site_str(s2.key), std::string(1, mode_char(m)) + "|0", 0,
                             -1, std::string(1, mode_char(m)), "pair-redundancy", 0});
        }
    }

    if (c.sites.at(sr.key).count() >= 2) {
      if (poses == 0) {
        resolve_default(sr, "unseparable");
      } else {
        ++st.deferred;
        out.log.push_back(
            {c.name, c.site_str(sr.key), c.sites.at(sr.key).str(), 0, -1, "none", "deferred", 0});
        deferred.push_back(sr);
      }
    }
  }

  // Endgame: preconditions settle first so their resolutions can strike the
  // redundant effect modes, then the leftover effects default to no-effect.
  for (const SiteRef& sr : deferred)
    if (sr.key.loc == Loc::Pre) resolve_default(sr, "endgame");
  for (const SiteRef& sr : deferred)
    if (sr.key.loc == Loc::Eff) resolve_default(sr, "endgame");

  st.query_time_us = static_cast<long long>(answerer.stats().query_time_us);
  st.agent_nodes = static_cast<long long>(actor.stats().nodes_expanded +
                                          (answerer_ptr ? answerer.stats().nodes_expanded : 0));
  st.wall_us = std::chrono::duration_cast<std::chrono::microseconds>(
                   std::chrono::steady_clock::now() - t0)
                   .count();
  return out;
}

}  // namespace capkit
