#include "capkit/induction.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace capkit {

std::vector<std::pair<AbstractState, AbstractState>> extract_transitions(
    const std::vector<std::vector<AbstractState>>& traces) {
  std::vector<std::pair<AbstractState, AbstractState>> out;
  std::set<std::pair<AbstractState, AbstractState>> seen;
  for (const auto& tr : traces) {
    for (size_t i = 0; i + 1 < tr.size(); ++i) {
      if (tr[i] == tr[i + 1]) continue;
      auto pair = std::make_pair(tr[i], tr[i + 1]);
      if (seen.insert(pair).second) out.push_back(std::move(pair));
    }
  }
  return out;
}

Capability lift_transition(const World& w, const AbstractState& src, const AbstractState& dst) {
  std::vector<GroundAtom> adds, dels;
  for (const auto& a : dst.atoms)
    if (!src.contains(a)) adds.push_back(a);
  for (const auto& a : src.atoms)
    if (!dst.contains(a)) dels.push_back(a);

  // The objects of the transition: delta arguments, the acting player and its
  // cell, and the source cell of every object the delta mentions.
  std::set<std::string> objs;
  for (const auto& list : {adds, dels})
    for (const auto& a : list)
      for (const auto& arg : a.args) objs.insert(arg);
  objs.insert("player");
  for (const auto& a : src.atoms) {
    if (a.pred != "at") continue;
    if (a.args[0] == "player" || objs.count(a.args[0])) objs.insert(a.args[1]);
  }

  // Candidate precondition: source atoms entirely about those objects.
  std::vector<GroundAtom> pre;
  for (const auto& a : src.atoms) {
    bool inside = true;
    for (const auto& arg : a.args) inside = inside && objs.count(arg) > 0;
    if (inside) pre.push_back(a);
  }

  // Canonical parameter numbering: first appearance over sorted pre, adds,
  // dels (AbstractState atoms are already sorted; the deltas inherit that).
  std::vector<std::string> order;
  std::map<std::string, int> id;
  auto visit = [&](const std::vector<GroundAtom>& list) {
    for (const auto& a : list)
      for (const auto& arg : a.args)
        if (!id.count(arg)) {
          id[arg] = static_cast<int>(order.size());
          order.push_back(arg);
        }
  };
  visit(pre);
  visit(adds);
  visit(dels);

  Capability c;
  for (const auto& name : order) {
    if (name == "player")
      c.param_types.push_back("player");
    else if (w.cell_of_name(name) >= 0)
      c.param_types.push_back("cell");
    else {
      int oi = w.find_object(name);
      if (oi < 0) throw UsageError("transition mentions unknown entity '" + name + "'");
      c.param_types.push_back(w.objects[oi].type);
    }
  }

  auto lift = [&](const GroundAtom& a) {
    LiftedAtom la;
    la.pred = a.pred;
    for (const auto& arg : a.args) la.args.push_back(id.at(arg));
    return la;
  };
  std::set<LiftedAtom> add_set, del_set;
  for (const auto& a : adds) add_set.insert(lift(a));
  for (const auto& a : dels) del_set.insert(lift(a));

  Grounding g;
  g.binding = order;
  g.src = src;
  g.dst = dst;

  for (const auto& atom : enumerate_site_atoms(w.domain, c.param_types)) {
    GroundAtom ground = instantiate(atom, c, g.binding);
    bool in_src = src.contains(ground);
    bool in_dst = dst.contains(ground);
    c.sites[SiteKey{Loc::Pre, atom}] =
        in_src ? ModeSet::of(Mode::Pos, Mode::Off) : ModeSet::of(Mode::Neg, Mode::Off);
    ModeSet eff;
    if (add_set.count(atom))
      eff = ModeSet::of(Mode::Pos);
    else if (del_set.count(atom))
      eff = ModeSet::of(Mode::Neg);
    else
      eff = in_dst ? ModeSet::of(Mode::Pos, Mode::Off) : ModeSet::of(Mode::Neg, Mode::Off);
    c.sites[SiteKey{Loc::Eff, atom}] = eff;
  }
  c.groundings.push_back(std::move(g));
  return c;
}

namespace {

// Skeleton identity: parameter types and fixed effects, up to renaming of the
// parameters. The candidate precondition is deliberately NOT part of the
// identity: the same mechanic observed against different scenery (a move that
// happens to start on a marked cell) or against differently-named objects of
// one type must collapse into a single capability, with the per-source
// precondition observations reconciled by mode intersection. The canonical
// frame is the parameter ordering minimizing the rendered (types, adds, dels)
// string; the returned ordering maps canonical position -> parameter id.
struct CanonicalFrame {
  std::string key;
  std::vector<int> order;
};

CanonicalFrame canonical_frame(const Capability& c) {
  std::vector<LiftedAtom> adds, dels;
  for (const auto& [k, ms] : c.sites) {
    if (k.loc != Loc::Eff || ms.count() != 1 || ms.sole() == Mode::Off) continue;
    (ms.sole() == Mode::Pos ? adds : dels).push_back(k.atom);
  }
  int n = static_cast<int>(c.param_types.size());
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;

  CanonicalFrame best;
  std::vector<int> pos(n);
  do {
    for (int j = 0; j < n; ++j) pos[perm[j]] = j;
    std::ostringstream os;
    for (int j = 0; j < n; ++j) os << c.param_types[perm[j]] << ",";
    auto render = [&](std::vector<LiftedAtom> list) {
      std::vector<std::string> rows;
      for (const auto& a : list) {
        std::string r = a.pred;
        for (int arg : a.args) r += " ?" + std::to_string(pos[arg]);
        rows.push_back(std::move(r));
      }
      std::sort(rows.begin(), rows.end());
      for (const auto& r : rows) os << "(" << r << ")";
    };
    os << "|A:";
    render(adds);
    os << "|D:";
    render(dels);
    std::string key = os.str();
    if (best.key.empty() || key < best.key) best = {std::move(key), perm};
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace

std::string skeleton_signature(const Capability& c) { return canonical_frame(c).key; }

CapabilityModel merge_skeletons(const std::vector<Capability>& lifted) {
  CapabilityModel model;
  std::map<std::string, size_t> by_key;
  std::vector<std::vector<int>> frames;  // canonical ordering of each kept skeleton
  for (const auto& c : lifted) {
    CanonicalFrame f = canonical_frame(c);
    auto it = by_key.find(f.key);
    if (it == by_key.end()) {
      by_key.emplace(f.key, model.caps.size());
      frames.push_back(f.order);
      model.caps.push_back(c);
      model.caps.back().name = "c" + std::to_string(model.caps.size());
      continue;
    }
    Capability& into = model.caps[it->second];
    // Map this source's parameter ids onto the kept skeleton's through the
    // shared canonical frame, then reconcile sites and append groundings.
    const std::vector<int>& kept = frames[it->second];
    std::vector<int> onto(c.param_types.size());
    for (size_t j = 0; j < kept.size(); ++j) onto[f.order[j]] = kept[j];
    for (const auto& [k, ms] : c.sites) {
      LiftedAtom mapped = k.atom;
      for (int& arg : mapped.args) arg = onto[arg];
      ModeSet& cur = into.sites.at(SiteKey{k.loc, mapped});
      cur = cur.intersect(ms);
    }
    for (const auto& g : c.groundings) {
      Grounding mg = g;
      for (size_t i = 0; i < onto.size(); ++i) mg.binding[onto[i]] = g.binding[i];
      if (std::find(into.groundings.begin(), into.groundings.end(), mg) == into.groundings.end())
        into.groundings.push_back(std::move(mg));
    }
  }
  return model;
}

CapabilityModel induce_model(const World& w,
                             const std::vector<std::vector<AbstractState>>& traces) {
  std::vector<Capability> lifted;
  for (const auto& [src, dst] : extract_transitions(traces))
    lifted.push_back(lift_transition(w, src, dst));
  return merge_skeletons(lifted);
}

}  // namespace capkit
