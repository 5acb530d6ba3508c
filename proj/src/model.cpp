#include "capkit/model.hpp"

#include <algorithm>
#include <functional>
#include <set>

namespace capkit {

Mode Capability::read(const SiteKey& k) const {
  ModeSet ms = sites.at(k);
  if (ms.count() == 1) return ms.sole();
  if (k.loc == Loc::Pre) return ms.has(Mode::Pos) ? Mode::Pos : Mode::Neg;
  return Mode::Off;
}

Mode Capability::read(const SiteKey& k, const Overrides& ov) const {
  for (const auto& [key, m] : ov)
    if (key == k) return m;
  return read(k);
}

bool Capability::resolved() const {
  for (const auto& [k, ms] : sites)
    if (ms.count() != 1) return false;
  return true;
}

std::vector<std::pair<LiftedAtom, Mode>> Capability::literals(Loc loc) const {
  std::vector<std::pair<LiftedAtom, Mode>> out;
  for (const auto& [k, ms] : sites) {
    if (k.loc != loc) continue;
    Mode m = read(k);
    if (m != Mode::Off) out.emplace_back(k.atom, m);
  }
  return out;
}

std::string Capability::site_str(const SiteKey& k) const {
  std::string s = k.loc == Loc::Pre ? "pre:(" : "eff:(";
  s += k.atom.pred;
  for (int a : k.atom.args) s += " " + param_name(a);
  s += ")";
  return s;
}

const Capability* CapabilityModel::find(const std::string& name) const {
  for (const auto& c : caps)
    if (c.name == name) return &c;
  return nullptr;
}

GroundAtom instantiate(const LiftedAtom& a, const Capability&,
                       const std::vector<std::string>& binding) {
  GroundAtom g;
  g.pred = a.pred;
  g.args.reserve(a.args.size());
  for (int idx : a.args) g.args.push_back(binding[idx]);
  return g;
}

std::vector<GroundLiteral> grounded_pre(const Capability& c,
                                        const std::vector<std::string>& binding,
                                        const Overrides& ov) {
  std::vector<GroundLiteral> out;
  for (const auto& [k, ms] : c.sites) {
    if (k.loc != Loc::Pre) continue;
    Mode m = c.read(k, ov);
    if (m == Mode::Off) continue;
    out.push_back(GroundLiteral{m == Mode::Neg, instantiate(k.atom, c, binding)});
  }
  return out;
}

bool pre_satisfied(const Capability& c, const std::vector<std::string>& binding,
                   const AbstractState& src, const Overrides& ov) {
  for (const auto& lit : grounded_pre(c, binding, ov))
    if (src.contains(lit.atom) == lit.negated) return false;
  return true;
}

std::optional<AbstractState> apply_grounded(const Capability& c,
                                            const std::vector<std::string>& binding,
                                            const AbstractState& src, const Overrides& ov) {
  if (!pre_satisfied(c, binding, src, ov)) return std::nullopt;
  AbstractState out = src;
  for (const auto& [k, ms] : c.sites) {
    if (k.loc != Loc::Eff) continue;
    Mode m = c.read(k, ov);
    if (m == Mode::Off) continue;
    GroundAtom g = instantiate(k.atom, c, binding);
    if (m == Mode::Pos)
      out.insert(g);
    else
      out.erase(g);
  }
  return out;
}

namespace {

bool type_compatible(const std::string& want, const std::string& have) {
  if (want == "cell") return have == "cell";
  if (want == "any") return have != "cell";
  return want == have;
}

// Candidate names a parameter of the given type can take in this world.
std::vector<std::string> type_universe(const World& w, const std::string& type) {
  return names_of_type(w, type);
}

struct ExplainSearch {
  const World& w;
  const Capability& c;
  const AbstractState& src;
  const AbstractState& dst;
  const Overrides& ov;
  std::vector<std::string> bind;  // "" = unbound
  std::set<std::vector<std::string>> found;

  // Sites partitioned by their read under ov.
  std::vector<LiftedAtom> adds, dels, pres_pos;

  std::string name_kind(const std::string& n) const {
    if (n == "player") return "player";
    if (w.cell_of_name(n) >= 0) return "cell";
    int oi = w.find_object(n);
    return oi < 0 ? std::string() : w.objects[oi].type;
  }

  bool bind_atom(const LiftedAtom& la, const GroundAtom& ga, std::vector<int>& touched) {
    if (la.pred != ga.pred || la.args.size() != ga.args.size()) return false;
    for (size_t i = 0; i < la.args.size(); ++i) {
      int p = la.args[i];
      if (bind[p].empty()) {
        if (c.param_types[p] != name_kind(ga.args[i])) {
          for (int t : touched) bind[t].clear();
          return false;
        }
        bind[p] = ga.args[i];
        touched.push_back(p);
      } else if (bind[p] != ga.args[i]) {
        for (int t : touched) bind[t].clear();
        return false;
      }
    }
    return true;
  }

  void unbind(const std::vector<int>& touched) {
    for (int t : touched) bind[t].clear();
  }

  void leaf() {
    // Enumerate any parameters still unbound (rare: vacuous deletes), then
    // verify the application exactly reproduces dst.
    int free_idx = -1;
    for (size_t i = 0; i < bind.size(); ++i)
      if (bind[i].empty()) {
        free_idx = static_cast<int>(i);
        break;
      }
    if (free_idx >= 0) {
      for (const auto& name : type_universe(w, c.param_types[free_idx])) {
        bind[free_idx] = name;
        leaf();
      }
      bind[free_idx].clear();
      return;
    }
    auto img = apply_grounded(c, bind, src, ov);
    if (img && *img == dst) found.insert(bind);
  }

  void match_pres(size_t i) {
    if (i == pres_pos.size()) {
      leaf();
      return;
    }
    const LiftedAtom& la = pres_pos[i];
    bool all_bound = true;
    for (int p : la.args) all_bound = all_bound && !bind[p].empty();
    if (all_bound) {
      match_pres(i + 1);  // leaf verification rejects unsatisfied pres
      return;
    }
    for (const auto& ga : src.atoms) {
      std::vector<int> touched;
      if (bind_atom(la, ga, touched)) {
        match_pres(i + 1);
        unbind(touched);
      }
    }
  }

  void match_dels(size_t i) {
    if (i == dels.size()) {
      match_pres(0);
      return;
    }
    const LiftedAtom& la = dels[i];
    // Real delete: an atom of src that is absent from dst.
    for (const auto& ga : src.atoms) {
      if (dst.contains(ga)) continue;
      std::vector<int> touched;
      if (bind_atom(la, ga, touched)) {
        match_dels(i + 1);
        unbind(touched);
      }
    }
    // Vacuous delete: the grounded atom was already false. Leave the binding
    // to later sites or the leaf enumeration.
    match_dels(i + 1);
  }

  void match_adds(size_t i) {
    if (i == adds.size()) {
      match_dels(0);
      return;
    }
    const LiftedAtom& la = adds[i];
    for (const auto& ga : dst.atoms) {
      std::vector<int> touched;
      if (bind_atom(la, ga, touched)) {
        match_adds(i + 1);
        unbind(touched);
      }
    }
  }
};

}  // namespace

std::vector<std::vector<std::string>> bindings_explaining(const World& w, const Capability& c,
                                                          const AbstractState& src,
                                                          const AbstractState& dst,
                                                          const Overrides& ov) {
  ExplainSearch es{w, c, src, dst, ov, std::vector<std::string>(c.param_types.size()), {}, {},
                   {}, {}};
  for (const auto& [k, ms] : c.sites) {
    Mode m = c.read(k, ov);
    if (m == Mode::Off) continue;
    if (k.loc == Loc::Eff) {
      (m == Mode::Pos ? es.adds : es.dels).push_back(k.atom);
    } else if (m == Mode::Pos) {
      es.pres_pos.push_back(k.atom);
    }
  }
  es.match_adds(0);
  return {es.found.begin(), es.found.end()};
}

std::vector<LiftedAtom> enumerate_site_atoms(const DomainSpec& d,
                                             const std::vector<std::string>& param_types) {
  std::vector<LiftedAtom> out;
  for (const auto& p : d.predicates) {
    std::vector<std::vector<int>> slots(p.arity);
    for (int a = 0; a < p.arity; ++a)
      for (size_t i = 0; i < param_types.size(); ++i)
        if (type_compatible(p.arg_types[a], param_types[i]))
          slots[a].push_back(static_cast<int>(i));

    std::vector<int> pick(p.arity, 0);
    std::function<void(int)> rec = [&](int a) {
      if (a == p.arity) {
        LiftedAtom la;
        la.pred = p.name;
        la.args.assign(pick.begin(), pick.end());
        out.push_back(la);
        return;
      }
      for (int idx : slots[a]) {
        pick[a] = idx;
        rec(a + 1);
      }
    };
    rec(0);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace capkit
