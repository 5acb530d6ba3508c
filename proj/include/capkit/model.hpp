#pragma once

#include <map>

#include "capkit/abstraction.hpp"

namespace capkit {

// Which side of a capability a site lives on.
enum class Loc : uint8_t { Pre = 0, Eff = 1 };

// One lifted predicate instance over a capability's parameters, on one side.
// The full model is a mode assignment to every site.
struct SiteKey {
  Loc loc = Loc::Pre;
  LiftedAtom atom;

  auto operator<=>(const SiteKey&) const = default;
};

// One observed abstract transition that the capability summarizes.
struct Grounding {
  std::vector<std::string> binding;  // parameter index -> entity/cell name
  AbstractState src, dst;

  auto operator<=>(const Grounding&) const = default;
};

using Overrides = std::vector<std::pair<SiteKey, Mode>>;

struct Capability {
  std::string name;
  std::vector<std::string> param_types;
  std::map<SiteKey, ModeSet> sites;
  std::vector<Grounding> groundings;

  int arity() const { return static_cast<int>(param_types.size()); }
  std::string param_name(int i) const {
    return "?" + param_types[i] + std::to_string(i + 1);
  }

  // Default interpretation of a site: its sole mode once resolved; before
  // that, precondition sites read at their observed polarity and effect sites
  // stay frame-inert.
  Mode read(const SiteKey& k) const;
  Mode read(const SiteKey& k, const Overrides& ov) const;

  bool resolved() const;

  // Sites on `loc` whose default read is not Off, with that read.
  std::vector<std::pair<LiftedAtom, Mode>> literals(Loc loc) const;

  // "pre:(at ?monster1 ?cell2)" — used in query logs and exports.
  std::string site_str(const SiteKey& k) const;
};

struct CapabilityModel {
  std::vector<Capability> caps;

  const Capability* find(const std::string& name) const;
};

GroundAtom instantiate(const LiftedAtom& a, const Capability& c,
                       const std::vector<std::string>& binding);

// Precondition of one grounding under the given interpretation (Off skipped).
std::vector<GroundLiteral> grounded_pre(const Capability& c,
                                        const std::vector<std::string>& binding,
                                        const Overrides& ov = {});

bool pre_satisfied(const Capability& c, const std::vector<std::string>& binding,
                   const AbstractState& src, const Overrides& ov = {});

// Image of `src` under one grounded application, or nullopt when the
// precondition fails. Off effect sites leave their atom untouched.
std::optional<AbstractState> apply_grounded(const Capability& c,
                                            const std::vector<std::string>& binding,
                                            const AbstractState& src, const Overrides& ov = {});

// Every binding under which this capability maps `src` exactly onto `dst`.
// Sorted and duplicate-free.
std::vector<std::vector<std::string>> bindings_explaining(const World& w, const Capability& c,
                                                          const AbstractState& src,
                                                          const AbstractState& dst,
                                                          const Overrides& ov = {});

// All type-correct lifted predicate instances over the given parameter list,
// in canonical (predicate, args) order.
std::vector<LiftedAtom> enumerate_site_atoms(const DomainSpec& d,
                                             const std::vector<std::string>& param_types);

}  // namespace capkit
