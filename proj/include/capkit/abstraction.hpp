#pragma once

#include <optional>

#include "capkit/sim.hpp"

namespace capkit {

// Names usable as arguments of a given predicate argument type. "any" covers
// the player and every declared object; "cell" covers the grid cells.
std::vector<std::string> names_of_type(const World& w, const std::string& type);

// Fill w.vocab / w.compiled. build_world calls this; a hand-rolled World
// needs it before abstract_state or ground_vocabulary.
void finalize_vocabulary(World& w);

// Every ground atom of the declared vocabulary over this instance, sorted.
const std::vector<GroundAtom>& ground_vocabulary(const World& w);

// Truth of one vocabulary atom in a concrete state. Reference semantics; the
// compiled fast path in abstract_state must agree with it atom for atom.
bool evaluate(const World& w, const ConcreteState& s, const GroundAtom& atom);

// The exact set of true vocabulary atoms.
AbstractState abstract_state(const World& w, const ConcreteState& s);

// Concrete states differing from `s` in exactly one dynamic field: the player
// or one object relocated (honoring each type's legal off-grid positions),
// one liveness flag, or one movable cell feature. Self-witnessing but not
// necessarily reachable; the pool experiments synthesize start states from.
std::vector<ConcreteState> concrete_neighbors(const World& w, const ConcreteState& s);

// First concrete state (deterministic order, player facing North) whose
// abstraction satisfies every literal: positives present, negatives absent.
// nullopt when no such state exists.
std::optional<ConcreteState> concretize(const World& w,
                                        const std::vector<GroundLiteral>& requirements);

// Exact inverse of abstract_state: succeeds only on states whose abstraction
// equals `target` under the closed world (no extra atoms).
std::optional<ConcreteState> concretize_exact(const World& w, const AbstractState& target);

}  // namespace capkit
