#pragma once

#include "capkit/model.hpp"

namespace capkit {

// Consecutive distinct pairs from every trace, first-appearance order,
// duplicates removed globally.
std::vector<std::pair<AbstractState, AbstractState>> extract_transitions(
    const std::vector<std::vector<AbstractState>>& traces);

// Lift one observed transition: choose the parameter objects (everything the
// delta mentions, the player and its cell, and the source cells of mentioned
// objects), restrict the source to atoms over those objects as the candidate
// precondition, and seed every site's mode set from the observation. The
// returned capability has canonical parameter numbering and one grounding;
// its name is left empty.
Capability lift_transition(const World& w, const AbstractState& src, const AbstractState& dst);

// A capability's identity: parameter types plus fixed add/delete effects,
// rendered under the parameter ordering that minimizes the string. Two
// capabilities describe the same mechanic iff their signatures are equal,
// regardless of display numbering or which instance objects seeded them.
std::string skeleton_signature(const Capability& c);

// Group lifts with equal skeleton signatures, intersecting site mode sets
// and pooling groundings. Names assigned c1.. in first-appearance order.
CapabilityModel merge_skeletons(const std::vector<Capability>& lifted);

CapabilityModel induce_model(const World& w,
                             const std::vector<std::vector<AbstractState>>& traces);

}  // namespace capkit
