#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace capkit {

// Error for any text we failed to parse (domain, instance, model, config).
// what() always ends with "at line <N>" so tools can point at the input.
struct ParseError : std::runtime_error {
  int line;
  ParseError(const std::string& msg, int line_no)
      : std::runtime_error(msg + " at line " + std::to_string(line_no)), line(line_no) {}
};

// Caller violated a documented precondition of an API (empty task list, site
// already resolved, ...).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Every mode of some literal site was eliminated by evidence: the agent's
// behaviour cannot be captured by any capability over the given vocabulary.
struct InexpressibleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Ground and lifted atoms

struct GroundAtom {
  std::string pred;
  std::vector<std::string> args;

  auto operator<=>(const GroundAtom&) const = default;

  std::string str() const {
    std::string s = "(" + pred;
    for (const auto& a : args) s += " " + a;
    s += ")";
    return s;
  }
};

struct GroundLiteral {
  bool negated = false;
  GroundAtom atom;

  auto operator<=>(const GroundLiteral&) const = default;

  std::string str() const {
    return negated ? "(not " + atom.str() + ")" : atom.str();
  }
};

// Atom over capability parameters; args index into the parameter list (1-based
// ids, matching the exported ?type<N> names).
struct LiftedAtom {
  std::string pred;
  std::vector<int> args;

  auto operator<=>(const LiftedAtom&) const = default;
};

struct LiftedLiteral {
  bool negated = false;
  LiftedAtom atom;

  auto operator<=>(const LiftedLiteral&) const = default;
};

// ---------------------------------------------------------------------------
// Abstract state: the exact set of vocabulary atoms true in a concrete state.

struct AbstractState {
  std::vector<GroundAtom> atoms;  // sorted, unique

  auto operator<=>(const AbstractState&) const = default;

  void normalize() {
    std::sort(atoms.begin(), atoms.end());
    atoms.erase(std::unique(atoms.begin(), atoms.end()), atoms.end());
  }

  bool contains(const GroundAtom& a) const {
    return std::binary_search(atoms.begin(), atoms.end(), a);
  }

  void insert(const GroundAtom& a) {
    auto it = std::lower_bound(atoms.begin(), atoms.end(), a);
    if (it == atoms.end() || *it != a) atoms.insert(it, a);
  }

  void erase(const GroundAtom& a) {
    auto it = std::lower_bound(atoms.begin(), atoms.end(), a);
    if (it != atoms.end() && *it == a) atoms.erase(it);
  }

  std::string str() const {
    std::string s = "{";
    for (size_t i = 0; i < atoms.size(); ++i) {
      if (i) s += " ";
      s += atoms[i].str();
    }
    return s + "}";
  }
};

// ---------------------------------------------------------------------------
// Literal modes. A capability site carries the set of modes still considered
// possible; discovery shrinks it to one.

enum class Mode : uint8_t { Pos = 0, Neg = 1, Off = 2 };

inline char mode_char(Mode m) {
  switch (m) {
    case Mode::Pos: return '+';
    case Mode::Neg: return '-';
    default: return '0';
  }
}

struct ModeSet {
  uint8_t bits = 0;

  static ModeSet all() { return ModeSet{7}; }
  static ModeSet of(Mode m) { return ModeSet{static_cast<uint8_t>(1u << static_cast<int>(m))}; }
  static ModeSet of(Mode a, Mode b) {
    ModeSet s = of(a);
    s.add(b);
    return s;
  }

  bool has(Mode m) const { return bits & (1u << static_cast<int>(m)); }
  void remove(Mode m) { bits &= ~(1u << static_cast<int>(m)); }
  void add(Mode m) { bits |= (1u << static_cast<int>(m)); }
  int count() const { return (bits & 1) + ((bits >> 1) & 1) + ((bits >> 2) & 1); }
  bool empty() const { return bits == 0; }

  ModeSet intersect(ModeSet o) const { return ModeSet{static_cast<uint8_t>(bits & o.bits)}; }

  // The single remaining mode; only valid when count() == 1.
  Mode sole() const {
    if (has(Mode::Pos)) return Mode::Pos;
    if (has(Mode::Neg)) return Mode::Neg;
    return Mode::Off;
  }

  std::vector<Mode> modes() const {
    std::vector<Mode> out;
    for (Mode m : {Mode::Pos, Mode::Neg, Mode::Off})
      if (has(m)) out.push_back(m);
    return out;
  }

  std::string str() const {
    std::string s;
    for (Mode m : modes()) {
      if (!s.empty()) s += "|";
      s += mode_char(m);
    }
    return s.empty() ? "none" : s;
  }

  auto operator<=>(const ModeSet&) const = default;
};

}  // namespace capkit
