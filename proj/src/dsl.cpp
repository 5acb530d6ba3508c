#include "capkit/dsl.hpp"

#include <random>
#include <sstream>

namespace capkit {

std::string mechanics_name(Mechanics m) {
  switch (m) {
    case Mechanics::Zelda: return "zelda";
    case Mechanics::Pasta: return "pasta";
    case Mechanics::Escape: return "escape";
    case Mechanics::Snowman: return "snowman";
  }
  return "?";
}

static std::optional<Mechanics> mechanics_from(const std::string& s) {
  if (s == "zelda") return Mechanics::Zelda;
  if (s == "pasta") return Mechanics::Pasta;
  if (s == "escape") return Mechanics::Escape;
  if (s == "snowman") return Mechanics::Snowman;
  return std::nullopt;
}

namespace {

struct Lines {
  std::vector<std::string> raw;

  explicit Lines(const std::string& text) {
    std::string cur;
    for (char c : text) {
      if (c == '\n') {
        raw.push_back(cur);
        cur.clear();
      } else if (c != '\r') {
        cur += c;
      }
    }
    if (!cur.empty()) raw.push_back(cur);
  }
};

std::vector<std::string> tokens_of(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream is(line);
  std::string t;
  while (is >> t) out.push_back(t);
  return out;
}

bool blank_or_comment(const std::string& line) {
  for (char c : line) {
    if (c == ' ' || c == '\t') continue;
    return c == '#';
  }
  return true;
}

int to_int(const std::string& t, const std::string& what, int line_no) {
  try {
    size_t pos = 0;
    int v = std::stoi(t, &pos);
    if (pos != t.size()) throw std::invalid_argument(t);
    return v;
  } catch (const std::exception&) {
    throw ParseError("expected integer for " + what + ", got '" + t + "'", line_no);
  }
}

}  // namespace

DomainSpec parse_domain(const std::string& text) {
  Lines lines(text);
  DomainSpec d;

  auto first = lines.raw.empty() ? std::vector<std::string>{} : tokens_of(lines.raw[0]);
  if (first.size() != 2 || first[0] != "domain")
    throw ParseError("expected 'domain <name>'", 1);
  d.name = first[1];

  bool have_mechanics = false;
  for (size_t i = 1; i < lines.raw.size(); ++i) {
    int ln = static_cast<int>(i) + 1;
    const std::string& line = lines.raw[i];
    if (blank_or_comment(line)) continue;
    auto tok = tokens_of(line);

    if (tok[0] == "mechanics") {
      if (tok.size() != 2) throw ParseError("expected 'mechanics <name>'", ln);
      auto m = mechanics_from(tok[1]);
      if (!m) throw ParseError("unknown mechanics '" + tok[1] + "'", ln);
      d.mechanics = *m;
      have_mechanics = true;
    } else if (tok[0] == "types") {
      for (size_t k = 1; k < tok.size(); ++k) {
        if (d.has_type(tok[k])) throw ParseError("duplicate type '" + tok[k] + "'", ln);
        d.types.push_back(tok[k]);
      }
    } else if (tok[0] == "predicate") {
      if (tok.size() < 3) throw ParseError("expected 'predicate <name> <arity> [types...]'", ln);
      PredicateSpec p;
      p.name = tok[1];
      p.arity = to_int(tok[2], "arity", ln);
      if (p.arity < 0 || p.arity > 2)
        throw ParseError("predicate arity must be 0, 1 or 2", ln);
      if (static_cast<int>(tok.size()) - 3 != p.arity)
        throw ParseError("predicate '" + p.name + "' expects " + std::to_string(p.arity) +
                             " argument types",
                         ln);
      for (int k = 0; k < p.arity; ++k) {
        const std::string& t = tok[3 + k];
        if (t != "any" && !d.has_type(t))
          throw ParseError("unknown argument type '" + t + "'", ln);
        p.arg_types.push_back(t);
      }
      if (d.find_predicate(p.name))
        throw ParseError("duplicate predicate '" + p.name + "'", ln);
      d.predicates.push_back(std::move(p));
    } else if (tok[0] == "goals") {
      for (size_t k = 1; k < tok.size(); ++k) {
        if (tok[k] != "win" && !d.find_predicate(tok[k]))
          throw ParseError("goal predicate '" + tok[k] + "' is not declared", ln);
        d.goal_predicates.push_back(tok[k]);
      }
    } else {
      throw ParseError("unknown directive '" + tok[0] + "'", ln);
    }
  }
  if (!have_mechanics)
    throw ParseError("missing 'mechanics <name>' directive",
                     static_cast<int>(lines.raw.size()) + 1);
  return d;
}

static CellFeature feature_of_char(char c) {
  switch (c) {
    case '#': return CellFeature::Wall;
    case 'D': return CellFeature::Door;
    case 'O': return CellFeature::Hole;
    case 'G': return CellFeature::Goal;
    case 'B': return CellFeature::Block;
    default: return CellFeature::None;
  }
}

InstanceSpec parse_instance(const std::string& text, const DomainSpec& domain) {
  Lines lines(text);
  InstanceSpec inst;

  auto first = lines.raw.empty() ? std::vector<std::string>{} : tokens_of(lines.raw[0]);
  if (first.size() != 2 || first[0] != "instance")
    throw ParseError("expected 'instance <name>'", 1);
  inst.name = first[1];

  size_t i = 1;
  int map_end_line = 1;
  bool saw_grid = false, saw_map = false;

  auto cell_in_range = [&](const std::string& a) {
    if (a.rfind("cell", 0) != 0) return false;
    try {
      size_t pos = 0;
      int v = std::stoi(a.substr(4), &pos);
      return pos == a.size() - 4 && v >= 0 && v < inst.width * inst.height;
    } catch (const std::exception&) {
      return false;
    }
  };

  for (; i < lines.raw.size(); ++i) {
    int ln = static_cast<int>(i) + 1;
    const std::string& line = lines.raw[i];
    if (blank_or_comment(line)) continue;
    auto tok = tokens_of(line);

    if (tok[0] == "domain") {
      if (tok.size() != 2) throw ParseError("expected 'domain <name>'", ln);
      inst.domain_name = tok[1];
      if (inst.domain_name != domain.name)
        throw ParseError("instance declares domain '" + inst.domain_name +
                             "' but was parsed against '" + domain.name + "'",
                         ln);
    } else if (tok[0] == "grid") {
      if (tok.size() != 3) throw ParseError("expected 'grid <width> <height>'", ln);
      inst.width = to_int(tok[1], "grid width", ln);
      inst.height = to_int(tok[2], "grid height", ln);
      if (inst.width < 1 || inst.height < 1)
        throw ParseError("grid dimensions must be positive", ln);
      saw_grid = true;
    } else if (tok[0] == "map") {
      if (!saw_grid) throw ParseError("'map' before 'grid'", ln);
      if (saw_map) throw ParseError("duplicate 'map' section", ln);
      saw_map = true;
      size_t r = 0;
      for (++i; i < lines.raw.size(); ++i) {
        int mln = static_cast<int>(i) + 1;
        const std::string& row = lines.raw[i];
        if (tokens_of(row) == std::vector<std::string>{"endmap"}) break;
        if (static_cast<int>(r) >= inst.height)
          throw ParseError("map has more than " + std::to_string(inst.height) + " rows", mln);
        if (static_cast<int>(row.size()) != inst.width)
          throw ParseError("map row " + std::to_string(r + 1) + " has " +
                               std::to_string(row.size()) + " characters, expected " +
                               std::to_string(inst.width),
                           mln);
        for (int c = 0; c < inst.width; ++c) {
          if (row[c] == 'A') {
            if (inst.agent_row >= 0) throw ParseError("multiple agent placements", mln);
            inst.agent_row = static_cast<int>(r);
            inst.agent_col = c;
          }
        }
        inst.rows.push_back(row);
        ++r;
      }
      if (i >= lines.raw.size())
        throw ParseError("missing 'endmap'", static_cast<int>(lines.raw.size()) + 1);
      if (static_cast<int>(r) != inst.height)
        throw ParseError("map has " + std::to_string(r) + " rows, expected " +
                             std::to_string(inst.height),
                         static_cast<int>(i) + 1);
      map_end_line = static_cast<int>(i) + 1;
    } else if (tok[0] == "object") {
      if (tok.size() != 4) throw ParseError("expected 'object <symbol> <type> <name>'", ln);
      if (tok[1].size() != 1) throw ParseError("object symbol must be one character", ln);
      ObjectDecl o;
      o.symbol = tok[1][0];
      o.type = tok[2];
      o.name = tok[3];
      if (o.type == "player" || o.type == "cell" || !domain.has_type(o.type))
        throw ParseError("unknown object type '" + o.type + "'", ln);
      if (feature_of_char(o.symbol) != CellFeature::None || o.symbol == 'A' || o.symbol == '.')
        throw ParseError("object symbol '" + std::string(1, o.symbol) + "' is reserved", ln);
      for (const auto& other : inst.objects) {
        if (other.symbol == o.symbol)
          throw ParseError("duplicate object symbol '" + std::string(1, o.symbol) + "'", ln);
        if (other.name == o.name)
          throw ParseError("duplicate object name '" + o.name + "'", ln);
      }
      inst.objects.push_back(std::move(o));
    } else if (tok[0] == "goal") {
      GoalLiteral g;
      size_t k = 1;
      if (k < tok.size() && tok[k] == "not") {
        g.negated = true;
        ++k;
      }
      if (k >= tok.size()) throw ParseError("expected 'goal [not] <predicate> [args...]'", ln);
      g.pred = tok[k++];
      for (; k < tok.size(); ++k) g.args.push_back(tok[k]);

      bool allowed = false;
      for (const auto& gp : domain.goal_predicates) allowed = allowed || gp == g.pred;
      if (!allowed)
        throw ParseError("goal predicate '" + g.pred + "' is not in the domain's goals", ln);
      if (g.pred == "win") {
        if (g.negated || !g.args.empty())
          throw ParseError("'win' goal takes no arguments and cannot be negated", ln);
      } else {
        const PredicateSpec* p = domain.find_predicate(g.pred);
        if (static_cast<int>(g.args.size()) != p->arity)
          throw ParseError("goal predicate '" + g.pred + "' expects " +
                               std::to_string(p->arity) + " arguments",
                           ln);
      }
      inst.goals.push_back(std::move(g));
    } else {
      throw ParseError("unknown directive '" + tok[0] + "'", ln);
    }
  }

  if (inst.domain_name.empty())
    throw ParseError("missing 'domain <name>' directive", static_cast<int>(lines.raw.size()) + 1);
  if (!saw_map) throw ParseError("missing 'map' section", static_cast<int>(lines.raw.size()) + 1);
  if (inst.agent_row < 0) throw ParseError("missing agent placement", map_end_line);

  // Decode features and bind object symbols.
  inst.features.assign(static_cast<size_t>(inst.width) * inst.height, CellFeature::None);
  std::vector<int> symbol_count(inst.objects.size(), 0);
  for (int r = 0; r < inst.height; ++r) {
    for (int c = 0; c < inst.width; ++c) {
      char ch = inst.rows[r][c];
      if (ch == '.' || ch == 'A') continue;
      CellFeature f = feature_of_char(ch);
      if (f != CellFeature::None) {
        inst.features[static_cast<size_t>(r) * inst.width + c] = f;
        continue;
      }
      bool bound = false;
      for (size_t oi = 0; oi < inst.objects.size(); ++oi) {
        if (inst.objects[oi].symbol == ch) {
          if (symbol_count[oi]++)
            throw ParseError("map symbol '" + std::string(1, ch) + "' appears more than once",
                             map_end_line);
          inst.objects[oi].row = r;
          inst.objects[oi].col = c;
          bound = true;
          break;
        }
      }
      if (!bound)
        throw ParseError("unbound map symbol '" + std::string(1, ch) + "'", map_end_line);
    }
  }
  for (size_t oi = 0; oi < inst.objects.size(); ++oi) {
    if (!symbol_count[oi])
      throw ParseError("object '" + inst.objects[oi].name + "' symbol '" +
                           std::string(1, inst.objects[oi].symbol) + "' not on map",
                       map_end_line);
  }

  // Validate goal arguments now that objects and grid are known.
  for (const auto& g : inst.goals) {
    if (g.pred == "win") continue;
    const PredicateSpec* p = domain.find_predicate(g.pred);
    for (int k = 0; k < p->arity; ++k) {
      const std::string& want = p->arg_types[k];
      const std::string& a = g.args[k];
      if (want == "cell") {
        if (!cell_in_range(a))
          throw ParseError("goal argument '" + a + "' is not a cell of this grid",
                           map_end_line);
      } else {
        const ObjectDecl* found = nullptr;
        for (const auto& o : inst.objects)
          if (o.name == a) found = &o;
        if (!found)
          throw ParseError("goal argument '" + a + "' is not a declared object", map_end_line);
        if (want != "any" && found->type != want)
          throw ParseError("goal argument '" + a + "' has type '" + found->type +
                               "', expected '" + want + "'",
                           map_end_line);
      }
    }
  }
  return inst;
}

std::string serialize_domain(const DomainSpec& d) {
  std::ostringstream os;
  os << "domain " << d.name << "\n";
  os << "mechanics " << mechanics_name(d.mechanics) << "\n";
  if (!d.types.empty()) {
    os << "types";
    for (const auto& t : d.types) os << " " << t;
    os << "\n";
  }
  for (const auto& p : d.predicates) {
    os << "predicate " << p.name << " " << p.arity;
    for (const auto& t : p.arg_types) os << " " << t;
    os << "\n";
  }
  if (!d.goal_predicates.empty()) {
    os << "goals";
    for (const auto& g : d.goal_predicates) os << " " << g;
    os << "\n";
  }
  return os.str();
}

std::string serialize_instance(const InstanceSpec& inst) {
  std::ostringstream os;
  os << "instance " << inst.name << "\n";
  os << "domain " << inst.domain_name << "\n";
  os << "grid " << inst.width << " " << inst.height << "\n";
  os << "map\n";
  for (const auto& r : inst.rows) os << r << "\n";
  os << "endmap\n";
  for (const auto& o : inst.objects)
    os << "object " << o.symbol << " " << o.type << " " << o.name << "\n";
  for (const auto& g : inst.goals) {
    os << "goal";
    if (g.negated) os << " not";
    os << " " << g.pred;
    for (const auto& a : g.args) os << " " << a;
    os << "\n";
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Random instance generation

namespace {

// Flood fill treating walls and holes as permanent blockers; doors, blocks and
// objects are removable or consumable, so they do not break connectivity.
bool all_open_connected(const InstanceSpec& inst) {
  int W = inst.width, H = inst.height;
  auto open = [&](int r, int c) {
    CellFeature f = inst.features[static_cast<size_t>(r) * W + c];
    return f != CellFeature::Wall && f != CellFeature::Hole;
  };
  int start = -1, total = 0;
  for (int r = 0; r < H; ++r)
    for (int c = 0; c < W; ++c)
      if (open(r, c)) {
        if (start < 0) start = r * W + c;
        ++total;
      }
  if (start < 0) return false;
  std::vector<uint8_t> seen(static_cast<size_t>(W) * H, 0);
  std::vector<int> stack{start};
  seen[start] = 1;
  int count = 0;
  while (!stack.empty()) {
    int cur = stack.back();
    stack.pop_back();
    ++count;
    int r = cur / W, c = cur % W;
    const int dr[4] = {-1, 1, 0, 0}, dc[4] = {0, 0, -1, 1};
    for (int k = 0; k < 4; ++k) {
      int nr = r + dr[k], nc = c + dc[k];
      if (nr < 0 || nr >= H || nc < 0 || nc >= W) continue;
      int ni = nr * W + nc;
      if (!seen[ni] && open(nr, nc)) {
        seen[ni] = 1;
        stack.push_back(ni);
      }
    }
  }
  return count == total;
}

}  // namespace

InstanceSpec generate_instance(const DomainSpec& d, int width, int height,
                               double obstacle_fraction, uint64_t seed) {
  if (width < 4 || height < 4)
    throw UsageError("generated instances need at least a 4x4 grid");
  std::mt19937_64 rng(seed);
  int walls = static_cast<int>(obstacle_fraction * width * height);

  for (int attempt = 0; attempt < 1000; ++attempt) {
    InstanceSpec inst;
    inst.name = mechanics_name(d.mechanics) + "_" + std::to_string(width) + "x" +
                std::to_string(height) + "_s" + std::to_string(seed);
    inst.domain_name = d.name;
    inst.width = width;
    inst.height = height;
    inst.rows.assign(height, std::string(width, '.'));

    auto place = [&](char ch) {
      for (int tries = 0; tries < 10000; ++tries) {
        int r = static_cast<int>(rng() % height);
        int c = static_cast<int>(rng() % width);
        if (inst.rows[r][c] == '.') {
          inst.rows[r][c] = ch;
          return r * width + c;
        }
      }
      return -1;
    };

    bool ok = true;
    for (int k = 0; k < walls && ok; ++k) ok = place('#') >= 0;
    if (!ok) continue;
    if (place('A') < 0) continue;

    int door_cell = -1;
    switch (d.mechanics) {
      case Mechanics::Zelda:
        inst.objects = {{'g', "ganon", "monster"}, {'k', "key1", "key"}, {'d', "door1", "door"}};
        inst.goals = {{true, "alive", {"ganon"}}, {false, "has_key", {}}, {false, "escaped", {}}};
        break;
      case Mechanics::Pasta:
        inst.objects = {{'k', "key1", "key"},
                        {'t', "tomato1", "ingredient"},
                        {'f', "fish1", "ingredient"},
                        {'n', "noodles1", "ingredient"},
                        {'p', "pasta1", "pasta"}};
        door_cell = place('D');
        if (door_cell < 0) continue;
        inst.goals = {{false, "has_key", {}},
                      {true, "is_door", {"cell" + std::to_string(door_cell)}},
                      {false, "pasta_cooked", {}}};
        break;
      case Mechanics::Escape:
        if (place('G') < 0 || place('B') < 0 || place('O') < 0) continue;
        inst.goals = {{false, "win", {}}};
        break;
      case Mechanics::Snowman:
        inst.objects = {{'b', "bottom", "part"}, {'m', "middle", "part"}, {'t', "top", "part"}};
        inst.goals = {{false, "placed", {"bottom"}},
                      {false, "placed", {"middle"}},
                      {false, "placed", {"top"}}};
        break;
    }
    for (auto& o : inst.objects)
      if (place(o.symbol) < 0) ok = false;
    if (!ok) continue;

    try {
      InstanceSpec parsed = parse_instance(serialize_instance(inst), d);
      if (!all_open_connected(parsed)) continue;
      return parsed;
    } catch (const ParseError&) {
      continue;
    }
  }
  throw UsageError("could not generate a connected instance for these parameters");
}

}  // namespace capkit
