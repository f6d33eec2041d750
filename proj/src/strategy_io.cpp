#include "moranipd/strategy_io.hpp"

#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "moranipd/errors.hpp"
#include "moranipd/io.hpp"
#include "moranipd/text.hpp"

namespace moranipd {

namespace {

struct Directive {
  int line;  // 1-based
  std::string_view text;
};

[[noreturn]] void fail(int line, const std::string& msg) {
  throw ValidationError("line " + std::to_string(line) + ": " + msg);
}

// Comments stripped, then lines split on ';'.
std::vector<Directive> directives_of(std::string_view text) {
  std::vector<Directive> out;
  int line_no = 0;
  for (std::string_view line : split_char(text, '\n')) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    for (std::string_view piece : split_char(line, ';')) {
      piece = trim(piece);
      if (!piece.empty()) out.push_back({line_no, piece});
    }
  }
  return out;
}

double parse_prob(const Directive& d, std::string_view tok) {
  double p = 0;
  try {
    p = parse_double(tok);
  } catch (const ValidationError& e) {
    fail(d.line, e.what());
  }
  if (!(p >= 0.0 && p <= 1.0)) fail(d.line, "probability outside [0,1]");
  return p;
}

Action parse_action_token(const Directive& d, std::string_view tok) {
  if (tok.size() != 1) fail(d.line, "expected C or D, got '" + std::string(tok) + "'");
  try {
    return action_from_char(tok[0]);
  } catch (const ValidationError& e) {
    fail(d.line, e.what());
  }
}

int parse_state(const Directive& d, std::string_view tok) {
  long long v = 0;
  try {
    v = parse_int(tok);
  } catch (const ValidationError& e) {
    fail(d.line, e.what());
  }
  if (v < 0 || v > 1'000'000) fail(d.line, "state id out of range");
  return static_cast<int>(v);
}

const std::map<std::string, ScriptedKind, std::less<>>& scripted_names() {
  static const std::map<std::string, ScriptedKind, std::less<>> names = {
      {"cooperator", ScriptedKind::Cooperator},
      {"defector", ScriptedKind::Defector},
      {"alternator", ScriptedKind::Alternator},
      {"titfortat", ScriptedKind::TitForTat},
      {"winstayloseshift", ScriptedKind::WinStayLoseShift},
      {"random", ScriptedKind::Random},
      {"grudger", ScriptedKind::Grudger},
      {"foolmeonce", ScriptedKind::FoolMeOnce},
      {"handshake", ScriptedKind::Handshake},
      {"collectivestrategy", ScriptedKind::CollectiveStrategy},
      {"aggravater", ScriptedKind::Aggravater},
  };
  return names;
}

std::string scripted_name(ScriptedKind kind) {
  for (const auto& [name, k] : scripted_names())
    if (k == kind) return name;
  throw ValidationError("unknown scripted kind");
}

MemoryOneSpec parse_memone(const Directive& d, const std::vector<std::string_view>& tok) {
  if (tok.size() != 6)
    fail(d.line, "memone takes <init 0|1> and four probabilities");
  MemoryOneSpec m;
  if (tok[1] == "0")
    m.initial = Action::D;
  else if (tok[1] == "1")
    m.initial = Action::C;
  else
    fail(d.line, "memone initial move must be 0 or 1");
  m.p_cc = parse_prob(d, tok[2]);
  m.p_cd = parse_prob(d, tok[3]);
  m.p_dc = parse_prob(d, tok[4]);
  m.p_dd = parse_prob(d, tok[5]);
  return m;
}

ScriptedSpec parse_scripted(const Directive& d, const std::vector<std::string_view>& tok) {
  if (tok.size() < 2) fail(d.line, "scripted takes a strategy name");
  std::string lowered(tok[1]);
  for (char& c : lowered) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  auto it = scripted_names().find(lowered);
  if (it == scripted_names().end())
    fail(d.line, "unknown scripted strategy '" + std::string(tok[1]) + "'");
  ScriptedSpec s{it->second, 0.5};
  if (it->second == ScriptedKind::Random) {
    if (tok.size() > 3) fail(d.line, "random takes at most one parameter");
    if (tok.size() == 3) s.param = parse_prob(d, tok[2]);
  } else if (tok.size() != 2) {
    fail(d.line, "'" + std::string(tok[1]) + "' takes no parameters");
  }
  return s;
}

FsmSpec parse_fsm(const std::vector<Directive>& ds, std::size_t first,
                  const std::vector<std::string_view>& head) {
  if (head.size() != 2) fail(ds[first].line, "fsm takes a state count");
  const int n = parse_state(ds[first], head[1]);
  if (n < 1) fail(ds[first].line, "fsm needs at least one state");

  FsmSpec f;
  f.num_states = n;
  f.transitions.resize(static_cast<std::size_t>(n));
  std::vector<std::array<bool, 2>> seen(static_cast<std::size_t>(n), {false, false});
  bool have_start = false;

  for (std::size_t i = first + 1; i < ds.size(); ++i) {
    const Directive& d = ds[i];
    const auto tok = split_ws(d.text);
    if (tok[0] == "start") {
      if (tok.size() != 3) fail(d.line, "start takes <state> <C|D>");
      if (have_start) fail(d.line, "duplicate start directive");
      f.initial_state = parse_state(d, tok[1]);
      f.initial_action = parse_action_token(d, tok[2]);
      have_start = true;
      continue;
    }
    if (tok.size() != 5 || tok[2] != "->")
      fail(d.line, "expected '<state> <C|D> -> <state> <C|D>'");
    const int from = parse_state(d, tok[0]);
    const Action on = parse_action_token(d, tok[1]);
    const int to = parse_state(d, tok[3]);
    const Action out = parse_action_token(d, tok[4]);
    if (from >= n || to >= n) fail(d.line, "state id out of range");
    auto& flag = seen[static_cast<std::size_t>(from)][static_cast<std::size_t>(coop_bit(on))];
    if (flag) fail(d.line, "duplicate transition");
    flag = true;
    f.transitions[static_cast<std::size_t>(from)][coop_bit(on)] = {to, out};
  }

  if (!have_start) fail(ds[first].line, "fsm needs a start directive");
  for (const auto& row : seen)
    if (!row[0] || !row[1]) fail(ds[first].line, "non-total transition table");
  if (f.initial_state >= n) fail(ds[first].line, "start state out of range");
  validate_fsm(f);
  return f;
}

LookupSpec parse_lookup(const Directive& d, const std::vector<std::string_view>& tok) {
  if (tok.size() < 4) fail(d.line, "lookup takes <first_k> <depth> <opening> <probabilities>");
  LookupSpec s;
  s.first_k = parse_state(d, tok[1]);
  s.depth = parse_state(d, tok[2]);
  if (s.depth < 1) fail(d.line, "lookup depth must be >= 1");
  if (s.first_k + 2 * s.depth > 24) fail(d.line, "lookup key width over 24 bits");
  for (char c : tok[3]) s.opening.push_back(parse_action_token(d, std::string_view(&c, 1)));
  if (s.opening.size() != s.opening_length())
    fail(d.line, "opening must have max(first_k, depth) moves");
  const std::size_t want = s.table_size();
  if (tok.size() != 4 + want)
    fail(d.line, "lookup table needs " + std::to_string(want) + " probabilities, got " +
                     std::to_string(tok.size() - 4));
  s.table.reserve(want);
  for (std::size_t i = 0; i < want; ++i) s.table.push_back(parse_prob(d, tok[4 + i]));
  return s;
}

std::string default_name(const StrategySpec& s) {
  struct Visitor {
    std::string operator()(const ScriptedSpec& v) const { return scripted_name(v.kind); }
    std::string operator()(const MemoryOneSpec&) const { return "memone"; }
    std::string operator()(const FsmSpec& v) const {
      return "fsm" + std::to_string(v.num_states);
    }
    std::string operator()(const LookupSpec&) const { return "lookup"; }
  };
  return std::visit(Visitor{}, s.behavior);
}

}  // namespace

StrategySpec parse_strategy(std::string_view text, std::string name) {
  const auto ds = directives_of(text);
  if (ds.empty()) throw ValidationError("line 1: empty strategy text");
  const auto head = split_ws(ds[0].text);

  StrategySpec spec;
  if (head[0] == "memone") {
    if (ds.size() > 1) fail(ds[1].line, "memone is a single directive");
    spec.behavior = parse_memone(ds[0], head);
  } else if (head[0] == "scripted") {
    if (ds.size() > 1) fail(ds[1].line, "scripted is a single directive");
    spec.behavior = parse_scripted(ds[0], head);
  } else if (head[0] == "fsm") {
    spec.behavior = parse_fsm(ds, 0, head);
  } else if (head[0] == "lookup") {
    if (ds.size() > 1) fail(ds[1].line, "lookup is a single directive");
    spec.behavior = parse_lookup(ds[0], head);
  } else {
    fail(ds[0].line, "unknown strategy kind '" + std::string(head[0]) + "'");
  }
  spec.name = name.empty() ? default_name(spec) : std::move(name);
  return spec;
}

std::string serialize_strategy(const StrategySpec& spec) {
  struct Visitor {
    std::string operator()(const ScriptedSpec& s) const {
      std::string out = "scripted " + scripted_name(s.kind);
      if (s.kind == ScriptedKind::Random) out += " " + format_double(s.param);
      return out;
    }
    std::string operator()(const MemoryOneSpec& s) const {
      return "memone " + std::string(s.initial == Action::C ? "1" : "0") + " " +
             format_double(s.p_cc) + " " + format_double(s.p_cd) + " " +
             format_double(s.p_dc) + " " + format_double(s.p_dd);
    }
    std::string operator()(const FsmSpec& s) const {
      std::string out = "fsm " + std::to_string(s.num_states);
      out += "; start " + std::to_string(s.initial_state) + " " +
             std::string(1, to_char(s.initial_action));
      for (int st = 0; st < s.num_states; ++st)
        for (Action a : {Action::C, Action::D}) {
          const auto& e = s.edge(st, a);
          out += "; " + std::to_string(st) + " " + std::string(1, to_char(a)) + " -> " +
                 std::to_string(e.next_state) + " " + std::string(1, to_char(e.action));
        }
      return out;
    }
    std::string operator()(const LookupSpec& s) const {
      std::string out =
          "lookup " + std::to_string(s.first_k) + " " + std::to_string(s.depth) + " ";
      for (Action a : s.opening) out += to_char(a);
      for (double p : s.table) out += " " + format_double(p);
      return out;
    }
  };
  return std::visit(Visitor{}, spec.behavior);
}

std::vector<StrategySpec> parse_roster(std::string_view text) {
  std::vector<StrategySpec> roster;
  std::set<std::string> names;
  int line_no = 0;
  for (std::string_view line : split_char(text, '\n')) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() != '"') fail(line_no, "expected '\"<display name>\" = <strategy text>'");
    const auto close = line.find('"', 1);
    if (close == std::string_view::npos) fail(line_no, "unterminated display name");
    std::string name(line.substr(1, close - 1));
    if (name.empty()) fail(line_no, "empty display name");
    std::string_view rest = trim(line.substr(close + 1));
    if (rest.empty() || rest.front() != '=') fail(line_no, "expected '=' after display name");
    rest = trim(rest.substr(1));
    if (rest.empty()) fail(line_no, "missing strategy text");
    if (!names.insert(name).second) fail(line_no, "duplicate display name '" + name + "'");
    try {
      roster.push_back(parse_strategy(rest, name));
    } catch (const ValidationError& e) {
      fail(line_no, "in strategy '" + name + "': " + e.what());
    }
  }
  return roster;
}

std::string serialize_roster(const std::vector<StrategySpec>& roster) {
  std::string out;
  for (const auto& s : roster) {
    if (s.name.find('"') != std::string::npos)
      throw ValidationError("display name may not contain '\"': " + s.name);
    out += "\"" + s.name + "\" = " + serialize_strategy(s) + "\n";
  }
  return out;
}

std::vector<StrategySpec> load_roster_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open roster file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_roster(buf.str());
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

void save_roster_file(const std::vector<StrategySpec>& roster, const std::string& path) {
  try {
    write_text_file(path, serialize_roster(roster));
  } catch (const ValidationError&) {
    throw ValidationError("cannot write roster file: " + path);
  }
}

std::uint64_t roster_hash(const std::vector<StrategySpec>& roster) {
  return fnv1a64(serialize_roster(roster));
}

}  // namespace moranipd
