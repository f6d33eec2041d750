#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "moranipd/game.hpp"
#include "moranipd/rng.hpp"

namespace moranipd {
class Rng;

// Executed actions of one match so far, as seen by one side: own[i] and
// opp[i] are the post-noise moves of round i. Always equal length; cleared
// between matches (players carry nothing across matches).
struct History {
  std::vector<Action> own;
  std::vector<Action> opp;

  std::size_t size() const { return own.size(); }
  bool empty() const { return own.empty(); }
  void push(Action own_executed, Action opp_executed) {
    own.push_back(own_executed);
    opp.push_back(opp_executed);
  }
  void clear() {
    own.clear();
    opp.clear();
  }
};

// Memory-one strategy: cooperate with a probability selected by the previous
// round's (own, opp) outcome. The four probabilities are listed in the
// conventional order (CC, CD, DC, DD), own move first.
struct MemoryOneSpec {
  Action initial = Action::C;
  double p_cc = 1.0;
  double p_cd = 0.0;
  double p_dc = 0.0;
  double p_dd = 0.0;

  double prob(Action own_last, Action opp_last) const {
    if (own_last == Action::C) return opp_last == Action::C ? p_cc : p_cd;
    return opp_last == Action::C ? p_dc : p_dd;
  }
  bool operator==(const MemoryOneSpec&) const = default;
};

// Finite state machine: a total map (state, opponent's last executed action)
// -> (next state, own next action). The machine moves only on what the
// opponent actually did, so noise feeds back into its state.
struct FsmSpec {
  struct Edge {
    int next_state = 0;
    Action action = Action::C;
    bool operator==(const Edge&) const = default;
  };

  int num_states = 1;
  int initial_state = 0;
  Action initial_action = Action::C;
  // transitions[state][coop_bit(opponent action)]
  std::vector<std::array<Edge, 2>> transitions;

  const Edge& edge(int state, Action opp_last) const {
    return transitions[static_cast<std::size_t>(state)][coop_bit(opp_last)];
  }
  bool operator==(const FsmSpec&) const = default;
};

// Throws ValidationError if the transition table is not total over
// num_states x {C, D} or any id is out of range.
void validate_fsm(const FsmSpec& spec);

// Lookup-table strategy keyed on the opponent's first first_k moves plus the
// trailing `depth` rounds of both players. Key encoding (see key()):
// opponent-first-k bits, then own trailing bits, then opponent trailing bits,
// oldest round first within each group (most recent last), C = 1 / D = 0,
// first bit most significant. While fewer than max(first_k, depth) rounds
// have been played, the strategy plays its scripted opening.
struct LookupSpec {
  int first_k = 0;
  int depth = 1;
  std::vector<Action> opening;  // length max(first_k, depth)
  std::vector<double> table;    // size 2^(first_k + 2*depth), P(cooperate)

  std::size_t table_size() const {
    return std::size_t{1} << (first_k + 2 * depth);
  }
  std::size_t opening_length() const {
    return static_cast<std::size_t>(first_k > depth ? first_k : depth);
  }
  // pre: h.size() >= opening_length()
  std::size_t key(const History& h) const;

  bool operator==(const LookupSpec&) const = default;
};

void validate_lookup(const LookupSpec& spec);

// The named classics. Behaviors (all "last move" talk refers to executed,
// post-noise actions):
//   Cooperator / Defector  constant C / constant D
//   Alternator             starts C, then flips its own previous move
//   TitForTat              starts C, then copies the opponent's previous move
//   WinStayLoseShift       starts C; repeats own move after opponent C,
//                          flips it after opponent D (Pavlov)
//   Random                 cooperates with probability param each round
//   Grudger                C until the opponent's first defection, D forever
//   FoolMeOnce             C until the opponent's second defection (not
//                          necessarily consecutive), D forever after
//   Handshake              opens C,D; cooperates forever iff the opponent's
//                          first two moves were exactly C,D, else defects
//                          forever (never punishes post-handshake defection)
//   CollectiveStrategy     opens C,D; thereafter cooperates only with
//                          opponents that matched the handshake and have not
//                          defected since round 3; defects forever otherwise
//   Aggravater             opens D,D,D, then plays Grudger on the full
//                          history (any defection so far means D forever)
enum class ScriptedKind : std::uint8_t {
  Cooperator,
  Defector,
  Alternator,
  TitForTat,
  WinStayLoseShift,
  Random,
  Grudger,
  FoolMeOnce,
  Handshake,
  CollectiveStrategy,
  Aggravater,
};

struct ScriptedSpec {
  ScriptedKind kind = ScriptedKind::Cooperator;
  double param = 0.5;  // Random's cooperation probability; unused otherwise

  bool operator==(const ScriptedSpec&) const = default;
};

// A named strategy of any kind. The stochastic flag is derived, not stored:
// it is true iff some random draw can change the returned action.
struct StrategySpec {
  std::string name;
  std::variant<ScriptedSpec, MemoryOneSpec, FsmSpec, LookupSpec> behavior;

  bool stochastic() const;
  bool operator==(const StrategySpec&) const = default;
};

// Per-match execution state for one side. next() picks the move for round
// h.size() without mutating logical state (only the rng advances, and only
// for stochastic specs); observe() feeds back the executed actions of the
// round just played.
class Player {
 public:
  explicit Player(const StrategySpec& spec);

  void reset();
  Action next(const History& h, Rng& rng) const;
  void observe(Action own_executed, Action opp_executed);

  const StrategySpec& spec() const { return *spec_; }

 private:
  const StrategySpec* spec_;
  std::size_t round_ = 0;
  int opp_defections_ = 0;
  int opp_defections_from_round3_ = 0;
  int fsm_state_ = 0;
  Action fsm_pending_ = Action::C;
};

// Stateless convenience: the action spec plays at history h. Equivalent to
// replaying h through a fresh Player; for deterministic specs this is a pure
// function of (spec, h).
Action next_action(const StrategySpec& spec, const History& h, Rng& rng);

// One FSM transition; pre: current_state < num_states.
FsmSpec::Edge fsm_step(const FsmSpec& spec, int current_state, Action opp_last);

// The default study roster: the scripted classics above, Fortress3/Fortress4
// as explicit FSMs, and the standard memory-one entries (Grudger, WSLS, TFT,
// GTFT, PSO Gambler Mem1, two extortionate four-vectors).
std::vector<StrategySpec> builtin_roster();

}  // namespace moranipd
