#pragma once

#include <cstdint>
#include <string>
#include <utility>

namespace moranipd {

// The two prisoner's dilemma moves. D orders below C so that an action is
// also its cooperation bit: D = 0, C = 1.
enum class Action : std::uint8_t { D = 0, C = 1 };

inline Action flip(Action a) { return a == Action::C ? Action::D : Action::C; }
inline int coop_bit(Action a) { return a == Action::C ? 1 : 0; }

char to_char(Action a);
Action action_from_char(char c);  // accepts 'C'/'D' (either case); throws otherwise

// One-shot payoffs: r = mutual cooperation, s = sucker, t = temptation,
// p = mutual defection. Defaults are the conventional (3, 0, 5, 1).
struct PayoffMatrix {
  double r = 3.0;
  double s = 0.0;
  double t = 5.0;
  double p = 1.0;

  bool operator==(const PayoffMatrix&) const = default;
};

// Checks t > r > p > s and 2r > t + s (so mutual cooperation beats
// alternating exploitation). Throws ValidationError naming the violated
// inequality; returns its argument so calls can be chained.
const PayoffMatrix& validate_matrix(const PayoffMatrix& m);

// Payoffs for one round, (first player, second player).
std::pair<double, double> score_round(Action a, Action b, const PayoffMatrix& m);

}  // namespace moranipd
