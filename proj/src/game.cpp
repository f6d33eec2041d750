#include "moranipd/game.hpp"

#include <cmath>

#include "moranipd/errors.hpp"

namespace moranipd {

char to_char(Action a) { return a == Action::C ? 'C' : 'D'; }

Action action_from_char(char c) {
  if (c == 'C' || c == 'c') return Action::C;
  if (c == 'D' || c == 'd') return Action::D;
  throw ValidationError(std::string("unknown action '") + c + "', expected C or D");
}

const PayoffMatrix& validate_matrix(const PayoffMatrix& m) {
  if (!(std::isfinite(m.r) && std::isfinite(m.s) && std::isfinite(m.t) && std::isfinite(m.p)))
    throw ValidationError("payoff matrix entries must be finite");
  if (!(m.t > m.r && m.r > m.p && m.p > m.s))
    throw ValidationError("T > R > P > S violated");
  if (!(2.0 * m.r > m.t + m.s))
    throw ValidationError("2R > T + S violated");
  return m;
}

std::pair<double, double> score_round(Action a, Action b, const PayoffMatrix& m) {
  if (a == Action::C)
    return b == Action::C ? std::pair{m.r, m.r} : std::pair{m.s, m.t};
  return b == Action::C ? std::pair{m.t, m.s} : std::pair{m.p, m.p};
}

}  // namespace moranipd
