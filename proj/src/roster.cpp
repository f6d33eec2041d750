#include "moranipd/strategy.hpp"

namespace moranipd {

namespace {

StrategySpec scripted(std::string name, ScriptedKind kind, double param = 0.5) {
  return StrategySpec{std::move(name), ScriptedSpec{kind, param}};
}

StrategySpec memone(std::string name, double cc, double cd, double dc, double dd) {
  return StrategySpec{std::move(name), MemoryOneSpec{Action::C, cc, cd, dc, dd}};
}

// Ashlock's Fortress machines: a handshake of num_states - 1 defections, then
// mutual cooperation; any deviation resets to the start. Teammates that know
// the handshake cooperate, everyone else gets defection.
FsmSpec fortress(int num_states) {
  FsmSpec f;
  f.num_states = num_states;
  f.initial_state = 0;
  f.initial_action = Action::D;
  f.transitions.resize(static_cast<std::size_t>(num_states));
  const int last = num_states - 1;
  for (int s = 0; s < last; ++s) {
    const Action out = (s + 1 == last) ? Action::C : Action::D;
    f.transitions[static_cast<std::size_t>(s)][coop_bit(Action::D)] = {s + 1, out};
    f.transitions[static_cast<std::size_t>(s)][coop_bit(Action::C)] = {0, Action::D};
  }
  // Cooperation state: stay while the opponent cooperates, restart otherwise.
  f.transitions[static_cast<std::size_t>(last)][coop_bit(Action::C)] = {last, Action::C};
  f.transitions[static_cast<std::size_t>(last)][coop_bit(Action::D)] = {0, Action::D};
  return f;
}

}  // namespace

std::vector<StrategySpec> builtin_roster() {
  std::vector<StrategySpec> r;
  r.reserve(20);
  r.push_back(scripted("Cooperator", ScriptedKind::Cooperator));
  r.push_back(scripted("Defector", ScriptedKind::Defector));
  r.push_back(scripted("Alternator", ScriptedKind::Alternator));
  r.push_back(scripted("Tit For Tat", ScriptedKind::TitForTat));
  r.push_back(scripted("Win Stay Lose Shift", ScriptedKind::WinStayLoseShift));
  r.push_back(scripted("Random", ScriptedKind::Random, 0.5));
  r.push_back(scripted("Grudger", ScriptedKind::Grudger));
  r.push_back(scripted("Fool Me Once", ScriptedKind::FoolMeOnce));
  r.push_back(scripted("Handshake", ScriptedKind::Handshake));
  r.push_back(scripted("Collective Strategy", ScriptedKind::CollectiveStrategy));
  r.push_back(scripted("Aggravater", ScriptedKind::Aggravater));
  r.push_back(StrategySpec{"Fortress3", fortress(3)});
  r.push_back(StrategySpec{"Fortress4", fortress(4)});
  r.push_back(memone("Grudger Mem1", 1, 0, 0, 0));
  r.push_back(memone("WSLS Mem1", 1, 0, 0, 1));
  r.push_back(memone("TFT Mem1", 1, 0, 1, 0));
  // Generous TFT at the default matrix: forgive with probability
  // min(1 - (T-R)/(R-S), (R-P)/(T-P)) = 1/3.
  r.push_back(memone("GTFT", 1, 1.0 / 3.0, 1, 1.0 / 3.0));
  r.push_back(memone("PSO Gambler Mem1", 1, 0.52173487, 0, 0.12050939));
  // Published extortionate four-vectors at (3, 0, 5, 1), extortion factors
  // chi = 2 and chi = 4.
  r.push_back(memone("ZD-Extort-2", 8.0 / 9.0, 0.5, 1.0 / 3.0, 0));
  r.push_back(memone("ZD-Extort-4", 11.0 / 17.0, 0, 8.0 / 17.0, 0));
  return r;
}

}  // namespace moranipd
