#include "moranipd/strategy.hpp"

#include <cmath>

#include "moranipd/errors.hpp"
#include "moranipd/rng.hpp"

namespace moranipd {

namespace {

bool prob_in_unit(double p) { return std::isfinite(p) && p >= 0.0 && p <= 1.0; }

// True iff a draw can actually change the outcome.
bool prob_is_random(double p) { return p > 0.0 && p < 1.0; }

// Cooperate with probability p, consuming randomness only when the outcome
// is genuinely random. Degenerate probabilities must not touch the rng so
// that deterministic specs stay seed-independent.
Action draw_coop(double p, Rng& rng) {
  if (p <= 0.0) return Action::D;
  if (p >= 1.0) return Action::C;
  return rng.bernoulli(p) ? Action::C : Action::D;
}

}  // namespace

void validate_fsm(const FsmSpec& spec) {
  if (spec.num_states <= 0) throw ValidationError("fsm: num_states must be positive");
  if (spec.transitions.size() != static_cast<std::size_t>(spec.num_states))
    throw ValidationError("fsm: non-total transition table");
  if (spec.initial_state < 0 || spec.initial_state >= spec.num_states)
    throw ValidationError("fsm: initial state out of range");
  for (const auto& row : spec.transitions)
    for (const auto& e : row)
      if (e.next_state < 0 || e.next_state >= spec.num_states)
        throw ValidationError("fsm: next state out of range");
}

std::size_t LookupSpec::key(const History& h) const {
  std::size_t k = 0;
  const std::size_t n = h.size();
  for (int i = 0; i < first_k; ++i)
    k = (k << 1) | static_cast<std::size_t>(coop_bit(h.opp[static_cast<std::size_t>(i)]));
  for (int i = depth; i > 0; --i)
    k = (k << 1) | static_cast<std::size_t>(coop_bit(h.own[n - static_cast<std::size_t>(i)]));
  for (int i = depth; i > 0; --i)
    k = (k << 1) | static_cast<std::size_t>(coop_bit(h.opp[n - static_cast<std::size_t>(i)]));
  return k;
}

void validate_lookup(const LookupSpec& spec) {
  if (spec.first_k < 0) throw ValidationError("lookup: first_k must be >= 0");
  if (spec.depth < 1) throw ValidationError("lookup: depth must be >= 1");
  if (spec.first_k + 2 * spec.depth > 24)
    throw ValidationError("lookup: key width over 24 bits");
  if (spec.opening.size() != spec.opening_length())
    throw ValidationError("lookup: opening length must be max(first_k, depth)");
  if (spec.table.size() != spec.table_size())
    throw ValidationError("lookup: table must cover every key");
  for (double p : spec.table)
    if (!prob_in_unit(p)) throw ValidationError("lookup: probability outside [0,1]");
}

bool StrategySpec::stochastic() const {
  struct Visitor {
    bool operator()(const ScriptedSpec& s) const {
      return s.kind == ScriptedKind::Random && prob_is_random(s.param);
    }
    bool operator()(const MemoryOneSpec& s) const {
      return prob_is_random(s.p_cc) || prob_is_random(s.p_cd) ||
             prob_is_random(s.p_dc) || prob_is_random(s.p_dd);
    }
    bool operator()(const FsmSpec&) const { return false; }
    bool operator()(const LookupSpec& s) const {
      for (double p : s.table)
        if (prob_is_random(p)) return true;
      return false;
    }
  };
  return std::visit(Visitor{}, behavior);
}

Player::Player(const StrategySpec& spec) : spec_(&spec) { reset(); }

void Player::reset() {
  round_ = 0;
  opp_defections_ = 0;
  opp_defections_from_round3_ = 0;
  if (const auto* fsm = std::get_if<FsmSpec>(&spec_->behavior)) {
    fsm_state_ = fsm->initial_state;
    fsm_pending_ = fsm->initial_action;
  }
}

Action Player::next(const History& h, Rng& rng) const {
  const std::size_t t = h.size();
  if (const auto* s = std::get_if<ScriptedSpec>(&spec_->behavior)) {
    switch (s->kind) {
      case ScriptedKind::Cooperator:
        return Action::C;
      case ScriptedKind::Defector:
        return Action::D;
      case ScriptedKind::Alternator:
        return t == 0 ? Action::C : flip(h.own.back());
      case ScriptedKind::TitForTat:
        return t == 0 ? Action::C : h.opp.back();
      case ScriptedKind::WinStayLoseShift:
        if (t == 0) return Action::C;
        return h.opp.back() == Action::C ? h.own.back() : flip(h.own.back());
      case ScriptedKind::Random:
        return draw_coop(s->param, rng);
      case ScriptedKind::Grudger:
        return opp_defections_ == 0 ? Action::C : Action::D;
      case ScriptedKind::FoolMeOnce:
        return opp_defections_ < 2 ? Action::C : Action::D;
      case ScriptedKind::Handshake: {
        if (t == 0) return Action::C;
        if (t == 1) return Action::D;
        const bool matched = h.opp[0] == Action::C && h.opp[1] == Action::D;
        return matched ? Action::C : Action::D;
      }
      case ScriptedKind::CollectiveStrategy: {
        if (t == 0) return Action::C;
        if (t == 1) return Action::D;
        const bool matched = h.opp[0] == Action::C && h.opp[1] == Action::D;
        return (matched && opp_defections_from_round3_ == 0) ? Action::C : Action::D;
      }
      case ScriptedKind::Aggravater:
        if (t < 3) return Action::D;
        return opp_defections_ == 0 ? Action::C : Action::D;
    }
    throw ValidationError("unknown scripted kind");
  }
  if (const auto* s = std::get_if<MemoryOneSpec>(&spec_->behavior)) {
    if (t == 0) return s->initial;
    return draw_coop(s->prob(h.own.back(), h.opp.back()), rng);
  }
  if (std::get_if<FsmSpec>(&spec_->behavior)) return fsm_pending_;
  const auto& s = std::get<LookupSpec>(spec_->behavior);
  if (t < s.opening_length()) return s.opening[t];
  return draw_coop(s.table[s.key(h)], rng);
}

void Player::observe(Action own_executed, Action opp_executed) {
  (void)own_executed;
  if (opp_executed == Action::D) {
    ++opp_defections_;
    if (round_ >= 2) ++opp_defections_from_round3_;
  }
  if (const auto* fsm = std::get_if<FsmSpec>(&spec_->behavior)) {
    const FsmSpec::Edge& e = fsm->edge(fsm_state_, opp_executed);
    fsm_state_ = e.next_state;
    fsm_pending_ = e.action;
  }
  ++round_;
}

Action next_action(const StrategySpec& spec, const History& h, Rng& rng) {
  Player p(spec);
  for (std::size_t i = 0; i < h.size(); ++i) p.observe(h.own[i], h.opp[i]);
  return p.next(h, rng);
}

FsmSpec::Edge fsm_step(const FsmSpec& spec, int current_state, Action opp_last) {
  if (current_state < 0 || current_state >= spec.num_states)
    throw ValidationError("fsm_step: state out of range");
  return spec.edge(current_state, opp_last);
}

}  // namespace moranipd
