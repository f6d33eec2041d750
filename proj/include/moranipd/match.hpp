#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "moranipd/game.hpp"
#include "moranipd/strategy.hpp"

namespace moranipd {

struct MatchConfig {
  int turns = 200;
  double noise = 0.0;  // trembling hand: each intended action flips independently
  PayoffMatrix matrix{};
  std::uint64_t seed = 0;

  bool operator==(const MatchConfig&) const = default;
};

void validate_match_config(const MatchConfig& cfg);

struct MatchResult {
  std::vector<std::pair<Action, Action>> actions;  // executed, per turn
  std::pair<double, double> totals{0, 0};
  std::pair<double, double> means{0, 0};
};

// Plays one iterated match. Per turn: both sides pick an intended action from
// their history; with probability cfg.noise each intended action is flipped
// independently; the executed actions are what both players record and what
// gets scored. Totals are accumulated as outcome counts and multiplied out
// once, so they are exact for integer matrices.
MatchResult play_match(const StrategySpec& a, const StrategySpec& b, const MatchConfig& cfg);

// Fraction of matches, per round, in which the focal player's executed action
// was C, pooled over all (opponent, repetition) pairs. Repetition r against
// opponent o runs with seed derive_seed(cfg.seed, tag, o, r).
std::vector<double> cooperation_rate(const StrategySpec& focal,
                                     const std::vector<StrategySpec>& roster, int reps,
                                     const MatchConfig& cfg, int jobs = 1);

}  // namespace moranipd
