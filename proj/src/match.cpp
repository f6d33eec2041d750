#include "moranipd/match.hpp"

#include <cmath>

#include "moranipd/errors.hpp"
#include "moranipd/parallel.hpp"
#include "moranipd/rng.hpp"

namespace moranipd {

namespace {
constexpr std::uint64_t kCoopRateTag = 0xc09;
}

void validate_match_config(const MatchConfig& cfg) {
  if (cfg.turns < 1) throw ValidationError("turns must be >= 1");
  if (!(cfg.noise >= 0.0 && cfg.noise <= 1.0))
    throw ValidationError("noise must be in [0,1]");
  validate_matrix(cfg.matrix);
}

MatchResult play_match(const StrategySpec& a, const StrategySpec& b, const MatchConfig& cfg) {
  validate_match_config(cfg);
  Rng rng(cfg.seed);
  Player pa(a), pb(b);
  History ha, hb;

  MatchResult res;
  res.actions.reserve(static_cast<std::size_t>(cfg.turns));
  // Outcome counts indexed by (a cooperated, b cooperated).
  long long n[2][2] = {{0, 0}, {0, 0}};

  for (int t = 0; t < cfg.turns; ++t) {
    Action ea = pa.next(ha, rng);
    Action eb = pb.next(hb, rng);
    if (cfg.noise > 0.0) {
      if (rng.bernoulli(cfg.noise)) ea = flip(ea);
      if (rng.bernoulli(cfg.noise)) eb = flip(eb);
    }
    ha.push(ea, eb);
    hb.push(eb, ea);
    pa.observe(ea, eb);
    pb.observe(eb, ea);
    ++n[coop_bit(ea)][coop_bit(eb)];
    res.actions.emplace_back(ea, eb);
  }

  const PayoffMatrix& m = cfg.matrix;
  const auto nd = [&](int i, int j) { return static_cast<double>(n[i][j]); };
  res.totals = {nd(1, 1) * m.r + nd(1, 0) * m.s + nd(0, 1) * m.t + nd(0, 0) * m.p,
                nd(1, 1) * m.r + nd(1, 0) * m.t + nd(0, 1) * m.s + nd(0, 0) * m.p};
  res.means = {res.totals.first / cfg.turns, res.totals.second / cfg.turns};
  return res;
}

std::vector<double> cooperation_rate(const StrategySpec& focal,
                                     const std::vector<StrategySpec>& roster, int reps,
                                     const MatchConfig& cfg, int jobs) {
  if (reps < 1) throw ValidationError("reps must be >= 1");
  if (roster.empty()) throw ValidationError("roster must not be empty");
  validate_match_config(cfg);

  const std::size_t turns = static_cast<std::size_t>(cfg.turns);
  // Per-opponent counts, merged in index order afterwards, so the result does
  // not depend on the thread count.
  std::vector<std::vector<long long>> counts(roster.size(),
                                             std::vector<long long>(turns, 0));
  parallel_for(roster.size(), jobs, [&](std::size_t oi) {
    for (int rep = 0; rep < reps; ++rep) {
      MatchConfig mc = cfg;
      mc.seed = derive_seed(cfg.seed, kCoopRateTag, oi, static_cast<std::uint64_t>(rep));
      const MatchResult res = play_match(focal, roster[oi], mc);
      for (std::size_t t = 0; t < turns; ++t)
        counts[oi][t] += res.actions[t].first == Action::C ? 1 : 0;
    }
  });

  const double total = static_cast<double>(roster.size()) * reps;
  std::vector<double> rates(turns, 0.0);
  for (std::size_t oi = 0; oi < roster.size(); ++oi)
    for (std::size_t t = 0; t < turns; ++t) rates[t] += static_cast<double>(counts[oi][t]);
  for (double& r : rates) r /= total;
  return rates;
}

}  // namespace moranipd
