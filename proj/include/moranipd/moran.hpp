#pragma once

#include <cstdint>
#include <vector>

#include "moranipd/payoff_cache.hpp"
#include "moranipd/rng.hpp"

namespace moranipd {

// Payoffs of a two-type one-shot game: type 1 earns a against type 1 and b
// against type 2; type 2 earns c against type 1 and d against type 2.
struct PairGame {
  double a = 1.0;
  double b = 1.0;
  double c = 1.0;
  double d = 1.0;

  bool operator==(const PairGame&) const = default;
};

// Finite and nonnegative (fitness-proportionate selection needs nonnegative
// weights). Returns its argument.
const PairGame& validate_pair_game(const PairGame& g);

// Expected per-interaction payoffs when i of N individuals are type 1 and
// everyone plays everyone else (no self-interaction):
//   f_i = (a(i-1) + b(N-i)) / (N-1)   type 1
//   g_i = (c i + d(N-i-1)) / (N-1)    type 2
// pre: 1 <= i <= N-1.
std::pair<double, double> expected_payoffs(int i, int N, const PairGame& g);

struct TransitionProbs {
  double up = 0.0;
  double down = 0.0;
  double stay = 1.0;
};

// One-step transition probabilities of the induced birth-death chain on the
// type-1 count:
//   p_up   = [i f_i / (i f_i + (N-i) g_i)] * (N-i)/N
//   p_down = [(N-i) g_i / (i f_i + (N-i) g_i)] * i/N
// Throws a degenerate-fitness ValidationError when total fitness is zero.
TransitionProbs transition_probs(int i, int N, const PairGame& g);

// The whole interior chain, index 0 <-> state 1.
struct BirthDeathChain {
  int n = 2;
  std::vector<TransitionProbs> interior;  // states 1..n-1

  const TransitionProbs& at(int i) const { return interior[static_cast<std::size_t>(i - 1)]; }
};
BirthDeathChain build_chain(int N, const PairGame& g);

// Exact fixation probabilities x_0..x_N of type 1:
//   x_i = (1 + sum_{j=1}^{i-1} prod_{k<=j} gamma_k)
//       / (1 + sum_{j=1}^{N-1} prod_{k<=j} gamma_k),  gamma_j = p_down/p_up.
// Products are accumulated in the log domain so long chains neither overflow
// nor underflow; gamma_j = 0 truncates the sums exactly (states above j can
// never fall below it). If some interior p_up is zero the ratio form breaks
// down and the absorbing system is solved directly (tridiagonal elimination).
std::vector<double> exact_fixation_curve(int N, const PairGame& g);
double exact_fixation(int i, int N, const PairGame& g);

// N slots, one strategy id (cache roster index) each.
struct PopulationState {
  std::vector<int> slots;
};

struct MoranOptions {
  std::uint64_t step_cap = 10'000'000;
  // One frozen interaction draw per strategy pair per run instead of fresh
  // draws per interaction per step. Sensitivity mode; fresh draws are the
  // default and are what separates the simulated process from the mean-payoff
  // chain for stochastic strategies.
  bool frozen_draws = false;
};

// One Moran update: every unordered pair of individuals interacts once per
// step — a single cache draw supplies both sides' scores, preserving the
// within-match correlation — and each individual's fitness is the sum of its
// N-1 interaction scores. One individual reproduces with probability
// proportional to fitness (uniformly if all fitnesses are zero); a uniformly
// chosen individual — parent included — is replaced by the offspring.
PopulationState moran_step(const PopulationState& pop, const PayoffCache& cache, Rng& rng,
                           const MoranOptions& options = {});

struct FixationRun {
  int winner = -1;
  std::uint64_t steps = 0;
  bool degenerate_fitness_seen = false;  // some step fell back to uniform birth
};

// Steps until the population is homogeneous. Throws StepCapError past
// options.step_cap steps.
FixationRun run_to_fixation(PopulationState pop, const PayoffCache& cache, Rng& rng,
                            const MoranOptions& options = {});

struct FixationEstimate {
  double probability = 0.0;  // fraction of runs won by the focal strategy
  int repetitions = 0;
  int wins = 0;
  std::uint64_t master_seed = 0;
  double ci95 = 0.0;  // 1.96 * sqrt(p(1-p)/reps)

  double complement() const { return 1.0 - probability; }
};

// Monte Carlo fixation probability of strategy a starting at i copies among
// N - i copies of b. Repetition r runs on seed derive_seed(master_seed, tag,
// r), so the estimate is identical for any job count. By per-run
// complementarity, b's estimate from the (N-i, i) viewpoint is exactly
// 1 - probability.
FixationEstimate estimate_fixation(const PayoffCache& cache, std::size_t a, std::size_t b,
                                   int i, int N, int reps, std::uint64_t master_seed,
                                   const MoranOptions& options = {}, int jobs = 1);

// The two-type game of cache entries a and b, built from mean cached scores:
// (A vs A, A vs B, B vs A, B vs B). Feeding this into exact_fixation_curve
// gives the mean-payoff reference chain that validation compares against.
PairGame pair_game_from_cache(const PayoffCache& cache, std::size_t a, std::size_t b);

}  // namespace moranipd
