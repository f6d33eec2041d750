#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "moranipd/moran.hpp"
#include "moranipd/strategy.hpp"

namespace moranipd {

// Trainable strategy encodings. FSMs are the headline genotype; memory-one
// vectors and lookup tables ride the same operators (probabilities are
// re-drawn uniformly in [0,1] on mutation).
using Genotype = std::variant<FsmSpec, MemoryOneSpec, LookupSpec>;

struct GenotypeShape {
  enum class Kind { Fsm, MemoryOne, Lookup };
  Kind kind = Kind::Fsm;
  int num_states = 8;  // Fsm
  int first_k = 0;     // Lookup
  int depth = 1;       // Lookup
};

Genotype random_genotype(const GenotypeShape& shape, Rng& rng);

// Each transition-table entry (next state and action re-drawn as a unit), the
// initial state, and the initial action are independently re-randomized with
// probability `rate`. Output is always a total machine.
Genotype mutate(const Genotype& g, double rate, Rng& rng);

// Single-point crossover over state-indexed rows (table entries for lookup,
// the four probabilities for memory-one); the initial configuration comes
// from one parent chosen by coin flip. Throws on shape mismatch.
Genotype crossover(const Genotype& g1, const Genotype& g2, Rng& rng);

StrategySpec to_strategy(const Genotype& g, std::string name);

// What a candidate is scored on.
struct Objective {
  enum class Kind { MoranFixation, MeanPayoff };
  Kind kind = Kind::MoranFixation;
  int n = 6;         // Moran population size; start is the half split floor(n/2)
  double noise = 0.0;
  int turns = 200;
  int reps_per_opponent = 20;  // fixation runs / match repetitions per opponent
  int cache_samples = 200;     // match samples behind stochastic pairings
  PayoffMatrix matrix{};
  MoranOptions moran{};
};

// MoranFixation: mean over opponents of the candidate's fixation probability
// from floor(n/2) copies against n - floor(n/2) of the opponent.
// MeanPayoff: mean per-turn score over opponents and repetitions.
// Deterministic given (genotype, objective, roster, seed).
double evaluate(const Genotype& g, const Objective& obj,
                const std::vector<StrategySpec>& roster, std::uint64_t seed);

struct TrainerConfig {
  GenotypeShape shape{};
  int population_size = 20;
  int generations = 50;  // generational updates; evaluations run generations+1 times
  double mutation_rate = 0.1;
  bool crossover_enabled = true;
  int elitism = 2;
  Objective objective{};
  std::vector<StrategySpec> roster;
  std::uint64_t seed = 0;
  int jobs = 1;
};

struct GenerationStats {
  int generation = 0;
  double best = 0.0;         // best fitness measured this generation
  double mean = 0.0;         // population mean this generation
  double best_so_far = 0.0;  // running max of best; nondecreasing
};

struct TrainResult {
  Genotype champion;          // the highest-scoring genotype ever evaluated
  double champion_fitness = 0.0;
  std::vector<GenerationStats> history;
};

// Generational loop with elitism: evaluate everyone (elites included — fresh
// seeds each generation prevent lucky-draw lock-in), carry the top `elitism`
// unchanged, breed the rest from the top half by crossover + mutation.
// Reproducible: the result is a pure function of the config, independent of
// the job count.
TrainResult evolve(const TrainerConfig& cfg);

// Self-play probe for evolved handshakes: does the strategy defect within its
// first three moves against a copy of itself and still settle into mutual
// cooperation? Reported, never asserted.
struct HandshakeReport {
  std::vector<Action> opening;           // first own moves of the self-match
  bool defects_in_first_three = false;
  bool mutual_cooperation_tail = false;  // final quarter of the match all (C,C)

  bool handshake_like() const { return defects_in_first_three && mutual_cooperation_tail; }
};
HandshakeReport handshake_report(const StrategySpec& s, const MatchConfig& cfg);

// "generation,best,mean" rows.
std::string fitness_history_csv(const std::vector<GenerationStats>& history);

}  // namespace moranipd
