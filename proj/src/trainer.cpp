#include "moranipd/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "moranipd/errors.hpp"
#include "moranipd/match.hpp"
#include "moranipd/parallel.hpp"
#include "moranipd/text.hpp"

namespace moranipd {

namespace {

constexpr std::uint64_t kInitTag = 0x1217;
constexpr std::uint64_t kEvalTag = 0xe7a1;
constexpr std::uint64_t kChildTag = 0xc31d;
constexpr std::uint64_t kOppCacheTag = 0x0ca;
constexpr std::uint64_t kOppRunsTag = 0x0b5;

Action coin_action(Rng& rng) { return rng.bernoulli(0.5) ? Action::C : Action::D; }

FsmSpec::Edge random_edge(int num_states, Rng& rng) {
  return {static_cast<int>(rng.uniform_index(static_cast<std::size_t>(num_states))),
          coin_action(rng)};
}

void check_same_shape(const Genotype& g1, const Genotype& g2) {
  if (g1.index() != g2.index())
    throw ValidationError("crossover: genotype kinds differ");
  if (const auto* f1 = std::get_if<FsmSpec>(&g1)) {
    if (f1->num_states != std::get<FsmSpec>(g2).num_states)
      throw ValidationError("crossover: fsm state counts differ");
  } else if (const auto* l1 = std::get_if<LookupSpec>(&g1)) {
    const auto& l2 = std::get<LookupSpec>(g2);
    if (l1->first_k != l2.first_k || l1->depth != l2.depth)
      throw ValidationError("crossover: lookup shapes differ");
  }
}

}  // namespace

Genotype random_genotype(const GenotypeShape& shape, Rng& rng) {
  switch (shape.kind) {
    case GenotypeShape::Kind::Fsm: {
      if (shape.num_states < 1) throw ValidationError("genotype needs >= 1 state");
      FsmSpec f;
      f.num_states = shape.num_states;
      f.initial_state =
          static_cast<int>(rng.uniform_index(static_cast<std::size_t>(shape.num_states)));
      f.initial_action = coin_action(rng);
      f.transitions.resize(static_cast<std::size_t>(shape.num_states));
      for (auto& row : f.transitions)
        for (auto& e : row) e = random_edge(shape.num_states, rng);
      return f;
    }
    case GenotypeShape::Kind::MemoryOne: {
      MemoryOneSpec m;
      m.initial = coin_action(rng);
      m.p_cc = rng.uniform01();
      m.p_cd = rng.uniform01();
      m.p_dc = rng.uniform01();
      m.p_dd = rng.uniform01();
      return m;
    }
    case GenotypeShape::Kind::Lookup: {
      LookupSpec l;
      l.first_k = shape.first_k;
      l.depth = shape.depth;
      l.opening.resize(l.opening_length());
      for (Action& a : l.opening) a = coin_action(rng);
      l.table.resize(l.table_size());
      for (double& p : l.table) p = rng.uniform01();
      validate_lookup(l);
      return l;
    }
  }
  throw ValidationError("unknown genotype kind");
}

Genotype mutate(const Genotype& g, double rate, Rng& rng) {
  if (!(rate >= 0.0 && rate <= 1.0))
    throw ValidationError("mutation rate must be in [0,1]");

  struct Visitor {
    double rate;
    Rng& rng;

    Genotype operator()(const FsmSpec& in) const {
      FsmSpec out = in;
      for (auto& row : out.transitions)
        for (auto& e : row)
          if (rng.bernoulli(rate)) e = random_edge(out.num_states, rng);
      if (rng.bernoulli(rate))
        out.initial_state =
            static_cast<int>(rng.uniform_index(static_cast<std::size_t>(out.num_states)));
      if (rng.bernoulli(rate)) out.initial_action = coin_action(rng);
      return out;
    }
    Genotype operator()(const MemoryOneSpec& in) const {
      MemoryOneSpec out = in;
      for (double* p : {&out.p_cc, &out.p_cd, &out.p_dc, &out.p_dd})
        if (rng.bernoulli(rate)) *p = rng.uniform01();
      if (rng.bernoulli(rate)) out.initial = coin_action(rng);
      return out;
    }
    Genotype operator()(const LookupSpec& in) const {
      LookupSpec out = in;
      for (double& p : out.table)
        if (rng.bernoulli(rate)) p = rng.uniform01();
      for (Action& a : out.opening)
        if (rng.bernoulli(rate)) a = coin_action(rng);
      return out;
    }
  };
  return std::visit(Visitor{rate, rng}, g);
}

Genotype crossover(const Genotype& g1, const Genotype& g2, Rng& rng) {
  check_same_shape(g1, g2);

  struct Visitor {
    const Genotype& g2;
    Rng& rng;

    Genotype operator()(const FsmSpec& a) const {
      const FsmSpec& b = std::get<FsmSpec>(g2);
      FsmSpec child = a;
      const std::size_t n = a.transitions.size();
      if (n >= 2) {
        const std::size_t cut = 1 + rng.uniform_index(n - 1);  // in [1, n-1]
        for (std::size_t s = cut; s < n; ++s) child.transitions[s] = b.transitions[s];
      } else if (rng.bernoulli(0.5)) {
        child.transitions = b.transitions;
      }
      if (rng.bernoulli(0.5)) {
        child.initial_state = b.initial_state;
        child.initial_action = b.initial_action;
      }
      return child;
    }
    Genotype operator()(const MemoryOneSpec& a) const {
      const MemoryOneSpec& b = std::get<MemoryOneSpec>(g2);
      MemoryOneSpec child = a;
      double* pa[4] = {&child.p_cc, &child.p_cd, &child.p_dc, &child.p_dd};
      const double pb[4] = {b.p_cc, b.p_cd, b.p_dc, b.p_dd};
      const std::size_t cut = 1 + rng.uniform_index(3);  // in [1, 3]
      for (std::size_t k = cut; k < 4; ++k) *pa[k] = pb[k];
      if (rng.bernoulli(0.5)) child.initial = b.initial;
      return child;
    }
    Genotype operator()(const LookupSpec& a) const {
      const LookupSpec& b = std::get<LookupSpec>(g2);
      LookupSpec child = a;
      const std::size_t n = a.table.size();
      if (n >= 2) {
        const std::size_t cut = 1 + rng.uniform_index(n - 1);
        for (std::size_t k = cut; k < n; ++k) child.table[k] = b.table[k];
      } else if (rng.bernoulli(0.5)) {
        child.table = b.table;
      }
      if (rng.bernoulli(0.5)) child.opening = b.opening;
      return child;
    }
  };
  return std::visit(Visitor{g2, rng}, g1);
}

StrategySpec to_strategy(const Genotype& g, std::string name) {
  StrategySpec spec;
  spec.name = std::move(name);
  std::visit([&](const auto& v) { spec.behavior = v; }, g);
  return spec;
}

double evaluate(const Genotype& g, const Objective& obj,
                const std::vector<StrategySpec>& roster, std::uint64_t seed) {
  if (roster.empty()) throw ValidationError("evaluation roster must not be empty");
  if (obj.reps_per_opponent < 1) throw ValidationError("reps per opponent must be >= 1");
  if (obj.n < 2) throw ValidationError("objective population size must be >= 2");

  StrategySpec candidate = to_strategy(g, "candidate");

  double total = 0.0;
  for (std::size_t oi = 0; oi < roster.size(); ++oi) {
    StrategySpec opponent = roster[oi];
    if (opponent.name == candidate.name) opponent.name += " (roster)";
    const std::uint64_t opp_seed = derive_seed(seed, oi);

    if (obj.kind == Objective::Kind::MoranFixation) {
      MatchConfig mc;
      mc.turns = obj.turns;
      mc.noise = obj.noise;
      mc.matrix = obj.matrix;
      mc.seed = derive_seed(opp_seed, kOppCacheTag);
      const PayoffCache cache =
          build_cache({candidate, opponent}, obj.cache_samples, mc, 1);
      const FixationEstimate est =
          estimate_fixation(cache, 0, 1, obj.n / 2, obj.n, obj.reps_per_opponent,
                            derive_seed(opp_seed, kOppRunsTag), obj.moran, 1);
      total += est.probability;
    } else {
      double score = 0.0;
      for (int rep = 0; rep < obj.reps_per_opponent; ++rep) {
        MatchConfig mc;
        mc.turns = obj.turns;
        mc.noise = obj.noise;
        mc.matrix = obj.matrix;
        mc.seed = derive_seed(opp_seed, kOppRunsTag, static_cast<std::uint64_t>(rep));
        score += play_match(candidate, opponent, mc).means.first;
      }
      total += score / obj.reps_per_opponent;
    }
  }
  return total / static_cast<double>(roster.size());
}

TrainResult evolve(const TrainerConfig& cfg) {
  if (cfg.population_size < 2) throw ValidationError("population size must be >= 2");
  if (cfg.elitism < 0 || cfg.elitism >= cfg.population_size)
    throw ValidationError("elitism must be in [0, population size)");
  if (cfg.generations < 0) throw ValidationError("generations must be >= 0");
  if (!(cfg.mutation_rate >= 0.0 && cfg.mutation_rate <= 1.0))
    throw ValidationError("mutation rate must be in [0,1]");
  if (cfg.roster.empty()) throw ValidationError("training roster must not be empty");

  const std::size_t pop_size = static_cast<std::size_t>(cfg.population_size);
  std::vector<Genotype> pop;
  pop.reserve(pop_size);
  for (std::size_t i = 0; i < pop_size; ++i) {
    Rng rng(derive_seed(cfg.seed, kInitTag, i));
    pop.push_back(random_genotype(cfg.shape, rng));
  }

  TrainResult result;
  result.champion = pop[0];
  result.champion_fitness = -1.0;  // any real evaluation beats this
  std::vector<double> fitness(pop_size, 0.0);

  for (int gen = 0;; ++gen) {
    parallel_for(pop_size, cfg.jobs, [&](std::size_t i) {
      fitness[i] = evaluate(pop[i], cfg.objective, cfg.roster,
                            derive_seed(cfg.seed, kEvalTag, static_cast<std::uint64_t>(gen), i));
    });

    std::vector<std::size_t> order(pop_size);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return fitness[a] > fitness[b];  // stable: ties keep index order
    });

    GenerationStats stats;
    stats.generation = gen;
    stats.best = fitness[order[0]];
    stats.mean = std::accumulate(fitness.begin(), fitness.end(), 0.0) /
                 static_cast<double>(pop_size);
    stats.best_so_far =
        result.history.empty() ? stats.best : std::max(result.history.back().best_so_far, stats.best);
    result.history.push_back(stats);

    if (fitness[order[0]] > result.champion_fitness) {
      result.champion_fitness = fitness[order[0]];
      result.champion = pop[order[0]];
    }

    if (gen == cfg.generations) break;

    std::vector<Genotype> next;
    next.reserve(pop_size);
    for (int e = 0; e < cfg.elitism; ++e) next.push_back(pop[order[static_cast<std::size_t>(e)]]);

    const std::size_t parent_pool = (pop_size + 1) / 2;  // top half by rank
    while (next.size() < pop_size) {
      Rng rng(derive_seed(cfg.seed, kChildTag, static_cast<std::uint64_t>(gen), next.size()));
      const Genotype& p1 = pop[order[rng.uniform_index(parent_pool)]];
      const Genotype& p2 = pop[order[rng.uniform_index(parent_pool)]];
      Genotype child = cfg.crossover_enabled ? crossover(p1, p2, rng) : p1;
      next.push_back(mutate(child, cfg.mutation_rate, rng));
    }
    pop = std::move(next);
  }

  return result;
}

HandshakeReport handshake_report(const StrategySpec& s, const MatchConfig& cfg) {
  const MatchResult res = play_match(s, s, cfg);
  HandshakeReport report;

  const std::size_t opening_len = std::min<std::size_t>(res.actions.size(), 8);
  for (std::size_t t = 0; t < opening_len; ++t) report.opening.push_back(res.actions[t].first);

  const std::size_t probe = std::min<std::size_t>(res.actions.size(), 3);
  for (std::size_t t = 0; t < probe; ++t)
    if (res.actions[t].first == Action::D) report.defects_in_first_three = true;

  const std::size_t tail_start = res.actions.size() - res.actions.size() / 4;
  bool tail_coop = res.actions.size() >= 4;
  for (std::size_t t = tail_start; t < res.actions.size(); ++t)
    if (res.actions[t].first != Action::C || res.actions[t].second != Action::C)
      tail_coop = false;
  report.mutual_cooperation_tail = tail_coop;
  return report;
}

std::string fitness_history_csv(const std::vector<GenerationStats>& history) {
  std::string out = "generation,best,mean\n";
  for (const GenerationStats& s : history)
    out += std::to_string(s.generation) + "," + format_double(s.best) + "," +
           format_double(s.mean) + "\n";
  return out;
}

}  // namespace moranipd
