#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstddef>
#include <set>
#include <vector>

#include "moranipd/errors.hpp"
#include "moranipd/match.hpp"
#include "moranipd/moran.hpp"
#include "moranipd/payoff_cache.hpp"
#include "moranipd/rng.hpp"
#include "moranipd/strategy.hpp"
#include "moranipd/trainer.hpp"

using namespace moranipd;

namespace {

StrategySpec scripted(ScriptedKind kind, std::string name) {
  return StrategySpec{std::move(name), ScriptedSpec{kind, 0.5}};
}

Genotype all_defect_memone() {
  MemoryOneSpec m;
  m.initial = Action::D;
  m.p_cc = m.p_cd = m.p_dc = m.p_dd = 0.0;
  return m;
}

FsmSpec uniform_fsm(int num_states, FsmSpec::Edge edge) {
  FsmSpec f;
  f.num_states = num_states;
  f.initial_state = 0;
  f.initial_action = Action::C;
  f.transitions.assign(static_cast<std::size_t>(num_states), {edge, edge});
  return f;
}

int changed_entries(const FsmSpec& a, const FsmSpec& b) {
  int changed = 0;
  for (std::size_t s = 0; s < a.transitions.size(); ++s)
    for (int in = 0; in < 2; ++in)
      if (a.transitions[s][static_cast<std::size_t>(in)] !=
          b.transitions[s][static_cast<std::size_t>(in)])
        ++changed;
  return changed;
}

}  // namespace

TEST_CASE("random genotypes are well-formed for every kind") {
  Rng rng(41);

  GenotypeShape fsm_shape;
  fsm_shape.kind = GenotypeShape::Kind::Fsm;
  fsm_shape.num_states = 5;
  for (int k = 0; k < 50; ++k) {
    const auto g = random_genotype(fsm_shape, rng);
    const auto& f = std::get<FsmSpec>(g);
    CHECK(f.num_states == 5);
    CHECK(f.initial_state >= 0);
    CHECK(f.initial_state < 5);
    CHECK_NOTHROW(validate_fsm(f));
  }

  GenotypeShape mem_shape;
  mem_shape.kind = GenotypeShape::Kind::MemoryOne;
  for (int k = 0; k < 50; ++k) {
    const MemoryOneSpec m = std::get<MemoryOneSpec>(random_genotype(mem_shape, rng));
    for (double p : {m.p_cc, m.p_cd, m.p_dc, m.p_dd}) {
      CHECK(p >= 0.0);
      CHECK(p < 1.0);
    }
  }

  GenotypeShape lut_shape;
  lut_shape.kind = GenotypeShape::Kind::Lookup;
  lut_shape.first_k = 1;
  lut_shape.depth = 2;
  for (int k = 0; k < 20; ++k) {
    const LookupSpec l = std::get<LookupSpec>(random_genotype(lut_shape, rng));
    CHECK(l.opening.size() == 2);
    CHECK(l.table.size() == 32);
    CHECK_NOTHROW(validate_lookup(l));
  }

  GenotypeShape bad = fsm_shape;
  bad.num_states = 0;
  CHECK_THROWS_AS(random_genotype(bad, rng), ValidationError);
}

TEST_CASE("mutation rate 0 is the identity") {
  Rng rng(7);
  GenotypeShape shape;
  shape.num_states = 8;
  for (int k = 0; k < 10; ++k) {
    const Genotype g = random_genotype(shape, rng);
    CHECK(mutate(g, 0.0, rng) == g);
  }
  GenotypeShape mem;
  mem.kind = GenotypeShape::Kind::MemoryOne;
  const Genotype m = random_genotype(mem, rng);
  CHECK(mutate(m, 0.0, rng) == m);
}

TEST_CASE("mutation rate 1 re-draws nearly everything") {
  Rng rng(13);
  GenotypeShape shape;
  shape.num_states = 8;
  const Genotype g = random_genotype(shape, rng);
  int total_changed = 0;
  const int trials = 200;
  for (int k = 0; k < trials; ++k)
    total_changed += changed_entries(std::get<FsmSpec>(g), std::get<FsmSpec>(mutate(g, 1.0, rng)));
  // A re-drawn edge coincides with the original with probability 1/16, so the
  // expected count is 16 * 15/16 = 15 of 16 entries per trial.
  const double mean = static_cast<double>(total_changed) / trials;
  CHECK(mean > 14.0);
  CHECK(mean <= 16.0);
}

TEST_CASE("mutation changes the expected share of entries") {
  Rng rng(99);
  GenotypeShape shape;
  shape.num_states = 8;
  const Genotype g = random_genotype(shape, rng);
  long total_changed = 0;
  const int trials = 4000;
  for (int k = 0; k < trials; ++k)
    total_changed += changed_entries(std::get<FsmSpec>(g), std::get<FsmSpec>(mutate(g, 0.1, rng)));
  // 16 entries, each re-drawn with probability 0.1 and then different from the
  // original with probability 15/16: expectation 1.5 changed entries.
  const double mean = static_cast<double>(total_changed) / trials;
  CHECK(mean == doctest::Approx(1.5).epsilon(0.1));
}

TEST_CASE("mutation validates its rate") {
  Rng rng(1);
  GenotypeShape shape;
  const Genotype g = random_genotype(shape, rng);
  CHECK_THROWS_AS(mutate(g, -0.1, rng), ValidationError);
  CHECK_THROWS_AS(mutate(g, 1.5, rng), ValidationError);
}

TEST_CASE("crossover of identical parents is the identity") {
  Rng rng(3);
  for (auto kind : {GenotypeShape::Kind::Fsm, GenotypeShape::Kind::MemoryOne,
                    GenotypeShape::Kind::Lookup}) {
    GenotypeShape shape;
    shape.kind = kind;
    shape.num_states = 4;
    shape.first_k = 1;
    shape.depth = 1;
    for (int k = 0; k < 10; ++k) {
      const Genotype g = random_genotype(shape, rng);
      CHECK(crossover(g, g, rng) == g);
    }
  }
}

TEST_CASE("crossover splices whole rows at a single point") {
  const FsmSpec p1 = uniform_fsm(4, FsmSpec::Edge{0, Action::C});
  FsmSpec p2 = uniform_fsm(4, FsmSpec::Edge{3, Action::D});
  p2.initial_state = 2;
  p2.initial_action = Action::D;

  std::set<std::size_t> cuts_seen;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(seed);
    const FsmSpec child = std::get<FsmSpec>(crossover(Genotype{p1}, Genotype{p2}, rng));

    // Rows form a p1-prefix followed by a p2-suffix with the cut in [1, 3].
    std::size_t cut = 4;
    for (std::size_t s = 0; s < 4; ++s)
      if (child.transitions[s] == p2.transitions[s]) {
        cut = s;
        break;
      }
    REQUIRE(cut >= 1);
    REQUIRE(cut <= 3);
    cuts_seen.insert(cut);
    for (std::size_t s = 0; s < 4; ++s)
      CHECK(child.transitions[s] == (s < cut ? p1.transitions[s] : p2.transitions[s]));

    // The initial configuration comes wholesale from one parent.
    const bool from_p1 =
        child.initial_state == p1.initial_state && child.initial_action == p1.initial_action;
    const bool from_p2 =
        child.initial_state == p2.initial_state && child.initial_action == p2.initial_action;
    CHECK((from_p1 || from_p2));
  }
  CHECK(cuts_seen.size() > 1);
}

TEST_CASE("crossover rejects mismatched shapes") {
  Rng rng(5);
  GenotypeShape f3;
  f3.num_states = 3;
  GenotypeShape f4;
  f4.num_states = 4;
  GenotypeShape mem;
  mem.kind = GenotypeShape::Kind::MemoryOne;
  GenotypeShape lut_a;
  lut_a.kind = GenotypeShape::Kind::Lookup;
  lut_a.first_k = 0;
  lut_a.depth = 1;
  GenotypeShape lut_b = lut_a;
  lut_b.depth = 2;

  const Genotype a = random_genotype(f3, rng);
  const Genotype b = random_genotype(f4, rng);
  const Genotype m = random_genotype(mem, rng);
  const Genotype la = random_genotype(lut_a, rng);
  const Genotype lb = random_genotype(lut_b, rng);
  CHECK_THROWS_WITH_AS(crossover(a, b, rng), doctest::Contains("state counts differ"),
                       ValidationError);
  CHECK_THROWS_WITH_AS(crossover(a, m, rng), doctest::Contains("kinds differ"), ValidationError);
  CHECK_THROWS_WITH_AS(crossover(la, lb, rng), doctest::Contains("lookup shapes differ"),
                       ValidationError);
}

TEST_CASE("genotypes convert to named strategies") {
  const Genotype g = all_defect_memone();
  const StrategySpec s = to_strategy(g, "champ");
  CHECK(s.name == "champ");
  CHECK(std::get<MemoryOneSpec>(s.behavior) == std::get<MemoryOneSpec>(g));
}

TEST_CASE("mean-payoff evaluation matches exact match scores") {
  const Genotype g = all_defect_memone();
  Objective obj;
  obj.kind = Objective::Kind::MeanPayoff;
  obj.turns = 100;
  obj.reps_per_opponent = 2;

  // Always-defect earns T = 5 per turn against a cooperator and P = 1 against
  // a defector; both matches are deterministic, so the averages are exact.
  CHECK(evaluate(g, obj, {scripted(ScriptedKind::Cooperator, "Cooperator")}, 9) == 5.0);
  CHECK(evaluate(g, obj,
                 {scripted(ScriptedKind::Cooperator, "Cooperator"),
                  scripted(ScriptedKind::Defector, "Defector")},
                 9) == 3.0);
}

TEST_CASE("fixation evaluation tracks the exact chain") {
  const Genotype g = all_defect_memone();
  Objective obj;
  obj.kind = Objective::Kind::MoranFixation;
  obj.n = 6;
  obj.turns = 100;
  obj.reps_per_opponent = 500;
  obj.cache_samples = 10;

  // Candidate vs cooperator mean per-turn payoffs: P=1 within type, T=5 / S=0
  // across, R=3 within the cooperators.
  const double exact = exact_fixation(3, 6, PairGame{1.0, 5.0, 0.0, 3.0});
  const double got =
      evaluate(g, obj, {scripted(ScriptedKind::Cooperator, "Cooperator")}, 2024);
  CHECK(got == doctest::Approx(exact).epsilon(0.12));
}

TEST_CASE("evaluation is deterministic in the seed") {
  Rng rng(17);
  GenotypeShape shape;
  shape.num_states = 3;
  const Genotype g = random_genotype(shape, rng);
  Objective obj;
  obj.n = 4;
  obj.turns = 50;
  obj.reps_per_opponent = 5;
  obj.cache_samples = 20;
  const std::vector<StrategySpec> roster = {scripted(ScriptedKind::TitForTat, "Tit For Tat"),
                                            scripted(ScriptedKind::Defector, "Defector")};
  CHECK(evaluate(g, obj, roster, 31) == evaluate(g, obj, roster, 31));
}

TEST_CASE("evaluation validates its inputs") {
  const Genotype g = all_defect_memone();
  Objective obj;
  CHECK_THROWS_AS(evaluate(g, obj, {}, 1), ValidationError);
  Objective bad_reps = obj;
  bad_reps.reps_per_opponent = 0;
  CHECK_THROWS_AS(
      evaluate(g, bad_reps, {scripted(ScriptedKind::Cooperator, "Cooperator")}, 1),
      ValidationError);
  Objective bad_n = obj;
  bad_n.n = 1;
  CHECK_THROWS_AS(evaluate(g, bad_n, {scripted(ScriptedKind::Cooperator, "Cooperator")}, 1),
                  ValidationError);
}

TEST_CASE("evolution is reproducible and independent of the job count") {
  TrainerConfig cfg;
  cfg.shape.num_states = 2;
  cfg.population_size = 6;
  cfg.generations = 3;
  cfg.mutation_rate = 0.2;
  cfg.elitism = 2;
  cfg.objective.n = 4;
  cfg.objective.turns = 50;
  cfg.objective.reps_per_opponent = 10;
  cfg.objective.cache_samples = 20;
  cfg.roster = {scripted(ScriptedKind::TitForTat, "Tit For Tat"),
                scripted(ScriptedKind::Defector, "Defector")};
  cfg.seed = 11;

  cfg.jobs = 1;
  const TrainResult a = evolve(cfg);
  cfg.jobs = 3;
  const TrainResult b = evolve(cfg);

  CHECK(a.champion == b.champion);
  CHECK(a.champion_fitness == b.champion_fitness);
  REQUIRE(a.history.size() == b.history.size());
  for (std::size_t i = 0; i < a.history.size(); ++i) {
    CHECK(a.history[i].generation == b.history[i].generation);
    CHECK(a.history[i].best == b.history[i].best);
    CHECK(a.history[i].mean == b.history[i].mean);
    CHECK(a.history[i].best_so_far == b.history[i].best_so_far);
  }

  REQUIRE(a.history.size() == 4);  // generations + 1 evaluations
  for (std::size_t i = 0; i < a.history.size(); ++i) {
    CHECK(a.history[i].generation == static_cast<int>(i));
    CHECK(a.history[i].mean <= a.history[i].best);
    if (i > 0) CHECK(a.history[i].best_so_far >= a.history[i - 1].best_so_far);
  }
  CHECK(a.champion_fitness == a.history.back().best_so_far);
}

TEST_CASE("zero generations still evaluates the initial population") {
  TrainerConfig cfg;
  cfg.shape.num_states = 2;
  cfg.population_size = 4;
  cfg.generations = 0;
  cfg.objective.n = 4;
  cfg.objective.turns = 30;
  cfg.objective.reps_per_opponent = 4;
  cfg.objective.cache_samples = 10;
  cfg.roster = {scripted(ScriptedKind::Defector, "Defector")};
  const TrainResult r = evolve(cfg);
  REQUIRE(r.history.size() == 1);
  CHECK(r.history[0].best == r.champion_fitness);
  CHECK(r.history[0].best_so_far == r.history[0].best);
}

TEST_CASE("the trainer validates its configuration") {
  TrainerConfig ok;
  ok.roster = {scripted(ScriptedKind::Defector, "Defector")};

  TrainerConfig cfg = ok;
  cfg.population_size = 1;
  CHECK_THROWS_AS(evolve(cfg), ValidationError);

  cfg = ok;
  cfg.elitism = cfg.population_size;
  CHECK_THROWS_AS(evolve(cfg), ValidationError);

  cfg = ok;
  cfg.mutation_rate = 1.5;
  CHECK_THROWS_AS(evolve(cfg), ValidationError);

  cfg = ok;
  cfg.generations = -1;
  CHECK_THROWS_AS(evolve(cfg), ValidationError);

  cfg = ok;
  cfg.roster.clear();
  CHECK_THROWS_AS(evolve(cfg), ValidationError);
}

TEST_CASE("self-play probes recognize a handshake") {
  MatchConfig cfg;
  cfg.turns = 40;
  cfg.seed = 1;

  const HandshakeReport hs =
      handshake_report(scripted(ScriptedKind::Handshake, "Handshake"), cfg);
  REQUIRE(hs.opening.size() >= 2);
  CHECK(hs.opening[0] == Action::C);
  CHECK(hs.opening[1] == Action::D);
  CHECK(hs.defects_in_first_three);
  CHECK(hs.mutual_cooperation_tail);
  CHECK(hs.handshake_like());

  const HandshakeReport tft =
      handshake_report(scripted(ScriptedKind::TitForTat, "Tit For Tat"), cfg);
  CHECK_FALSE(tft.defects_in_first_three);
  CHECK(tft.mutual_cooperation_tail);
  CHECK_FALSE(tft.handshake_like());

  const HandshakeReport alld =
      handshake_report(scripted(ScriptedKind::Defector, "Defector"), cfg);
  CHECK(alld.defects_in_first_three);
  CHECK_FALSE(alld.mutual_cooperation_tail);
  CHECK_FALSE(alld.handshake_like());
}

TEST_CASE("fitness history serializes one row per generation") {
  std::vector<GenerationStats> history;
  history.push_back({0, 0.5, 0.25, 0.5});
  history.push_back({1, 0.75, 0.5, 0.75});
  CHECK(fitness_history_csv(history) ==
        "generation,best,mean\n"
        "0,0.5,0.25\n"
        "1,0.75,0.5\n");
  CHECK(fitness_history_csv({}) == "generation,best,mean\n");
}
