#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "moranipd/analysis.hpp"
#include "moranipd/errors.hpp"
#include "moranipd/match.hpp"
#include "moranipd/moran.hpp"
#include "moranipd/payoff_cache.hpp"
#include "moranipd/strategy.hpp"

using namespace moranipd;

namespace {

StrategySpec scripted(ScriptedKind kind, std::string name) {
  return StrategySpec{std::move(name), ScriptedSpec{kind, 0.5}};
}

PayoffCache classic_cache() {
  MatchConfig mc;
  mc.turns = 100;
  mc.seed = 5;
  return build_cache({scripted(ScriptedKind::Cooperator, "Cooperator"),
                      scripted(ScriptedKind::Defector, "Defector"),
                      scripted(ScriptedKind::TitForTat, "Tit For Tat")},
                     10, mc, 1);
}

// A synthetic invasion row (i copies of a vs the rest b) plus bookkeeping.
SweepRow make_row(std::string a, std::string b, int n, int i, double prob, int reps = 100) {
  SweepRow row;
  row.name_a = std::move(a);
  row.name_b = std::move(b);
  row.n = n;
  row.i = i;
  row.est.repetitions = reps;
  row.est.wins = static_cast<int>(std::lround(prob * reps));
  row.est.probability = prob;
  row.est.ci95 = 0.01;
  return row;
}

// Complete i=1 invasion rows at size n for three names with chosen win rates.
void add_invasion_rows(SweepResult& sweep, int n,
                       const std::map<std::pair<std::string, std::string>, double>& probs) {
  for (const auto& [key, p] : probs) sweep.rows.push_back(make_row(key.first, key.second, n, 1, p));
}

}  // namespace

TEST_CASE("start counts cover invasion, coexistence and resistance") {
  CHECK(sweep_starts(2) == std::vector<int>{1});
  CHECK(sweep_starts(3) == std::vector<int>{1, 2});
  CHECK(sweep_starts(4) == std::vector<int>{1, 2, 3});
  CHECK(sweep_starts(5) == std::vector<int>{1, 2, 4});
  CHECK(sweep_starts(14) == std::vector<int>{1, 7, 13});
  CHECK_THROWS_AS(sweep_starts(1), ValidationError);

  CHECK(start_count(StartKind::Invade, 10) == 1);
  CHECK(start_count(StartKind::Coexist, 10) == 5);
  CHECK(start_count(StartKind::Coexist, 7) == 3);
  CHECK(start_count(StartKind::Resist, 10) == 9);
  CHECK(std::string(start_kind_name(StartKind::Coexist)) == "coexist");
  CHECK(start_kind_from_name("resist") == StartKind::Resist);
  CHECK_THROWS_WITH_AS(start_kind_from_name("conquer"), doctest::Contains("unknown start kind"),
                       ValidationError);
}

TEST_CASE("sweeps emit both orientations of every cell") {
  const PayoffCache cache = classic_cache();
  SweepConfig cfg;
  cfg.n_min = 2;
  cfg.n_max = 5;
  cfg.reps = 200;
  cfg.seed = 42;

  const SweepResult result = sweep(cache, cfg);

  // Per unordered pair: 2 rows at n=2, 4 at n=3, 6 at n=4, 8 at n=5.
  CHECK(result.rows.size() == 3 * (2 + 4 + 6 + 8));
  CHECK(std::is_sorted(result.rows.begin(), result.rows.end(),
                       [](const SweepRow& a, const SweepRow& b) {
                         return std::tie(a.name_a, a.name_b, a.n, a.i) <
                                std::tie(b.name_a, b.name_b, b.n, b.i);
                       }));

  std::map<std::tuple<std::string, std::string, int, int>, const SweepRow*> by_key;
  for (const SweepRow& row : result.rows) {
    CHECK(row.est.repetitions == 200);
    CHECK(row.est.probability >= 0.0);
    CHECK(row.est.probability <= 1.0);
    by_key[{row.name_a, row.name_b, row.n, row.i}] = &row;
  }

  // Every ordered pair covers starts 1, floor(n/2), n - floor(n/2), n-1, and
  // the mirrored row reports the complement of the same runs.
  for (const SweepRow& row : result.rows) {
    const auto it = by_key.find({row.name_b, row.name_a, row.n, row.n - row.i});
    REQUIRE(it != by_key.end());
    CHECK(row.est.wins + it->second->est.wins == 200);
    CHECK(row.est.probability ==
          doctest::Approx(1.0 - it->second->est.probability).epsilon(1e-12));
  }
  for (const std::string& a : {"Cooperator", "Defector", "Tit For Tat"})
    for (const std::string& b : {"Cooperator", "Defector", "Tit For Tat"}) {
      if (a == b) continue;
      for (int i : {1, 2, 3, 4}) CHECK(by_key.count({a, b, 5, i}) == 1);
    }
}

TEST_CASE("sweeps are independent of the job count") {
  const PayoffCache cache = classic_cache();
  SweepConfig cfg;
  cfg.n_min = 2;
  cfg.n_max = 4;
  cfg.reps = 100;
  cfg.seed = 9;
  cfg.jobs = 1;
  const SweepResult one = sweep(cache, cfg);
  cfg.jobs = 3;
  const SweepResult three = sweep(cache, cfg);
  const MetaHeader meta{9, "x"};
  CHECK(sweep_to_csv(one, meta) == sweep_to_csv(three, meta));
}

TEST_CASE("resume carries finished cells instead of recomputing them") {
  const PayoffCache cache = classic_cache();
  SweepConfig cfg;
  cfg.n_min = 2;
  cfg.n_max = 3;
  cfg.reps = 100;
  cfg.seed = 3;
  const SweepResult full = sweep(cache, cfg);
  const MetaHeader meta{3, "x"};

  // Resuming from the complete result is a no-op.
  CHECK(sweep_to_csv(sweep(cache, cfg, &full), meta) == sweep_to_csv(full, meta));

  // A tampered-but-complete cell is trusted, proving it was skipped.
  SweepResult tampered = full;
  for (SweepRow& row : tampered.rows)
    if (row.name_a == "Cooperator" && row.name_b == "Defector" && row.n == 3 && row.i == 1) {
      row.est.wins = 77;
      row.est.probability = 0.77;
    }
  const SweepResult resumed = sweep(cache, cfg, &tampered);
  bool found = false;
  for (const SweepRow& row : resumed.rows)
    if (row.name_a == "Cooperator" && row.name_b == "Defector" && row.n == 3 && row.i == 1) {
      found = true;
      CHECK(row.est.probability == 0.77);
    }
  CHECK(found);

  // Rows with a different repetition count are recomputed, not carried.
  SweepResult stale = full;
  for (SweepRow& row : stale.rows) row.est.repetitions = 50;
  CHECK(sweep_to_csv(sweep(cache, cfg, &stale), meta) == sweep_to_csv(full, meta));

  // A partial resume (missing sizes) fills in exactly the fresh values.
  SweepResult partial = full;
  partial.rows.erase(std::remove_if(partial.rows.begin(), partial.rows.end(),
                                    [](const SweepRow& row) { return row.n == 3; }),
                     partial.rows.end());
  CHECK(sweep_to_csv(sweep(cache, cfg, &partial), meta) == sweep_to_csv(full, meta));
}

TEST_CASE("per-cell failures are collected rather than fatal") {
  // A zero step cap makes every fixation run fail immediately.
  const PayoffCache cache = classic_cache();
  SweepConfig cfg;
  cfg.n_min = 2;
  cfg.n_max = 3;
  cfg.reps = 20;
  cfg.moran.step_cap = 0;
  std::vector<std::string> errors;
  const SweepResult result = sweep(cache, cfg, nullptr, &errors);
  CHECK(result.rows.empty());
  REQUIRE(errors.size() == 3 * 3);  // per pair: one cell at n=2, two at n=3
  for (const std::string& e : errors) {
    CHECK(e.find("at N=") != std::string::npos);
    CHECK(e.find("step cap") != std::string::npos);
  }
}

TEST_CASE("sweep validates its configuration") {
  const PayoffCache cache = classic_cache();
  SweepConfig cfg;
  cfg.n_min = 1;
  CHECK_THROWS_AS(sweep(cache, cfg), ValidationError);
  cfg = SweepConfig{};
  cfg.n_max = cfg.n_min - 1;
  CHECK_THROWS_AS(sweep(cache, cfg), ValidationError);
  cfg = SweepConfig{};
  cfg.reps = 0;
  CHECK_THROWS_AS(sweep(cache, cfg), ValidationError);

  MatchConfig mc;
  const PayoffCache lone = build_cache({scripted(ScriptedKind::Defector, "Defector")}, 5, mc, 1);
  CHECK_THROWS_AS(sweep(lone, SweepConfig{}), ValidationError);
}

TEST_CASE("rankings order by mean fixation with name tie-breaks") {
  SweepResult sweep;
  add_invasion_rows(sweep, 2,
                    {{{"A", "B"}, 0.9},
                     {{"B", "A"}, 0.1},
                     {{"A", "C"}, 0.8},
                     {{"C", "A"}, 0.2},
                     {{"B", "C"}, 0.6},
                     {{"C", "B"}, 0.4}});

  const RankTable table = rank(sweep, StartKind::Invade, 2);
  CHECK(table.n == 2);
  CHECK(table.kind == StartKind::Invade);
  CHECK(table.neutral == 0.5);
  REQUIRE(table.rows.size() == 3);
  CHECK(table.rows[0].name == "A");
  CHECK(table.rows[0].mean_fixation == doctest::Approx(0.85));
  CHECK(table.rows[0].rank == 1);
  CHECK(table.rows[1].name == "B");
  CHECK(table.rows[1].mean_fixation == doctest::Approx(0.35));
  CHECK(table.rows[2].name == "C");
  CHECK(table.rows[2].mean_fixation == doctest::Approx(0.3));
  CHECK(table.rows[2].rank == 3);

  SweepResult tied;
  add_invasion_rows(tied, 2,
                    {{{"A", "B"}, 0.5},
                     {{"B", "A"}, 0.5},
                     {{"A", "C"}, 0.5},
                     {{"C", "A"}, 0.5},
                     {{"B", "C"}, 0.5},
                     {{"C", "B"}, 0.5}});
  const RankTable flat = rank(tied, StartKind::Invade, 2);
  CHECK(flat.rows[0].name == "A");
  CHECK(flat.rows[1].name == "B");
  CHECK(flat.rows[2].name == "C");

  SweepResult incomplete = sweep;
  incomplete.rows.erase(std::remove_if(incomplete.rows.begin(), incomplete.rows.end(),
                                       [](const SweepRow& row) {
                                         return row.name_a == "B" && row.name_b == "C";
                                       }),
                        incomplete.rows.end());
  CHECK_THROWS_WITH_AS(rank(incomplete, StartKind::Invade, 2),
                       doctest::Contains("incomplete sweep"), ValidationError);
  CHECK_THROWS_WITH_AS(rank(incomplete, StartKind::Invade, 2), doctest::Contains("B vs C"),
                       ValidationError);
  CHECK_THROWS_WITH_AS(rank(sweep, StartKind::Invade, 9), doctest::Contains("no rows"),
                       ValidationError);
}

TEST_CASE("rank_all builds one table per population size") {
  SweepResult sweep;
  add_invasion_rows(sweep, 2,
                    {{{"A", "B"}, 0.9}, {{"B", "A"}, 0.1}});
  add_invasion_rows(sweep, 4,
                    {{{"A", "B"}, 0.2}, {{"B", "A"}, 0.8}});
  const std::vector<RankTable> tables = rank_all(sweep, StartKind::Invade);
  REQUIRE(tables.size() == 2);
  CHECK(tables[0].n == 2);
  CHECK(tables[1].n == 4);
  CHECK(tables[0].rows[0].name == "A");
  CHECK(tables[1].rows[0].name == "B");
  CHECK(tables[1].neutral == 0.25);
}

TEST_CASE("rank correlation is Spearman with midranks") {
  auto table_of = [](std::vector<std::pair<std::string, double>> rows) {
    RankTable t;
    for (auto& [name, mean] : rows) t.rows.push_back({name, mean, 0});
    return t;
  };

  const RankTable t1 = table_of({{"A", 0.1}, {"B", 0.2}, {"C", 0.3}, {"D", 0.4}});
  CHECK(rank_correlation(t1, t1) == 1.0);

  const RankTable reversed = table_of({{"A", 0.4}, {"B", 0.3}, {"C", 0.2}, {"D", 0.1}});
  CHECK(rank_correlation(t1, reversed) == doctest::Approx(-1.0).epsilon(1e-12));

  // Ranks (1,2,3,4) against (2,1,4,3).
  const RankTable swapped = table_of({{"A", 0.2}, {"B", 0.1}, {"C", 0.4}, {"D", 0.3}});
  CHECK(rank_correlation(t1, swapped) == doctest::Approx(0.6).epsilon(1e-12));

  // A tie in one table: midranks (1, 2.5, 2.5, 4) vs (1,2,3,4) gives
  // 4.5/sqrt(4.5*5) = sqrt(0.9).
  const RankTable tied = table_of({{"A", 0.1}, {"B", 0.2}, {"C", 0.2}, {"D", 0.4}});
  CHECK(rank_correlation(tied, t1) == doctest::Approx(std::sqrt(0.9)).epsilon(1e-12));

  // Degenerate flat tables: self-correlation 1, no shared ordering otherwise.
  const RankTable flat = table_of({{"A", 0.5}, {"B", 0.5}, {"C", 0.5}, {"D", 0.5}});
  CHECK(rank_correlation(flat, flat) == 1.0);
  CHECK(rank_correlation(flat, t1) == 0.0);

  const RankTable other = table_of({{"A", 0.1}, {"B", 0.2}, {"C", 0.3}, {"E", 0.4}});
  CHECK_THROWS_WITH_AS(rank_correlation(t1, other),
                       doctest::Contains("different strategy sets"), ValidationError);
  const RankTable shorter = table_of({{"A", 0.1}, {"B", 0.2}});
  CHECK_THROWS_AS(rank_correlation(t1, shorter), ValidationError);
}

TEST_CASE("the correlation matrix is symmetric with a unit diagonal") {
  SweepResult sweep;
  add_invasion_rows(sweep, 2,
                    {{{"A", "B"}, 0.9},
                     {{"B", "A"}, 0.1},
                     {{"A", "C"}, 0.8},
                     {{"C", "A"}, 0.2},
                     {{"B", "C"}, 0.6},
                     {{"C", "B"}, 0.4}});
  // Same order at n=3, fully reversed at n=4.
  add_invasion_rows(sweep, 3,
                    {{{"A", "B"}, 0.8},
                     {{"B", "A"}, 0.2},
                     {{"A", "C"}, 0.7},
                     {{"C", "A"}, 0.3},
                     {{"B", "C"}, 0.6},
                     {{"C", "B"}, 0.4}});
  add_invasion_rows(sweep, 4,
                    {{{"A", "B"}, 0.1},
                     {{"B", "A"}, 0.9},
                     {{"A", "C"}, 0.2},
                     {{"C", "A"}, 0.8},
                     {{"B", "C"}, 0.4},
                     {{"C", "B"}, 0.6}});

  const CorrelationMatrix m = rank_correlation_matrix(sweep, StartKind::Invade);
  CHECK(m.ns == std::vector<int>{2, 3, 4});
  REQUIRE(m.rho.size() == 3);
  for (std::size_t a = 0; a < 3; ++a) {
    CHECK(m.rho[a][a] == 1.0);
    for (std::size_t b = 0; b < 3; ++b) CHECK(m.rho[a][b] == m.rho[b][a]);
  }
  CHECK(m.rho[0][1] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(m.rho[0][2] == doctest::Approx(-1.0).epsilon(1e-12));

  const std::vector<RankTable> tables = rank_all(sweep, StartKind::Invade);
  CHECK(m.rho[1][2] ==
        doctest::Approx(rank_correlation(tables[1], tables[2])).epsilon(1e-12));
}

TEST_CASE("validation rows compare simulation against the mean-payoff chain") {
  const PayoffCache cache = classic_cache();
  const std::vector<ValidationRow> rows =
      validation_report(cache, {{"Defector", "Cooperator"}}, 2, 4, 400, 7);

  REQUIRE(rows.size() == 1 + 2 + 3);
  const std::size_t a = cache.index_of("Defector");
  const std::size_t b = cache.index_of("Cooperator");
  const PairGame g = pair_game_from_cache(cache, a, b);
  for (const ValidationRow& row : rows) {
    CHECK(row.name_a == "Defector");
    CHECK(row.name_b == "Cooperator");
    CHECK(row.reps == 400);
    CHECK(row.exact == exact_fixation(row.i, row.n, g));
    CHECK(row.simulated >= 0.0);
    CHECK(row.simulated <= 1.0);
    // Deterministic pair: the simulation follows the chain, so agreement at
    // this frozen seed is expected everywhere.
    CHECK(row.within_ci);
  }

  CHECK_THROWS_AS(validation_report(cache, {{"Defector", "Nobody"}}, 2, 3, 10, 1),
                  ValidationError);
  CHECK_THROWS_AS(validation_report(cache, {}, 1, 3, 10, 1), ValidationError);
  CHECK_THROWS_AS(validation_report(cache, {}, 3, 2, 10, 1), ValidationError);
  CHECK_THROWS_AS(validation_report(cache, {}, 2, 3, 0, 1), ValidationError);
}

TEST_CASE("emitted files start with tool, seed and config lines") {
  const MetaHeader meta{42, "deadbeef"};
  CHECK(meta_header_lines(meta) == "# moranipd 0.1.0\n# seed=42\n# config=deadbeef\n");
}

TEST_CASE("sweep CSV round-trips byte-exactly") {
  const PayoffCache cache = classic_cache();
  SweepConfig cfg;
  cfg.n_min = 2;
  cfg.n_max = 3;
  cfg.reps = 50;
  cfg.seed = 77;
  const SweepResult result = sweep(cache, cfg);
  const MetaHeader meta{77, "abc123"};
  const std::string text = sweep_to_csv(result, meta);
  CHECK(text.rfind("# moranipd", 0) == 0);

  const SweepResult parsed = sweep_from_csv(text);
  REQUIRE(parsed.rows.size() == result.rows.size());
  CHECK(sweep_to_csv(parsed, meta) == text);

  CHECK_THROWS_WITH_AS(sweep_from_csv("name_a,name_b\nx,y\n"),
                       doctest::Contains("unexpected header"), ValidationError);
  CHECK_THROWS_WITH_AS(sweep_from_csv("# only comments\n"), doctest::Contains("missing header"),
                       ValidationError);
  CHECK_THROWS_WITH_AS(
      sweep_from_csv("name_a,name_b,N,i,reps,wins,probability,ci95\nA,B,2,1\n"),
      doctest::Contains("expected 8 fields"), ValidationError);
}

TEST_CASE("rank, correlation, validation and cooperation CSVs are stable") {
  const MetaHeader meta{1, "ff"};
  const std::string head = "# moranipd 0.1.0\n# seed=1\n# config=ff\n";

  RankTable t;
  t.n = 4;
  t.kind = StartKind::Invade;
  t.neutral = 0.25;
  t.rows.push_back({"A, Inc.", 0.5, 1});
  t.rows.push_back({"B", 0.125, 2});
  CHECK(rank_tables_to_csv({t}, meta) ==
        head +
            "kind,N,rank,name,mean_fixation,neutral\n"
            "invade,4,1,\"A, Inc.\",0.5,0.25\n"
            "invade,4,2,B,0.125,0.25\n");

  CorrelationMatrix m;
  m.kind = StartKind::Resist;
  m.ns = {2, 3};
  m.rho = {{1.0, 0.5}, {0.5, 1.0}};
  CHECK(correlation_to_csv(m, meta) ==
        head +
            "kind,n_a,n_b,rho\n"
            "resist,2,2,1\n"
            "resist,2,3,0.5\n"
            "resist,3,2,0.5\n"
            "resist,3,3,1\n");

  ValidationRow row;
  row.name_a = "A";
  row.name_b = "B";
  row.n = 3;
  row.i = 1;
  row.reps = 10;
  row.simulated = 0.5;
  row.ci95 = 0.25;
  row.exact = 0.5;
  row.within_ci = true;
  CHECK(validation_to_csv({row}, meta) ==
        head +
            "name_a,name_b,N,i,reps,simulated,ci95,exact,within_ci\n"
            "A,B,3,1,10,0.5,0.25,0.5,1\n");

  CHECK(cooperation_to_csv({0.5, 1.0}, meta) == head + "round,rate\n1,0.5\n2,1\n");
}
