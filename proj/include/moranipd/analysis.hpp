#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "moranipd/moran.hpp"

namespace moranipd {

// One emitted estimate: strategy name_a starting with i copies against
// name_b filling the rest of a size-n population.
struct SweepRow {
  std::string name_a;
  std::string name_b;
  int n = 2;
  int i = 1;
  FixationEstimate est;
};

struct SweepResult {
  std::vector<SweepRow> rows;  // sorted by (name_a, name_b, n, i)
};

// The start counts studied per population size: invasion (1), coexistence
// (floor(n/2)) and resistance (n-1), deduplicated for tiny n.
std::vector<int> sweep_starts(int n);

struct SweepConfig {
  int n_min = 2;
  int n_max = 14;
  int reps = 1000;
  std::uint64_t seed = 0;
  MoranOptions moran{};
  int jobs = 1;
};

// Simulates every unordered pair of distinct cache entries at every n and
// start, emitting both orientations of each cell (the reverse row is the
// same runs seen from the other side, so complements sum to 1 exactly). For
// odd n the midpoint start is additionally simulated in the reverse
// orientation, so every ordered pair has rows at 1, floor(n/2), n - floor(n/2)
// and n-1. Cells whose rows already exist in `resume` are carried over
// unchanged. Per-cell failures are collected into `cell_errors` (when given)
// instead of aborting the sweep. Cell seeds derive from (seed, ids, n, i), so
// output is identical for any job count.
SweepResult sweep(const PayoffCache& cache, const SweepConfig& cfg,
                  const SweepResult* resume = nullptr,
                  std::vector<std::string>* cell_errors = nullptr);

enum class StartKind { Invade, Coexist, Resist };
int start_count(StartKind kind, int n);
const char* start_kind_name(StartKind kind);
StartKind start_kind_from_name(std::string_view name);

struct RankRow {
  std::string name;
  double mean_fixation = 0.0;
  int rank = 0;
};

struct RankTable {
  int n = 2;
  StartKind kind = StartKind::Invade;
  double neutral = 0.0;        // i/n reference for this start kind
  std::vector<RankRow> rows;   // descending mean; ties broken by name order
};

// Throws an incomplete-sweep ValidationError listing missing cells.
RankTable rank(const SweepResult& sweep, StartKind kind, int n);
std::vector<RankTable> rank_all(const SweepResult& sweep, StartKind kind);

// Spearman rank correlation: Pearson on midrank vectors of the mean fixation
// values, matched by strategy name. Throws when the tables cover different
// strategy sets.
double rank_correlation(const RankTable& t1, const RankTable& t2);

struct CorrelationMatrix {
  StartKind kind = StartKind::Invade;
  std::vector<int> ns;
  std::vector<std::vector<double>> rho;  // rho[i][j] over ns x ns
};
CorrelationMatrix rank_correlation_matrix(const SweepResult& sweep, StartKind kind);

// Simulated-vs-exact comparison rows for chosen pairs: the exact column is
// the birth-death chain built from the pair's mean cached payoffs, and
// within_ci tests |simulated - exact| against the 95% binomial half-width at
// the exact probability. Deterministic pairs should agree everywhere;
// stochastic pairs are expected to break this.
struct ValidationRow {
  std::string name_a;
  std::string name_b;
  int n = 2;
  int i = 1;
  int reps = 0;
  double simulated = 0.0;
  double ci95 = 0.0;
  double exact = 0.0;
  bool within_ci = false;
};
std::vector<ValidationRow> validation_report(
    const PayoffCache& cache, const std::vector<std::pair<std::string, std::string>>& pairs,
    int n_min, int n_max, int reps, std::uint64_t seed, const MoranOptions& options = {},
    int jobs = 1);

// Every emitted file starts with '# <tool> <version>', '# seed=...',
// '# config=...' lines; readers skip '#' lines.
struct MetaHeader {
  std::uint64_t seed = 0;
  std::string config_hash;  // hex fingerprint of the run configuration
};
std::string meta_header_lines(const MetaHeader& meta);

std::string sweep_to_csv(const SweepResult& sweep, const MetaHeader& meta);
SweepResult sweep_from_csv(std::string_view text);
std::string rank_tables_to_csv(const std::vector<RankTable>& tables, const MetaHeader& meta);
std::string correlation_to_csv(const CorrelationMatrix& m, const MetaHeader& meta);
std::string validation_to_csv(const std::vector<ValidationRow>& rows, const MetaHeader& meta);
std::string cooperation_to_csv(const std::vector<double>& rates, const MetaHeader& meta);

}  // namespace moranipd
