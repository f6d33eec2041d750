#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "moranipd/match.hpp"
#include "moranipd/rng.hpp"
#include "moranipd/strategy.hpp"

namespace moranipd {

// Sampled per-pair score distributions: for every unordered roster pair
// (self-pairs included) a list of (mean_a, mean_b) per-turn score pairs from
// independent matches. Storage is triangular; the (B, A) view is the (A, B)
// view with sides swapped. Immutable once built, safe to share across
// threads.
class PayoffCache {
 public:
  struct PairData {
    std::vector<std::pair<double, double>> samples;  // first = lower-index side
    std::pair<double, double> mean{0.0, 0.0};
    bool constant = false;  // deterministic pair, noise 0: one sample covers all
  };

  PayoffCache(std::vector<StrategySpec> roster, MatchConfig cfg, int samples_requested);

  std::size_t roster_size() const { return roster_.size(); }
  const std::vector<StrategySpec>& roster() const { return roster_; }
  const StrategySpec& spec(std::size_t id) const { return roster_[id]; }
  std::size_t index_of(const std::string& name) const;  // throws if unknown
  const MatchConfig& config() const { return cfg_; }
  int samples_requested() const { return samples_requested_; }
  std::uint64_t roster_fingerprint() const;

  // Oriented views of pair (a, b): element .first is a's side.
  std::size_t sample_count(std::size_t a, std::size_t b) const;
  std::pair<double, double> sample(std::size_t a, std::size_t b, std::size_t k) const;
  std::pair<double, double> mean(std::size_t a, std::size_t b) const;

  // One fresh draw of a's per-turn score against b: a uniformly random stored
  // sample. Single-sample pairs return their sample without consuming
  // randomness.
  double draw_focal(std::size_t a, std::size_t b, Rng& rng) const;

  // One fresh draw of a full interaction between a and b: both sides of the
  // same uniformly random stored sample (.first is a's side), preserving the
  // within-match correlation of the two scores. Single-sample pairs return
  // their sample without consuming randomness.
  std::pair<double, double> draw_pair(std::size_t a, std::size_t b, Rng& rng) const;

  const PairData& pair_data(std::size_t a, std::size_t b) const;  // canonical order
  PairData& mutable_pair_data(std::size_t a, std::size_t b);      // build/load only
  void finalize_means();

  static std::size_t pair_index(std::size_t lo, std::size_t hi, std::size_t n);

 private:
  std::size_t checked_pair_index(std::size_t a, std::size_t b) const;

  std::vector<StrategySpec> roster_;
  MatchConfig cfg_;
  int samples_requested_;
  std::vector<PairData> pairs_;  // upper triangle, row-major
};

// Plays the matches behind the cache. Deterministic pairs at noise 0 get a
// single constant-flagged sample; every other pair gets `samples` matches
// with seeds derived from (cfg.seed, pair index, sample index), so the cache
// is bit-identical for any job count.
PayoffCache build_cache(const std::vector<StrategySpec>& roster, int samples,
                        const MatchConfig& cfg, int jobs = 1);

// Persistence: <dir>/cache.csv holds one row per stored sample
// (name_a,name_b,sample_index,mean_a,mean_b, canonical pairs only) and
// <dir>/cache_meta.json records the match config, the roster (as strategy
// text), and the roster fingerprint. Round-trips bit-exactly.
void save_cache(const PayoffCache& cache, const std::filesystem::path& dir);
PayoffCache load_cache(const std::filesystem::path& dir);

}  // namespace moranipd
