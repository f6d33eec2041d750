#include "moranipd/payoff_cache.hpp"

#include <nlohmann/json.hpp>

#include "moranipd/errors.hpp"
#include "moranipd/io.hpp"
#include "moranipd/parallel.hpp"
#include "moranipd/strategy_io.hpp"
#include "moranipd/text.hpp"

namespace moranipd {

namespace {
constexpr std::uint64_t kCacheTag = 0xca0e;
constexpr int kMetaVersion = 1;
}  // namespace

PayoffCache::PayoffCache(std::vector<StrategySpec> roster, MatchConfig cfg,
                         int samples_requested)
    : roster_(std::move(roster)), cfg_(cfg), samples_requested_(samples_requested) {
  if (roster_.empty()) throw ValidationError("cache roster must not be empty");
  if (samples_requested_ < 1) throw ValidationError("samples must be >= 1");
  validate_match_config(cfg_);
  const std::size_t n = roster_.size();
  // Persistence keys pairs by name, so names must be unambiguous.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (roster_[i].name == roster_[j].name)
        throw ValidationError("duplicate strategy name in cache roster: " + roster_[i].name);
  pairs_.resize(n * (n + 1) / 2);
}

std::size_t PayoffCache::pair_index(std::size_t lo, std::size_t hi, std::size_t n) {
  // Row-major upper triangle including the diagonal.
  return lo * n - lo * (lo - 1) / 2 + (hi - lo);
}

std::size_t PayoffCache::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < roster_.size(); ++i)
    if (roster_[i].name == name) return i;
  throw ValidationError("strategy not in cache roster: " + name);
}

std::uint64_t PayoffCache::roster_fingerprint() const { return roster_hash(roster_); }

std::size_t PayoffCache::checked_pair_index(std::size_t a, std::size_t b) const {
  const std::size_t lo = a <= b ? a : b;
  const std::size_t hi = a <= b ? b : a;
  if (hi >= roster_.size()) throw ValidationError("strategy id out of range");
  return pair_index(lo, hi, roster_.size());
}

const PayoffCache::PairData& PayoffCache::pair_data(std::size_t a, std::size_t b) const {
  return pairs_[checked_pair_index(a, b)];
}

PayoffCache::PairData& PayoffCache::mutable_pair_data(std::size_t a, std::size_t b) {
  return pairs_[checked_pair_index(a, b)];
}

std::size_t PayoffCache::sample_count(std::size_t a, std::size_t b) const {
  return pair_data(a, b).samples.size();
}

std::pair<double, double> PayoffCache::sample(std::size_t a, std::size_t b,
                                              std::size_t k) const {
  const auto& s = pair_data(a, b).samples.at(k);
  return a <= b ? s : std::pair{s.second, s.first};
}

std::pair<double, double> PayoffCache::mean(std::size_t a, std::size_t b) const {
  const auto& m = pair_data(a, b).mean;
  return a <= b ? m : std::pair{m.second, m.first};
}

double PayoffCache::draw_focal(std::size_t a, std::size_t b, Rng& rng) const {
  const PairData& pd = pair_data(a, b);
  const std::size_t k = pd.samples.size() > 1 ? rng.uniform_index(pd.samples.size()) : 0;
  const auto& s = pd.samples[k];
  return a <= b ? s.first : s.second;
}

std::pair<double, double> PayoffCache::draw_pair(std::size_t a, std::size_t b,
                                                 Rng& rng) const {
  const PairData& pd = pair_data(a, b);
  const std::size_t k = pd.samples.size() > 1 ? rng.uniform_index(pd.samples.size()) : 0;
  const auto& s = pd.samples[k];
  return a <= b ? s : std::pair{s.second, s.first};
}

void PayoffCache::finalize_means() {
  for (PairData& pd : pairs_) {
    if (pd.samples.empty()) throw ValidationError("cache pair has no samples");
    double fa = 0.0, fb = 0.0;
    for (const auto& s : pd.samples) {
      fa += s.first;
      fb += s.second;
    }
    const double n = static_cast<double>(pd.samples.size());
    pd.mean = {fa / n, fb / n};
  }
}

PayoffCache build_cache(const std::vector<StrategySpec>& roster, int samples,
                        const MatchConfig& cfg, int jobs) {
  PayoffCache cache(roster, cfg, samples);
  const std::size_t n = roster.size();

  struct PairIds {
    std::size_t lo, hi;
  };
  std::vector<PairIds> todo;
  todo.reserve(n * (n + 1) / 2);
  for (std::size_t lo = 0; lo < n; ++lo)
    for (std::size_t hi = lo; hi < n; ++hi) todo.push_back({lo, hi});

  parallel_for(todo.size(), jobs, [&](std::size_t w) {
    const auto [lo, hi] = todo[w];
    const StrategySpec& a = roster[lo];
    const StrategySpec& b = roster[hi];
    const bool random_outcomes = a.stochastic() || b.stochastic() || cfg.noise > 0.0;
    const int want = random_outcomes ? samples : 1;
    const std::uint64_t pidx = PayoffCache::pair_index(lo, hi, n);

    PayoffCache::PairData& pd = cache.mutable_pair_data(lo, hi);
    pd.constant = !random_outcomes;
    pd.samples.reserve(static_cast<std::size_t>(want));
    for (int k = 0; k < want; ++k) {
      MatchConfig mc = cfg;
      mc.seed = derive_seed(cfg.seed, kCacheTag, pidx, static_cast<std::uint64_t>(k));
      pd.samples.push_back(play_match(a, b, mc).means);
    }
  });

  cache.finalize_means();
  return cache;
}

void save_cache(const PayoffCache& cache, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);

  nlohmann::json meta;
  meta["version"] = kMetaVersion;
  meta["match"] = {{"turns", cache.config().turns},
                   {"noise", cache.config().noise},
                   {"matrix",
                    {{"R", cache.config().matrix.r},
                     {"S", cache.config().matrix.s},
                     {"T", cache.config().matrix.t},
                     {"P", cache.config().matrix.p}}},
                   {"seed", cache.config().seed}};
  meta["samples"] = cache.samples_requested();
  meta["roster_hash"] = to_hex(cache.roster_fingerprint());
  nlohmann::json roster = nlohmann::json::array();
  for (const auto& s : cache.roster())
    roster.push_back({{"name", s.name}, {"text", serialize_strategy(s)}});
  meta["roster"] = std::move(roster);
  write_text_file(dir / "cache_meta.json", meta.dump(2) + "\n");

  std::string csv = "name_a,name_b,sample_index,mean_a,mean_b\n";
  const std::size_t n = cache.roster_size();
  for (std::size_t lo = 0; lo < n; ++lo)
    for (std::size_t hi = lo; hi < n; ++hi) {
      const auto& pd = cache.pair_data(lo, hi);
      for (std::size_t k = 0; k < pd.samples.size(); ++k) {
        csv += csv_escape(cache.spec(lo).name) + "," + csv_escape(cache.spec(hi).name) +
               "," + std::to_string(k) + "," + format_double(pd.samples[k].first) + "," +
               format_double(pd.samples[k].second) + "\n";
      }
    }
  write_text_file(dir / "cache.csv", csv);
}

PayoffCache load_cache(const std::filesystem::path& dir) {
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(read_text_file(dir / "cache_meta.json"));
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("cache_meta.json: " + std::string(e.what()));
  }

  MatchConfig cfg;
  int samples = 1;
  std::vector<StrategySpec> roster;
  try {
    if (meta.at("version").get<int>() != kMetaVersion)
      throw ValidationError("unsupported cache version");
    const auto& match = meta.at("match");
    cfg.turns = match.at("turns").get<int>();
    cfg.noise = match.at("noise").get<double>();
    const auto& m = match.at("matrix");
    cfg.matrix = {m.at("R").get<double>(), m.at("S").get<double>(), m.at("T").get<double>(),
                  m.at("P").get<double>()};
    cfg.seed = match.at("seed").get<std::uint64_t>();
    samples = meta.at("samples").get<int>();
    for (const auto& entry : meta.at("roster"))
      roster.push_back(parse_strategy(entry.at("text").get<std::string>(),
                                      entry.at("name").get<std::string>()));
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("cache_meta.json: " + std::string(e.what()));
  }

  PayoffCache cache(std::move(roster), cfg, samples);
  if (to_hex(cache.roster_fingerprint()) != meta.at("roster_hash").get<std::string>())
    throw ValidationError("cache roster hash mismatch");

  const std::string csv = read_text_file(dir / "cache.csv");
  const auto lines = split_char(csv, '\n');
  if (lines.empty() || trim(lines[0]) != "name_a,name_b,sample_index,mean_a,mean_b")
    throw ValidationError("cache.csv: unexpected header");
  for (std::size_t li = 1; li < lines.size(); ++li) {
    if (trim(lines[li]).empty()) continue;
    const auto fields = csv_parse_line(lines[li]);
    if (fields.size() != 5)
      throw ValidationError("cache.csv line " + std::to_string(li + 1) +
                            ": expected 5 fields");
    const std::size_t a = cache.index_of(fields[0]);
    const std::size_t b = cache.index_of(fields[1]);
    if (a > b)
      throw ValidationError("cache.csv line " + std::to_string(li + 1) +
                            ": rows must be in canonical order");
    const std::size_t k = static_cast<std::size_t>(parse_int(fields[2]));
    auto& pd = cache.mutable_pair_data(a, b);
    if (pd.samples.size() != k)
      throw ValidationError("cache.csv line " + std::to_string(li + 1) +
                            ": sample indices must be dense and ordered");
    pd.samples.emplace_back(parse_double(fields[3]), parse_double(fields[4]));
  }

  // Restore the constant flags the same way build_cache assigns them.
  const std::size_t n = cache.roster_size();
  for (std::size_t lo = 0; lo < n; ++lo)
    for (std::size_t hi = lo; hi < n; ++hi) {
      auto& pd = cache.mutable_pair_data(lo, hi);
      pd.constant = !(cache.spec(lo).stochastic() || cache.spec(hi).stochastic() ||
                      cfg.noise > 0.0);
    }

  cache.finalize_means();
  return cache;
}

}  // namespace moranipd
