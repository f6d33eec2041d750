#include "moranipd/moran.hpp"

#include <algorithm>
#include <cmath>

#include "moranipd/errors.hpp"
#include "moranipd/parallel.hpp"

namespace moranipd {

namespace {
constexpr std::uint64_t kFixationRunTag = 0xf17;
}

const PairGame& validate_pair_game(const PairGame& g) {
  if (!(std::isfinite(g.a) && std::isfinite(g.b) && std::isfinite(g.c) && std::isfinite(g.d)))
    throw ValidationError("pair game payoffs must be finite");
  if (g.a < 0 || g.b < 0 || g.c < 0 || g.d < 0)
    throw ValidationError("pair game payoffs must be nonnegative");
  return g;
}

std::pair<double, double> expected_payoffs(int i, int N, const PairGame& g) {
  if (N < 2) throw ValidationError("population size must be >= 2");
  if (i < 1 || i > N - 1) throw ValidationError("expected_payoffs needs 1 <= i <= N-1");
  const double n1 = static_cast<double>(N - 1);
  const double f = (g.a * (i - 1) + g.b * (N - i)) / n1;
  const double gg = (g.c * i + g.d * (N - i - 1)) / n1;
  return {f, gg};
}

TransitionProbs transition_probs(int i, int N, const PairGame& g) {
  const auto [f, gg] = expected_payoffs(i, N, g);
  const double up_w = i * f;
  const double down_w = (N - i) * gg;
  const double total = up_w + down_w;
  if (!(total > 0.0))
    throw ValidationError("degenerate fitness: total fitness is zero at i=" +
                          std::to_string(i) + ", N=" + std::to_string(N));
  TransitionProbs tp;
  tp.up = (up_w / total) * (static_cast<double>(N - i) / N);
  tp.down = (down_w / total) * (static_cast<double>(i) / N);
  tp.stay = 1.0 - tp.up - tp.down;
  return tp;
}

BirthDeathChain build_chain(int N, const PairGame& g) {
  if (N < 2) throw ValidationError("population size must be >= 2");
  validate_pair_game(g);
  BirthDeathChain chain;
  chain.n = N;
  chain.interior.reserve(static_cast<std::size_t>(N - 1));
  for (int i = 1; i <= N - 1; ++i) chain.interior.push_back(transition_probs(i, N, g));
  return chain;
}

namespace {

// Absorbing-system fallback for chains with some p_up = 0: solve
//   (p_up_j + p_down_j) x_j = p_down_j x_{j-1} + p_up_j x_{j+1},
// x_0 = 0, x_N = 1, by tridiagonal elimination. Every interior diagonal is
// positive (a zero diagonal would mean zero total fitness, rejected earlier).
std::vector<double> fixation_by_linear_solve(const BirthDeathChain& chain) {
  const int N = chain.n;
  const int m = N - 1;  // unknowns x_1..x_{N-1}
  std::vector<double> diag(static_cast<std::size_t>(m)), rhs(static_cast<std::size_t>(m), 0.0);
  std::vector<double> super(static_cast<std::size_t>(m), 0.0);

  for (int j = 1; j <= m; ++j) {
    const TransitionProbs& tp = chain.at(j);
    diag[static_cast<std::size_t>(j - 1)] = tp.up + tp.down;
    super[static_cast<std::size_t>(j - 1)] = -tp.up;
  }
  rhs[static_cast<std::size_t>(m - 1)] = chain.at(m).up;  // x_N = 1 term

  // Forward elimination of the subdiagonal (-p_down_j).
  for (int j = 2; j <= m; ++j) {
    const double sub = -chain.at(j).down;
    const double pivot = diag[static_cast<std::size_t>(j - 2)];
    if (std::abs(pivot) < 1e-300)
      throw std::runtime_error("fixation solve: zero pivot");
    const double w = sub / pivot;
    diag[static_cast<std::size_t>(j - 1)] -= w * super[static_cast<std::size_t>(j - 2)];
    rhs[static_cast<std::size_t>(j - 1)] -= w * rhs[static_cast<std::size_t>(j - 2)];
  }

  std::vector<double> x(static_cast<std::size_t>(N + 1), 0.0);
  x[static_cast<std::size_t>(N)] = 1.0;
  for (int j = m; j >= 1; --j) {
    double v = rhs[static_cast<std::size_t>(j - 1)];
    if (j < m) v -= super[static_cast<std::size_t>(j - 1)] * x[static_cast<std::size_t>(j + 1)];
    const double pivot = diag[static_cast<std::size_t>(j - 1)];
    if (std::abs(pivot) < 1e-300)
      throw std::runtime_error("fixation solve: zero pivot");
    x[static_cast<std::size_t>(j)] = v / pivot;
  }
  for (double& v : x) v = std::clamp(v, 0.0, 1.0);
  return x;
}

}  // namespace

std::vector<double> exact_fixation_curve(int N, const PairGame& g) {
  const BirthDeathChain chain = build_chain(N, g);

  bool has_zero_up = false;
  for (const TransitionProbs& tp : chain.interior)
    if (tp.up == 0.0) has_zero_up = true;
  if (has_zero_up) return fixation_by_linear_solve(chain);

  // log prod_{k<=j} gamma_k for j = 1.. until the first gamma_j = 0; terms
  // past a zero gamma vanish exactly and states at or above it fix surely.
  std::vector<double> lcum;
  lcum.reserve(static_cast<std::size_t>(N - 1));
  int zero_at = N;  // first j with gamma_j == 0, N = none
  double acc = 0.0;
  for (int j = 1; j <= N - 1; ++j) {
    const TransitionProbs& tp = chain.at(j);
    const double gamma = tp.down / tp.up;
    if (gamma == 0.0) {
      zero_at = j;
      break;
    }
    acc += std::log(gamma);
    lcum.push_back(acc);
  }

  // log(1 + sum_{j=1..jmax} prod_{k<=j} gamma_k), zero terms dropped.
  const auto log_one_plus_terms = [&](int jmax) {
    const int terms = std::min(jmax, zero_at - 1);
    double mx = 0.0;
    for (int j = 0; j < terms; ++j) mx = std::max(mx, lcum[static_cast<std::size_t>(j)]);
    double s = std::exp(0.0 - mx);
    for (int j = 0; j < terms; ++j) s += std::exp(lcum[static_cast<std::size_t>(j)] - mx);
    return mx + std::log(s);
  };

  const double lden = log_one_plus_terms(N - 1);
  std::vector<double> x(static_cast<std::size_t>(N + 1), 0.0);
  x[static_cast<std::size_t>(N)] = 1.0;
  for (int i = 1; i <= N - 1; ++i)
    x[static_cast<std::size_t>(i)] =
        std::clamp(std::exp(log_one_plus_terms(i - 1) - lden), 0.0, 1.0);
  return x;
}

double exact_fixation(int i, int N, const PairGame& g) {
  if (N < 2) throw ValidationError("population size must be >= 2");
  if (i < 0 || i > N) throw ValidationError("exact_fixation needs 0 <= i <= N");
  if (i == 0) return 0.0;
  if (i == N) return 1.0;
  return exact_fixation_curve(N, g)[static_cast<std::size_t>(i)];
}

namespace {

// Per-run payoff source: fresh joint cache draws per interaction, or one
// frozen joint draw per strategy pair per run. A draw always carries both
// sides of the same sampled match (.first is a's side).
class FitnessSource {
 public:
  FitnessSource(const PayoffCache& cache, bool frozen)
      : cache_(cache), frozen_(frozen), n_(cache.roster_size()) {
    if (frozen_) {
      values_.assign(n_ * n_, {0.0, 0.0});
      have_.assign(n_ * n_, 0);
    }
  }

  std::pair<double, double> interaction(int a, int b, Rng& rng) {
    const std::size_t ua = static_cast<std::size_t>(a);
    const std::size_t ub = static_cast<std::size_t>(b);
    if (!frozen_) return cache_.draw_pair(ua, ub, rng);
    const std::size_t lo = std::min(ua, ub), hi = std::max(ua, ub);
    const std::size_t key = lo * n_ + hi;
    if (!have_[key]) {
      values_[key] = cache_.draw_pair(lo, hi, rng);
      have_[key] = 1;
    }
    const auto& s = values_[key];
    return ua <= ub ? s : std::pair{s.second, s.first};
  }

 private:
  const PayoffCache& cache_;
  bool frozen_;
  std::size_t n_;
  std::vector<std::pair<double, double>> values_;
  std::vector<char> have_;
};

struct StepOutcome {
  std::size_t birth = 0;
  std::size_t death = 0;
  bool degenerate = false;
};

// Picks the reproducing and dying slots without mutating the population.
// Draw order is fixed (one interaction draw per unordered slot pair in
// pair-major order, then the birth pick, then the death pick) so a run is a
// pure function of its seed.
StepOutcome pick_birth_death(const std::vector<int>& slots, std::vector<double>& fitness,
                             FitnessSource& src, Rng& rng) {
  const std::size_t N = slots.size();
  std::fill(fitness.begin(), fitness.end(), 0.0);
  for (std::size_t u = 0; u + 1 < N; ++u) {
    for (std::size_t v = u + 1; v < N; ++v) {
      const auto s = src.interaction(slots[u], slots[v], rng);
      fitness[u] += s.first;
      fitness[v] += s.second;
    }
  }
  double total = 0.0;
  for (std::size_t u = 0; u < N; ++u) total += fitness[u];

  StepOutcome out;
  if (!(total > 0.0)) {
    out.degenerate = true;
    out.birth = rng.uniform_index(N);
  } else {
    const double r = rng.uniform01() * total;
    double run = 0.0;
    out.birth = N - 1;
    for (std::size_t u = 0; u < N; ++u) {
      run += fitness[u];
      if (r < run) {
        out.birth = u;
        break;
      }
    }
  }
  out.death = rng.uniform_index(N);
  return out;
}

void validate_population(const PopulationState& pop, const PayoffCache& cache) {
  if (pop.slots.empty()) throw ValidationError("population must not be empty");
  for (int id : pop.slots)
    if (id < 0 || static_cast<std::size_t>(id) >= cache.roster_size())
      throw ValidationError("population strategy id out of cache range");
}

}  // namespace

PopulationState moran_step(const PopulationState& pop, const PayoffCache& cache, Rng& rng,
                           const MoranOptions& options) {
  validate_population(pop, cache);
  PopulationState next = pop;
  std::vector<double> fitness(next.slots.size(), 0.0);
  FitnessSource src(cache, options.frozen_draws);
  const StepOutcome o = pick_birth_death(next.slots, fitness, src, rng);
  next.slots[o.death] = next.slots[o.birth];
  return next;
}

FixationRun run_to_fixation(PopulationState pop, const PayoffCache& cache, Rng& rng,
                            const MoranOptions& options) {
  validate_population(pop, cache);
  const std::size_t N = pop.slots.size();

  std::vector<int> count(cache.roster_size(), 0);
  for (int id : pop.slots) ++count[static_cast<std::size_t>(id)];
  for (std::size_t id = 0; id < count.size(); ++id)
    if (count[id] == static_cast<int>(N)) return {static_cast<int>(id), 0, false};

  FitnessSource src(cache, options.frozen_draws);
  std::vector<double> fitness(N, 0.0);
  FixationRun run;
  for (;;) {
    if (run.steps >= options.step_cap)
      throw StepCapError("fixation run exceeded step cap of " +
                             std::to_string(options.step_cap) + " steps",
                         run.steps);
    const StepOutcome o = pick_birth_death(pop.slots, fitness, src, rng);
    run.degenerate_fitness_seen |= o.degenerate;
    ++run.steps;
    const int parent = pop.slots[o.birth];
    const int dead = pop.slots[o.death];
    if (parent != dead) {
      pop.slots[o.death] = parent;
      --count[static_cast<std::size_t>(dead)];
      ++count[static_cast<std::size_t>(parent)];
      if (count[static_cast<std::size_t>(parent)] == static_cast<int>(N)) {
        run.winner = parent;
        return run;
      }
    }
  }
}

FixationEstimate estimate_fixation(const PayoffCache& cache, std::size_t a, std::size_t b,
                                   int i, int N, int reps, std::uint64_t master_seed,
                                   const MoranOptions& options, int jobs) {
  if (a >= cache.roster_size() || b >= cache.roster_size())
    throw ValidationError("strategy id out of cache range");
  if (a == b) throw ValidationError("fixation estimate needs two distinct strategy ids");
  if (N < 2) throw ValidationError("population size must be >= 2");
  if (i < 1 || i > N - 1) throw ValidationError("start count must be in [1, N-1]");
  if (reps < 1) throw ValidationError("reps must be >= 1");

  std::vector<std::uint8_t> won(static_cast<std::size_t>(reps), 0);
  parallel_for(static_cast<std::size_t>(reps), jobs, [&](std::size_t r) {
    Rng rng(derive_seed(master_seed, kFixationRunTag, r));
    PopulationState pop;
    pop.slots.assign(static_cast<std::size_t>(N), static_cast<int>(b));
    std::fill_n(pop.slots.begin(), i, static_cast<int>(a));
    try {
      const FixationRun run = run_to_fixation(std::move(pop), cache, rng, options);
      won[r] = run.winner == static_cast<int>(a) ? 1 : 0;
    } catch (const StepCapError& e) {
      throw StepCapError(std::string(e.what()) + " (repetition " + std::to_string(r) + ")",
                         e.steps);
    }
  });

  FixationEstimate est;
  est.repetitions = reps;
  est.master_seed = master_seed;
  for (std::uint8_t w : won) est.wins += w;
  est.probability = static_cast<double>(est.wins) / reps;
  est.ci95 = 1.96 * std::sqrt(est.probability * (1.0 - est.probability) / reps);
  return est;
}

PairGame pair_game_from_cache(const PayoffCache& cache, std::size_t a, std::size_t b) {
  PairGame g;
  g.a = cache.mean(a, a).first;
  g.b = cache.mean(a, b).first;
  g.c = cache.mean(b, a).first;
  g.d = cache.mean(b, b).first;
  return validate_pair_game(g);
}

}  // namespace moranipd
