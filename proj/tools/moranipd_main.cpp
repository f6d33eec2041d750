// moranipd: batch workbench for evolutionary dynamics of iterated
// prisoner's dilemma strategies. Subcommands build payoff caches, compute
// exact birth-death fixation curves, run Moran-process estimates and sweeps,
// rank strategies, correlate rankings across population sizes, validate
// simulation against the mean-payoff chain, trace cooperation rates, and
// train strategies with a genetic algorithm.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "moranipd/analysis.hpp"
#include "moranipd/errors.hpp"
#include "moranipd/io.hpp"
#include "moranipd/match.hpp"
#include "moranipd/moran.hpp"
#include "moranipd/payoff_cache.hpp"
#include "moranipd/strategy.hpp"
#include "moranipd/strategy_io.hpp"
#include "moranipd/svg_plot.hpp"
#include "moranipd/text.hpp"
#include "moranipd/trainer.hpp"
#include "moranipd/version.hpp"

namespace fs = std::filesystem;
using namespace moranipd;

namespace {

// Everything the subcommands share. Sentinels (-1 / 0 / empty) mean "not
// given"; each command resolves its own defaults so one flag set serves all.
struct Options {
  std::string roster_path;
  std::string cache_dir;
  std::string out_dir = "out";
  std::string matrix_text = "3,0,5,1";
  std::string pair_text;
  std::vector<std::string> pair_list;
  std::string game_text;
  std::string sweep_path;
  std::string kind_text = "invade";
  std::string focal;
  std::string objective_text = "moran";
  int turns = 200;
  double noise = 0.0;
  int n = 0;
  int i = -1;
  int n_min = 2;
  int n_max = 14;
  int reps = -1;
  int samples = -1;
  std::uint64_t seed = 1;
  std::uint64_t step_cap = 10'000'000;
  int jobs = 1;
  bool frozen_draws = false;
  bool plots = false;
  bool no_resume = false;
  // train
  int states = 8;
  int pop = 20;
  int generations = 50;
  double mutation_rate = 0.1;
  int elitism = 2;
  bool no_crossover = false;
};

PayoffMatrix parse_matrix(const std::string& text) {
  auto parts = split_char(text, ',');
  if (parts.size() != 4) throw ValidationError("--matrix expects R,S,T,P (4 values)");
  PayoffMatrix m;
  m.r = parse_double(trim(parts[0]));
  m.s = parse_double(trim(parts[1]));
  m.t = parse_double(trim(parts[2]));
  m.p = parse_double(trim(parts[3]));
  return m;
}

PairGame parse_game(const std::string& text) {
  auto parts = split_char(text, ',');
  if (parts.size() != 4) throw ValidationError("--game expects a,b,c,d (4 values)");
  PairGame g;
  g.a = parse_double(trim(parts[0]));
  g.b = parse_double(trim(parts[1]));
  g.c = parse_double(trim(parts[2]));
  g.d = parse_double(trim(parts[3]));
  return validate_pair_game(g);
}

std::pair<std::string, std::string> parse_pair(const std::string& text) {
  auto comma = text.find(',');
  if (comma == std::string::npos || comma == 0 || comma + 1 >= text.size()) {
    throw ValidationError("--pair expects NAME_A,NAME_B");
  }
  return {std::string(trim(text.substr(0, comma))), std::string(trim(text.substr(comma + 1)))};
}

std::vector<StrategySpec> load_roster(const Options& opt) {
  if (opt.roster_path.empty()) return builtin_roster();
  return load_roster_file(opt.roster_path);
}

// The deterministic scripted classics: the default opponent set for training,
// where a noiseless fitness signal keeps desk-scale runs cheap.
std::vector<StrategySpec> classic_roster() {
  const std::vector<std::string> names = {
      "Cooperator", "Defector",      "Alternator", "Tit For Tat",         "Win Stay Lose Shift",
      "Grudger",    "Fool Me Once",  "Handshake",  "Collective Strategy", "Aggravater",
  };
  std::vector<StrategySpec> out;
  for (const auto& s : builtin_roster()) {
    for (const auto& name : names) {
      if (s.name == name) {
        out.push_back(s);
        break;
      }
    }
  }
  return out;
}

MatchConfig make_match_config(const Options& opt) {
  MatchConfig cfg;
  cfg.turns = opt.turns;
  cfg.noise = opt.noise;
  cfg.matrix = parse_matrix(opt.matrix_text);
  cfg.seed = opt.seed;
  validate_match_config(cfg);
  return cfg;
}

int resolve(int sentinel_value, int fallback) { return sentinel_value < 0 ? fallback : sentinel_value; }

PayoffCache get_cache(const Options& opt, int default_samples = 100) {
  if (!opt.cache_dir.empty()) return load_cache(opt.cache_dir);
  auto roster = load_roster(opt);
  return build_cache(roster, resolve(opt.samples, default_samples), make_match_config(opt),
                     opt.jobs);
}

MoranOptions moran_options(const Options& opt) {
  MoranOptions mo;
  mo.step_cap = opt.step_cap;
  mo.frozen_draws = opt.frozen_draws;
  return mo;
}

// Fingerprint of everything that shapes the numbers in an output file.
// Deliberately excludes --jobs and --out: runs that differ only in
// parallelism or destination must emit byte-identical files.
std::string config_fingerprint(const std::string& command, const PayoffCache& cache,
                               const std::string& extras) {
  std::ostringstream s;
  const MatchConfig& cfg = cache.config();
  s << "cmd=" << command << ";roster=" << to_hex(cache.roster_fingerprint())
    << ";turns=" << cfg.turns << ";noise=" << format_double(cfg.noise) << ";matrix="
    << format_double(cfg.matrix.r) << "," << format_double(cfg.matrix.s) << ","
    << format_double(cfg.matrix.t) << "," << format_double(cfg.matrix.p)
    << ";cache_seed=" << cfg.seed << ";samples=" << cache.samples_requested() << ";" << extras;
  return to_hex(fnv1a64(s.str()));
}

// Pulls "# seed=..." / "# config=..." written by an earlier run so derived
// outputs (rank, corr) carry the provenance of their input sweep.
MetaHeader meta_from_text(const std::string& text) {
  MetaHeader meta;
  meta.config_hash = to_hex(fnv1a64(text));
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] != '#') break;
    std::string_view body = trim(std::string_view(line).substr(1));
    if (body.rfind("seed=", 0) == 0) {
      meta.seed = static_cast<std::uint64_t>(std::stoull(std::string(body.substr(5))));
    }
    if (body.rfind("config=", 0) == 0) meta.config_hash = std::string(body.substr(7));
  }
  return meta;
}

void write_output(const fs::path& path, const std::string& text) {
  write_text_file(path, text);
  std::cout << "wrote " << path.string() << "\n";
}

std::string actions_to_string(const std::vector<Action>& actions) {
  std::string s;
  for (Action a : actions) s += to_char(a);
  return s;
}

// --- subcommand bodies ---

int run_sample(const Options& opt) {
  auto roster = load_roster(opt);
  auto cache = build_cache(roster, resolve(opt.samples, 100), make_match_config(opt), opt.jobs);
  save_cache(cache, opt.out_dir);
  std::size_t n = cache.roster_size();
  std::cout << "cached " << n << " strategies, " << n * (n + 1) / 2 << " pairs, up to "
            << cache.samples_requested() << " samples each in " << opt.out_dir << "\n";
  return 0;
}

int run_exact(const Options& opt) {
  std::vector<std::pair<int, std::vector<double>>> curves;  // (N, x_0..x_N)
  MetaHeader meta;
  meta.seed = opt.seed;
  std::string label_a = "type1", label_b = "type2";

  PairGame game;
  if (!opt.game_text.empty()) {
    game = parse_game(opt.game_text);
    std::ostringstream extras;
    extras << "game=" << format_double(game.a) << "," << format_double(game.b) << ","
           << format_double(game.c) << "," << format_double(game.d);
    meta.config_hash = to_hex(fnv1a64("cmd=exact;" + extras.str()));
  } else if (!opt.pair_text.empty()) {
    auto cache = get_cache(opt);
    auto [name_a, name_b] = parse_pair(opt.pair_text);
    game = pair_game_from_cache(cache, cache.index_of(name_a), cache.index_of(name_b));
    label_a = name_a;
    label_b = name_b;
    meta.config_hash = config_fingerprint("exact", cache, "pair=" + name_a + "," + name_b);
  } else {
    throw ValidationError("exact: provide --game a,b,c,d or --pair NAME_A,NAME_B");
  }

  int lo = opt.n > 0 ? opt.n : opt.n_min;
  int hi = opt.n > 0 ? opt.n : opt.n_max;
  for (int n = lo; n <= hi; ++n) curves.emplace_back(n, exact_fixation_curve(n, game));

  std::ostringstream csv;
  csv << meta_header_lines(meta) << "N,i,probability\n";
  for (const auto& [n, curve] : curves) {
    for (int i = 0; i <= n; ++i) {
      csv << n << "," << i << "," << format_double(curve[static_cast<std::size_t>(i)]) << "\n";
    }
  }
  write_output(fs::path(opt.out_dir) / "exact.csv", csv.str());

  std::cout << "fixation of " << label_a << " vs " << label_b << " (a,b,c,d = "
            << format_double(game.a) << "," << format_double(game.b) << ","
            << format_double(game.c) << "," << format_double(game.d) << ")\n";
  for (const auto& [n, curve] : curves) {
    std::cout << "N=" << n << ":";
    for (int i : sweep_starts(n))
      std::cout << " x_" << i << "=" << format_double(curve[static_cast<std::size_t>(i)]);
    std::cout << "\n";
  }
  return 0;
}

int run_moran(const Options& opt) {
  if (opt.pair_text.empty()) throw ValidationError("moran: --pair NAME_A,NAME_B is required");
  if (opt.n < 2) throw ValidationError("moran: --n (population size >= 2) is required");
  auto cache = get_cache(opt);
  auto [name_a, name_b] = parse_pair(opt.pair_text);
  std::size_t a = cache.index_of(name_a);
  std::size_t b = cache.index_of(name_b);
  int i = opt.i < 0 ? 1 : opt.i;
  int reps = resolve(opt.reps, 1000);
  auto est = estimate_fixation(cache, a, b, i, opt.n, reps, opt.seed, moran_options(opt),
                               opt.jobs);

  SweepRow row{name_a, name_b, opt.n, i, est};
  SweepResult result;
  result.rows.push_back(row);
  MetaHeader meta;
  meta.seed = opt.seed;
  std::ostringstream extras;
  extras << "n=" << opt.n << ";i=" << i << ";reps=" << reps << ";seed=" << opt.seed
         << ";frozen=" << (opt.frozen_draws ? 1 : 0) << ";step_cap=" << opt.step_cap
         << ";pair=" << name_a << "," << name_b;
  meta.config_hash = config_fingerprint("moran", cache, extras.str());
  write_output(fs::path(opt.out_dir) / "moran.csv", sweep_to_csv(result, meta));

  double exact = exact_fixation(i, opt.n, pair_game_from_cache(cache, a, b));
  std::cout << "P(" << name_a << " fixates from " << i << "/" << opt.n << " vs " << name_b
            << ") = " << format_double(est.probability) << " +/- " << format_double(est.ci95)
            << " (" << est.wins << "/" << est.repetitions << " runs)\n"
            << "mean-payoff chain reference = " << format_double(exact) << "\n";
  return 0;
}

int run_sweep(const Options& opt) {
  auto cache = get_cache(opt);
  SweepConfig cfg;
  cfg.n_min = opt.n_min;
  cfg.n_max = opt.n_max;
  cfg.reps = resolve(opt.reps, 1000);
  cfg.seed = opt.seed;
  cfg.moran = moran_options(opt);
  cfg.jobs = opt.jobs;

  MetaHeader meta;
  meta.seed = opt.seed;
  std::ostringstream extras;
  extras << "n_min=" << cfg.n_min << ";n_max=" << cfg.n_max << ";reps=" << cfg.reps
         << ";seed=" << cfg.seed << ";frozen=" << (opt.frozen_draws ? 1 : 0)
         << ";step_cap=" << opt.step_cap;
  meta.config_hash = config_fingerprint("sweep", cache, extras.str());

  fs::path out_csv = fs::path(opt.out_dir) / "sweep.csv";
  SweepResult resume;
  bool have_resume = false;
  if (!opt.no_resume && fs::exists(out_csv)) {
    std::string text = read_text_file(out_csv);
    MetaHeader previous = meta_from_text(text);
    if (previous.config_hash == meta.config_hash) {
      resume = sweep_from_csv(text);
      have_resume = true;
      std::cout << "resuming: " << resume.rows.size() << " rows carried from "
                << out_csv.string() << "\n";
    } else {
      std::cerr << "ignoring " << out_csv.string() << ": configuration differs\n";
    }
  }

  std::vector<std::string> cell_errors;
  SweepResult result = sweep(cache, cfg, have_resume ? &resume : nullptr, &cell_errors);
  write_output(out_csv, sweep_to_csv(result, meta));
  std::cout << result.rows.size() << " rows (" << cache.roster_size() << " strategies, N "
            << cfg.n_min << ".." << cfg.n_max << ", " << cfg.reps << " reps/cell)\n";
  for (const auto& e : cell_errors) std::cerr << "cell failed: " << e << "\n";
  if (!cell_errors.empty()) {
    std::cerr << cell_errors.size() << " cell(s) failed; rerun to fill them in\n";
  }
  return 0;
}

int run_rank(const Options& opt) {
  fs::path in = opt.sweep_path.empty() ? fs::path(opt.out_dir) / "sweep.csv"
                                       : fs::path(opt.sweep_path);
  std::string text = read_text_file(in);
  SweepResult sw = sweep_from_csv(text);
  StartKind kind = start_kind_from_name(opt.kind_text);
  auto tables = rank_all(sw, kind);
  MetaHeader meta = meta_from_text(text);
  write_output(fs::path(opt.out_dir) / "ranks.csv", rank_tables_to_csv(tables, meta));
  if (opt.plots) {
    write_output(fs::path(opt.out_dir) / "ranks.svg", rank_lines_svg(tables));
  }
  if (!tables.empty()) {
    const auto& last = tables.back();
    std::cout << start_kind_name(kind) << " ranking at N=" << last.n << " (neutral "
              << format_double(last.neutral) << "):\n";
    for (const auto& row : last.rows) {
      std::cout << "  " << row.rank << ". " << row.name << "  mean x = "
                << format_double(row.mean_fixation) << "\n";
    }
  }
  return 0;
}

int run_corr(const Options& opt) {
  fs::path in = opt.sweep_path.empty() ? fs::path(opt.out_dir) / "sweep.csv"
                                       : fs::path(opt.sweep_path);
  std::string text = read_text_file(in);
  SweepResult sw = sweep_from_csv(text);
  StartKind kind = start_kind_from_name(opt.kind_text);
  CorrelationMatrix m = rank_correlation_matrix(sw, kind);
  MetaHeader meta = meta_from_text(text);
  write_output(fs::path(opt.out_dir) / "correlation.csv", correlation_to_csv(m, meta));
  if (opt.plots) {
    write_output(fs::path(opt.out_dir) / "correlation.svg", correlation_heatmap_svg(m));
  }
  std::cout << "rank correlations (" << start_kind_name(kind) << "), N = ";
  for (std::size_t k = 0; k < m.ns.size(); ++k) std::cout << (k ? "," : "") << m.ns[k];
  std::cout << "\n";
  for (std::size_t r = 0; r < m.rho.size(); ++r) {
    std::cout << "  N=" << m.ns[r] << ":";
    for (double v : m.rho[r]) std::cout << " " << format_double(v);
    std::cout << "\n";
  }
  return 0;
}

int run_validate(const Options& opt) {
  if (opt.pair_list.empty() && opt.pair_text.empty()) {
    throw ValidationError("validate: at least one --pair NAME_A,NAME_B is required");
  }
  auto cache = get_cache(opt);
  std::vector<std::pair<std::string, std::string>> pairs;
  if (!opt.pair_text.empty()) pairs.push_back(parse_pair(opt.pair_text));
  for (const auto& p : opt.pair_list) pairs.push_back(parse_pair(p));

  int reps = resolve(opt.reps, 1000);
  auto rows = validation_report(cache, pairs, opt.n_min, opt.n_max, reps, opt.seed,
                                moran_options(opt), opt.jobs);
  MetaHeader meta;
  meta.seed = opt.seed;
  std::ostringstream extras;
  extras << "n_min=" << opt.n_min << ";n_max=" << opt.n_max << ";reps=" << reps
         << ";seed=" << opt.seed << ";frozen=" << (opt.frozen_draws ? 1 : 0)
         << ";step_cap=" << opt.step_cap << ";pairs=";
  for (const auto& [a, b] : pairs) extras << a << "," << b << "|";
  meta.config_hash = config_fingerprint("validate", cache, extras.str());
  write_output(fs::path(opt.out_dir) / "validation.csv", validation_to_csv(rows, meta));

  std::size_t within = 0;
  for (const auto& r : rows) within += r.within_ci ? 1u : 0u;
  std::cout << within << "/" << rows.size() << " cells within the 95% CI of the mean-payoff chain\n";
  return 0;
}

int run_coop_rate(const Options& opt) {
  if (opt.focal.empty()) throw ValidationError("coop-rate: --focal NAME is required");
  auto roster = load_roster(opt);
  const StrategySpec* focal = nullptr;
  for (const auto& s : roster) {
    if (s.name == opt.focal) focal = &s;
  }
  if (focal == nullptr) throw ValidationError("unknown strategy: " + opt.focal);

  MatchConfig cfg = make_match_config(opt);
  int reps = resolve(opt.reps, 1000);
  auto rates = cooperation_rate(*focal, roster, reps, cfg, opt.jobs);
  MetaHeader meta;
  meta.seed = opt.seed;
  std::ostringstream extras;
  extras << "cmd=coop-rate;roster=" << to_hex(roster_hash(roster)) << ";turns=" << cfg.turns
         << ";noise=" << format_double(cfg.noise) << ";matrix=" << format_double(cfg.matrix.r)
         << "," << format_double(cfg.matrix.s) << "," << format_double(cfg.matrix.t) << ","
         << format_double(cfg.matrix.p) << ";seed=" << cfg.seed << ";reps=" << reps
         << ";focal=" << opt.focal;
  meta.config_hash = to_hex(fnv1a64(extras.str()));
  write_output(fs::path(opt.out_dir) / "cooperation.csv", cooperation_to_csv(rates, meta));
  if (opt.plots) {
    write_output(fs::path(opt.out_dir) / "cooperation.svg",
                 cooperation_rate_svg(opt.focal, rates));
  }
  double total = 0.0;
  for (double r : rates) total += r;
  std::cout << opt.focal << ": mean cooperation rate "
            << format_double(rates.empty() ? 0.0 : total / static_cast<double>(rates.size()))
            << " over " << rates.size() << " rounds vs " << roster.size() << " opponents\n";
  return 0;
}

int run_train(const Options& opt) {
  TrainerConfig cfg;
  cfg.shape.kind = GenotypeShape::Kind::Fsm;
  cfg.shape.num_states = opt.states;
  cfg.population_size = opt.pop;
  cfg.generations = opt.generations;
  cfg.mutation_rate = opt.mutation_rate;
  cfg.crossover_enabled = !opt.no_crossover;
  cfg.elitism = opt.elitism;
  cfg.roster = opt.roster_path.empty() ? classic_roster() : load_roster_file(opt.roster_path);
  cfg.seed = opt.seed;
  cfg.jobs = opt.jobs;

  Objective obj;
  if (opt.objective_text == "moran") {
    obj.kind = Objective::Kind::MoranFixation;
  } else if (opt.objective_text == "payoff") {
    obj.kind = Objective::Kind::MeanPayoff;
  } else {
    throw ValidationError("--objective must be 'moran' or 'payoff'");
  }
  obj.n = opt.n > 0 ? opt.n : 6;
  obj.noise = opt.noise;
  obj.turns = opt.turns;
  obj.reps_per_opponent = resolve(opt.reps, 20);
  obj.cache_samples = resolve(opt.samples, 200);
  obj.matrix = parse_matrix(opt.matrix_text);
  obj.moran = moran_options(opt);
  cfg.objective = obj;

  TrainResult result = evolve(cfg);
  StrategySpec champion = to_strategy(result.champion, "champion");

  MetaHeader meta;
  meta.seed = opt.seed;
  std::ostringstream extras;
  extras << "cmd=train;roster=" << to_hex(roster_hash(cfg.roster)) << ";states=" << opt.states
         << ";pop=" << cfg.population_size << ";generations=" << cfg.generations
         << ";mutation=" << format_double(cfg.mutation_rate)
         << ";crossover=" << (cfg.crossover_enabled ? 1 : 0) << ";elitism=" << cfg.elitism
         << ";objective=" << opt.objective_text << ";n=" << obj.n
         << ";noise=" << format_double(obj.noise) << ";turns=" << obj.turns
         << ";reps=" << obj.reps_per_opponent << ";samples=" << obj.cache_samples
         << ";seed=" << cfg.seed;
  meta.config_hash = to_hex(fnv1a64(extras.str()));

  write_output(fs::path(opt.out_dir) / "champion.txt", serialize_strategy(champion) + "\n");
  write_output(fs::path(opt.out_dir) / "history.csv",
               meta_header_lines(meta) + fitness_history_csv(result.history));

  MatchConfig self_cfg;
  self_cfg.turns = obj.turns;
  self_cfg.noise = obj.noise;
  self_cfg.matrix = obj.matrix;
  self_cfg.seed = derive_seed(cfg.seed, 0x5e1f);
  HandshakeReport report = handshake_report(champion, self_cfg);
  std::ostringstream hs;
  hs << "opening=" << actions_to_string(report.opening) << "\n"
     << "defects_in_first_three=" << (report.defects_in_first_three ? 1 : 0) << "\n"
     << "mutual_cooperation_tail=" << (report.mutual_cooperation_tail ? 1 : 0) << "\n"
     << "handshake_like=" << (report.handshake_like() ? 1 : 0) << "\n";
  write_output(fs::path(opt.out_dir) / "handshake.txt", hs.str());

  const auto& first = result.history.front();
  const auto& last = result.history.back();
  std::cout << "trained " << opt.states << "-state machine over " << cfg.generations
            << " generations (population " << cfg.population_size << ")\n"
            << "fitness: generation 0 best " << format_double(first.best) << " -> final best "
            << format_double(last.best) << ", champion " << format_double(result.champion_fitness)
            << "\n"
            << "handshake report: opening " << actions_to_string(report.opening)
            << (report.handshake_like() ? " (handshake-like: defects early vs itself, then locks into mutual cooperation)"
                                        : " (no self-recognition handshake detected)")
            << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  Options opt;
  CLI::App app{"Evolutionary dynamics workbench for the iterated prisoner's dilemma: "
               "exact and simulated Moran-process fixation, strategy rankings, and "
               "genetic-algorithm strategy training."};
  app.set_version_flag("--version", std::string("moranipd ") + kVersion);
  app.set_config("--config", "", "Flat key=value file; keys are the long flag names");
  app.require_subcommand(1);

  app.add_option("--roster", opt.roster_path, "Strategy roster file (default: built-in roster)");
  app.add_option("--cache", opt.cache_dir, "Load a saved payoff cache instead of building one");
  app.add_option("--out", opt.out_dir, "Output directory")->capture_default_str();
  app.add_option("--turns", opt.turns, "Rounds per match")->capture_default_str();
  app.add_option("--noise", opt.noise, "Per-action trembling-hand flip probability")
      ->capture_default_str();
  app.add_option("--matrix", opt.matrix_text, "Payoff matrix R,S,T,P")->capture_default_str();
  app.add_option("--samples", opt.samples,
                 "Match samples per stochastic pair (default 100; 200 for train)");
  app.add_option("--n", opt.n, "Population size (exact: single N; moran; train objective)");
  app.add_option("--i", opt.i, "Initial copies of the first strategy (moran; default 1)");
  app.add_option("--n-min", opt.n_min, "Smallest population size")->capture_default_str();
  app.add_option("--n-max", opt.n_max, "Largest population size")->capture_default_str();
  app.add_option("--reps", opt.reps,
                 "Repetitions per cell (default 1000; train: runs per opponent, default 20)");
  app.add_option("--seed", opt.seed, "Master seed")->capture_default_str();
  app.add_option("--step-cap", opt.step_cap, "Abort a fixation run after this many steps")
      ->capture_default_str();
  app.add_option("--jobs", opt.jobs, "Worker threads")->capture_default_str();
  app.add_option("--pair", opt.pair_text, "Strategy pair NAME_A,NAME_B");
  app.add_option("--pairs", opt.pair_list, "Additional NAME_A,NAME_B pairs (validate)")
      ->take_all();
  app.add_option("--game", opt.game_text, "Raw two-type payoffs a,b,c,d (exact)");
  app.add_option("--sweep", opt.sweep_path, "Sweep CSV to rank/correlate (default <out>/sweep.csv)");
  app.add_option("--kind", opt.kind_text, "Start kind: invade, coexist, or resist")
      ->capture_default_str();
  app.add_option("--focal", opt.focal, "Focal strategy name (coop-rate)");
  app.add_flag("--frozen-draws", opt.frozen_draws,
               "Freeze one payoff draw per ordered pair per fixation run");
  app.add_flag("--plots", opt.plots, "Also write SVG charts next to the CSVs");
  app.add_flag("--no-resume", opt.no_resume, "Ignore an existing sweep.csv in --out");
  app.add_option("--states", opt.states, "Machine states (train)")->capture_default_str();
  app.add_option("--pop", opt.pop, "Population size of the genetic algorithm (train)")
      ->capture_default_str();
  app.add_option("--generations", opt.generations, "Generations to run (train)")
      ->capture_default_str();
  app.add_option("--mutation-rate", opt.mutation_rate, "Per-entry mutation probability (train)")
      ->capture_default_str();
  app.add_option("--elitism", opt.elitism, "Elites carried unchanged (train)")
      ->capture_default_str();
  app.add_flag("--no-crossover", opt.no_crossover, "Disable crossover (train)");
  app.add_option("--objective", opt.objective_text, "Fitness: 'moran' or 'payoff' (train)")
      ->capture_default_str();

  auto* sample = app.add_subcommand("sample", "Play the matches behind a payoff cache and save it");
  auto* exact = app.add_subcommand("exact", "Exact birth-death fixation probabilities");
  auto* moran = app.add_subcommand("moran", "Monte Carlo fixation estimate for one pair");
  auto* sweep_cmd = app.add_subcommand("sweep", "Fixation estimates for every pair, N, and start");
  auto* rank_cmd = app.add_subcommand("rank", "Rank strategies by mean fixation from a sweep");
  auto* corr = app.add_subcommand("corr", "Rank correlations across population sizes");
  auto* validate = app.add_subcommand("validate", "Simulated vs mean-payoff-chain fixation");
  auto* coop = app.add_subcommand("coop-rate", "Per-round cooperation rate of a focal strategy");
  auto* train = app.add_subcommand("train", "Evolve a strategy with a genetic algorithm");
  for (auto* sub : {sample, exact, moran, sweep_cmd, rank_cmd, corr, validate, coop, train}) {
    sub->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (sample->parsed()) return run_sample(opt);
    if (exact->parsed()) return run_exact(opt);
    if (moran->parsed()) return run_moran(opt);
    if (sweep_cmd->parsed()) return run_sweep(opt);
    if (rank_cmd->parsed()) return run_rank(opt);
    if (corr->parsed()) return run_corr(opt);
    if (validate->parsed()) return run_validate(opt);
    if (coop->parsed()) return run_coop_rate(opt);
    if (train->parsed()) return run_train(opt);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
