#include "moranipd/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <tuple>

#include "moranipd/errors.hpp"
#include "moranipd/io.hpp"
#include "moranipd/parallel.hpp"
#include "moranipd/text.hpp"
#include "moranipd/version.hpp"

namespace moranipd {

namespace {
constexpr std::uint64_t kSweepTag = 0x53e9;
constexpr std::uint64_t kValidateTag = 0x7a11;

std::uint64_t pack_ids(std::size_t a, std::size_t b) {
  return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint64_t>(b);
}
std::uint64_t pack_cell(int n, int i) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(n)) << 32) |
         static_cast<std::uint32_t>(i);
}

bool row_less(const SweepRow& a, const SweepRow& b) {
  return std::tie(a.name_a, a.name_b, a.n, a.i) < std::tie(b.name_a, b.name_b, b.n, b.i);
}

}  // namespace

std::vector<int> sweep_starts(int n) {
  if (n < 2) throw ValidationError("population size must be >= 2");
  std::vector<int> starts{1, n / 2, n - 1};
  std::sort(starts.begin(), starts.end());
  starts.erase(std::unique(starts.begin(), starts.end()), starts.end());
  return starts;
}

SweepResult sweep(const PayoffCache& cache, const SweepConfig& cfg,
                  const SweepResult* resume, std::vector<std::string>* cell_errors) {
  if (cfg.n_min < 2) throw ValidationError("n-min must be >= 2");
  if (cfg.n_max < cfg.n_min) throw ValidationError("n-max must be >= n-min");
  if (cfg.reps < 1) throw ValidationError("reps must be >= 1");
  if (cache.roster_size() < 2)
    throw ValidationError("sweep needs at least two strategies");

  struct Cell {
    std::size_t a, b;  // a invades b
    int n, i;
  };
  std::vector<Cell> cells;
  const std::size_t R = cache.roster_size();
  for (int n = cfg.n_min; n <= cfg.n_max; ++n) {
    const std::vector<int> starts = sweep_starts(n);
    const auto in_starts = [&](int s) {
      return std::find(starts.begin(), starts.end(), s) != starts.end();
    };
    for (std::size_t lo = 0; lo < R; ++lo)
      for (std::size_t hi = lo + 1; hi < R; ++hi) {
        for (int s : starts) cells.push_back({lo, hi, n, s});
        // Reverse orientation only where the forward cells' complements do
        // not already cover it (the floor midpoint of odd n).
        for (int s : starts)
          if (!in_starts(n - s)) cells.push_back({hi, lo, n, s});
      }
  }

  // Rows carried over from a previous partial run, keyed for cell skipping.
  std::map<std::tuple<std::string, std::string, int, int>, const SweepRow*> done;
  if (resume != nullptr)
    for (const SweepRow& row : resume->rows)
      if (row.est.repetitions == cfg.reps)
        done[{row.name_a, row.name_b, row.n, row.i}] = &row;

  struct CellOut {
    bool computed = false;
    SweepRow forward, backward;
    std::string error;
  };
  std::vector<CellOut> outs(cells.size());

  parallel_for(cells.size(), cfg.jobs, [&](std::size_t w) {
    const Cell& cell = cells[w];
    const std::string& na = cache.spec(cell.a).name;
    const std::string& nb = cache.spec(cell.b).name;
    if (done.count({na, nb, cell.n, cell.i}) != 0 &&
        done.count({nb, na, cell.n, cell.n - cell.i}) != 0)
      return;  // fully covered by resume rows
    CellOut& out = outs[w];
    try {
      const std::uint64_t cell_seed = derive_seed(
          cfg.seed, pack_ids(cell.a, cell.b), pack_cell(cell.n, cell.i), kSweepTag);
      const FixationEstimate est = estimate_fixation(
          cache, cell.a, cell.b, cell.i, cell.n, cfg.reps, cell_seed, cfg.moran, 1);
      out.forward = {na, nb, cell.n, cell.i, est};
      FixationEstimate back = est;
      back.wins = est.repetitions - est.wins;
      back.probability = est.complement();
      out.backward = {nb, na, cell.n, cell.n - cell.i, back};
      out.computed = true;
    } catch (const std::exception& e) {
      out.error = na + " vs " + nb + " at N=" + std::to_string(cell.n) +
                  ", i=" + std::to_string(cell.i) + ": " + e.what();
    }
  });

  // The full deterministic output key set; stale resume rows (renamed
  // strategies, different n range) are dropped rather than carried.
  std::set<std::tuple<std::string, std::string, int, int>> expected;
  for (const Cell& cell : cells) {
    const std::string& na = cache.spec(cell.a).name;
    const std::string& nb = cache.spec(cell.b).name;
    expected.insert({na, nb, cell.n, cell.i});
    expected.insert({nb, na, cell.n, cell.n - cell.i});
  }

  std::map<std::tuple<std::string, std::string, int, int>, SweepRow> rows;
  if (resume != nullptr)
    for (const SweepRow& row : resume->rows)
      if (row.est.repetitions == cfg.reps &&
          expected.count({row.name_a, row.name_b, row.n, row.i}) != 0)
        rows[{row.name_a, row.name_b, row.n, row.i}] = row;
  for (const CellOut& out : outs) {
    if (!out.error.empty()) {
      if (cell_errors != nullptr) cell_errors->push_back(out.error);
      continue;
    }
    if (!out.computed) continue;
    rows[{out.forward.name_a, out.forward.name_b, out.forward.n, out.forward.i}] =
        out.forward;
    // Never clobber a carried-over reverse row with the regenerated one; they
    // are equal by complementarity, but resume rows win for byte stability.
    rows.emplace(std::make_tuple(out.backward.name_a, out.backward.name_b, out.backward.n,
                                 out.backward.i),
                 out.backward);
  }

  SweepResult result;
  result.rows.reserve(rows.size());
  for (auto& [key, row] : rows) result.rows.push_back(std::move(row));
  std::sort(result.rows.begin(), result.rows.end(), row_less);
  return result;
}

int start_count(StartKind kind, int n) {
  switch (kind) {
    case StartKind::Invade:
      return 1;
    case StartKind::Coexist:
      return n / 2;
    case StartKind::Resist:
      return n - 1;
  }
  throw ValidationError("unknown start kind");
}

const char* start_kind_name(StartKind kind) {
  switch (kind) {
    case StartKind::Invade:
      return "invade";
    case StartKind::Coexist:
      return "coexist";
    case StartKind::Resist:
      return "resist";
  }
  throw ValidationError("unknown start kind");
}

StartKind start_kind_from_name(std::string_view name) {
  if (name == "invade") return StartKind::Invade;
  if (name == "coexist") return StartKind::Coexist;
  if (name == "resist") return StartKind::Resist;
  throw ValidationError("unknown start kind: '" + std::string(name) +
                        "' (expected invade, coexist or resist)");
}

RankTable rank(const SweepResult& sweep, StartKind kind, int n) {
  const int i = start_count(kind, n);

  std::set<std::string> names;
  for (const SweepRow& row : sweep.rows)
    if (row.n == n) {
      names.insert(row.name_a);
      names.insert(row.name_b);
    }
  if (names.empty())
    throw ValidationError("incomplete sweep: no rows for N=" + std::to_string(n));

  std::map<std::pair<std::string, std::string>, double> prob;
  for (const SweepRow& row : sweep.rows)
    if (row.n == n && row.i == i) prob[{row.name_a, row.name_b}] = row.est.probability;

  std::vector<std::string> missing;
  RankTable table;
  table.n = n;
  table.kind = kind;
  table.neutral = static_cast<double>(i) / n;
  for (const std::string& name : names) {
    double sum = 0.0;
    int count = 0;
    for (const std::string& opp : names) {
      if (opp == name) continue;
      const auto it = prob.find({name, opp});
      if (it == prob.end()) {
        missing.push_back(name + " vs " + opp + " at N=" + std::to_string(n) +
                          ", i=" + std::to_string(i));
        continue;
      }
      sum += it->second;
      ++count;
    }
    if (count > 0) table.rows.push_back({name, sum / count, 0});
  }
  if (!missing.empty()) {
    std::string msg = "incomplete sweep: missing " + std::to_string(missing.size()) +
                      " cell(s):";
    for (std::size_t k = 0; k < missing.size() && k < 5; ++k) msg += " [" + missing[k] + "]";
    throw ValidationError(msg);
  }

  std::sort(table.rows.begin(), table.rows.end(), [](const RankRow& a, const RankRow& b) {
    if (a.mean_fixation != b.mean_fixation) return a.mean_fixation > b.mean_fixation;
    return a.name < b.name;  // documented deterministic tie-break
  });
  for (std::size_t k = 0; k < table.rows.size(); ++k)
    table.rows[k].rank = static_cast<int>(k + 1);
  return table;
}

std::vector<RankTable> rank_all(const SweepResult& sweep, StartKind kind) {
  std::set<int> ns;
  for (const SweepRow& row : sweep.rows) ns.insert(row.n);
  std::vector<RankTable> tables;
  tables.reserve(ns.size());
  for (int n : ns) tables.push_back(rank(sweep, kind, n));
  return tables;
}

namespace {

// Average rank (1-based) with ties sharing their midrank.
std::vector<double> midranks(const std::vector<double>& v) {
  const std::size_t n = v.size();
  std::vector<std::size_t> order(n);
  for (std::size_t k = 0; k < n; ++k) order[k] = k;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(n, 0.0);
  std::size_t k = 0;
  while (k < n) {
    std::size_t j = k;
    while (j + 1 < n && v[order[j + 1]] == v[order[k]]) ++j;
    const double mid = (static_cast<double>(k + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t t = k; t <= j; ++t) ranks[order[t]] = mid;
    k = j + 1;
  }
  return ranks;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    mx += x[k];
    my += y[k];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxy += (x[k] - mx) * (y[k] - my);
    sxx += (x[k] - mx) * (x[k] - mx);
    syy += (y[k] - my) * (y[k] - my);
  }
  if (sxx == 0.0 || syy == 0.0) {
    // Degenerate: a fully tied table correlates perfectly with itself and
    // carries no ordering information otherwise.
    return x == y ? 1.0 : 0.0;
  }
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace

double rank_correlation(const RankTable& t1, const RankTable& t2) {
  if (t1.rows.size() != t2.rows.size())
    throw ValidationError("rank tables cover different strategy sets");
  std::map<std::string, double> m2;
  for (const RankRow& row : t2.rows) m2[row.name] = row.mean_fixation;

  std::vector<double> v1, v2;
  v1.reserve(t1.rows.size());
  v2.reserve(t1.rows.size());
  for (const RankRow& row : t1.rows) {
    const auto it = m2.find(row.name);
    if (it == m2.end())
      throw ValidationError("rank tables cover different strategy sets: missing '" +
                            row.name + "'");
    v1.push_back(row.mean_fixation);
    v2.push_back(it->second);
  }
  return pearson(midranks(v1), midranks(v2));
}

CorrelationMatrix rank_correlation_matrix(const SweepResult& sweep, StartKind kind) {
  const std::vector<RankTable> tables = rank_all(sweep, kind);
  CorrelationMatrix m;
  m.kind = kind;
  for (const RankTable& t : tables) m.ns.push_back(t.n);
  m.rho.assign(tables.size(), std::vector<double>(tables.size(), 1.0));
  for (std::size_t a = 0; a < tables.size(); ++a)
    for (std::size_t b = a; b < tables.size(); ++b) {
      const double rho = rank_correlation(tables[a], tables[b]);
      m.rho[a][b] = rho;
      m.rho[b][a] = rho;
    }
  return m;
}

std::vector<ValidationRow> validation_report(
    const PayoffCache& cache, const std::vector<std::pair<std::string, std::string>>& pairs,
    int n_min, int n_max, int reps, std::uint64_t seed, const MoranOptions& options,
    int jobs) {
  if (n_min < 2) throw ValidationError("n-min must be >= 2");
  if (n_max < n_min) throw ValidationError("n-max must be >= n-min");
  if (reps < 1) throw ValidationError("reps must be >= 1");

  struct Cell {
    std::size_t a, b;
    int n, i;
    double exact;
  };
  std::vector<Cell> cells;
  for (const auto& [name_a, name_b] : pairs) {
    const std::size_t a = cache.index_of(name_a);
    const std::size_t b = cache.index_of(name_b);
    const PairGame g = pair_game_from_cache(cache, a, b);
    for (int n = n_min; n <= n_max; ++n) {
      const std::vector<double> curve = exact_fixation_curve(n, g);
      for (int i : sweep_starts(n))
        cells.push_back({a, b, n, i, curve[static_cast<std::size_t>(i)]});
    }
  }

  std::vector<ValidationRow> rows(cells.size());
  parallel_for(cells.size(), jobs, [&](std::size_t w) {
    const Cell& cell = cells[w];
    const FixationEstimate est = estimate_fixation(
        cache, cell.a, cell.b, cell.i, cell.n, reps,
        derive_seed(seed, pack_ids(cell.a, cell.b), pack_cell(cell.n, cell.i), kValidateTag),
        options, 1);
    ValidationRow& row = rows[w];
    row.name_a = cache.spec(cell.a).name;
    row.name_b = cache.spec(cell.b).name;
    row.n = cell.n;
    row.i = cell.i;
    row.reps = reps;
    row.simulated = est.probability;
    row.ci95 = est.ci95;
    row.exact = cell.exact;
    // Binomial 95% band around the exact value — the null hypothesis that the
    // simulation follows the mean-payoff chain.
    const double half = 1.96 * std::sqrt(cell.exact * (1.0 - cell.exact) / reps);
    row.within_ci = std::abs(est.probability - cell.exact) <= half + 1e-15;
  });
  return rows;
}

std::string meta_header_lines(const MetaHeader& meta) {
  return std::string("# moranipd ") + kVersion + "\n# seed=" + std::to_string(meta.seed) +
         "\n# config=" + meta.config_hash + "\n";
}

std::string sweep_to_csv(const SweepResult& sweep, const MetaHeader& meta) {
  std::string out = meta_header_lines(meta);
  out += "name_a,name_b,N,i,reps,wins,probability,ci95\n";
  for (const SweepRow& row : sweep.rows)
    out += csv_escape(row.name_a) + "," + csv_escape(row.name_b) + "," +
           std::to_string(row.n) + "," + std::to_string(row.i) + "," +
           std::to_string(row.est.repetitions) + "," + std::to_string(row.est.wins) + "," +
           format_double(row.est.probability) + "," + format_double(row.est.ci95) + "\n";
  return out;
}

SweepResult sweep_from_csv(std::string_view text) {
  SweepResult result;
  bool have_header = false;
  int line_no = 0;
  for (std::string_view line : split_char(text, '\n')) {
    ++line_no;
    if (trim(line).empty() || line.front() == '#') continue;
    if (!have_header) {
      if (trim(line) != "name_a,name_b,N,i,reps,wins,probability,ci95")
        throw ValidationError("sweep CSV line " + std::to_string(line_no) +
                              ": unexpected header");
      have_header = true;
      continue;
    }
    const auto fields = csv_parse_line(line);
    if (fields.size() != 8)
      throw ValidationError("sweep CSV line " + std::to_string(line_no) +
                            ": expected 8 fields");
    SweepRow row;
    row.name_a = fields[0];
    row.name_b = fields[1];
    row.n = static_cast<int>(parse_int(fields[2]));
    row.i = static_cast<int>(parse_int(fields[3]));
    row.est.repetitions = static_cast<int>(parse_int(fields[4]));
    row.est.wins = static_cast<int>(parse_int(fields[5]));
    row.est.probability = parse_double(fields[6]);
    row.est.ci95 = parse_double(fields[7]);
    result.rows.push_back(std::move(row));
  }
  if (!have_header) throw ValidationError("sweep CSV: missing header");
  std::sort(result.rows.begin(), result.rows.end(), row_less);
  return result;
}

std::string rank_tables_to_csv(const std::vector<RankTable>& tables, const MetaHeader& meta) {
  std::string out = meta_header_lines(meta);
  out += "kind,N,rank,name,mean_fixation,neutral\n";
  for (const RankTable& t : tables)
    for (const RankRow& row : t.rows)
      out += std::string(start_kind_name(t.kind)) + "," + std::to_string(t.n) + "," +
             std::to_string(row.rank) + "," + csv_escape(row.name) + "," +
             format_double(row.mean_fixation) + "," + format_double(t.neutral) + "\n";
  return out;
}

std::string correlation_to_csv(const CorrelationMatrix& m, const MetaHeader& meta) {
  std::string out = meta_header_lines(meta);
  out += "kind,n_a,n_b,rho\n";
  for (std::size_t a = 0; a < m.ns.size(); ++a)
    for (std::size_t b = 0; b < m.ns.size(); ++b)
      out += std::string(start_kind_name(m.kind)) + "," + std::to_string(m.ns[a]) + "," +
             std::to_string(m.ns[b]) + "," + format_double(m.rho[a][b]) + "\n";
  return out;
}

std::string validation_to_csv(const std::vector<ValidationRow>& rows, const MetaHeader& meta) {
  std::string out = meta_header_lines(meta);
  out += "name_a,name_b,N,i,reps,simulated,ci95,exact,within_ci\n";
  for (const ValidationRow& row : rows)
    out += csv_escape(row.name_a) + "," + csv_escape(row.name_b) + "," +
           std::to_string(row.n) + "," + std::to_string(row.i) + "," +
           std::to_string(row.reps) + "," + format_double(row.simulated) + "," +
           format_double(row.ci95) + "," + format_double(row.exact) + "," +
           (row.within_ci ? "1" : "0") + "\n";
  return out;
}

std::string cooperation_to_csv(const std::vector<double>& rates, const MetaHeader& meta) {
  std::string out = meta_header_lines(meta);
  out += "round,rate\n";
  for (std::size_t t = 0; t < rates.size(); ++t)
    out += std::to_string(t + 1) + "," + format_double(rates[t]) + "\n";
  return out;
}

}  // namespace moranipd
