#include "affinest/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>
#include <utility>

#include "affinest/comparators.hpp"

namespace affinest {

double quantile(const std::vector<double>& values, double q) {
  if (values.empty()) throw EmptyInput("quantile: empty input");
  if (!(q >= 0.0 && q <= 1.0)) {
    throw Error("quantile: q=" + std::to_string(q) + " outside [0,1]");
  }
  std::vector<double> sorted(values);
  std::sort(sorted.begin(), sorted.end());
  const double h = static_cast<double>(sorted.size() - 1) * q;
  const auto lo = static_cast<std::size_t>(h);
  const double frac = h - static_cast<double>(lo);
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

double quantile(const Vector& values, double q) {
  return quantile(values.entries(), q);
}

SummaryStats summarize(const std::vector<double>& values) {
  if (values.empty()) throw EmptyInput("summarize: empty input");
  SummaryStats s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  s.median = quantile(values, 0.5);
  s.q25 = quantile(values, 0.25);
  s.q75 = quantile(values, 0.75);
  s.min = *std::min_element(values.begin(), values.end());
  s.max = *std::max_element(values.begin(), values.end());
  return s;
}

namespace {

// everything one replication contributes to the aggregation
struct ReplicationRecord {
  bool ok = false;
  // per scheme: centers for r = 1..R (fill-forward past a fixed point)
  // and D-efficiencies for the same range
  std::vector<std::vector<Vector>> centers;
  std::vector<std::vector<double>> d_eff;
  std::vector<Vector> comparators;  // in the order mean, coord median, spatial
};

void validate(const SimulationConfig& cfg) {
  if (cfg.replications < 1) throw ConfigError("config: replications must be >= 1");
  if (cfg.iterations < 1) throw ConfigError("config: iterations must be >= 1");
  const std::size_t p = cfg.dist.p();
  if (p == 0) throw ConfigError("config: distribution.theta is empty");
  if (cfg.dist.sigma.rows() != p || cfg.dist.sigma.cols() != p) {
    throw ConfigError("config: distribution.sigma must be p x p");
  }
  if (cfg.n <= p) throw ConfigError("config: need n > p");
  if (cfg.dist.kind == DistributionSpec::Kind::StudentT && !(cfg.dist.df > 0.0)) {
    throw ConfigError("config: StudentT df must be > 0");
  }
  for (const auto& ls : cfg.schemes) {
    try {
      (void)weights_for(ls.scheme, cfg.n);
    } catch (const InvalidScheme& e) {
      throw ConfigError("config: scheme '" + ls.label + "': " + e.what());
    }
  }
}

ReplicationRecord run_replication(const SimulationConfig& cfg, std::size_t index) {
  ReplicationRecord rec;
  const std::size_t R = cfg.iterations;
  try {
    const std::uint64_t seed = derive_stream_seed(cfg.master_seed, index);
    const Sample sample = draw_sample(cfg.dist, cfg.n, seed);

    rec.centers.reserve(cfg.schemes.size());
    rec.d_eff.reserve(cfg.schemes.size());
    for (const auto& ls : cfg.schemes) {
      const IterationTrace trace = iterate(sample, ls.scheme, R, 0.0);
      const std::size_t last = trace.states.size() - 1;  // steps actually run
      std::vector<Vector> centers(R);
      std::vector<double> deff(R);
      for (std::size_t r = 1; r <= R; ++r) {
        const std::size_t use = std::min(r, last);
        centers[r - 1] = trace.states[use].center;
        deff[r - 1] = trace.d_efficiency[use - 1];
      }
      rec.centers.push_back(std::move(centers));
      rec.d_eff.push_back(std::move(deff));
    }

    if (cfg.comparators.mean) rec.comparators.push_back(sample_mean(sample));
    if (cfg.comparators.coordinate_median) {
      rec.comparators.push_back(coordinate_median(sample));
    }
    if (cfg.comparators.spatial_median) {
      rec.comparators.push_back(spatial_median(sample));
    }
    rec.ok = true;
  } catch (const Error&) {
    rec = ReplicationRecord{};  // degenerate replication, excluded
  }
  return rec;
}

}  // namespace

SimulationSummary run_simulation(const SimulationConfig& cfg, std::size_t threads) {
  validate(cfg);

  const std::size_t reps = cfg.replications;
  std::vector<ReplicationRecord> records(reps);

  std::size_t workers = threads == 0 ? std::thread::hardware_concurrency() : threads;
  workers = std::max<std::size_t>(1, std::min(workers, reps));

  if (workers == 1) {
    for (std::size_t i = 0; i < reps; ++i) records[i] = run_replication(cfg, i);
  } else {
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= reps) return;
        records[i] = run_replication(cfg, i);
      }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  std::size_t failures = 0;
  for (const auto& rec : records) {
    if (!rec.ok) ++failures;
  }
  if (static_cast<double>(failures) > 0.01 * static_cast<double>(reps)) {
    throw TooManyFailures("run_simulation: " + std::to_string(failures) + " of " +
                              std::to_string(reps) + " replications degenerate",
                          failures, reps);
  }

  const std::size_t p = cfg.dist.p();
  const std::size_t R = cfg.iterations;

  SimulationSummary summary;
  summary.config = cfg;
  summary.failures = failures;
  summary.replications_used = reps - failures;

  // aggregation in replication order; independent of execution order
  std::vector<double> cell;
  cell.reserve(summary.replications_used);
  for (std::size_t si = 0; si < cfg.schemes.size(); ++si) {
    SchemeSummary ss;
    ss.label = cfg.schemes[si].label;
    for (std::size_t r = 1; r <= R; ++r) {
      IterationSummary is;
      is.iteration = r;
      for (std::size_t c = 0; c < p; ++c) {
        cell.clear();
        for (const auto& rec : records) {
          if (rec.ok) cell.push_back(rec.centers[si][r - 1][c]);
        }
        is.center.push_back(summarize(cell));
      }
      cell.clear();
      for (const auto& rec : records) {
        if (rec.ok) cell.push_back(rec.d_eff[si][r - 1]);
      }
      is.d_efficiency = summarize(cell);
      ss.per_iteration.push_back(std::move(is));
    }
    summary.schemes.push_back(std::move(ss));
  }

  std::vector<std::string> comparator_names;
  if (cfg.comparators.mean) comparator_names.emplace_back("mean");
  if (cfg.comparators.coordinate_median) {
    comparator_names.emplace_back("coordinate_median");
  }
  if (cfg.comparators.spatial_median) {
    comparator_names.emplace_back("spatial_median");
  }
  for (std::size_t ci = 0; ci < comparator_names.size(); ++ci) {
    ComparatorSummary cs;
    cs.name = comparator_names[ci];
    for (std::size_t c = 0; c < p; ++c) {
      cell.clear();
      for (const auto& rec : records) {
        if (rec.ok) cell.push_back(rec.comparators[ci][c]);
      }
      cs.center.push_back(summarize(cell));
    }
    summary.comparators.push_back(std::move(cs));
  }

  return summary;
}

}  // namespace affinest
