#ifndef AFFINEST_SIMULATION_HPP
#define AFFINEST_SIMULATION_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "affinest/estimators.hpp"
#include "affinest/sampling.hpp"

// Monte-Carlo harness: repeated estimator runs on freshly drawn samples,
// aggregated into per-iteration summary tables.

namespace affinest {

/// A weight scheme plus the label it is reported under.
struct LabeledScheme {
  std::string label;
  WeightScheme scheme;
};

struct ComparatorFlags {
  bool mean = true;
  bool coordinate_median = true;
  bool spatial_median = true;
};

/// A declarative simulation experiment.  master_seed is mandatory; every
/// replication derives its own stream from (master_seed, replication index).
struct SimulationConfig {
  DistributionSpec dist;
  std::size_t n = 0;
  std::size_t replications = 0;
  std::size_t iterations = 0;
  std::uint64_t master_seed = 0;
  std::vector<LabeledScheme> schemes;
  ComparatorFlags comparators;
};

/// Type-7 (linear interpolation between closest order statistics) quantile.
/// q = 0 gives the minimum, q = 1 the maximum.
double quantile(const Vector& values, double q);
double quantile(const std::vector<double>& values, double q);

struct SummaryStats {
  double mean = 0.0;
  double median = 0.0;
  double q25 = 0.0;
  double q75 = 0.0;
  double min = 0.0;
  double max = 0.0;
};

SummaryStats summarize(const std::vector<double>& values);

/// Aggregates for one scheme at one iteration step r.
struct IterationSummary {
  std::size_t iteration = 0;               // r >= 1
  std::vector<SummaryStats> center;        // per coordinate
  SummaryStats d_efficiency;
};

struct SchemeSummary {
  std::string label;
  std::vector<IterationSummary> per_iteration;  // r = 1..iterations
};

struct ComparatorSummary {
  std::string name;
  std::vector<SummaryStats> center;
};

struct SimulationSummary {
  SimulationConfig config;                  // echo of the experiment
  std::size_t replications_used = 0;        // successful replications
  std::size_t failures = 0;                 // degenerate, excluded
  std::vector<SchemeSummary> schemes;
  std::vector<ComparatorSummary> comparators;
};

/// Run the experiment.  Replications execute independently (optionally in
/// parallel over `threads`; 0 means one thread per hardware core) and are
/// aggregated in replication order, so the summary does not depend on the
/// thread count.  Degenerate replications are excluded and counted;
/// TooManyFailures is raised when more than 1% of them fail.
SimulationSummary run_simulation(const SimulationConfig& cfg, std::size_t threads = 1);

// --- serialization -------------------------------------------------------

/// Parse a config from JSON text.  Throws ConfigError naming the offending
/// field.
SimulationConfig parse_config_json(const std::string& text);
SimulationConfig load_config(const std::string& path);

/// Machine-readable summary (full double precision, key order fixed).
std::string summary_to_json(const SimulationSummary& summary);

/// Aligned-column CSV, one row per estimator x iteration x coordinate:
/// estimator,iteration,coordinate,mean,median,q25,q75,min,max.
/// Comparators appear with iteration 0.
void write_estimates_csv(const SimulationSummary& summary, std::ostream& out);

/// Aligned-column CSV, one row per scheme x iteration:
/// estimator,iteration,mean,median,q25,q75,min,max (D-efficiency statistics).
void write_defficiency_csv(const SimulationSummary& summary, std::ostream& out);

}  // namespace affinest

#endif  // AFFINEST_SIMULATION_HPP
