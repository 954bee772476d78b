// affinest CLI: estimate locations from CSV data, run simulation campaigns,
// and emit Mahalanobis ellipse contour data.

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "affinest/comparators.hpp"
#include "affinest/csv.hpp"
#include "affinest/estimators.hpp"
#include "affinest/simulation.hpp"

namespace {

using affinest::EstimatorState;
using affinest::IterationTrace;
using affinest::Matrix;
using affinest::Sample;
using affinest::Vector;
using affinest::WeightScheme;
using ordered_json = nlohmann::ordered_json;

constexpr int kExitParse = 2;
constexpr int kExitDegenerate = 3;
constexpr int kExitTooManyFailures = 4;
constexpr int kExitBadDimension = 5;

struct SchemeFlags {
  std::string scheme = "l1";
  std::size_t kn = 15;
  std::size_t k = 3;
  double lambda = 0.5;
  std::string scores_file;
};

void add_scheme_flags(CLI::App* cmd, SchemeFlags& flags) {
  cmd->add_option("--scheme", flags.scheme, "Weight scheme")
      ->check(CLI::IsMember({"l1", "l2", "lk", "poisson", "scores"}))
      ->capture_default_str();
  cmd->add_option("--kn", flags.kn, "Number of inner observations k_n")
      ->capture_default_str();
  cmd->add_option("--k", flags.k, "Order k for the lk scheme")->capture_default_str();
  cmd->add_option("--lambda", flags.lambda, "Poisson weight parameter in (0,1)")
      ->capture_default_str();
  cmd->add_option("--scores", flags.scores_file,
                  "CSV file with one nonincreasing score per observation "
                  "(scheme=scores)");
}

WeightScheme make_scheme(const SchemeFlags& flags, std::size_t n) {
  if (flags.scheme == "l1") return affinest::TrimmedL1{flags.kn};
  if (flags.scheme == "l2") return affinest::RankWeightedL2{flags.kn};
  if (flags.scheme == "lk") return affinest::GeneralLk{flags.kn, flags.k};
  if (flags.scheme == "poisson") return affinest::PoissonWeights{flags.lambda};
  if (flags.scores_file.empty()) {
    throw affinest::InvalidScheme("scheme 'scores' requires --scores <file>");
  }
  const affinest::CsvTable table = affinest::read_csv_file(flags.scores_file);
  std::vector<double> values;
  for (std::size_t r = 0; r < table.values.rows(); ++r) {
    for (std::size_t c = 0; c < table.values.cols(); ++c) {
      values.push_back(table.values(r, c));
    }
  }
  if (values.size() != n) {
    throw affinest::InvalidScheme("scores file has " + std::to_string(values.size()) +
                                  " values, expected " + std::to_string(n));
  }
  return affinest::CustomScores{Vector(std::move(values))};
}

std::size_t threads_from_env() {
  const char* env = std::getenv("AFFINEST_THREADS");
  if (env == nullptr || *env == '\0') return 0;  // auto
  char* end = nullptr;
  const unsigned long v = std::strtoul(env, &end, 10);
  if (end == env || *end != '\0') {
    std::cerr << "warning: ignoring malformed AFFINEST_THREADS='" << env << "'\n";
    return 0;
  }
  return static_cast<std::size_t>(v);
}

// ---------------------------------------------------------------------- estimate

void print_estimate_plain(const Sample& s, const IterationTrace& trace,
                          std::ostream& out) {
  const std::size_t p = s.p();
  out << "n=" << s.n() << " p=" << p << " steps=" << trace.states.size() - 1 << "\n";
  char buf[64];
  out << "step";
  for (std::size_t c = 0; c < p; ++c) {
    std::snprintf(buf, sizeof(buf), "%13s_%zu", "center", c + 1);
    out << buf;
  }
  out << "  d_efficiency\n";
  for (std::size_t r = 0; r < trace.states.size(); ++r) {
    std::snprintf(buf, sizeof(buf), "%4zu", r);
    out << buf;
    for (std::size_t c = 0; c < p; ++c) {
      std::snprintf(buf, sizeof(buf), "%15.6f", trace.states[r].center[c]);
      out << buf;
    }
    if (r == 0) {
      out << "             -";
    } else {
      std::snprintf(buf, sizeof(buf), "%14.6f", trace.d_efficiency[r - 1]);
      out << buf;
    }
    out << "\n";
  }
  if (trace.converged_at) {
    out << "converged at step " << *trace.converged_at << "\n";
  }
  const EstimatorState& last = trace.states.back();
  out << "observation      distance  rank\n";
  for (std::size_t i = 0; i < s.n(); ++i) {
    std::snprintf(buf, sizeof(buf), "%11zu  %12.6f  %4d\n", i + 1,
                  last.distances[i], last.ranks[i]);
    out << buf;
  }
}

void print_estimate_json(const Sample& s, const IterationTrace& trace,
                         std::ostream& out) {
  ordered_json j;
  j["n"] = s.n();
  j["p"] = s.p();
  ordered_json iters = ordered_json::array();
  for (std::size_t r = 0; r < trace.states.size(); ++r) {
    ordered_json row;
    row["step"] = r;
    row["center"] = trace.states[r].center.entries();
    if (r > 0) row["d_efficiency"] = trace.d_efficiency[r - 1];
    iters.push_back(std::move(row));
  }
  j["iterations"] = std::move(iters);
  if (trace.converged_at) {
    j["converged_at"] = *trace.converged_at;
  } else {
    j["converged_at"] = nullptr;
  }
  const EstimatorState& last = trace.states.back();
  j["distances"] = last.distances.entries();
  j["ranks"] = last.ranks;
  out << j.dump(2) << "\n";
}

void print_estimate_csv(const Sample& s, const IterationTrace& trace,
                        std::ostream& out) {
  char buf[40];
  out << "step,d_efficiency";
  for (std::size_t c = 0; c < s.p(); ++c) out << ",center_" << c + 1;
  out << "\n";
  for (std::size_t r = 0; r < trace.states.size(); ++r) {
    out << r << ",";
    if (r > 0) {
      std::snprintf(buf, sizeof(buf), "%.17g", trace.d_efficiency[r - 1]);
      out << buf;
    }
    for (std::size_t c = 0; c < s.p(); ++c) {
      std::snprintf(buf, sizeof(buf), ",%.17g", trace.states[r].center[c]);
      out << buf;
    }
    out << "\n";
  }
  out << "\n";
  const EstimatorState& last = trace.states.back();
  out << "observation,distance,rank\n";
  for (std::size_t i = 0; i < s.n(); ++i) {
    std::snprintf(buf, sizeof(buf), "%zu,%.17g,%d\n", i + 1, last.distances[i],
                  last.ranks[i]);
    out << buf;
  }
}

int run_estimate(const std::string& input, const SchemeFlags& flags,
                 std::size_t iterations, double tol, const std::string& init,
                 const std::string& format) {
  try {
    const affinest::CsvTable table = affinest::read_csv_file(input);
    const Sample sample{Matrix(table.values)};
    const WeightScheme scheme = make_scheme(flags, sample.n());
    const auto initializer = init == "nearest"
                                 ? affinest::Initializer::NearestObservation
                                 : affinest::Initializer::SampleMean;
    const IterationTrace trace =
        affinest::iterate(sample, scheme, iterations, tol, initializer);
    if (format == "json") {
      print_estimate_json(sample, trace, std::cout);
    } else if (format == "csv") {
      print_estimate_csv(sample, trace, std::cout);
    } else {
      print_estimate_plain(sample, trace, std::cout);
    }
    return 0;
  } catch (const affinest::DegenerateScatter& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDegenerate;
  } catch (const affinest::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  }
}

// ---------------------------------------------------------------------- simulate

int run_simulate(const std::string& config_path, const std::string& out_dir,
                 std::optional<std::uint64_t> seed_override) {
  affinest::SimulationSummary summary;
  try {
    affinest::SimulationConfig cfg = affinest::load_config(config_path);
    if (seed_override) cfg.master_seed = *seed_override;
    summary = affinest::run_simulation(cfg, threads_from_env());
  } catch (const affinest::TooManyFailures& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitTooManyFailures;
  } catch (const affinest::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  }

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) {
    std::cerr << "error: cannot create output directory '" << out_dir << "'\n";
    return 1;
  }

  const auto write_file = [&](const std::string& name, auto&& writer) -> bool {
    const std::filesystem::path path = std::filesystem::path(out_dir) / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) {
      std::cerr << "error: cannot write '" << path.string() << "'\n";
      return false;
    }
    writer(out);
    return true;
  };

  const bool ok =
      write_file("summary.json",
                 [&](std::ostream& o) { o << affinest::summary_to_json(summary); }) &&
      write_file("estimates_by_iteration.csv",
                 [&](std::ostream& o) { affinest::write_estimates_csv(summary, o); }) &&
      write_file("defficiency_stats.csv",
                 [&](std::ostream& o) { affinest::write_defficiency_csv(summary, o); });
  if (!ok) return 1;

  std::cout << "simulate: " << summary.replications_used << " replications ("
            << summary.failures << " degenerate), " << summary.schemes.size()
            << " schemes, " << summary.config.iterations << " iterations -> "
            << out_dir << "\n";
  return 0;
}

// ---------------------------------------------------------------------- ellipses

struct EllipseRecord {
  std::string estimator;
  std::size_t observation = 0;  // 1-based original index
  double cx = 0.0, cy = 0.0;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  double level = 0.0;
};

std::vector<EllipseRecord> ellipse_records(const std::string& name,
                                           const EstimatorState& state,
                                           std::size_t every) {
  const std::size_t n = state.distances.dim();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (state.distances[a] != state.distances[b]) {
      return state.distances[a] < state.distances[b];
    }
    return a < b;
  });
  std::vector<EllipseRecord> records;
  for (std::size_t pos = 0; pos < n; pos += every) {
    const std::size_t i = order[pos];
    EllipseRecord rec;
    rec.estimator = name;
    rec.observation = i + 1;
    rec.cx = state.center[0];
    rec.cy = state.center[1];
    rec.sxx = state.scatter(0, 0);
    rec.sxy = state.scatter(0, 1);
    rec.syy = state.scatter(1, 1);
    rec.level = state.distances[i];
    records.push_back(std::move(rec));
  }
  return records;
}

int run_ellipses(const std::string& input, std::vector<std::string> estimators,
                 std::size_t kn, std::size_t iterations, std::size_t every,
                 const std::string& format, const std::string& out_path) {
  try {
    const affinest::CsvTable table = affinest::read_csv_file(input);
    if (table.values.cols() != 2) {
      std::cerr << "error: ellipses requires p=2 data, got p=" << table.values.cols()
                << "\n";
      return kExitBadDimension;
    }
    const Sample sample{Matrix(table.values)};
    if (every < 1) every = 1;

    std::vector<EllipseRecord> records;
    for (const std::string& name : estimators) {
      EstimatorState state;
      if (name == "mean") {
        state = affinest::mean_state(sample);
      } else if (name == "l1") {
        state = affinest::iterate(sample, affinest::TrimmedL1{kn}, iterations)
                    .states.back();
      } else if (name == "l2") {
        state = affinest::iterate(sample, affinest::RankWeightedL2{kn}, iterations)
                    .states.back();
      } else {
        std::cerr << "error: unknown estimator '" << name
                  << "' (expected mean, l1 or l2)\n";
        return kExitParse;
      }
      auto recs = ellipse_records(name, state, every);
      records.insert(records.end(), recs.begin(), recs.end());
    }

    std::ofstream file;
    std::ostream* out = &std::cout;
    if (!out_path.empty()) {
      file.open(out_path, std::ios::binary);
      if (!file) {
        std::cerr << "error: cannot write '" << out_path << "'\n";
        return 1;
      }
      out = &file;
    }

    if (format == "json") {
      ordered_json j = ordered_json::array();
      for (const auto& r : records) {
        j.push_back(ordered_json{{"estimator", r.estimator},
                                 {"observation", r.observation},
                                 {"center", {r.cx, r.cy}},
                                 {"shape", {{r.sxx, r.sxy}, {r.sxy, r.syy}}},
                                 {"level", r.level}});
      }
      *out << j.dump(2) << "\n";
    } else {
      char buf[256];
      *out << "estimator,observation,center_x,center_y,s_xx,s_xy,s_yy,level\n";
      for (const auto& r : records) {
        std::snprintf(buf, sizeof(buf),
                      "%s,%zu,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                      r.estimator.c_str(), r.observation, r.cx, r.cy, r.sxx, r.sxy,
                      r.syy, r.level);
        *out << buf;
      }
    }
    return 0;
  } catch (const affinest::DegenerateScatter& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDegenerate;
  } catch (const affinest::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Affine-equivariant rank-weighted location estimation"};
  app.require_subcommand(1);

  // estimate
  auto* est = app.add_subcommand("estimate", "Run the iterated estimator on a CSV file");
  std::string est_input;
  SchemeFlags est_flags;
  std::size_t est_iterations = 10;
  double est_tol = 0.0;
  std::string est_init = "mean";
  std::string est_format = "plain";
  est->add_option("input", est_input, "CSV data file (n rows x p columns)")
      ->required();
  add_scheme_flags(est, est_flags);
  est->add_option("--iterations", est_iterations, "Iteration steps")
      ->capture_default_str();
  est->add_option("--tol", est_tol, "Early-stop tolerance on the center change")
      ->capture_default_str();
  est->add_option("--init", est_init, "Initial center")
      ->check(CLI::IsMember({"mean", "nearest"}))
      ->capture_default_str();
  est->add_option("--format", est_format, "Output format")
      ->check(CLI::IsMember({"json", "csv", "plain"}))
      ->capture_default_str();

  // simulate
  auto* sim = app.add_subcommand("simulate", "Run a Monte-Carlo campaign from a JSON config");
  std::string sim_config;
  std::string sim_out = ".";
  std::optional<std::uint64_t> sim_seed;
  sim->add_option("config", sim_config, "JSON simulation config")->required();
  sim->add_option("--out", sim_out, "Output directory")->capture_default_str();
  sim->add_option("--seed", sim_seed, "Override the config's master_seed");

  // ellipses
  auto* ell = app.add_subcommand("ellipses", "Emit Mahalanobis ellipse contour data (p=2)");
  std::string ell_input;
  std::vector<std::string> ell_estimators{"mean", "l1", "l2"};
  std::size_t ell_kn = 15;
  std::size_t ell_iterations = 10;
  std::size_t ell_every = 1;
  std::string ell_format = "csv";
  std::string ell_out;
  ell->add_option("input", ell_input, "CSV data file (n rows x 2 columns)")
      ->required();
  ell->add_option("--estimators", ell_estimators,
                  "Centers to use (subset of mean,l1,l2)")
      ->delimiter(',')
      ->capture_default_str();
  ell->add_option("--kn", ell_kn, "k_n for the l1/l2 centers")->capture_default_str();
  ell->add_option("--iterations", ell_iterations, "Iterations for the l1/l2 centers")
      ->capture_default_str();
  ell->add_option("--every", ell_every, "Keep every j-th contour (by level order)")
      ->capture_default_str();
  ell->add_option("--format", ell_format, "Output format")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  ell->add_option("--out", ell_out, "Output file (default: stdout)");

  CLI11_PARSE(app, argc, argv);

  if (est->parsed()) {
    return run_estimate(est_input, est_flags, est_iterations, est_tol, est_init,
                        est_format);
  }
  if (sim->parsed()) {
    return run_simulate(sim_config, sim_out, sim_seed);
  }
  return run_ellipses(ell_input, ell_estimators, ell_kn, ell_iterations, ell_every,
                      ell_format, ell_out);
}
