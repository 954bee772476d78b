#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>

#include "json.hpp"

#include "affinest/simulation.hpp"

// JSON config parsing and summary emission, plus the aligned-column CSV
// tables.  nlohmann::json stays an implementation detail of this file.

namespace affinest {

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json stats_to_json(const SummaryStats& s) {
  return ordered_json{{"mean", s.mean}, {"median", s.median}, {"q25", s.q25},
                      {"q75", s.q75},   {"min", s.min},       {"max", s.max}};
}

ordered_json scheme_to_json(const WeightScheme& scheme) {
  ordered_json j;
  if (const auto* l1 = std::get_if<TrimmedL1>(&scheme)) {
    j["type"] = "l1";
    j["kn"] = l1->k_n;
  } else if (const auto* l2 = std::get_if<RankWeightedL2>(&scheme)) {
    j["type"] = "l2";
    j["kn"] = l2->k_n;
  } else if (const auto* lk = std::get_if<GeneralLk>(&scheme)) {
    j["type"] = "lk";
    j["kn"] = lk->k_n;
    j["k"] = lk->k;
  } else if (const auto* po = std::get_if<PoissonWeights>(&scheme)) {
    j["type"] = "poisson";
    j["lambda"] = po->lambda;
  } else if (const auto* cs = std::get_if<CustomScores>(&scheme)) {
    j["type"] = "scores";
    j["scores"] = cs->scores.entries();
  }
  return j;
}

ordered_json config_to_json(const SimulationConfig& cfg) {
  ordered_json dist;
  dist["kind"] = cfg.dist.kind == DistributionSpec::Kind::Normal ? "normal" : "t";
  if (cfg.dist.kind == DistributionSpec::Kind::StudentT) dist["df"] = cfg.dist.df;
  dist["theta"] = cfg.dist.theta.entries();
  ordered_json sigma = ordered_json::array();
  for (std::size_t r = 0; r < cfg.dist.sigma.rows(); ++r) {
    const auto row = cfg.dist.sigma.row(r);
    sigma.push_back(std::vector<double>(row.begin(), row.end()));
  }
  dist["sigma"] = std::move(sigma);

  ordered_json schemes = ordered_json::array();
  for (const auto& ls : cfg.schemes) {
    ordered_json j = scheme_to_json(ls.scheme);
    j["label"] = ls.label;
    schemes.push_back(std::move(j));
  }

  return ordered_json{
      {"distribution", std::move(dist)},
      {"n", cfg.n},
      {"replications", cfg.replications},
      {"iterations", cfg.iterations},
      {"master_seed", cfg.master_seed},
      {"schemes", std::move(schemes)},
      {"comparators",
       ordered_json{{"mean", cfg.comparators.mean},
                    {"coordinate_median", cfg.comparators.coordinate_median},
                    {"spatial_median", cfg.comparators.spatial_median}}},
  };
}

[[noreturn]] void bad_field(const std::string& field, const std::string& why) {
  throw ConfigError("config: field '" + field + "': " + why);
}

const ordered_json& get_field(const ordered_json& j, const std::string& key) {
  const auto it = j.find(key);
  if (it == j.end()) bad_field(key, "missing");
  return *it;
}

std::size_t get_count(const ordered_json& j, const std::string& key) {
  const auto& f = get_field(j, key);
  if (!f.is_number_unsigned() || f.get<std::uint64_t>() == 0) {
    bad_field(key, "must be a positive integer");
  }
  return f.get<std::size_t>();
}

Vector get_vector(const ordered_json& j, const std::string& key) {
  const auto& f = get_field(j, key);
  if (!f.is_array() || f.empty()) bad_field(key, "must be a nonempty array");
  std::vector<double> v;
  for (const auto& x : f) {
    if (!x.is_number()) bad_field(key, "must contain only numbers");
    v.push_back(x.get<double>());
  }
  return Vector(std::move(v));
}

Matrix get_matrix(const ordered_json& j, const std::string& key) {
  const auto& f = get_field(j, key);
  if (!f.is_array() || f.empty()) bad_field(key, "must be a nonempty array of rows");
  const std::size_t rows = f.size();
  const std::size_t cols = f[0].is_array() ? f[0].size() : 0;
  if (cols == 0) bad_field(key, "rows must be nonempty arrays");
  Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    if (!f[r].is_array() || f[r].size() != cols) {
      bad_field(key, "rows must all have the same length");
    }
    for (std::size_t c = 0; c < cols; ++c) {
      if (!f[r][c].is_number()) bad_field(key, "must contain only numbers");
      m(r, c) = f[r][c].get<double>();
    }
  }
  return m;
}

LabeledScheme parse_scheme(const ordered_json& j, std::size_t index) {
  const std::string where = "schemes[" + std::to_string(index) + "]";
  if (!j.is_object()) bad_field(where, "must be an object");
  const auto& type_field = get_field(j, "type");
  if (!type_field.is_string()) bad_field(where + ".type", "must be a string");
  const std::string type = type_field.get<std::string>();

  LabeledScheme ls;
  if (type == "l1") {
    ls.scheme = TrimmedL1{get_count(j, "kn")};
    ls.label = "Ln1";
  } else if (type == "l2") {
    ls.scheme = RankWeightedL2{get_count(j, "kn")};
    ls.label = "Ln2";
  } else if (type == "lk") {
    const std::size_t kn = get_count(j, "kn");
    const std::size_t k = get_count(j, "k");
    ls.scheme = GeneralLk{kn, k};
    ls.label = "Lnk_k" + std::to_string(k);
  } else if (type == "poisson") {
    const auto& lam = get_field(j, "lambda");
    if (!lam.is_number()) bad_field(where + ".lambda", "must be a number");
    ls.scheme = PoissonWeights{lam.get<double>()};
    ls.label = "poisson";
  } else if (type == "scores") {
    ls.scheme = CustomScores{get_vector(j, "scores")};
    ls.label = "scores";
  } else {
    bad_field(where + ".type", "unknown scheme type '" + type + "'");
  }
  if (const auto it = j.find("label"); it != j.end()) {
    if (!it->is_string()) bad_field(where + ".label", "must be a string");
    ls.label = it->get<std::string>();
  }
  return ls;
}

}  // namespace

SimulationConfig parse_config_json(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config: top level must be an object");

  SimulationConfig cfg;
  const auto& dist = get_field(j, "distribution");
  if (!dist.is_object()) bad_field("distribution", "must be an object");
  const auto& kind = get_field(dist, "kind");
  if (!kind.is_string()) bad_field("distribution.kind", "must be a string");
  const std::string kind_str = kind.get<std::string>();
  if (kind_str == "normal") {
    cfg.dist.kind = DistributionSpec::Kind::Normal;
  } else if (kind_str == "t" || kind_str == "student_t") {
    cfg.dist.kind = DistributionSpec::Kind::StudentT;
    const auto& df = get_field(dist, "df");
    if (!df.is_number() || !(df.get<double>() > 0.0)) {
      bad_field("distribution.df", "must be a positive number");
    }
    cfg.dist.df = df.get<double>();
  } else {
    bad_field("distribution.kind", "must be 'normal' or 't'");
  }
  cfg.dist.theta = get_vector(dist, "theta");
  cfg.dist.sigma = get_matrix(dist, "sigma");

  cfg.n = get_count(j, "n");
  cfg.replications = get_count(j, "replications");
  cfg.iterations = get_count(j, "iterations");

  const auto& seed = get_field(j, "master_seed");
  if (!seed.is_number_unsigned()) bad_field("master_seed", "must be a nonnegative integer");
  cfg.master_seed = seed.get<std::uint64_t>();

  const auto& schemes = get_field(j, "schemes");
  if (!schemes.is_array()) bad_field("schemes", "must be an array");
  for (std::size_t i = 0; i < schemes.size(); ++i) {
    cfg.schemes.push_back(parse_scheme(schemes[i], i));
  }

  if (const auto it = j.find("comparators"); it != j.end()) {
    if (!it->is_object()) bad_field("comparators", "must be an object");
    auto flag = [&](const char* name, bool fallback) {
      const auto f = it->find(name);
      if (f == it->end()) return fallback;
      if (!f->is_boolean()) bad_field(std::string("comparators.") + name, "must be a boolean");
      return f->get<bool>();
    };
    cfg.comparators.mean = flag("mean", true);
    cfg.comparators.coordinate_median = flag("coordinate_median", true);
    cfg.comparators.spatial_median = flag("spatial_median", true);
  }
  return cfg;
}

SimulationConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_json(buf.str());
}

std::string summary_to_json(const SimulationSummary& summary) {
  ordered_json j;
  j["config"] = config_to_json(summary.config);
  j["replications_used"] = summary.replications_used;
  j["failures"] = summary.failures;

  ordered_json schemes = ordered_json::array();
  for (const auto& ss : summary.schemes) {
    ordered_json iterations = ordered_json::array();
    for (const auto& is : ss.per_iteration) {
      ordered_json centers = ordered_json::array();
      for (const auto& st : is.center) centers.push_back(stats_to_json(st));
      iterations.push_back(ordered_json{{"iteration", is.iteration},
                                        {"center", std::move(centers)},
                                        {"d_efficiency", stats_to_json(is.d_efficiency)}});
    }
    schemes.push_back(
        ordered_json{{"label", ss.label}, {"iterations", std::move(iterations)}});
  }
  j["schemes"] = std::move(schemes);

  ordered_json comparators = ordered_json::array();
  for (const auto& cs : summary.comparators) {
    ordered_json centers = ordered_json::array();
    for (const auto& st : cs.center) centers.push_back(stats_to_json(st));
    comparators.push_back(
        ordered_json{{"name", cs.name}, {"center", std::move(centers)}});
  }
  j["comparators"] = std::move(comparators);

  return j.dump(2) + "\n";
}

namespace {

constexpr int kLabelWidth = 18;
constexpr int kIntWidth = 9;
constexpr int kNumWidth = 12;

void csv_label(std::ostream& out, const std::string& text) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%-*s", kLabelWidth, text.c_str());
  out << buf;
}

void csv_int(std::ostream& out, std::size_t value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), ",%*zu", kIntWidth, value);
  out << buf;
}

void csv_num(std::ostream& out, double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), ",%*.6f", kNumWidth, value);
  out << buf;
}

void csv_header(std::ostream& out, std::initializer_list<const char*> cols) {
  bool first = true;
  for (const char* col : cols) {
    if (first) {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%-*s", kLabelWidth, col);
      out << buf;
      first = false;
    } else {
      char buf[64];
      const int width = (std::string(col) == "iteration" ||
                         std::string(col) == "coordinate")
                            ? kIntWidth
                            : kNumWidth;
      std::snprintf(buf, sizeof(buf), ",%*s", width, col);
      out << buf;
    }
  }
  out << "\n";
}

void csv_stats(std::ostream& out, const SummaryStats& s) {
  csv_num(out, s.mean);
  csv_num(out, s.median);
  csv_num(out, s.q25);
  csv_num(out, s.q75);
  csv_num(out, s.min);
  csv_num(out, s.max);
}

}  // namespace

void write_estimates_csv(const SimulationSummary& summary, std::ostream& out) {
  csv_header(out, {"estimator", "iteration", "coordinate", "mean", "median", "q25",
                   "q75", "min", "max"});
  for (const auto& ss : summary.schemes) {
    for (const auto& is : ss.per_iteration) {
      for (std::size_t c = 0; c < is.center.size(); ++c) {
        csv_label(out, ss.label);
        csv_int(out, is.iteration);
        csv_int(out, c + 1);
        csv_stats(out, is.center[c]);
        out << "\n";
      }
    }
  }
  for (const auto& cs : summary.comparators) {
    for (std::size_t c = 0; c < cs.center.size(); ++c) {
      csv_label(out, cs.name);
      csv_int(out, 0);  // comparators are iteration-free
      csv_int(out, c + 1);
      csv_stats(out, cs.center[c]);
      out << "\n";
    }
  }
}

void write_defficiency_csv(const SimulationSummary& summary, std::ostream& out) {
  csv_header(out, {"estimator", "iteration", "mean", "median", "q25", "q75", "min",
                   "max"});
  for (const auto& ss : summary.schemes) {
    for (const auto& is : ss.per_iteration) {
      csv_label(out, ss.label);
      csv_int(out, is.iteration);
      csv_stats(out, is.d_efficiency);
      out << "\n";
    }
  }
}

}  // namespace affinest
