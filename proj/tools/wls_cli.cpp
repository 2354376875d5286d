// Copyright 2026 The wls Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end: sample, fit, stability-grid, high-dim-table,
// error-study and verify. Every run writes its data file plus a provenance
// sidecar (<out>.provenance.json) holding the fully resolved configuration.
//
// Exit codes: 0 success, 1 invariant failure (verify) or runtime failure,
// 2 configuration error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "wls/wls.hpp"

namespace {

using nlohmann::ordered_json;

constexpr const char* kVersion = "0.1.0";

class config_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Defaults and presets.

ordered_json space_defaults() {
  return {{"family", "uniform"},
          {"dimension", 1},
          {"strategy", "total_degree_lex"},
          {"strategy_seed", 0},
          {"m", 10}};
}

ordered_json defaults_for(const std::string& cmd) {
  ordered_json j = ordered_json::object();
  if (cmd == "sample") {
    j = space_defaults();
    j["n"] = 1000;
    j["measure"] = "optimal";
    j["method"] = "auto";
    j["solver"] = "newton";
    j["density_grid"] = 0;
  } else if (cmd == "fit") {
    j = space_defaults();
    j["n"] = 1000;
    j["measure"] = "optimal";
    j["method"] = "auto";
    j["estimator"] = "plain";
    j["tau"] = 1.0;
    j["threshold"] = 0.5;
    j["target"] = "exp";
    j["noise"] = {{"kind", "none"}, {"scale", 0.0}};
    j["error_method"] = "quadrature";
    j["error_samples"] = 100000;
  } else if (cmd == "stability-grid") {
    j = {{"family", "uniform"},
         {"method", "weighted"},
         {"dimension", 1},
         {"strategy", "total_degree_lex"},
         {"strategy_seed", 0},
         {"n_values", ordered_json::array()},
         {"n_range", {{"lo", 10}, {"hi", 40000}, {"count", 15}}},
         {"m_values", ordered_json::array()},
         {"m_range", {{"lo", 1}, {"hi", 40}, {"count", 15}}},
         {"repetitions", 100},
         {"threads", 1}};
  } else if (cmd == "high-dim-table") {
    j = {{"dimensions", {1, 2, 5, 10, 50, 100}},
         {"families", {"uniform", "gaussian", "chebyshev"}},
         {"methods", {"weighted", "standard"}},
         {"n", 26559},
         {"m", 200},
         {"repetitions", 100},
         {"repetitions_by_dimension", ordered_json::object()},
         {"strategy", "total_degree_lex"},
         {"strategy_seed", 0},
         {"threads", 1}};
  } else if (cmd == "error-study") {
    j = {{"family", "uniform"},
         {"dimension", 1},
         {"strategy", "total_degree_lex"},
         {"strategy_seed", 0},
         {"target", "exp"},
         {"m_values", {2, 3, 4, 5, 6, 7, 8}},
         {"r", 1.0},
         {"method", "weighted"},
         {"estimator", "plain"},
         {"tau", 1.0},
         {"threshold", 0.5},
         {"noise", {{"kind", "none"}, {"scale", 0.0}}},
         {"repetitions", 100},
         {"error_method", "quadrature"},
         {"error_samples", 100000}};
  } else if (cmd == "verify") {
    j = ordered_json::object();
  }
  j["seed"] = 0;
  return j;
}

// Pure Gaussian noise on u = 0; one preset per sigma of the scaling check.
ordered_json noise_preset(double sigma) {
  return {{"target", "zero"},
          {"m_values", {10}},
          {"repetitions", 200},
          {"noise", {{"kind", "gaussian"}, {"scale", sigma}}}};
}

// Presets are patches over the subcommand defaults, one or more per
// acceptance criterion.
const std::map<std::string, std::map<std::string, ordered_json>>& presets() {
  static const std::map<std::string, std::map<std::string, ordered_json>> table = {
      {"sample",
       {{"legendre-line", {{"family", "uniform"}, {"m", 2}, {"n", 100000}, {"method", "ITS"}}},
        {"legendre-square",
         {{"family", "uniform"}, {"dimension", 2}, {"m", 3}, {"n", 100000}}},
        {"constant", {{"m", 1}, {"n", 100}}}}},
      {"fit",
       {{"exact-reproduction",
         {{"family", "gaussian"},
          {"dimension", 2},
          {"m", 6},
          {"n", 600},
          {"target", "inVm:0.3,-1.2,0.5,2.0,0.7,-0.4"}}},
        {"gaussian-noise",
         {{"family", "uniform"},
          {"m", 5},
          {"n", 200},
          {"target", "zero"},
          {"noise", {{"kind", "gaussian"}, {"scale", 0.2}}}}}}},
      {"stability-grid",
       {{"uniform-weighted", {{"family", "uniform"}, {"method", "weighted"}}},
        {"chebyshev-weighted", {{"family", "chebyshev"}, {"method", "weighted"}}},
        {"gaussian-weighted", {{"family", "gaussian"}, {"method", "weighted"}}},
        {"uniform-standard", {{"family", "uniform"}, {"method", "standard"}}}}},
      {"high-dim-table",
       {{"full-table", {{"repetitions_by_dimension", {{"50", 25}, {"100", 25}}}}},
        {"weighted-d1-d10", {{"dimensions", {1, 10}}, {"methods", {"weighted"}}}},
        {"standard-gaussian-d1",
         {{"dimensions", {1}}, {"families", {"gaussian"}}, {"methods", {"standard"}}}}}},
      {"error-study",
       {{"exp-near-optimality", ordered_json::object()},
        {"noise-0.1", noise_preset(0.1)},
        {"noise-0.2", noise_preset(0.2)},
        {"noise-0.4", noise_preset(0.4)}}},
      {"verify", {{"default", ordered_json::object()}}},
  };
  return table;
}

// ---------------------------------------------------------------------------
// Typed access with config_error on mismatch.

template <typename T>
T get(const ordered_json& j, const char* key) {
  if (!j.contains(key)) throw config_error(std::string("missing key '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw config_error(std::string("key '") + key + "' has the wrong type");
  }
}

std::size_t get_count(const ordered_json& j, const char* key) {
  const auto& v = j.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw config_error(std::string("key '") + key + "' must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

std::uint64_t get_seed(const ordered_json& j, const char* key) {
  const auto& v = j.at(key);
  if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() &&
                                  v.get<long long>() < 0)) {
    throw config_error(std::string("key '") + key + "' must be an unsigned integer");
  }
  return v.get<std::uint64_t>();
}

void check_keys(const ordered_json& config, const ordered_json& defaults) {
  for (const auto& [key, value] : config.items()) {
    if (!defaults.contains(key)) throw config_error("unknown config key '" + key + "'");
  }
}

wls::IndexSet index_set_from(const ordered_json& j) {
  const std::size_t d = get_count(j, "dimension");
  const std::size_t m = get_count(j, "m");
  if (d < 1 || m < 1) throw config_error("dimension and m must be >= 1");
  const auto strategy = wls::sequence_strategy_from_name(get<std::string>(j, "strategy"));
  return wls::nested_sequence(d, m, strategy, get_seed(j, "strategy_seed")).back();
}

wls::ApproximationSpace space_from(const ordered_json& j) {
  return wls::ApproximationSpace::isotropic(
      wls::BasisFamily::from_name(get<std::string>(j, "family")), index_set_from(j));
}

wls::Estimator estimator_from(const ordered_json& j) {
  const auto name = get<std::string>(j, "estimator");
  if (name == "plain") return wls::Estimator::plain();
  if (name == "truncated") return wls::Estimator::truncated(get<double>(j, "tau"));
  if (name == "conditioned") return wls::Estimator::conditioned(get<double>(j, "threshold"));
  throw config_error("unknown estimator '" + name + "'");
}

wls::NoiseModel noise_from(const ordered_json& j) {
  const ordered_json& n = j.at("noise");
  if (!n.is_object()) throw config_error("noise must be an object");
  for (const auto& [key, value] : n.items()) {
    if (key != "kind" && key != "scale") throw config_error("unknown noise key '" + key + "'");
  }
  const auto kind = wls::noise_kind_from_name(get<std::string>(n, "kind"));
  const double scale = n.contains("scale") ? get<double>(n, "scale") : 0.0;
  switch (kind) {
    case wls::NoiseModel::Kind::none: return wls::NoiseModel::none();
    case wls::NoiseModel::Kind::bounded_uniform: return wls::NoiseModel::bounded_uniform(scale);
    case wls::NoiseModel::Kind::gaussian: return wls::NoiseModel::gaussian(scale);
  }
  return wls::NoiseModel::none();
}

wls::ErrorMethod error_method_from(const ordered_json& j, std::uint64_t seed) {
  const auto name = get<std::string>(j, "error_method");
  if (name == "quadrature") return wls::ErrorMethod::quadrature();
  if (name == "monte_carlo") {
    return wls::ErrorMethod::monte_carlo(get_count(j, "error_samples"),
                                         wls::derive_seed(seed, {0x6d63}));
  }
  throw config_error("unknown error_method '" + name + "'");
}

std::vector<std::size_t> values_or_range(const ordered_json& j, const char* values,
                                         const char* range, bool geometric) {
  const ordered_json& v = j.at(values);
  if (!v.is_array()) throw config_error(std::string(values) + " must be an array");
  if (!v.empty()) {
    std::vector<std::size_t> out;
    for (const auto& x : v) {
      if (!x.is_number_integer() || x.get<long long>() < 1) {
        throw config_error(std::string(values) + " entries must be positive integers");
      }
      out.push_back(x.get<std::size_t>());
    }
    return out;
  }
  const ordered_json& r = j.at(range);
  const std::size_t lo = get_count(r, "lo");
  const std::size_t hi = get_count(r, "hi");
  const std::size_t count = get_count(r, "count");
  return geometric ? wls::geometric_values(lo, hi, count) : wls::linear_values(lo, hi, count);
}

// ---------------------------------------------------------------------------
// Output helpers.

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  const std::filesystem::path parent = std::filesystem::path(path).parent_path();
  std::error_code ec;
  if (!parent.empty()) std::filesystem::create_directories(parent, ec);
  std::ofstream os(path, std::ios::binary);
  if (!os) throw config_error("cannot open output file '" + path + "'");
  return os;
}

void write_sidecar(const std::string& out, const std::string& cmd, const std::string& preset,
                   const ordered_json& resolved) {
  ordered_json side = {{"tool", "wls_cli"},
                       {"version", kVersion},
                       {"subcommand", cmd},
                       {"preset", preset},
                       {"seed", resolved.at("seed")},
                       {"output", out},
                       {"resolved_config", resolved}};
  auto os = open_out(out + ".provenance.json");
  os << side.dump(2) << "\n";
}

ordered_json index_set_json(const wls::IndexSet& set) {
  ordered_json arr = ordered_json::array();
  for (const auto& nu : set) {
    ordered_json e = ordered_json::array();
    for (std::size_t i = 0; i < nu.dimension(); ++i) e.push_back(nu[i]);
    arr.push_back(e);
  }
  return arr;
}

// ---------------------------------------------------------------------------
// Subcommands.

int run_sample(const ordered_json& c, const std::string& out) {
  const auto space = space_from(c);
  const std::uint64_t seed = get_seed(c, "seed");
  const std::size_t n = get_count(c, "n");
  if (n < 1) throw config_error("n must be >= 1");
  const auto measure = get<std::string>(c, "measure");
  const auto method = wls::sampling_method_from_name(get<std::string>(c, "method"));
  const auto solver = wls::root_solver_from_name(get<std::string>(c, "solver"));
  wls::WeightedSample sample;
  if (measure == "optimal") {
    sample = wls::OptimalSampler(space, method, solver).sample(n, seed);
  } else if (measure == "standard") {
    sample = wls::sample_standard(space, n, seed);
  } else {
    throw config_error("unknown measure '" + measure + "'");
  }
  auto os = open_out(out);
  os << "# seed=" << sample.meta.seed << " measure=" << wls::to_string(sample.meta.measure)
     << " method=" << wls::to_string(sample.meta.method)
     << " fingerprint=" << sample.meta.fingerprint << "\n";
  for (std::size_t q = 0; q < sample.dimension; ++q) os << "x" << q + 1 << ",";
  os << "weight\n";
  for (std::size_t i = 0; i < sample.size(); ++i) {
    for (double v : sample.point(i)) os << fmt(v) << ",";
    os << fmt(sample.weights[i]) << "\n";
  }
  const std::size_t grid = get_count(c, "density_grid");
  if (grid > 0) {
    if (space.dimension() != 1) throw config_error("density_grid needs dimension 1");
    const auto support = wls::mapped_support(space.family(0), space.max_degree(0));
    auto dens = open_out(out + ".density.csv");
    dens << "t,optimal_density,reference_density\n";
    for (std::size_t i = 0; i < grid; ++i) {
      const double s = support.lo + (support.hi - support.lo) * (static_cast<double>(i) + 0.5) /
                                        static_cast<double>(grid);
      const double t = wls::mapped_to_point(space.family(0), s);
      const double x[1] = {t};
      dens << fmt(t) << "," << fmt(wls::optimal_density(space, x)) << ","
           << fmt(wls::reference_density(space, x)) << "\n";
    }
  }
  return 0;
}

int run_fit(const ordered_json& c, const std::string& out) {
  const auto space = space_from(c);
  const std::uint64_t seed = get_seed(c, "seed");
  const std::size_t n = get_count(c, "n");
  if (n < 1) throw config_error("n must be >= 1");
  const auto estimator = estimator_from(c);
  const auto noise = noise_from(c);
  const auto u = wls::make_target(get<std::string>(c, "target"), space);
  const auto errors = error_method_from(c, seed);
  const auto measure = get<std::string>(c, "measure");
  const auto method = wls::sampling_method_from_name(get<std::string>(c, "method"));
  wls::WeightedSample sample;
  if (measure == "optimal") {
    sample = wls::sample_optimal(space, n, seed, method);
  } else if (measure == "standard") {
    sample = wls::sample_standard(space, n, seed);
  } else {
    throw config_error("unknown measure '" + measure + "'");
  }
  const auto y = wls::observe(u, sample, noise, wls::derive_seed(seed, {1}));
  const auto f = wls::fit(space, sample, y, estimator);
  ordered_json j;
  j["index_set"] = index_set_json(space.index_set());
  j["coefficients"] = std::vector<double>(f.coefficients.data(),
                                          f.coefficients.data() + f.coefficients.size());
  j["estimator"] = wls::to_string(f.estimator.kind);
  j["conditioned_zeroed"] = f.conditioned_zeroed;
  j["dist_identity"] = f.stats.dist_identity;
  j["cond"] = std::isfinite(f.stats.cond) ? ordered_json(f.stats.cond) : ordered_json("inf");
  j["lambda_min"] = f.stats.lambda_min;
  j["lambda_max"] = f.stats.lambda_max;
  j["errors"] = {{"l2_error", wls::l2_error(space, f, u, errors)},
                 {"best_approx_error", wls::best_approx_error(space, u, errors)}};
  j["fingerprint"] = space.fingerprint();
  auto os = open_out(out);
  os << j.dump(2) << "\n";
  return 0;
}

void write_cell(std::ostream& os, const wls::StabilityCell& cell) {
  os << cell.probability << "," << fmt(cell.mean_cond) << "," << fmt(cell.median_cond) << ","
     << cell.capped << "," << cell.successes << "," << cell.repetitions << ","
     << cell.tail_frequency << "," << fmt(cell.mean_dist);
}

constexpr const char* kCellHeader =
    "probability,mean_cond,median_cond,capped,successes,repetitions,tail_frequency,mean_dist";

int run_stability_grid(const ordered_json& c, const std::string& out) {
  wls::ExperimentConfig e;
  e.family = wls::BasisFamily::from_name(get<std::string>(c, "family"));
  e.method = wls::ls_method_from_name(get<std::string>(c, "method"));
  e.dimension = get_count(c, "dimension");
  e.strategy = wls::sequence_strategy_from_name(get<std::string>(c, "strategy"));
  e.strategy_seed = get_seed(c, "strategy_seed");
  e.repetitions = get_count(c, "repetitions");
  e.master_seed = get_seed(c, "seed");
  e.threads = static_cast<unsigned>(std::max<std::size_t>(1, get_count(c, "threads")));
  e.cells = wls::grid_cells(values_or_range(c, "n_values", "n_range", true),
                            values_or_range(c, "m_values", "m_range", false));
  e.validate();
  const auto cells = wls::stability_grid(e);
  auto os = open_out(out);
  os << "# family=" << e.family.name() << " method=" << wls::to_string(e.method)
     << " dimension=" << e.dimension << " seed=" << e.master_seed << "\n";
  os << "n,m,n_over_log_n," << kCellHeader << "\n";
  for (const auto& cell : cells) {
    const double nn = static_cast<double>(cell.n);
    os << cell.n << "," << cell.m << "," << fmt(nn / std::log(nn)) << ",";
    write_cell(os, cell);
    os << "\n";
  }
  return 0;
}

int run_high_dim_table(const ordered_json& c, const std::string& out) {
  wls::HighDimConfig h;
  h.dimensions = get<std::vector<std::size_t>>(c, "dimensions");
  h.families.clear();
  for (const auto& name : get<std::vector<std::string>>(c, "families")) {
    h.families.push_back(wls::BasisFamily::from_name(name));
  }
  h.methods.clear();
  for (const auto& name : get<std::vector<std::string>>(c, "methods")) {
    h.methods.push_back(wls::ls_method_from_name(name));
  }
  h.n = get_count(c, "n");
  h.m = get_count(c, "m");
  h.repetitions = get_count(c, "repetitions");
  for (const auto& [key, value] : c.at("repetitions_by_dimension").items()) {
    std::size_t d = 0;
    try {
      d = std::stoul(key);
    } catch (const std::exception&) {
      throw config_error("repetitions_by_dimension keys must be dimensions");
    }
    if (!value.is_number_integer() || value.get<long long>() < 1) {
      throw config_error("repetitions_by_dimension values must be positive integers");
    }
    h.repetitions_by_dimension[d] = value.get<std::size_t>();
  }
  h.strategy = wls::sequence_strategy_from_name(get<std::string>(c, "strategy"));
  h.strategy_seed = get_seed(c, "strategy_seed");
  h.master_seed = get_seed(c, "seed");
  h.threads = static_cast<unsigned>(std::max<std::size_t>(1, get_count(c, "threads")));
  h.validate();
  const auto rows = wls::high_dim_table(h);
  auto os = open_out(out);
  os << "# n=" << h.n << " m=" << h.m << " seed=" << h.master_seed << "\n";
  os << "method,measure,d,n,m," << kCellHeader << "\n";
  for (const auto& row : rows) {
    os << wls::to_string(row.method) << "," << row.family.name() << "," << row.dimension << ","
       << row.cell.n << "," << row.cell.m << ",";
    write_cell(os, row.cell);
    os << "\n";
  }
  return 0;
}

int run_error_study(const ordered_json& c, const std::string& out) {
  wls::ErrorStudyConfig e;
  e.family = wls::BasisFamily::from_name(get<std::string>(c, "family"));
  e.dimension = get_count(c, "dimension");
  e.strategy = wls::sequence_strategy_from_name(get<std::string>(c, "strategy"));
  e.strategy_seed = get_seed(c, "strategy_seed");
  e.target = get<std::string>(c, "target");
  e.m_values = get<std::vector<std::size_t>>(c, "m_values");
  e.r = get<double>(c, "r");
  e.method = wls::ls_method_from_name(get<std::string>(c, "method"));
  e.estimator = estimator_from(c);
  e.noise = noise_from(c);
  e.repetitions = get_count(c, "repetitions");
  e.master_seed = get_seed(c, "seed");
  e.error_method = error_method_from(c, e.master_seed);
  e.validate();
  if (e.dimension < 1) throw config_error("dimension must be >= 1");
  // Resolve the target once up front so a bad name is a config error.
  wls::make_target(e.target, wls::ApproximationSpace::isotropic(
                                 e.family, wls::nested_sequence(e.dimension, *std::max_element(
                                                                                 e.m_values.begin(), e.m_values.end()),
                                                                e.strategy, e.strategy_seed)
                                               .back()));
  const auto rows = wls::error_study(e);
  auto os = open_out(out);
  os << "# target=" << e.target << " family=" << e.family.name() << " seed=" << e.master_seed
     << "\n";
  os << "m,n,mean_error,max_error,best_error,uniform_error_lower,uniform_error_upper,"
        "within_bound,repetitions\n";
  for (const auto& row : rows) {
    os << row.m << "," << row.n << "," << fmt(row.mean_error) << "," << fmt(row.max_error) << ","
       << fmt(row.best_error) << ",";
    if (row.uniform_error) {
      os << fmt(row.uniform_error->lower) << "," << fmt(row.uniform_error->upper);
    } else {
      os << ",";
    }
    os << "," << row.within_bound << "," << row.errors.size() << "\n";
  }
  return 0;
}

int run_verify(const ordered_json& c, const std::string& out) {
  const auto results = wls::run_invariants(get_seed(c, "seed"));
  ordered_json arr = ordered_json::array();
  bool ok = true;
  for (const auto& r : results) {
    std::cout << (r.passed ? "PASS " : "FAIL ") << r.name;
    if (!r.detail.empty()) std::cout << " (" << r.detail << ")";
    std::cout << "\n";
    arr.push_back({{"name", r.name}, {"passed", r.passed}, {"detail", r.detail}});
    ok = ok && r.passed;
  }
  auto os = open_out(out);
  os << ordered_json{{"passed", ok}, {"invariants", arr}}.dump(2) << "\n";
  return ok ? 0 : 1;
}

// ---------------------------------------------------------------------------

ordered_json load_json(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw config_error("cannot read config '" + path + "'");
  try {
    ordered_json j = ordered_json::parse(is);
    if (!j.is_object()) throw config_error("config must be a JSON object");
    // A provenance sidecar replays its resolved configuration.
    if (j.contains("resolved_config")) return j.at("resolved_config");
    return j;
  } catch (const nlohmann::json::parse_error& e) {
    throw config_error("config '" + path + "' is not valid JSON: " + e.what());
  }
}

std::string default_out(const std::string& cmd) {
  if (cmd == "fit" || cmd == "verify") return cmd + ".json";
  return cmd + ".csv";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimal weighted least-squares approximation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  struct Options {
    std::string config;
    std::string out;
    std::string preset;
    std::uint64_t seed = 0;
  };
  std::map<std::string, Options> options;
  std::map<std::string, CLI::App*> subs;
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"sample", "Draw a weighted sample"},
      {"fit", "Fit a target function by weighted least squares"},
      {"stability-grid", "Empirical Pr{cond(G) <= 3} over an (n, m) grid"},
      {"high-dim-table", "Probability and mean cond(G) across dimensions"},
      {"error-study", "L2 errors against best-approximation errors"},
      {"verify", "Run the invariant suite"}};
  std::map<std::string, CLI::Option*> seed_opts;
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    auto& o = options[name];
    sub->add_option("--config", o.config, "JSON config (or a provenance sidecar)");
    seed_opts[name] = sub->add_option("--seed", o.seed, "Master seed (overrides config)");
    sub->add_option("--out", o.out, "Output path");
    sub->add_option("--preset", o.preset, "Named preset");
    subs[name] = sub;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  std::string cmd;
  for (const auto& [name, sub] : subs) {
    if (sub->parsed()) cmd = name;
  }
  const Options& o = options[cmd];
  const std::string out = o.out.empty() ? default_out(cmd) : o.out;

  try {
    ordered_json resolved = defaults_for(cmd);
    const ordered_json base = resolved;
    if (!o.preset.empty()) {
      const auto& table = presets().at(cmd);
      const auto it = table.find(o.preset);
      if (it == table.end()) {
        std::string names;
        for (const auto& [p, patch] : table) names += " " + p;
        throw config_error("unknown preset '" + o.preset + "' for " + cmd + "; available:" + names);
      }
      check_keys(it->second, base);
      resolved.merge_patch(it->second);
    }
    if (!o.config.empty()) {
      const ordered_json file = load_json(o.config);
      check_keys(file, base);
      resolved.merge_patch(file);
    }
    if (seed_opts[cmd]->count() > 0) resolved["seed"] = o.seed;

    int code = 0;
    if (cmd == "sample") code = run_sample(resolved, out);
    if (cmd == "fit") code = run_fit(resolved, out);
    if (cmd == "stability-grid") code = run_stability_grid(resolved, out);
    if (cmd == "high-dim-table") code = run_high_dim_table(resolved, out);
    if (cmd == "error-study") code = run_error_study(resolved, out);
    if (cmd == "verify") code = run_verify(resolved, out);
    write_sidecar(out, cmd, o.preset, resolved);
    return code;
  } catch (const config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const wls::unbounded_family_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const wls::structural_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
