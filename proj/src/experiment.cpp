#include "povmtree/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "povmtree/errors.hpp"
#include "povmtree/parallel.hpp"

namespace povmtree {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& message) {
  throw ValidationError(field + ": " + message);
}

void reject_unknown(const json& obj, const std::string& where,
                    std::initializer_list<const char*> known) {
  for (const auto& [key, value] : obj.items()) {
    if (std::none_of(known.begin(), known.end(),
                     [&](const char* k) { return key == k; })) {
      fail(where.empty() ? key : where + "." + key, "unknown field");
    }
  }
}

const json* member(const json& obj, const char* key) {
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

double as_number(const json& v, const std::string& field) {
  if (!v.is_number()) fail(field, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(field, "must be finite");
  return x;
}

long long as_integer(const json& v, const std::string& field) {
  if (!v.is_number_integer()) fail(field, "expected an integer");
  return v.get<long long>();
}

bool as_bool(const json& v, const std::string& field) {
  if (!v.is_boolean()) fail(field, "expected true or false");
  return v.get<bool>();
}

std::string as_string(const json& v, const std::string& field) {
  if (!v.is_string()) fail(field, "expected a string");
  return v.get<std::string>();
}

const json& as_object(const json& v, const std::string& field) {
  if (!v.is_object()) fail(field, "expected an object");
  return v;
}

const json& as_array(const json& v, const std::string& field) {
  if (!v.is_array()) fail(field, "expected an array");
  return v;
}

Complex as_amplitude(const json& v, const std::string& field) {
  if (v.is_number()) return {as_number(v, field), 0.0};
  if (v.is_array() && v.size() == 2) {
    return {as_number(v[0], field + "[0]"), as_number(v[1], field + "[1]")};
  }
  fail(field, "expected a number or a [re, im] pair");
}

PoolConfig parse_pool(const json& v) {
  as_object(v, "pool");
  reject_unknown(v, "pool", {"C", "states", "priors"});
  PoolConfig pool;
  const json* count = member(v, "C");
  const json* states = member(v, "states");
  if ((count != nullptr) == (states != nullptr)) {
    fail("pool", "give exactly one of C or states");
  }
  if (count) {
    const long long c = as_integer(*count, "pool.C");
    if (c < 2 || c > 64) fail("pool.C", "must be between 2 and 64");
    pool.count = static_cast<int>(c);
  } else {
    as_array(*states, "pool.states");
    for (std::size_t i = 0; i < states->size(); ++i) {
      const std::string field = fmt::format("pool.states[{}]", i);
      const json& ket = as_array((*states)[i], field);
      if (ket.empty()) fail(field, "empty state vector");
      std::vector<Complex> amps;
      for (std::size_t n = 0; n < ket.size(); ++n) {
        amps.push_back(as_amplitude(ket[n], fmt::format("{}[{}]", field, n)));
      }
      pool.kets.push_back(std::move(amps));
    }
  }
  if (const json* priors = member(v, "priors")) {
    as_array(*priors, "pool.priors");
    for (std::size_t i = 0; i < priors->size(); ++i) {
      pool.priors.push_back(
          as_number((*priors)[i], fmt::format("pool.priors[{}]", i)));
    }
  }
  return pool;
}

UnitaryConfig parse_unitary(const json& v) {
  as_object(v, "unitary");
  reject_unknown(v, "unitary", {"kind", "range", "samples", "rotation_form"});
  UnitaryConfig out;
  if (const json* kind = member(v, "kind")) {
    const std::string k = as_string(*kind, "unitary.kind");
    if (k == "rotation") {
      out.kind = UnitaryKind::kRotation;
    } else if (k == "displacement") {
      out.kind = UnitaryKind::kDisplacement;
    } else {
      fail("unitary.kind", "expected \"rotation\" or \"displacement\", got \"" +
                               k + "\"");
    }
  }
  if (const json* range = member(v, "range")) {
    as_array(*range, "unitary.range");
    if (range->size() != 2) fail("unitary.range", "expected [lo, hi]");
    ParameterRange r{as_number((*range)[0], "unitary.range[0]"),
                     as_number((*range)[1], "unitary.range[1]")};
    if (!(r.hi > r.lo)) fail("unitary.range", "lo must be below hi");
    out.range = r;
  }
  if (const json* samples = member(v, "samples")) {
    const long long s = as_integer(*samples, "unitary.samples");
    if (s < 2) fail("unitary.samples", "need at least 2 sample points");
    out.samples = static_cast<std::size_t>(s);
  }
  if (const json* form = member(v, "rotation_form")) {
    const std::string f = as_string(*form, "unitary.rotation_form");
    if (f == "unitary") {
      out.rotation_form = RotationForm::kUnitary;
    } else if (f == "printed") {
      out.rotation_form = RotationForm::kPrinted;
    } else {
      fail("unitary.rotation_form", "expected \"unitary\" or \"printed\"");
    }
  }
  return out;
}

DetectorConfig parse_detector(const json& v) {
  as_object(v, "detector");
  reject_unknown(v, "detector", {"kind", "eta", "saturation", "quadrature_scale"});
  DetectorConfig out;
  if (const json* kind = member(v, "kind")) {
    const std::string k = as_string(*kind, "detector.kind");
    if (k == "apd") {
      out.kind = DetectorKind::kApd;
    } else if (k == "pnrd") {
      out.kind = DetectorKind::kPnrd;
    } else if (k == "homodyne") {
      out.kind = DetectorKind::kHomodyne;
    } else {
      fail("detector.kind",
           "expected \"apd\", \"pnrd\" or \"homodyne\", got \"" + k + "\"");
    }
  }
  if (const json* eta = member(v, "eta")) {
    out.efficiencies.clear();
    if (eta->is_number()) {
      out.efficiencies.push_back(as_number(*eta, "detector.eta"));
    } else {
      as_array(*eta, "detector.eta");
      for (std::size_t i = 0; i < eta->size(); ++i) {
        out.efficiencies.push_back(
            as_number((*eta)[i], fmt::format("detector.eta[{}]", i)));
      }
    }
  }
  if (const json* sat = member(v, "saturation")) {
    const long long s = as_integer(*sat, "detector.saturation");
    if (s < 1 || s > 1000) fail("detector.saturation", "must be between 1 and 1000");
    out.saturation = static_cast<int>(s);
  }
  if (const json* scale = member(v, "quadrature_scale")) {
    out.quadrature_scale = as_number(*scale, "detector.quadrature_scale");
  }
  return out;
}

RefinePolicy parse_refine(const json& v) {
  as_object(v, "refine");
  reject_unknown(v, "refine", {"max_rounds", "rel_improvement_floor"});
  RefinePolicy out;
  if (const json* rounds = member(v, "max_rounds")) {
    const long long r = as_integer(*rounds, "refine.max_rounds");
    if (r < 0 || r > 20) fail("refine.max_rounds", "must be between 0 and 20");
    out.max_rounds = static_cast<int>(r);
  }
  if (const json* floor = member(v, "rel_improvement_floor")) {
    out.rel_improvement_floor = as_number(*floor, "refine.rel_improvement_floor");
    if (out.rel_improvement_floor < 0.0) {
      fail("refine.rel_improvement_floor", "must be non-negative");
    }
  }
  return out;
}

OutputConfig parse_output(const json& v) {
  as_object(v, "output");
  reject_unknown(v, "output", {"directory", "results", "trees", "histograms"});
  OutputConfig out;
  if (const json* dir = member(v, "directory")) {
    out.directory = as_string(*dir, "output.directory");
    if (out.directory.empty()) fail("output.directory", "must not be empty");
  }
  if (const json* results = member(v, "results")) {
    out.results = as_string(*results, "output.results");
    if (out.results.empty()) fail("output.results", "must not be empty");
  }
  if (const json* trees = member(v, "trees")) {
    out.trees = as_bool(*trees, "output.trees");
  }
  if (const json* hist = member(v, "histograms")) {
    out.histograms = as_bool(*hist, "output.histograms");
  }
  return out;
}

ExperimentConfig parse_json(const json& root) {
  as_object(root, "config");
  reject_unknown(root, "",
                 {"pool", "unitary", "detector", "depths", "fock_dim",
                  "prune_threshold", "refine", "objective", "optimizer",
                  "exhaustive_budget", "threads", "distinguishability_pairs",
                  "inconclusive", "report_wall_time", "output"});
  ExperimentConfig config;
  const json* pool = member(root, "pool");
  if (!pool) fail("pool", "required");
  config.pool = parse_pool(*pool);
  if (const json* u = member(root, "unitary")) config.unitary = parse_unitary(*u);
  if (const json* d = member(root, "detector")) config.detector = parse_detector(*d);

  const json* depths = member(root, "depths");
  if (!depths) fail("depths", "required");
  as_array(*depths, "depths");
  for (std::size_t i = 0; i < depths->size(); ++i) {
    const long long n = as_integer((*depths)[i], fmt::format("depths[{}]", i));
    if (n < 1 || n > 30) fail(fmt::format("depths[{}]", i), "must be between 1 and 30");
    config.depths.push_back(static_cast<int>(n));
  }

  if (const json* dim = member(root, "fock_dim")) {
    const long long d = as_integer(*dim, "fock_dim");
    if (d < 2 || d > 64) fail("fock_dim", "must be between 2 and 64");
    config.fock_dim = static_cast<std::size_t>(d);
  }
  if (const json* prune = member(root, "prune_threshold")) {
    config.prune_threshold = as_number(*prune, "prune_threshold");
    if (config.prune_threshold < 0.0 || config.prune_threshold >= 1.0) {
      fail("prune_threshold", "must be in [0, 1)");
    }
  }
  if (const json* r = member(root, "refine")) config.refine = parse_refine(*r);
  if (const json* obj = member(root, "objective")) {
    const std::string o = as_string(*obj, "objective");
    if (o == "D") {
      config.objective.kind = ObjectiveKind::kDistinguishability;
    } else if (o == "R") {
      config.objective.kind = ObjectiveKind::kNegatedMinToMax;
    } else if (o == "E") {
      config.objective.kind = ObjectiveKind::kNegatedError;
    } else {
      fail("objective", "expected \"D\", \"R\" or \"E\", got \"" + o + "\"");
    }
  }
  if (const json* opt = member(root, "optimizer")) {
    const std::string o = as_string(*opt, "optimizer");
    if (o == "greedy") {
      config.optimizer = OptimizerKind::kGreedy;
    } else if (o == "exhaustive") {
      config.optimizer = OptimizerKind::kExhaustive;
    } else {
      fail("optimizer", "expected \"greedy\" or \"exhaustive\", got \"" + o + "\"");
    }
  }
  if (const json* budget = member(root, "exhaustive_budget")) {
    config.exhaustive_budget = as_number(*budget, "exhaustive_budget");
    if (config.exhaustive_budget < 1.0) fail("exhaustive_budget", "must be at least 1");
  }
  if (const json* threads = member(root, "threads")) {
    const long long t = as_integer(*threads, "threads");
    if (t < 0 || t > 1024) fail("threads", "must be between 0 and 1024");
    config.threads = static_cast<unsigned>(t);
  }
  if (const json* pairs = member(root, "distinguishability_pairs")) {
    const std::string p = as_string(*pairs, "distinguishability_pairs");
    if (p == "ordered") {
      config.objective.pairs = PairConvention::kOrdered;
    } else if (p == "unordered") {
      config.objective.pairs = PairConvention::kUnordered;
    } else {
      fail("distinguishability_pairs", "expected \"ordered\" or \"unordered\"");
    }
  }
  if (const json* inc = member(root, "inconclusive")) {
    const std::string p = as_string(*inc, "inconclusive");
    if (p == "error") {
      config.objective.inconclusive = InconclusivePolicy::kCountAsError;
    } else if (p == "discard") {
      config.objective.inconclusive = InconclusivePolicy::kDiscard;
    } else {
      fail("inconclusive", "expected \"error\" or \"discard\"");
    }
  }
  if (const json* wall = member(root, "report_wall_time")) {
    config.report_wall_time = as_bool(*wall, "report_wall_time");
  }
  if (const json* out = member(root, "output")) config.output = parse_output(*out);
  return config;
}

}  // namespace

std::size_t ExperimentConfig::resolved_fock_dim() const {
  if (fock_dim) return *fock_dim;
  return unitary.kind == UnitaryKind::kDisplacement ? 12 : 2;
}

std::size_t ExperimentConfig::resolved_samples() const {
  if (unitary.samples) return *unitary.samples;
  return unitary.kind == UnitaryKind::kDisplacement ? 10 : 40;
}

ParameterRange ExperimentConfig::resolved_range() const {
  if (unitary.range) return *unitary.range;
  if (unitary.kind == UnitaryKind::kDisplacement) return {-1.0, 1.0};
  return {-std::numbers::pi, std::numbers::pi};
}

ExperimentConfig parse_config(std::string_view text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("config: not valid JSON: ") + e.what());
  }
  ExperimentConfig config = parse_json(root);
  validate(config);
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config: cannot open " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

CandidatePool make_pool(const ExperimentConfig& config) {
  const std::size_t dim = config.resolved_fock_dim();
  if (config.pool.count) {
    CandidatePool pool = qubit_pool(*config.pool.count, dim);
    if (!config.pool.priors.empty()) {
      pool = make_pool(std::move(pool.states), config.pool.priors);
    }
    return pool;
  }
  std::vector<DensityMatrix> states;
  for (std::size_t c = 0; c < config.pool.kets.size(); ++c) {
    const auto& amps = config.pool.kets[c];
    if (amps.size() > dim) {
      fail(fmt::format("pool.states[{}]", c),
           fmt::format("{} amplitudes exceed fock_dim {}", amps.size(), dim));
    }
    ComplexVector ket = ComplexVector::Zero(static_cast<Eigen::Index>(dim));
    for (std::size_t n = 0; n < amps.size(); ++n) {
      ket(static_cast<Eigen::Index>(n)) = amps[n];
    }
    const double norm = ket.norm();
    if (std::abs(norm - 1.0) > 1e-6) {
      fail(fmt::format("pool.states[{}]", c),
           fmt::format("state vector has norm {:.9g}, expected 1", norm));
    }
    states.push_back(DensityMatrix::pure(ket / norm));
  }
  std::vector<double> priors = config.pool.priors;
  if (priors.empty()) {
    priors.assign(states.size(), 1.0 / static_cast<double>(states.size()));
  }
  return make_pool(std::move(states), std::move(priors));
}

UnitaryFamily make_unitary(const ExperimentConfig& config) {
  const std::size_t dim = config.resolved_fock_dim();
  if (config.unitary.kind == UnitaryKind::kDisplacement) {
    return UnitaryFamily::displacement(dim, config.resolved_range());
  }
  return UnitaryFamily::rotation(dim, config.resolved_range(),
                                 config.unitary.rotation_form);
}

PovmFamily make_detector(const ExperimentConfig& config, double efficiency) {
  const std::size_t dim = config.resolved_fock_dim();
  switch (config.detector.kind) {
    case DetectorKind::kApd:
      return apd(efficiency, dim);
    case DetectorKind::kPnrd:
      return pnrd(efficiency, config.detector.saturation, dim);
    case DetectorKind::kHomodyne:
      if (efficiency != 1.0) {
        fail("detector.eta", "homodyne detection is modelled with unit efficiency");
      }
      return homodyne_binned(dim, config.detector.quadrature_scale);
  }
  fail("detector.kind", "unknown detector");
}

std::vector<MeasurementStep> make_steps(const ExperimentConfig& config,
                                        double efficiency, int depth) {
  return uniform_steps(make_unitary(config), make_detector(config, efficiency),
                       depth);
}

SweepGrid make_grid(const ExperimentConfig& config) {
  return SweepGrid::make(config.resolved_range(), config.resolved_samples());
}

void validate(const ExperimentConfig& config) {
  if (config.depths.empty()) fail("depths", "at least one depth is required");
  if (config.detector.efficiencies.empty()) {
    fail("detector.eta", "at least one efficiency is required");
  }
  std::set<int> seen_depths(config.depths.begin(), config.depths.end());
  if (seen_depths.size() != config.depths.size()) fail("depths", "duplicate depth");
  std::set<double> seen_eta(config.detector.efficiencies.begin(),
                            config.detector.efficiencies.end());
  if (seen_eta.size() != config.detector.efficiencies.size()) {
    fail("detector.eta", "duplicate efficiency");
  }
  if (config.pool.count && config.resolved_fock_dim() < 2) {
    fail("fock_dim", "qubit pools need at least 2 levels");
  }
  const CandidatePool pool = make_pool(config);
  pool.validate();
  if (config.objective.kind != ObjectiveKind::kDistinguishability &&
      pool.size() != 2) {
    fail("objective", "R and E are defined for two candidates only");
  }
  make_grid(config);
  for (double eta : config.detector.efficiencies) make_detector(config, eta);
  for (int depth : config.depths) schedule(depth);
  make_unitary(config);
}

std::vector<Cell> cells(const ExperimentConfig& config) {
  std::vector<Cell> out;
  for (int depth : config.depths) {
    for (double eta : config.detector.efficiencies) out.push_back({depth, eta});
  }
  return out;
}

void check_budget(const ExperimentConfig& config) {
  if (config.optimizer != OptimizerKind::kExhaustive) return;
  const std::size_t m = make_detector(config, config.detector.efficiencies.front())
                            .outcomes();
  for (int depth : config.depths) {
    const double cost = exhaustive_cost(static_cast<std::size_t>(depth), m,
                                        config.resolved_samples());
    if (cost > config.exhaustive_budget) {
      throw BudgetExceeded(cost, config.exhaustive_budget);
    }
  }
}

CellResult run_cell(const ExperimentConfig& config, const Cell& cell,
                    unsigned threads) {
  const auto start = std::chrono::steady_clock::now();
  const CandidatePool pool = make_pool(config);
  const std::vector<MeasurementStep> steps =
      make_steps(config, cell.efficiency, cell.depth);
  const SweepGrid grid = make_grid(config);
  std::optional<DecisionTree> tree;
  if (config.optimizer == OptimizerKind::kExhaustive) {
    tree = exhaustive_build(pool, steps, grid, config.objective,
                            config.exhaustive_budget)
               .tree;
  } else {
    GreedyOptions options{grid, config.refine, config.objective,
                          config.prune_threshold, threads};
    tree = greedy_build(pool, steps, options);
  }
  const MeritReport merit =
      evaluate(*tree, pool, {config.objective.pairs, config.objective.inconclusive});
  const auto stop = std::chrono::steady_clock::now();

  ResultRow row;
  row.depth = cell.depth;
  row.efficiency = cell.efficiency;
  row.detector = to_string(steps.front().povm().kind());
  row.unitary = steps.front().unitary().name();
  row.distinguishability = merit.distinguishability;
  row.min_to_max = merit.min_to_max;
  row.error = merit.error;
  row.pruned_mass = merit.pruned_mass;
  if (config.report_wall_time) {
    row.wall_ms = std::chrono::duration<double, std::milli>(stop - start).count();
  }
  return CellResult{cell, std::move(*tree), std::move(row)};
}

namespace {

std::string g12(double x) { return fmt::format("{:.12g}", x); }

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("failed writing " + path.string());
}

}  // namespace

std::string cell_stem(const Cell& cell) {
  return fmt::format("N{}_eta{}", cell.depth, cell.efficiency);
}

std::vector<ResultRow> run(const ExperimentConfig& config) {
  validate(config);
  check_budget(config);
  const std::vector<Cell> work = cells(config);
  const unsigned threads = resolve_threads(config.threads);
  // Parallelize across cells when there are several, otherwise within the
  // sweep. Either way the reduction order is fixed.
  const unsigned outer = work.size() > 1 ? threads : 1;
  const unsigned inner = work.size() > 1 ? 1 : threads;

  std::filesystem::create_directories(config.output.directory);
  std::vector<ResultRow> rows(work.size());
  parallel_for(work.size(), outer, [&](std::size_t i) {
    CellResult result = run_cell(config, work[i], inner);
    const std::string stem = cell_stem(work[i]);
    if (config.output.trees) {
      write_file(config.output.directory / ("tree_" + stem + ".jsonl"),
                 dump_tree(result.tree));
    }
    if (config.output.histograms) {
      write_file(config.output.directory / ("histogram_" + stem + ".jsonl"),
                 emit_histogram(result.tree));
    }
    rows[i] = std::move(result.row);
  });
  write_file(config.output.directory / config.output.results,
             format_results(rows));
  return rows;
}

std::string results_header() {
  return "N,eta,detector,unitary,D,R,E,pruned_mass,wall_ms";
}

std::string format_row(const ResultRow& row) {
  auto optional = [](const std::optional<double>& x) {
    return x ? g12(*x) : std::string();
  };
  return fmt::format("{},{},{},{},{},{},{},{},{}", row.depth, g12(row.efficiency),
                     row.detector, row.unitary, g12(row.distinguishability),
                     optional(row.min_to_max), optional(row.error),
                     g12(row.pruned_mass), fmt::format("{:.3f}", row.wall_ms));
}

std::string format_results(const std::vector<ResultRow>& rows) {
  std::string out = results_header() + "\n";
  for (const auto& row : rows) out += format_row(row) + "\n";
  return out;
}

namespace {

const char* kind_name(NodeKind kind) {
  switch (kind) {
    case NodeKind::kInternal:
      return "internal";
    case NodeKind::kLeaf:
      return "leaf";
    case NodeKind::kPruned:
      return "pruned";
  }
  return "unknown";
}

}  // namespace

std::string dump_tree(const DecisionTree& tree) {
  std::vector<std::size_t> order(tree.nodes().size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& x = tree.node(a);
    const auto& y = tree.node(b);
    return std::tie(x.level, x.position) < std::tie(y.level, y.position);
  });
  std::string out;
  for (std::size_t i : order) {
    const TreeNode& node = tree.node(i);
    std::string probs;
    for (std::size_t c = 0; c < node.probs.size(); ++c) {
      probs += (c ? "," : "") + g12(node.probs[c]);
    }
    std::string parent = "null";
    if (node.parent) {
      const TreeNode& p = tree.node(*node.parent);
      parent = fmt::format("[{},{}]", p.level, p.position);
    }
    out += fmt::format(
        "{{\"k\":{},\"nu\":{},\"tau\":{},\"t\":{},\"probs\":[{}],\"parent\":{},"
        "\"outcome\":{},\"kind\":\"{}\"}}\n",
        node.level, node.position,
        node.tau ? fmt::format("{:.17g}", *node.tau) : "null",
        node.transmission ? fmt::format("{:.17g}", *node.transmission) : "null",
        probs, parent, node.outcome ? std::to_string(*node.outcome) : "null",
        kind_name(node.kind));
  }
  return out;
}

ParameterTable load_parameters(std::string_view dump) {
  ParameterTable table;
  std::istringstream in{std::string(dump)};
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ValidationError(fmt::format("tree dump line {}: {}", number, e.what()));
    }
    const std::string where = fmt::format("tree dump line {}", number);
    if (!record.is_object() || !record.contains("k") || !record.contains("nu") ||
        !record.contains("tau")) {
      fail(where, "expected fields k, nu, tau");
    }
    if (record["tau"].is_null()) continue;
    const long long k = as_integer(record["k"], where + ".k");
    const long long nu = as_integer(record["nu"], where + ".nu");
    if (k < 0 || nu < 1) fail(where, "invalid node label");
    table[{static_cast<int>(k), static_cast<std::uint64_t>(nu)}] =
        as_number(record["tau"], where + ".tau");
  }
  return table;
}

std::string emit_histogram(const DecisionTree& tree) {
  const LeafTable table = leaf_distributions(tree);
  std::string out;
  for (std::size_t l = 0; l < table.leaves(); ++l) {
    const Branch branch =
        Branch::from_leaf_index(l + 1, tree.outcomes(), tree.depth());
    std::string probs;
    for (std::size_t c = 0; c < table.candidates(); ++c) {
      probs += (c ? "," : "") +
               g12(table.joint(static_cast<Eigen::Index>(c),
                               static_cast<Eigen::Index>(l)));
    }
    out += fmt::format("{{\"l\":{},\"outcomes\":\"{}\",\"p\":[{}]}}\n", l + 1,
                       branch.label(), probs);
  }
  return out;
}

std::vector<CostLine> cost_report(const ExperimentConfig& config) {
  const std::size_t m =
      make_detector(config, config.detector.efficiencies.front()).outcomes();
  const std::size_t s = config.resolved_samples();
  std::vector<CostLine> lines;
  for (int depth : config.depths) {
    const auto n = static_cast<std::size_t>(depth);
    CostLine line{depth, internal_node_count(n, m), greedy_cost(n, m, s),
                  exhaustive_cost(n, m, s), true};
    line.within_budget = line.exhaustive <= config.exhaustive_budget;
    lines.push_back(line);
  }
  return lines;
}

std::string format_cost(const ExperimentConfig& config,
                        const std::vector<CostLine>& lines) {
  const std::size_t m =
      make_detector(config, config.detector.efficiencies.front()).outcomes();
  std::string out = fmt::format(
      "outcomes M = {}, samples S = {}, exhaustive budget = {:.6g}\n"
      "N,internal_nodes,greedy_evaluations,exhaustive_combinations,within_budget\n",
      m, config.resolved_samples(), config.exhaustive_budget);
  for (const auto& line : lines) {
    out += fmt::format("{},{:.0f},{:.0f},{:.6g},{}\n", line.depth,
                       line.internal_nodes, line.greedy, line.exhaustive,
                       line.within_budget ? "yes" : "no");
  }
  return out;
}

}  // namespace povmtree
