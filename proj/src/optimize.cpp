#include "povmtree/optimize.hpp"

#include <cmath>
#include <string>

#include "povmtree/errors.hpp"
#include "povmtree/parallel.hpp"

namespace povmtree {

SweepGrid SweepGrid::make(ParameterRange range, std::size_t samples) {
  if (samples < 2) {
    throw ValidationError("sweep grid: need at least 2 samples, got " +
                          std::to_string(samples));
  }
  if (!(range.hi >= range.lo)) {
    throw ValidationError("sweep grid: empty parameter range");
  }
  return SweepGrid{range, samples};
}

double SweepGrid::spacing() const {
  return range.width() / static_cast<double>(samples - 1);
}

std::vector<double> SweepGrid::points() const {
  std::vector<double> out(samples);
  const double h = spacing();
  for (std::size_t i = 0; i < samples; ++i) {
    out[i] = range.lo + static_cast<double>(i) * h;
  }
  // Pin the upper endpoint exactly rather than accumulating rounding.
  out.back() = range.hi;
  return out;
}

double Objective::score(const Eigen::MatrixXd& joint,
                        std::span<const double> priors) const {
  switch (kind) {
    case ObjectiveKind::kDistinguishability:
      return distinguishability(joint, priors, pairs);
    case ObjectiveKind::kNegatedMinToMax:
      return -min_to_max(joint);
    case ObjectiveKind::kNegatedError:
      return -discrimination_error(joint, inconclusive);
  }
  throw ValidationError("objective: unknown kind");
}

Eigen::MatrixXd child_table(const TreeNode& node, const StepOperators& ops) {
  const auto c = static_cast<Eigen::Index>(node.probs.size());
  const auto m = static_cast<Eigen::Index>(ops.outcomes());
  Eigen::MatrixXd table = Eigen::MatrixXd::Zero(c, m);
  const double mass = node.mass();
  if (mass <= 0.0) return table;
  for (Eigen::Index row = 0; row < c; ++row) {
    const auto& state = node.states[static_cast<std::size_t>(row)];
    const double p = node.probs[static_cast<std::size_t>(row)];
    if (!state || p <= 0.0) continue;
    for (Eigen::Index mu = 0; mu < m; ++mu) {
      table(row, mu) =
          p * ops.probability(static_cast<std::size_t>(mu), state->matrix()) /
          mass;
    }
  }
  return table;
}

namespace {

// True when (score, tau) should replace (best_score, best_tau).
bool preferred(double score, double tau, double best_score, double best_tau) {
  if (score > best_score + kScoreTieTolerance) return true;
  if (score < best_score - kScoreTieTolerance) return false;
  const double a = std::abs(tau);
  const double b = std::abs(best_tau);
  if (a < b - kScoreTieTolerance) return true;
  if (a > b + kScoreTieTolerance) return false;
  return tau < best_tau;
}

}  // namespace

SweepResult sweep_node(const TreeNode& node, const MeasurementStep& step,
                       const SweepGrid& grid, const Objective& objective,
                       std::span<const double> priors, unsigned threads) {
  const std::vector<double> taus = grid.points();
  std::vector<double> scores(taus.size());
  parallel_for(taus.size(), threads, [&](std::size_t i) {
    const StepOperators ops(step, taus[i]);
    scores[i] = objective.score(child_table(node, ops), priors);
  });
  // Reduce in grid order so the result never depends on scheduling.
  SweepResult best{taus[0], scores[0], taus.size(), 0};
  for (std::size_t i = 1; i < taus.size(); ++i) {
    if (preferred(scores[i], taus[i], best.score, best.tau)) {
      best.tau = taus[i];
      best.score = scores[i];
    }
  }
  return best;
}

SweepResult refine(const TreeNode& node, const MeasurementStep& step,
                   const SweepGrid& grid, const RefinePolicy& policy,
                   const Objective& objective, std::span<const double> priors,
                   unsigned threads) {
  if (policy.max_rounds < 0) {
    throw ValidationError("refine: max_rounds must be non-negative");
  }
  SweepResult best = sweep_node(node, step, grid, objective, priors, threads);
  SweepGrid current = grid;
  double previous = best.score;
  for (int round = 1; round <= policy.max_rounds; ++round) {
    current = current.doubled();
    SweepResult next =
        sweep_node(node, step, current, objective, priors, threads);
    best.samples = next.samples;
    best.rounds = round;
    if (preferred(next.score, next.tau, best.score, best.tau)) {
      best.tau = next.tau;
      best.score = next.score;
    }
    const double scale = std::max(std::abs(previous), 1e-300);
    const double gain = (next.score - previous) / scale;
    previous = next.score;
    if (gain < policy.rel_improvement_floor) break;
  }
  return best;
}

DecisionTree greedy_build(const CandidatePool& pool,
                          std::span<const MeasurementStep> steps,
                          const GreedyOptions& options) {
  const std::vector<double> priors = pool.priors;
  NodeOptimizer optimizer = [&](const TreeNode& node,
                                const MeasurementStep& step) {
    return refine(node, step, options.grid, options.policy, options.objective,
                  priors, options.threads)
        .tau;
  };
  return build(pool, steps, optimizer, options.prune_threshold);
}

double internal_node_count(std::size_t depth, std::size_t outcomes) {
  if (outcomes == 1) return static_cast<double>(depth);
  const double m = static_cast<double>(outcomes);
  return (std::pow(m, static_cast<double>(depth)) - 1.0) / (m - 1.0);
}

double exhaustive_cost(std::size_t depth, std::size_t outcomes,
                       std::size_t samples) {
  return std::pow(static_cast<double>(samples),
                  internal_node_count(depth, outcomes));
}

double greedy_cost(std::size_t depth, std::size_t outcomes,
                   std::size_t samples) {
  return static_cast<double>(samples) * internal_node_count(depth, outcomes);
}

namespace {

// Walks the complete tree in pre-order, consuming one operator set per
// internal node, and writes leaf joint probabilities into `joint`.
struct LeafWalker {
  std::span<const MeasurementStep> steps;
  std::size_t outcomes;
  Eigen::MatrixXd& joint;
  std::size_t cursor = 0;

  template <typename OpsAt>
  void visit(std::size_t level, std::uint64_t position,
             const std::vector<std::optional<DensityMatrix>>& states,
             const std::vector<double>& probs, const OpsAt& ops_at) {
    if (level == steps.size()) {
      for (std::size_t c = 0; c < probs.size(); ++c) {
        joint(static_cast<Eigen::Index>(c),
              static_cast<Eigen::Index>(position - 1)) = probs[c];
      }
      return;
    }
    const StepOperators& ops = ops_at(level, cursor++);
    for (std::size_t mu = 0; mu < outcomes; ++mu) {
      std::vector<std::optional<DensityMatrix>> next_states(states.size());
      std::vector<double> next_probs(probs.size(), 0.0);
      for (std::size_t c = 0; c < states.size(); ++c) {
        if (!states[c] || probs[c] <= 0.0) continue;
        auto result = apply_step(ops, mu, *states[c]);
        if (!result.reachable()) continue;
        next_probs[c] = probs[c] * result.probability;
        next_states[c] = std::move(result.state);
      }
      visit(level + 1, (position - 1) * outcomes + mu + 1, next_states,
            next_probs, ops_at);
    }
  }
};

template <typename OpsAt>
Eigen::MatrixXd leaf_joint(const CandidatePool& pool,
                           std::span<const MeasurementStep> steps,
                           const OpsAt& ops_at) {
  const std::size_t m = steps.front().outcomes();
  std::uint64_t leaves = 1;
  for (std::size_t k = 0; k < steps.size(); ++k) leaves *= m;
  Eigen::MatrixXd joint = Eigen::MatrixXd::Zero(
      static_cast<Eigen::Index>(pool.size()), static_cast<Eigen::Index>(leaves));
  std::vector<std::optional<DensityMatrix>> states(pool.states.begin(),
                                                   pool.states.end());
  LeafWalker walker{steps, m, joint};
  walker.visit(0, 1, states, pool.priors, ops_at);
  return joint;
}

// Lexicographic tie-break over pre-order nodes: smaller |tau|, then smaller.
bool assignment_preferred(const std::vector<std::size_t>& a,
                          const std::vector<std::size_t>& b,
                          const std::vector<double>& taus) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == b[i]) continue;
    const double ta = taus[a[i]];
    const double tb = taus[b[i]];
    if (std::abs(ta) != std::abs(tb)) return std::abs(ta) < std::abs(tb);
    return ta < tb;
  }
  return false;
}

}  // namespace

double assignment_score(const CandidatePool& pool,
                        std::span<const MeasurementStep> steps,
                        std::span<const double> taus,
                        const Objective& objective) {
  if (steps.empty()) throw ValidationError("assignment: depth must be at least 1");
  const double expected = internal_node_count(steps.size(), steps.front().outcomes());
  if (static_cast<double>(taus.size()) != expected) {
    throw ValidationError("assignment: expected one parameter per internal node");
  }
  std::vector<StepOperators> ops;
  ops.reserve(taus.size());
  // Pre-order visits levels in a fixed pattern, so build operators lazily.
  auto ops_at = [&](std::size_t level, std::size_t index) -> const StepOperators& {
    while (ops.size() <= index) ops.emplace_back(steps[level], taus[ops.size()]);
    return ops[index];
  };
  return objective.score(leaf_joint(pool, steps, ops_at), pool.priors);
}

ExhaustiveResult exhaustive_build(const CandidatePool& pool,
                                  std::span<const MeasurementStep> steps,
                                  const SweepGrid& grid,
                                  const Objective& objective, double budget) {
  pool.validate();
  if (steps.empty()) throw ValidationError("exhaustive: depth must be at least 1");
  const std::size_t m = steps.front().outcomes();
  const double cost = exhaustive_cost(steps.size(), m, grid.samples);
  if (cost > budget) throw BudgetExceeded(cost, budget);

  const std::vector<double> taus = grid.points();
  const auto internal = static_cast<std::size_t>(internal_node_count(steps.size(), m));
  // Operators for every (level, grid point) pair, shared by all combinations.
  std::vector<std::vector<StepOperators>> table(steps.size());
  for (std::size_t k = 0; k < steps.size(); ++k) {
    table[k].reserve(taus.size());
    for (double tau : taus) table[k].emplace_back(steps[k], tau);
  }

  std::vector<std::size_t> digits(internal, 0);
  std::vector<std::size_t> best_digits = digits;
  double best_score = 0.0;
  bool first = true;
  while (true) {
    auto ops_at = [&](std::size_t level, std::size_t index) -> const StepOperators& {
      return table[level][digits[index]];
    };
    const double score =
        objective.score(leaf_joint(pool, steps, ops_at), pool.priors);
    const bool better =
        first || score > best_score + kScoreTieTolerance ||
        (score >= best_score - kScoreTieTolerance &&
         assignment_preferred(digits, best_digits, taus));
    if (better) {
      best_score = score;
      best_digits = digits;
      first = false;
    }
    // Odometer with the last pre-order node as the fastest digit.
    std::size_t i = internal;
    while (i > 0 && ++digits[i - 1] == taus.size()) digits[--i] = 0;
    if (i == 0) break;
  }

  ExhaustiveResult result{DecisionTree({TreeNode{}}, steps.size(), m, pool.priors),
                          best_score, {}, cost};
  for (std::size_t d : best_digits) result.taus.push_back(taus[d]);

  // Map the pre-order assignment back to (level, position) for the builder.
  ParameterTable params;
  std::size_t cursor = 0;
  auto assign = [&](auto&& self, int level, std::uint64_t position) -> void {
    if (static_cast<std::size_t>(level) == steps.size()) return;
    params[{level, position}] = result.taus[cursor++];
    for (std::size_t mu = 0; mu < m; ++mu) {
      self(self, level + 1, (position - 1) * m + mu + 1);
    }
  };
  assign(assign, 0, 1);
  result.tree = build(pool, steps, parameter_lookup(std::move(params)), 0.0);
  return result;
}

}  // namespace povmtree
