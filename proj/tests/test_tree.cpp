#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "povmtree/errors.hpp"
#include "povmtree/tree.hpp"

using namespace povmtree;
using std::numbers::pi;

namespace {

std::uint64_t power(std::size_t base, std::size_t exp) {
  std::uint64_t out = 1;
  for (std::size_t k = 0; k < exp; ++k) out *= base;
  return out;
}

// Branch outcomes leading to a node, read off its position.
Branch branch_to(const TreeNode& node, std::size_t m) {
  if (node.level == 0) return {};
  return Branch::from_leaf_index(node.position, m, static_cast<std::size_t>(node.level));
}

}  // namespace

TEST_CASE("full tree has the expected shape and labels") {
  const CandidatePool pool = qubit_pool(2, 2);
  for (int n = 1; n <= 5; ++n) {
    const auto steps = uniform_steps(UnitaryFamily::rotation(2), apd(0.8, 2), n);
    const DecisionTree tree = build(pool, steps, constant_parameter(0.7), 0.0);
    const auto nn = static_cast<std::size_t>(n);
    CHECK(tree.nodes().size() == power(2, nn + 1) - 1);
    CHECK(tree.leaf_count() == power(2, nn));
    CHECK(tree.internal_count() == power(2, nn) - 1);
    for (std::size_t i = 0; i < tree.nodes().size(); ++i) {
      const TreeNode& node = tree.node(i);
      CHECK(node.position >= 1);
      CHECK(node.position <= power(2, static_cast<std::size_t>(node.level)));
      CHECK(tree.find(node.level, node.position) == i);
      for (std::size_t mu = 0; mu < node.children.size(); ++mu) {
        const TreeNode& child = tree.node(node.children[mu]);
        CHECK(child.level == node.level + 1);
        CHECK(child.position == (node.position - 1) * 2 + mu + 1);
        CHECK(child.parent == i);
        CHECK(child.outcome == mu);
      }
      if (node.kind == NodeKind::kInternal) {
        CHECK(node.tau == 0.7);
        CHECK(node.transmission == steps[static_cast<std::size_t>(node.level)].transmission());
      }
    }
    CHECK_FALSE(tree.find(n + 1, 1).has_value());
    CHECK_FALSE(tree.find(1, 3).has_value());
  }
}

TEST_CASE("node probabilities are conserved from parent to children") {
  const CandidatePool pool = qubit_pool(4, 3);
  const auto steps = uniform_steps(UnitaryFamily::rotation(3), pnrd(0.75, 2, 3), 3);
  const DecisionTree tree = build(pool, steps, constant_parameter(-0.9), 0.0);
  for (const auto& node : tree.nodes()) {
    if (node.children.empty()) continue;
    for (std::size_t c = 0; c < pool.size(); ++c) {
      double sum = 0.0;
      for (std::size_t child : node.children) sum += tree.node(child).probs[c];
      CHECK(std::abs(sum - node.probs[c]) < 1e-12);
    }
  }
  const LeafTable table = leaf_distributions(tree);
  for (std::size_t c = 0; c < pool.size(); ++c) {
    CHECK(table.joint.row(static_cast<Eigen::Index>(c)).sum() ==
          doctest::Approx(pool.priors[c]).epsilon(1e-12));
  }
  CHECK(table.total_pruned() == 0.0);
}

TEST_CASE("adaptive leaf probabilities follow the branch probability") {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> u(-pi, pi);
  const CandidatePool pool = qubit_pool(2, 2);
  const auto steps = uniform_steps(UnitaryFamily::rotation(2), apd(0.85, 2), 4);
  ParameterTable table;
  for (int k = 0; k < 4; ++k) {
    for (std::uint64_t nu = 1; nu <= power(2, static_cast<std::size_t>(k)); ++nu) {
      table[{k, nu}] = u(rng);
    }
  }
  const DecisionTree tree = build(pool, steps, parameter_lookup(table), 0.0);
  for (const auto& node : tree.nodes()) {
    if (node.kind != NodeKind::kLeaf) continue;
    const Branch b = branch_to(node, 2);
    // Parameters seen along the branch: one per ancestor.
    std::vector<double> taus;
    std::uint64_t nu = 1;
    for (std::size_t k = 0; k < b.outcomes.size(); ++k) {
      taus.push_back(table.at({static_cast<int>(k), nu}));
      nu = (nu - 1) * 2 + b.outcomes[k] + 1;
    }
    for (std::size_t c = 0; c < 2; ++c) {
      const double expected =
          branch_probability(steps, taus, b, pool.states[c], pool.priors[c]);
      CHECK(std::abs(node.probs[c] - expected) < 1e-12);
      std::vector<oracle::Layer> layers;
      for (std::size_t k = 0; k < taus.size(); ++k) {
        layers.push_back({steps[k].transmission(), rotation(taus[k], 2),
                          steps[k].povm().element(b.outcomes[k])});
      }
      const double born =
          pool.priors[c] * oracle::multimode_branch_probability(pool.states[c].matrix(), layers);
      CHECK(std::abs(node.probs[c] - born) < 1e-12);
    }
  }
}

TEST_CASE("parameter lookup reports missing nodes") {
  const CandidatePool pool = qubit_pool(2, 2);
  const auto steps = uniform_steps(UnitaryFamily::rotation(2), apd(0.9, 2), 2);
  ParameterTable table{{{0, 1}, 0.1}, {{1, 1}, 0.2}};
  CHECK_THROWS_AS(build(pool, steps, parameter_lookup(table), 0.0), ValidationError);
  table[{1, 2}] = 0.3;
  const DecisionTree tree = build(pool, steps, parameter_lookup(table), 0.0);
  CHECK(tree.node(*tree.find(1, 2)).tau == 0.3);
}

TEST_CASE("pruning keeps the mass accounted for") {
  const CandidatePool pool = qubit_pool(2, 2);
  const auto steps = uniform_steps(UnitaryFamily::rotation(2), apd(0.9, 2), 4);
  const DecisionTree full = build(pool, steps, constant_parameter(1.3), 0.0);
  const DecisionTree pruned = build(pool, steps, constant_parameter(1.3), 0.2);
  CHECK(pruned.nodes().size() < full.nodes().size());
  const LeafTable table = leaf_distributions(pruned);
  CHECK(table.total_pruned() > 0.0);
  for (std::size_t c = 0; c < 2; ++c) {
    const double kept = table.joint.row(static_cast<Eigen::Index>(c)).sum();
    CHECK(kept + table.pruned_mass[c] == doctest::Approx(pool.priors[c]).epsilon(1e-12));
  }
  for (const auto& node : pruned.nodes()) {
    if (node.kind == NodeKind::kPruned) {
      CHECK(node.mass() < 0.2);
      CHECK(node.children.empty());
      CHECK_FALSE(node.tau.has_value());
    }
  }
}

TEST_CASE("unreachable branches stay in the tree without consulting the optimizer") {
  const CandidatePool pool = qubit_pool(2, 2);
  const auto steps = uniform_steps(UnitaryFamily::rotation(2), apd(1.0, 2), 2);
  int calls = 0;
  const NodeOptimizer counting = [&](const TreeNode&, const MeasurementStep&) {
    ++calls;
    return pi / 2;
  };
  const DecisionTree tree = build(pool, steps, counting, 0.0);
  CHECK(tree.nodes().size() == 7);
  int dead = 0;
  for (const auto& node : tree.nodes()) {
    if (node.kind == NodeKind::kInternal && node.dead()) {
      ++dead;
      CHECK_FALSE(node.tau.has_value());
    }
  }
  CHECK(calls + dead == 3);
  const LeafTable table = leaf_distributions(tree);
  CHECK(table.joint.sum() == doctest::Approx(1.0));
}

TEST_CASE("first level of the ideal tree separates the two qubits") {
  const CandidatePool pool = qubit_pool(2, 2);
  const auto steps = uniform_steps(UnitaryFamily::rotation(2), apd(1.0, 2), 1);
  const DecisionTree tree = build(pool, steps, constant_parameter(pi / 2), 0.0);
  const LeafTable table = leaf_distributions(tree);
  CHECK(table.joint(0, 0) == doctest::Approx(0.5));
  CHECK(table.joint(0, 1) == doctest::Approx(0.0));
  CHECK(table.joint(1, 0) == doctest::Approx(0.0));
  CHECK(table.joint(1, 1) == doctest::Approx(0.5));
  const TreeNode& click = tree.node(*tree.find(1, 2));
  CHECK_FALSE(click.states[0].has_value());
  CHECK(click.probs[0] == 0.0);
  REQUIRE(click.states[1].has_value());
  CHECK(click.states[1]->matrix()(0, 0).real() == doctest::Approx(1.0));
}

TEST_CASE("leaf sets follow the maximum-likelihood rule") {
  Eigen::MatrixXd joint(3, 4);
  joint << 0.2, 0.1, 0.0, 0.1,
           0.1, 0.1, 0.0, 0.0,
           0.0, 0.05, 0.0, 0.35;
  const LeafSets sets = assign_leaf_sets(joint);
  CHECK(sets.by_candidate[0] == std::vector<std::size_t>{0});
  CHECK(sets.by_candidate[1].empty());
  CHECK(sets.by_candidate[2] == std::vector<std::size_t>{3});
  CHECK(sets.inconclusive == std::vector<std::size_t>{1, 2});
}

TEST_CASE("build checks its inputs") {
  const CandidatePool pool = qubit_pool(2, 2);
  CHECK_THROWS_AS(build(pool, std::vector<MeasurementStep>{}, constant_parameter(0.0)),
                  ValidationError);
  const auto wrong_dim = uniform_steps(UnitaryFamily::rotation(3), apd(1.0, 3), 1);
  CHECK_THROWS_AS(build(pool, wrong_dim, constant_parameter(0.0)), ValidationError);
  std::vector<MeasurementStep> mixed{
      MeasurementStep(UnitaryFamily::rotation(2), apd(1.0, 2), 0.5),
      MeasurementStep(UnitaryFamily::rotation(2), pnrd(1.0, 2, 2), 0.0)};
  CHECK_THROWS_AS(build(pool, mixed, constant_parameter(0.0)), ValidationError);
}
