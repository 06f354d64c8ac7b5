#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "kfol/objective.hpp"
#include "oracles.hpp"

namespace kfol {
namespace {

const std::vector<PredicateSignature> kSigs = {{"A", 1, PredicateKind::Learnable}};

SampleSet line_samples(std::initializer_list<double> xs) {
  SampleSet s(1);
  for (const double x : xs) s.add(std::span<const double>(&x, 1));
  return s;
}

TEST(Loss, Values) {
  EXPECT_EQ(loss_value(LossKind::Squared, 0.5, 1), 0.25);
  EXPECT_EQ(loss_value(LossKind::Squared, 1, 1), 0.0);
  EXPECT_EQ(loss_value(LossKind::Hinge, 1, 1), 0.0);
  EXPECT_EQ(loss_value(LossKind::Hinge, 0.5, 1), 1.0);
  EXPECT_EQ(loss_value(LossKind::Hinge, 0.25, 0), 0.5);
  EXPECT_EQ(loss_value(LossKind::Hinge, -1, 0), 0.0);
  EXPECT_EQ(loss_derivative(LossKind::Hinge, 0.5, 1), -2.0);
  EXPECT_EQ(loss_derivative(LossKind::Hinge, 0.5, 0), 2.0);
  EXPECT_EQ(loss_derivative(LossKind::Hinge, 2, 1), 0.0);
}

TEST(Risk, Examples) {
  const auto s = line_samples({1, 2});
  ObjectiveConfig cfg;
  cfg.lambda_pi["A"] = 3;
  KernelExpansion e{"A", KernelSpec::linear(), {{0}}, Eigen::VectorXd::Constant(1, 0.5)};
  std::vector<LabeledSet> one = {{"A", {{{0}, 1}}}};
  EXPECT_EQ(empirical_risk({&e, 1}, one, s, cfg), 3 * 0.25);

  e.weights[0] = 1;
  one[0].examples[0].target = 1;
  EXPECT_EQ(empirical_risk({&e, 1}, one, s, cfg), 0.0);

  // f(0) = 1 fits exactly; f(1) = 2 against target 0 costs 4 -> mean 2
  cfg.lambda_pi["A"] = 1;
  std::vector<LabeledSet> two = {{"A", {{{0}, 1}, {{1}, 0}}}};
  EXPECT_EQ(empirical_risk({&e, 1}, two, s, cfg), 2.0);

  std::vector<LabeledSet> none = {{"A", {}}};
  EXPECT_THROW(empirical_risk({&e, 1}, none, s, cfg), Error);
  cfg.lambda_pi["A"] = 0;
  EXPECT_EQ(empirical_risk({&e, 1}, none, s, cfg), 0.0);
}

TEST(Regularizer, Examples) {
  ObjectiveConfig cfg;
  cfg.lambda_r["A"] = 0.1;
  const std::vector<Eigen::MatrixXd> g = {Eigen::MatrixXd::Ones(1, 1)};
  KernelExpansion e{"A", KernelSpec::linear(), {{0}}, Eigen::VectorXd::Ones(1)};
  EXPECT_EQ(regularizer({&e, 1}, g, cfg), 0.1);
  e.weights.setZero();
  EXPECT_EQ(regularizer({&e, 1}, g, cfg), 0.0);

  const auto s = line_samples({1, -2, 0.5});
  KernelExpansion lin{"A", KernelSpec::linear(), {{0}, {1}, {2}}, Eigen::Vector3d(0.3, -0.7, 1.1)};
  const std::vector<Eigen::MatrixXd> lg = {gram_matrix(lin.kernel, lin.support, s)};
  const double base = regularizer({&lin, 1}, lg, cfg);
  lin.weights *= 2;
  EXPECT_NEAR(regularizer({&lin, 1}, lg, cfg) / base, 4.0, 1e-14);
  EXPECT_THROW(regularizer({&lin, 1}, std::span<const Eigen::MatrixXd>(), cfg), Error);
}

TEST(ConstraintPenalty, Examples) {
  const auto s = line_samples({1});
  const std::vector<SampleId> domain = {0};
  std::vector<CompiledClause> clauses = {{"c1", ground_clause(parse_clause("forall x: A(x)", kSigs), domain, {})}};
  ObjectiveConfig cfg;
  cfg.lambda_v["c1"] = 2;
  KernelExpansion e{"A", KernelSpec::linear(), {{0}}, Eigen::VectorXd::Constant(1, 0.7)};
  EXPECT_NEAR(constraint_penalty({&e, 1}, clauses, s, cfg), 0.6, 1e-15);
  e.weights[0] = 1.5;
  EXPECT_EQ(constraint_penalty({&e, 1}, clauses, s, cfg), 0.0);
  EXPECT_EQ(constraint_penalty({&e, 1}, std::span<const CompiledClause>(), s, cfg), 0.0);
}

TEST(Objective, EmptyProblemIsZero) {
  const auto s = line_samples({1, 2});
  ObjectiveConfig cfg;
  cfg.lambda_pi["A"] = 0;
  const Objective obj(s, {{"A", KernelSpec::rbf(1), {}, {}}}, {}, {}, cfg);
  const auto ev = obj.evaluate(obj.zero_weights());
  EXPECT_EQ(ev.objective, 0.0);
  EXPECT_EQ(ev.gradient_norm, 0.0);
}

TEST(Objective, ConstructionErrors) {
  const auto s = line_samples({1, 2, 3});
  ObjectiveConfig cfg;
  const std::vector<LabeledSet> labels = {{"A", {{{2}, 1}}}};
  try {
    Objective(s, {{"A", KernelSpec::rbf(1), {{0}}, {}}}, labels, {}, cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::DanglingSampleId);
  }
  try {
    Objective(s, {{"A", KernelSpec::rbf(1), {{0}}, {}}}, {}, {}, cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::EmptyLabeledSet);
  }
}

TEST(Objective, DecomposesIntoTerms) {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 100; ++trial) {
    testing::RandomProblemOptions opt;
    opt.loss = trial % 2 ? LossKind::Hinge : LossKind::Squared;
    const auto p = testing::random_problem(rng, opt);
    const Objective obj = testing::make_objective(p);
    std::vector<Eigen::VectorXd> w = obj.zero_weights();
    std::normal_distribution<double> n(0, 0.7);
    for (auto& wk : w) {
      for (auto& x : wk) x = n(rng);
    }
    const auto ev = obj.evaluate(w);
    const auto expansions = obj.with_weights(w);
    const double r = empirical_risk(expansions, p.labels, p.samples, p.config);
    const double nn = regularizer(expansions, obj.grams(), p.config);
    const double v = constraint_penalty(expansions, p.compiled, p.samples, p.config);
    EXPECT_NEAR(ev.risk, r, 1e-12);
    EXPECT_NEAR(ev.norm, nn, 1e-12);
    EXPECT_NEAR(ev.penalty, v, 1e-12);
    EXPECT_NEAR(ev.objective, r + nn + v, 1e-12);
    EXPECT_GE(ev.penalty, 0.0);
    const auto scaled = obj.evaluate(w, 0.25, false);
    EXPECT_NEAR(scaled.objective, r + nn + 0.25 * v, 1e-12);
  }
}

TEST(Objective, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(42);
  int checked = 0;
  for (int trial = 0; trial < 120; ++trial) {
    testing::RandomProblemOptions opt;
    opt.loss = trial % 3 == 2 ? LossKind::Hinge : LossKind::Squared;
    const auto p = testing::random_problem(rng, opt);
    const Objective obj = testing::make_objective(p);
    const auto w = testing::weights_away_from_kinks(rng, obj);
    if (!w) continue;
    const auto ev = obj.evaluate(*w);

    std::vector<Eigen::Index> offsets;
    Eigen::Index total = 0;
    for (const auto& wk : *w) {
      offsets.push_back(total);
      total += wk.size();
    }
    Eigen::VectorXd flat(total);
    for (std::size_t k = 0; k < w->size(); ++k) flat.segment(offsets[k], (*w)[k].size()) = (*w)[k];
    const auto unflatten = [&](const Eigen::VectorXd& x) {
      std::vector<Eigen::VectorXd> out = *w;
      for (std::size_t k = 0; k < out.size(); ++k) out[k] = x.segment(offsets[k], out[k].size());
      return out;
    };
    const Eigen::VectorXd fd = testing::central_differences(
        [&](const Eigen::VectorXd& x) { return obj.evaluate(unflatten(x), 1.0, false).objective; }, flat);
    for (std::size_t k = 0; k < w->size(); ++k) {
      for (Eigen::Index i = 0; i < (*w)[k].size(); ++i) {
        const double g = ev.gradient[k][i];
        const double f = fd[offsets[k] + i];
        ASSERT_LE(std::abs(g - f), std::max(1e-8, 1e-5 * std::abs(f))) << "trial " << trial << " k " << k << " i " << i;
      }
    }
    ++checked;
  }
  EXPECT_GT(checked, 80);
}

TEST(Objective, RidgeSolutionIsStationary) {
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 30; ++trial) {
    SampleSet s(2);
    std::normal_distribution<double> n(0, 1);
    const std::size_t count = 4 + rng() % 8;
    for (std::size_t i = 0; i < count; ++i) {
      const double v[2] = {n(rng), n(rng)};
      s.add(v);
    }
    LabeledSet labels{"A", {}};
    std::vector<IdTuple> support;
    for (SampleId i = 0; i < count; ++i) {
      support.push_back({i});
      if (i % 3 != 2) labels.examples.push_back({{i}, static_cast<double>(rng() % 2)});
    }
    ObjectiveConfig cfg;
    cfg.lambda_pi["A"] = 0.5 + (rng() % 4);
    cfg.lambda_r["A"] = 0.01 * (1 + rng() % 20);
    const std::vector<LabeledSet> all = {labels};
    const Objective obj(s, {{"A", KernelSpec::rbf(0.5), support, {}}}, all, {}, cfg);

    std::vector<Eigen::Index> rows;
    Eigen::VectorXd y(static_cast<Eigen::Index>(labels.examples.size()));
    for (std::size_t j = 0; j < labels.examples.size(); ++j) {
      rows.push_back(static_cast<Eigen::Index>(labels.examples[j].args[0]));
      y[static_cast<Eigen::Index>(j)] = labels.examples[j].target;
    }
    const std::vector<Eigen::VectorXd> w = {
        testing::ridge_weights(obj.grams()[0], rows, y, cfg.lambda_pi["A"], cfg.lambda_r["A"])};
    EXPECT_LT(obj.evaluate(w).gradient_norm, 1e-8);
  }
}

TEST(Objective, SupervisedPenaltyUsesLabeledGroundingsOnly) {
  const auto s = line_samples({0, 1, 2});
  const std::vector<PredicateSignature> sigs = {{"A", 1, PredicateKind::Learnable}, {"B", 1, PredicateKind::Learnable}};
  const std::vector<SampleId> domain = {0, 1, 2};
  std::vector<CompiledClause> clauses = {{"c1", ground_clause(parse_clause("forall x: A(x) -> B(x)", sigs), domain, {})}};
  const std::vector<LabeledSet> labels = {{"A", {{{0}, 1}, {{2}, 1}}}, {"B", {{{0}, 1}}}};
  const std::vector<IdTuple> all = {{0}, {1}, {2}};
  const Objective obj(s, {{"A", KernelSpec::rbf(1), all, {}}, {"B", KernelSpec::rbf(1), all, {}}}, labels, clauses, {});
  // f_A = 1 everywhere, f_B = 0 everywhere: only x=0 has both atoms labeled
  std::vector<Eigen::VectorXd> w = obj.zero_weights();
  w[0] = obj.grams()[0].ldlt().solve(Eigen::VectorXd::Ones(3));
  const auto sup = obj.supervised_clause_penalties(w);
  ASSERT_EQ(sup.size(), 1u);
  EXPECT_NEAR(sup[0], 1.0, 1e-9);
  EXPECT_NEAR(obj.evaluate(w).clause_penalties[0], 1.0, 1e-9);
  w[1] = w[0];
  EXPECT_NEAR(obj.supervised_clause_penalties(w)[0], 0.0, 1e-9);
}

}  // namespace
}  // namespace kfol
