#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "kfol/kernel.hpp"
#include "kfol/model_io.hpp"

namespace kfol {
namespace {

SampleSet make_samples(std::initializer_list<std::vector<double>> rows) {
  SampleSet s(rows.begin()->size());
  for (const auto& r : rows) s.add(r);
  return s;
}

Errc error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an error";
  return Errc::ModelMismatch;
}

TEST(KernelEval, Examples) {
  const std::vector<double> a = {1, 2}, b = {3, 4}, one = {1};
  EXPECT_EQ(kernel_eval(KernelSpec::rbf(1), a, a), 1.0);
  EXPECT_EQ(kernel_eval(KernelSpec::linear(), a, b), 11.0);
  EXPECT_EQ(kernel_eval(KernelSpec::polynomial(2, 1), one, one), 4.0);
  EXPECT_NEAR(kernel_eval(KernelSpec::rbf(0.5), a, b), std::exp(-0.5 * 8), 1e-15);
  EXPECT_EQ(error_of([&] { kernel_eval(KernelSpec::linear(), a, one); }), Errc::LengthMismatch);
}

TEST(KernelEval, SymmetricAndRbfInRange) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n(0, 2);
  const KernelSpec specs[] = {KernelSpec::linear(), KernelSpec::polynomial(3, 0.5), KernelSpec::rbf(0.7)};
  for (int i = 0; i < 2000; ++i) {
    std::vector<double> a(4), b(4);
    for (auto& x : a) x = n(rng);
    for (auto& x : b) x = n(rng);
    for (const auto& s : specs) EXPECT_EQ(kernel_eval(s, a, b), kernel_eval(s, b, a));
    const double r = kernel_eval(specs[2], a, b);
    EXPECT_GT(r, 0.0);
    EXPECT_LE(r, 1.0);
  }
}

TEST(KernelSpec, TextRoundTripAndValidation) {
  for (const auto& s : {KernelSpec::linear(), KernelSpec::polynomial(3, 0.25), KernelSpec::rbf(0.1)}) {
    EXPECT_EQ(parse_kernel_spec(to_string(s)), s) << to_string(s);
  }
  EXPECT_EQ(parse_kernel_spec("rbf"), KernelSpec::rbf(1));
  EXPECT_EQ(error_of([] { parse_kernel_spec("rbf gamma=0"); }), Errc::InvalidConfig);
  EXPECT_EQ(error_of([] { parse_kernel_spec("polynomial degree=0"); }), Errc::InvalidConfig);
  EXPECT_EQ(error_of([] { parse_kernel_spec("polynomial degree=2 offset=-1"); }), Errc::InvalidConfig);
  EXPECT_EQ(error_of([] { parse_kernel_spec("sigmoid"); }), Errc::InvalidConfig);
}

TEST(Gram, Examples) {
  const auto s = make_samples({{2}, {3}, {5}});
  const std::vector<IdTuple> one = {{0}};
  const auto g = gram_matrix(KernelSpec::linear(), one, s);
  ASSERT_EQ(g.rows(), 1);
  EXPECT_EQ(g(0, 0), 4.0);

  const std::vector<IdTuple> pairs = {{0, 1}, {1, 2}, {2, 0}, {1, 1}};
  const auto r = gram_matrix(KernelSpec::rbf(0.3), pairs, s);
  for (Eigen::Index i = 0; i < r.rows(); ++i) {
    EXPECT_EQ(r(i, i), 1.0);
    for (Eigen::Index j = 0; j < r.cols(); ++j) EXPECT_EQ(r(i, j), r(j, i));
  }
  // pair kernel is the kernel of the concatenated vectors
  const std::vector<double> a = {2, 3}, b = {3, 5};
  EXPECT_EQ(r(0, 1), kernel_eval(KernelSpec::rbf(0.3), a, b));

  const std::vector<IdTuple> dup = {{0}, {0}};
  EXPECT_EQ(error_of([&] { gram_matrix(KernelSpec::linear(), dup, s); }), Errc::DuplicateTuple);
  const std::vector<IdTuple> dangling = {{7}};
  EXPECT_EQ(error_of([&] { gram_matrix(KernelSpec::linear(), dangling, s); }), Errc::DanglingSampleId);
}

TEST(Expansion, Examples) {
  const auto s = make_samples({{1, 0}, {3, 5}});
  KernelExpansion e{"A", KernelSpec::linear(), {{0}}, Eigen::VectorXd::Constant(1, 2.0)};
  EXPECT_EQ(expansion_eval(e, IdTuple{1}, s), 6.0);
  const std::vector<double> raw = {3, 5};
  EXPECT_EQ(expansion_eval(e, raw, s), 6.0);
  e.weights.setZero();
  EXPECT_EQ(expansion_eval(e, IdTuple{1}, s), 0.0);
  KernelExpansion r{"A", KernelSpec::rbf(2), {{1}}, Eigen::VectorXd::Ones(1)};
  EXPECT_EQ(expansion_eval(r, IdTuple{1}, s), 1.0);
  EXPECT_EQ(error_of([&] { expansion_eval(r, IdTuple{4}, s); }), Errc::DanglingSampleId);
}

TEST(Expansion, LinearInWeights) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n(0, 1);
  SampleSet s(3);
  for (int i = 0; i < 10; ++i) {
    const double v[3] = {n(rng), n(rng), n(rng)};
    s.add(v);
  }
  const std::vector<IdTuple> support = {{0, 1}, {2, 3}, {4, 5}, {6, 7}};
  for (const auto& spec : {KernelSpec::linear(), KernelSpec::polynomial(2, 1), KernelSpec::rbf(0.4)}) {
    for (int trial = 0; trial < 100; ++trial) {
      Eigen::VectorXd w1(4), w2(4);
      for (auto& x : w1) x = n(rng);
      for (auto& x : w2) x = n(rng);
      const IdTuple args = {rng() % 10, rng() % 10};
      const double a = expansion_eval({"P", spec, support, w1}, args, s);
      const double b = expansion_eval({"P", spec, support, w2}, args, s);
      const double ab = expansion_eval({"P", spec, support, w1 + w2}, args, s);
      EXPECT_LE(std::abs(ab - (a + b)), 1e-10 * std::max({1.0, std::abs(ab), std::abs(a) + std::abs(b)}));
    }
  }
}

TEST(RkhsNorm, Examples) {
  KernelExpansion e{"A", KernelSpec::linear(), {{0}}, Eigen::VectorXd::Ones(1)};
  EXPECT_EQ(rkhs_norm_sq(e, Eigen::MatrixXd::Constant(1, 1, 2.0)), 2.0);
  e.weights.setZero();
  EXPECT_EQ(rkhs_norm_sq(e, Eigen::MatrixXd::Constant(1, 1, 2.0)), 0.0);
  KernelExpansion two{"A", KernelSpec::linear(), {{0}, {1}}, Eigen::Vector2d(1, -1)};
  EXPECT_EQ(rkhs_norm_sq(two, Eigen::MatrixXd::Identity(2, 2)), 2.0);
  EXPECT_EQ(error_of([&] { rkhs_norm_sq(two, Eigen::MatrixXd::Identity(3, 3)); }), Errc::DimensionMismatch);
}

TEST(RkhsNorm, NonNegativeOnRandomWeights) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n(0, 1);
  SampleSet s(2);
  for (int i = 0; i < 12; ++i) {
    const double v[2] = {n(rng), n(rng)};
    s.add(v);
  }
  std::vector<IdTuple> support;
  for (SampleId i = 0; i < 12; ++i) support.push_back({i});
  for (const auto& spec : {KernelSpec::linear(), KernelSpec::polynomial(3, 0), KernelSpec::rbf(5)}) {
    const auto g = gram_matrix(spec, support, s);
    for (int trial = 0; trial < 200; ++trial) {
      Eigen::VectorXd w(12);
      for (auto& x : w) x = n(rng);
      EXPECT_GE(rkhs_norm_sq({"P", spec, support, w}, g), -1e-9);
    }
  }
}

TEST(ModelIo, RoundTripIsExact) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> n(0, 1e3);
  std::vector<KernelExpansion> model;
  model.push_back({"A", KernelSpec::rbf(0.123456789), {{0}, {3}, {7}}, Eigen::Vector3d(n(rng), n(rng), 1e-300)});
  model.push_back({"has part", KernelSpec::polynomial(3, 0.5), {{0, 1}, {2, 2}}, Eigen::Vector2d(n(rng), -0.0)});
  model.push_back({"Empty", KernelSpec::linear(), {}, Eigen::VectorXd()});
  const std::string text = model_to_text(model);
  const auto back = parse_model(text);
  ASSERT_EQ(back.size(), model.size());
  for (std::size_t k = 0; k < model.size(); ++k) {
    EXPECT_EQ(back[k].predicate, model[k].predicate);
    EXPECT_EQ(back[k].kernel, model[k].kernel);
    EXPECT_EQ(back[k].support, model[k].support);
    ASSERT_EQ(back[k].weights.size(), model[k].weights.size());
    for (Eigen::Index i = 0; i < model[k].weights.size(); ++i) EXPECT_EQ(back[k].weights[i], model[k].weights[i]);
  }
  EXPECT_EQ(model_to_text(back), text);
}

TEST(ModelIo, RejectsMalformed) {
  EXPECT_THROW(parse_model("not a model\n"), Error);
  EXPECT_THROW(parse_model("kfol-model 1\npredicate A arity 1 support 2\nkernel linear\n0 1.5\n"), Error);
  EXPECT_THROW(parse_model("kfol-model 1\npredicate A arity 1 support 1\nkernel linear\n0 nan\n"), Error);
  EXPECT_THROW(parse_model("kfol-model 1\npredicate A arity 1 support 2\nkernel linear\n0 1\n0 2\n"), Error);
}

}  // namespace
}  // namespace kfol
