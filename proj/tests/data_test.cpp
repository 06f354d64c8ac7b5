#include <gtest/gtest.h>

#include <filesystem>
#include <random>

#include "kfol/data.hpp"
#include "kfol/problem.hpp"

namespace kfol {
namespace {

namespace fs = std::filesystem;

Errc error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an error";
  return Errc::ModelMismatch;
}

TEST(Samples, LoadsRowsInIdOrder) {
  const auto s = parse_samples_csv("# id,x,y\n2,5,6\n0,1,2\n1,3,4\n3,7,8.5\n");
  EXPECT_EQ(s.dimension(), 2u);
  EXPECT_EQ(s.size(), 4u);
  EXPECT_EQ(s[0][1], 2.0);
  EXPECT_EQ(s[2][0], 5.0);
  EXPECT_EQ(s[3][1], 8.5);
}

TEST(Samples, Errors) {
  EXPECT_EQ(error_of([] { parse_samples_csv("0,1,2\n1,3\n"); }), Errc::DimensionMismatch);
  EXPECT_EQ(error_of([] { parse_samples_csv("0,1\n0,2\n"); }), Errc::DuplicateSampleId);
  EXPECT_EQ(error_of([] { parse_samples_csv("0,1\n5,2\n"); }), Errc::MalformedInput);
  EXPECT_EQ(error_of([] { parse_samples_csv("0,abc\n"); }), Errc::MalformedInput);
  EXPECT_EQ(error_of([] { parse_samples_csv(""); }), Errc::MalformedInput);
}

TEST(Labeled, TargetsMustBeBinary) {
  const auto l = parse_labeled_csv("0,1\n1,0\n", "A", 1);
  ASSERT_EQ(l.examples.size(), 2u);
  EXPECT_EQ(l.examples[0].args, IdTuple{0});
  EXPECT_EQ(l.examples[0].target, 1.0);
  EXPECT_EQ(error_of([] { parse_labeled_csv("0,0.5\n", "A", 1); }), Errc::MalformedInput);
  EXPECT_EQ(error_of([] { parse_labeled_csv("0,1,1\n", "A", 1); }), Errc::MalformedInput);
}

TEST(Known, ValuesAndDefault) {
  const auto t = parse_known_csv("0,1,0.25\n1,1,1\n", "D", 2, 0.0);
  EXPECT_EQ(t.value({0, 1}), 0.25);
  EXPECT_EQ(t.value({1, 0}), 0.0);
  EXPECT_EQ(error_of([] { parse_known_csv("0,1.5\n", "K", 1, 0.0); }), Errc::MalformedInput);
  EXPECT_EQ(error_of([] { parse_known_csv("", "K", 1, 2.0); }), Errc::InvalidConfig);
}

TEST(Pool, UnionOfLabeledAndUnlabeled) {
  const std::vector<LabeledSet> one = {{"A", {{{0}, 1}, {{1}, 0}}}};
  const std::vector<SampleId> u = {1, 2};
  EXPECT_EQ(pool_samples(one, u), (std::vector<SampleId>{0, 1, 2}));
  EXPECT_EQ(pool_samples({}, std::vector<SampleId>{0, 1}), (std::vector<SampleId>{0, 1}));
  const std::vector<LabeledSet> two = {{"A", {{{0}, 1}}}, {"B", {{{0}, 0}}}};
  EXPECT_EQ(pool_samples(two, {}), (std::vector<SampleId>{0}));
}

TEST(Pool, IdempotentAndOrderIndependent) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<SampleId> id(0, 20);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<LabeledSet> labeled(2);
    for (auto& l : labeled) {
      for (int i = 0; i < 5; ++i) l.examples.push_back({{id(rng), id(rng)}, 1});
    }
    std::vector<SampleId> u;
    for (int i = 0; i < 6; ++i) u.push_back(id(rng));
    const auto pooled = pool_samples(labeled, u);
    EXPECT_EQ(pool_samples({}, pooled), pooled);
    EXPECT_EQ(pool_samples(labeled, pooled), pooled);
    std::reverse(labeled.begin(), labeled.end());
    std::shuffle(u.begin(), u.end(), rng);
    EXPECT_EQ(pool_samples(labeled, u), pooled);
  }
}

TEST(Numbers, ShortestRoundTrip) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> d(-1e6, 1e6);
  for (int i = 0; i < 10000; ++i) {
    const double x = d(rng) * std::pow(10.0, static_cast<int>(rng() % 40) - 20);
    EXPECT_EQ(parse_double(format_double(x)), x);
  }
}

class ProblemFiles : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("kfol_data_test_" + std::to_string(::getpid()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  void write(const std::string& name, const std::string& text) { write_text_file((dir_ / name).string(), text); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

TEST_F(ProblemFiles, LoadsCompleteProblem) {
  write("samples.csv", "0,0.1,0.2\n1,0.3,0.4\n2,0.5,0.6\n3,0.7,0.8\n");
  write("unlabeled.csv", "");
  write("a.csv", "0,1\n1,0\n");
  write("b.csv", "2,1\n");
  write("d.csv", "0,1,1\n");
  write("clauses.txt", "forall x: A(x) -> B(x)\n[w=0.5, guard=D] forall x forall y: A(x) -> A(y)\n");
  write("problem.json", R"({
    "samples": "samples.csv",
    "unlabeled": "unlabeled.csv",
    "clauses": "clauses.txt",
    "predicates": [
      {"name": "A", "arity": 1, "kernel": "rbf gamma=0.5", "labels": "a.csv", "lambda_r": 0.01},
      {"name": "B", "arity": 1, "kernel": "linear", "labels": "b.csv", "lambda_pi": 2},
      {"name": "D", "arity": 2, "kind": "known", "table": "d.csv"}
    ],
    "objective": {"loss": "squared", "lambda_v": 3},
    "train": {"learning_rate": 0.05, "seed": 9}
  })");
  const Problem p = load_problem(path("problem.json"));
  EXPECT_EQ(p.samples.size(), 4u);
  EXPECT_EQ(p.samples.dimension(), 2u);
  // U is empty; S is the labeled ids
  EXPECT_EQ(p.domain, (std::vector<SampleId>{0, 1, 2}));
  ASSERT_EQ(p.learnable.size(), 2u);
  EXPECT_EQ(p.learnable[0].kernel, KernelSpec::rbf(0.5));
  EXPECT_EQ(p.objective.norm_weight("A"), 0.01);
  EXPECT_EQ(p.objective.fitting_weight("B"), 2.0);
  EXPECT_EQ(p.objective.clause_weight("c1"), 3.0);
  EXPECT_EQ(p.objective.clause_weight("c2"), 0.5);
  EXPECT_EQ(p.known.at("D").value({0, 1}), 1.0);
  EXPECT_EQ(p.train.learning_rate, 0.05);
  EXPECT_EQ(p.train.seed, 9u);
}

TEST_F(ProblemFiles, DanglingAndMissing) {
  write("samples.csv", "0,1,2\n1,3,4\n2,5,6\n3,7,8\n");
  write("a.csv", "99,1\n");
  write("problem.json", R"({"samples": "samples.csv",
      "predicates": [{"name": "A", "arity": 1, "labels": "a.csv"}]})");
  EXPECT_EQ(error_of([&] { load_problem(path("problem.json")); }), Errc::DanglingSampleId);

  write("problem.json", R"({"samples": "nope.csv", "predicates": []})");
  EXPECT_EQ(error_of([&] { load_problem(path("problem.json")); }), Errc::MissingFile);
  EXPECT_EQ(error_of([&] { load_problem(path("absent.json")); }), Errc::MissingFile);

  write("problem.json", R"({"samples": "samples.csv", "predicates": [{"name": "A"}]})");
  EXPECT_EQ(error_of([&] { load_problem(path("problem.json")); }), Errc::InvalidConfig);
}

TEST_F(ProblemFiles, SaveThenLoadReproducesValues) {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> n(0, 1);
  std::string samples;
  for (int i = 0; i < 12; ++i) {
    samples += std::to_string(i) + ',' + format_double(n(rng) * 1e-3) + ',' + format_double(n(rng) * 1e5) + '\n';
  }
  write("samples.csv", samples);
  write("a.csv", "0,1\n3,0\n");
  write("k.csv", "1,0.1234567890123456789\n");
  write("clauses.txt", "[w=0.3333333333333333] forall x: K(x) -> A(x)\n");
  write("problem.json", R"({"samples": "samples.csv", "clauses": "clauses.txt",
      "predicates": [{"name": "A", "arity": 1, "labels": "a.csv", "kernel": "polynomial degree=3 offset=0.7",
                      "lambda_r": 0.123456789012345},
                     {"name": "K", "arity": 1, "kind": "known", "table": "k.csv", "default": 0.2}]})");
  const Problem first = load_problem(path("problem.json"));
  save_problem(first, path("copy"));
  const Problem second = load_problem(path("copy/problem.json"));

  EXPECT_EQ(samples_to_csv(first.samples), samples_to_csv(second.samples));
  for (SampleId i = 0; i < first.samples.size(); ++i) {
    for (std::size_t j = 0; j < 2; ++j) EXPECT_EQ(first.samples[i][j], second.samples[i][j]);
  }
  EXPECT_EQ(first.domain, second.domain);
  EXPECT_EQ(first.known.at("K").entries, second.known.at("K").entries);
  EXPECT_EQ(first.known.at("K").default_value, second.known.at("K").default_value);
  EXPECT_EQ(first.objective.lambda_r, second.objective.lambda_r);
  EXPECT_EQ(first.objective.lambda_v, second.objective.lambda_v);
  EXPECT_EQ(first.learnable[0].kernel, second.learnable[0].kernel);
  EXPECT_TRUE(same_structure(first.clauses[0].ast, second.clauses[0].ast));
}

}  // namespace
}  // namespace kfol
