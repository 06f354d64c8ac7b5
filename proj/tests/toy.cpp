#include "toy.hpp"

#include <random>

namespace kfol::testing {

Problem toy_problem(const ToyOptions& o) {
  Problem p;
  std::mt19937_64 rng(o.seed);
  std::normal_distribution<double> noise(0.0, o.spread);
  p.samples = SampleSet(2);
  for (const double cx : {-2.0, 2.0}) {
    for (std::size_t i = 0; i < o.per_blob; ++i) {
      const double x[2] = {cx + noise(rng), noise(rng)};
      p.samples.add(x);
    }
  }
  for (SampleId i = 0; i < p.samples.size(); ++i) p.unlabeled.push_back(i);

  const KernelSpec kernel = KernelSpec::rbf(o.gamma);
  LearnablePredicate a{{"A", 1, PredicateKind::Learnable}, kernel, {"A", {}}};
  for (SampleId i = 0; i < 10; ++i) a.labels.examples.push_back({{i}, 1.0});
  LearnablePredicate b{{"B", 1, PredicateKind::Learnable}, kernel, {"B", {{{0}, 1.0}, {{o.per_blob}, 0.0}}}};
  p.signatures = {a.signature, b.signature};
  p.learnable = {a, b};

  p.clauses = parse_clause_file("[name=a_implies_b] forall x: A(x) -> B(x)\n", p.signatures);
  for (const auto& name : {"A", "B"}) {
    p.objective.lambda_pi[name] = 1.0;
    p.objective.lambda_r[name] = o.lambda_r;
  }
  p.objective.lambda_v["a_implies_b"] = o.lambda_v;

  p.train.learning_rate = 1.0;
  p.train.max_epochs_stage1 = 20000;
  p.train.max_epochs_stage2 = 20000;
  p.train.grad_tol = 1e-6;
  p.train.seed = o.seed;
  finalize_problem(p);
  return p;
}

std::vector<SampleId> blob_one(const ToyOptions& o) {
  std::vector<SampleId> ids;
  for (SampleId i = 0; i < o.per_blob; ++i) ids.push_back(i);
  return ids;
}

}  // namespace kfol::testing
