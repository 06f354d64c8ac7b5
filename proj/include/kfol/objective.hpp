#pragma once

// E(f) = R(f) + N(f) + V(f) over kernel expansions f_k(.) = sum_i w_ki K_k(s_ki, .)
//
//   R = sum_k lambda_pi_k / |L_k| sum_{(t,y) in L_k} loss(f_k(t), y)
//   N = sum_k lambda_r_k w_k' G_k w_k
//   V = sum_h lambda_v_h penalty_h

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "kfol/config.hpp"
#include "kfol/grounding.hpp"
#include "kfol/kernel.hpp"

namespace kfol {

struct CompiledClause {
  std::string name;
  GroundedGraph graph;
};

double loss_value(LossKind kind, double z, double y);
double loss_derivative(LossKind kind, double z, double y);

// Reference evaluations of the three terms, computing every f value with
// expansion_eval. `labeled` is matched to expansions by predicate name.
double empirical_risk(std::span<const KernelExpansion> expansions, std::span<const LabeledSet> labeled,
                      const SampleSet& samples, const ObjectiveConfig& cfg);
double regularizer(std::span<const KernelExpansion> expansions, std::span<const Eigen::MatrixXd> grams,
                   const ObjectiveConfig& cfg);
double constraint_penalty(std::span<const KernelExpansion> expansions, std::span<const CompiledClause> clauses,
                          const SampleSet& samples, const ObjectiveConfig& cfg);

struct Evaluation {
  double risk = 0;
  double norm = 0;
  double penalty = 0;             // sum_h lambda_v_h penalty_h, unscaled
  double objective = 0;           // risk + norm + constraint_scale * penalty
  std::vector<double> clause_penalties;  // unweighted penalty_h
  std::vector<Eigen::VectorXd> gradient;  // d objective / d w_k
  double gradient_norm = 0;
};

/// Objective over fixed supports. Every labeled tuple and every learnable
/// atom of every clause must be a support tuple of its predicate, so f values
/// are read off G_k w_k and the gradient is G_k (dE/df_k + 2 lambda_r_k w_k).
class Objective {
 public:
  /// `expansions` supplies predicate names, kernels, and supports (weights ignored);
  /// `labeled` is matched by predicate name.
  Objective(const SampleSet& samples, std::vector<KernelExpansion> expansions, std::span<const LabeledSet> labeled,
            std::vector<CompiledClause> clauses, ObjectiveConfig cfg);

  Evaluation evaluate(std::span<const Eigen::VectorXd> weights, double constraint_scale = 1.0,
                      bool with_gradient = true) const;

  /// Clause graph values at `weights`, for reporting.
  std::vector<GraphValues> clause_values(std::span<const Eigen::VectorXd> weights) const;

  /// Per-clause penalty restricted to groundings whose learnable atoms all
  /// carry a label for their predicate.
  std::vector<double> supervised_clause_penalties(std::span<const Eigen::VectorXd> weights) const;

  std::size_t predicate_count() const { return expansions_.size(); }
  std::span<const KernelExpansion> expansions() const { return expansions_; }
  std::span<const Eigen::MatrixXd> grams() const { return grams_; }
  std::span<const CompiledClause> clauses() const { return clauses_; }
  const ObjectiveConfig& config() const { return cfg_; }
  std::size_t predicate_index(const std::string& name) const;

  /// Copies of the expansions carrying `weights`.
  std::vector<KernelExpansion> with_weights(std::span<const Eigen::VectorXd> weights) const;
  std::vector<Eigen::VectorXd> zero_weights() const;

 private:
  struct SupportRef {
    std::size_t predicate;
    Eigen::Index index;
  };
  struct LabelRef {
    Eigen::Index index;
    double target;
  };

  std::vector<Eigen::VectorXd> function_values(std::span<const Eigen::VectorXd> weights) const;
  GraphValues clause_graph_values(std::size_t h, const std::vector<Eigen::VectorXd>& f) const;

  std::vector<KernelExpansion> expansions_;
  std::vector<Eigen::MatrixXd> grams_;
  std::vector<std::vector<LabelRef>> labels_;          // per predicate
  std::vector<std::vector<bool>> labeled_support_;     // per predicate, per support tuple
  std::vector<CompiledClause> clauses_;
  std::vector<std::vector<SupportRef>> clause_atoms_;  // per clause, per atom
  ObjectiveConfig cfg_;
};

}  // namespace kfol
