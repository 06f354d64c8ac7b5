#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>

namespace kfol {

enum class LossKind { Squared, Hinge };

/// Weights of the three objective terms. Predicates and clauses are keyed by name.
struct ObjectiveConfig {
  LossKind loss = LossKind::Squared;
  std::map<std::string, double> lambda_pi;  // fitting weight per learnable predicate
  std::map<std::string, double> lambda_r;   // RKHS norm weight per learnable predicate
  std::map<std::string, double> lambda_v;   // penalty weight per clause

  double fitting_weight(const std::string& predicate) const;
  double norm_weight(const std::string& predicate) const;
  double clause_weight(const std::string& clause) const;
};

struct TrainConfig {
  double learning_rate = 0.01;
  std::size_t max_epochs_stage1 = 20000;
  std::size_t max_epochs_stage2 = 20000;
  double grad_tol = 1e-6;
  std::size_t constraint_ramp_epochs = 0;
  std::uint64_t seed = 0;
  /// Step halvings tried before an epoch is declared stalled.
  std::size_t max_backtracks = 60;

  void validate() const;
};

}  // namespace kfol
