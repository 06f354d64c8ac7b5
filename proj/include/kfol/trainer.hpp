#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "kfol/objective.hpp"
#include "kfol/problem.hpp"

namespace kfol {

enum class Stage { Init, Labeled, Abstraction, Done };

std::string_view stage_name(Stage stage);

struct TraceRow {
  std::size_t epoch;
  Stage stage;
  double risk;
  double norm;
  double penalty;    // sum_h lambda_v_h penalty_h, regardless of stage
  double objective;  // the quantity minimized in this stage
  double gradient_norm;
};

struct TrainState {
  std::vector<KernelExpansion> expansions;
  Stage stage = Stage::Init;
  std::vector<TraceRow> trace;
  /// Index of the first abstraction-stage row, or trace.size() if stage 2 never ran.
  std::size_t stage2_begin = 0;
  /// Weights at the end of the labeled stage, i.e. at abstraction-stage entry.
  std::vector<KernelExpansion> labeled_expansions;
  Evaluation final_evaluation;
};

/// Grounds every clause of the problem over its pooled domain.
std::vector<CompiledClause> compile_clauses(const Problem& problem);

/// S_k = tuples(L_k) united with every tuple at which a clause evaluates f_k;
/// sorted and duplicate-free, one list per learnable predicate in problem order.
std::vector<std::vector<IdTuple>> build_supports(const Problem& problem, std::span<const CompiledClause> clauses);

/// Compiles clauses, builds supports and Gram matrices.
Objective make_objective(const Problem& problem);

/// Result of one gradient-descent stage.
struct StageResult {
  std::vector<Eigen::VectorXd> weights;
  Evaluation evaluation;
  std::size_t epochs = 0;
  bool converged = false;
};

/// Constraint weight multiplier at 1-based epoch `t` of `stage`: 0 while
/// labeled, then t / ramp_epochs capped at 1 (1 immediately when ramp is 0).
double constraint_scale(Stage stage, std::size_t t, std::size_t ramp_epochs);

/// Backtracking gradient descent on `objective` from `weights`. Each epoch tries
/// a step of min(learning_rate, 2 * last accepted step) and halves it until the
/// objective does not increase. Stops when the gradient norm drops below
/// grad_tol (once any ramp is complete), when no step is accepted, or at
/// `max_epochs`. Rows are appended to `trace` numbered from `first_epoch`.
/// Throws DivergenceDetected if the objective exceeds 10x a positive
/// `divergence_reference`.
StageResult run_stage(const Objective& objective, std::vector<Eigen::VectorXd> weights, const TrainConfig& cfg,
                      Stage stage, std::size_t max_epochs, std::vector<TraceRow>* trace = nullptr,
                      std::size_t first_epoch = 1, double divergence_reference = 0);

/// Labeled initialization on R + N from zero weights, then the abstraction
/// stage on R + N + V with lambda_v ramped in linearly.
TrainState train(const Objective& objective, const TrainConfig& cfg);
TrainState train(const Problem& problem);

/// (f_k(args), squash(f_k(args))).
std::pair<double, double> predict(const TrainState& state, const std::string& predicate, const IdTuple& args,
                                  const SampleSet& samples);
std::pair<double, double> predict(std::span<const KernelExpansion> expansions, const std::string& predicate,
                                  const IdTuple& args, const SampleSet& samples);

/// "epoch,stage,R,N,V,E,grad_norm" followed by one row per trace entry.
std::string trace_to_csv(std::span<const TraceRow> trace);

}  // namespace kfol
