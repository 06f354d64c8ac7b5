#include "kfol/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace kfol {

std::string_view stage_name(Stage stage) {
  switch (stage) {
    case Stage::Init: return "init";
    case Stage::Labeled: return "labeled";
    case Stage::Abstraction: return "abstraction";
    case Stage::Done: return "done";
  }
  return "";
}

std::vector<CompiledClause> compile_clauses(const Problem& problem) {
  std::vector<CompiledClause> out;
  for (const auto& c : problem.clauses) {
    try {
      out.push_back({c.name, ground_clause(c.ast, problem.domain, problem.known, c.guard, problem.grounding)});
    } catch (const Error& e) {
      throw Error(e.code(), "clause '" + c.name + "': " + e.what(), e.position());
    }
  }
  return out;
}

std::vector<std::vector<IdTuple>> build_supports(const Problem& problem, std::span<const CompiledClause> clauses) {
  std::vector<std::vector<IdTuple>> supports;
  for (const auto& p : problem.learnable) {
    std::set<IdTuple> tuples;
    for (const auto& ex : p.labels.examples) tuples.insert(ex.args);
    for (const auto& c : clauses) {
      for (const auto& atom : c.graph.atoms()) {
        if (atom.predicate == p.signature.name) tuples.insert(atom.args);
      }
    }
    if (tuples.size() > problem.support_cap) {
      throw Error(Errc::SupportCapExceeded, "predicate '" + p.signature.name + "' needs " + std::to_string(tuples.size()) +
                                                " support tuples, cap is " + std::to_string(problem.support_cap));
    }
    supports.emplace_back(tuples.begin(), tuples.end());
  }
  return supports;
}

Objective make_objective(const Problem& problem) {
  auto clauses = compile_clauses(problem);
  auto supports = build_supports(problem, clauses);
  std::vector<KernelExpansion> expansions;
  for (std::size_t k = 0; k < problem.learnable.size(); ++k) {
    const auto& p = problem.learnable[k];
    expansions.push_back({p.signature.name, p.kernel, std::move(supports[k]), {}});
  }
  const auto labeled = problem.labeled_sets();
  return Objective(problem.samples, std::move(expansions), labeled, std::move(clauses), problem.objective);
}

double constraint_scale(Stage stage, std::size_t t, std::size_t ramp_epochs) {
  if (stage != Stage::Abstraction) return 0.0;
  if (ramp_epochs == 0 || t >= ramp_epochs) return 1.0;
  return static_cast<double>(t) / static_cast<double>(ramp_epochs);
}

StageResult run_stage(const Objective& objective, std::vector<Eigen::VectorXd> weights, const TrainConfig& cfg,
                      Stage stage, std::size_t max_epochs, std::vector<TraceRow>* trace, std::size_t first_epoch,
                      double divergence_reference) {
  const std::size_t ramp = stage == Stage::Abstraction ? cfg.constraint_ramp_epochs : 0;
  double scale = constraint_scale(stage, 1, ramp);
  StageResult result;
  Evaluation current = objective.evaluate(weights, scale);
  double step = cfg.learning_rate;
  std::vector<Eigen::VectorXd> trial(weights.size());

  for (std::size_t t = 1; t <= max_epochs; ++t) {
    const double s = constraint_scale(stage, t, ramp);
    if (s != scale) {
      scale = s;
      current = objective.evaluate(weights, scale);
    }
    if (current.gradient_norm < cfg.grad_tol && (ramp == 0 || t > ramp)) {
      result.converged = true;
      break;
    }

    double try_step = std::min(cfg.learning_rate, 2 * step);
    bool accepted = false;
    Evaluation next;
    for (std::size_t b = 0; b <= cfg.max_backtracks; ++b) {
      for (std::size_t k = 0; k < weights.size(); ++k) trial[k] = weights[k] - try_step * current.gradient[k];
      next = objective.evaluate(trial, scale);
      if (next.objective <= current.objective) {
        accepted = true;
        break;
      }
      try_step /= 2;
    }
    if (!accepted) {
      result.converged = true;
      break;
    }
    step = try_step;
    std::swap(weights, trial);
    current = std::move(next);
    ++result.epochs;

    if (divergence_reference > 0 && current.objective > 10 * divergence_reference) {
      throw Error(Errc::DivergenceDetected, "objective grew from " + format_double(divergence_reference) + " to " +
                                                format_double(current.objective));
    }
    if (trace) {
      trace->push_back({first_epoch + result.epochs - 1, stage, current.risk, current.norm, current.penalty,
                        current.objective, current.gradient_norm});
    }
  }
  result.weights = std::move(weights);
  result.evaluation = std::move(current);
  return result;
}

TrainState train(const Objective& objective, const TrainConfig& cfg) {
  cfg.validate();
  TrainState state;
  auto weights = objective.zero_weights();
  const double initial = objective.evaluate(weights, 0.0, false).objective;

  state.stage = Stage::Labeled;
  StageResult labeled = run_stage(objective, std::move(weights), cfg, Stage::Labeled, cfg.max_epochs_stage1,
                                  &state.trace, 1, initial);
  state.stage2_begin = state.trace.size();
  state.final_evaluation = labeled.evaluation;
  weights = std::move(labeled.weights);
  state.labeled_expansions = objective.with_weights(weights);

  if (!objective.clauses().empty()) {
    state.stage = Stage::Abstraction;
    const double entry = objective.evaluate(weights, 1.0, false).objective;
    StageResult abstraction = run_stage(objective, std::move(weights), cfg, Stage::Abstraction, cfg.max_epochs_stage2,
                                        &state.trace, labeled.epochs + 1, entry);
    state.final_evaluation = abstraction.evaluation;
    weights = std::move(abstraction.weights);
  }
  state.expansions = objective.with_weights(weights);
  state.stage = Stage::Done;
  return state;
}

TrainState train(const Problem& problem) { return train(make_objective(problem), problem.train); }

std::pair<double, double> predict(std::span<const KernelExpansion> expansions, const std::string& predicate,
                                  const IdTuple& args, const SampleSet& samples) {
  const auto it = std::find_if(expansions.begin(), expansions.end(),
                               [&](const KernelExpansion& e) { return e.predicate == predicate; });
  if (it == expansions.end()) throw Error(Errc::UnknownPredicate, "no trained predicate named '" + predicate + "'");
  if (!it->support.empty() && it->support.front().size() != args.size()) {
    throw Error(Errc::ArityMismatch, "predicate '" + predicate + "' expects " + std::to_string(it->support.front().size()) +
                                         " arguments");
  }
  const double raw = expansion_eval(*it, args, samples);
  return {raw, squash(raw)};
}

std::pair<double, double> predict(const TrainState& state, const std::string& predicate, const IdTuple& args,
                                  const SampleSet& samples) {
  return predict(state.expansions, predicate, args, samples);
}

std::string trace_to_csv(std::span<const TraceRow> trace) {
  std::string out = "epoch,stage,R,N,V,E,grad_norm\n";
  for (const auto& r : trace) {
    out += std::to_string(r.epoch) + ',' + std::string(stage_name(r.stage)) + ',' + format_double(r.risk) + ',' +
           format_double(r.norm) + ',' + format_double(r.penalty) + ',' + format_double(r.objective) + ',' +
           format_double(r.gradient_norm) + '\n';
  }
  return out;
}

}  // namespace kfol
