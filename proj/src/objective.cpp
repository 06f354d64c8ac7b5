#include "kfol/objective.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace kfol {

double loss_value(LossKind kind, double z, double y) {
  switch (kind) {
    case LossKind::Squared:
      return (z - y) * (z - y);
    case LossKind::Hinge:
      return std::max(0.0, 1.0 - (2 * y - 1) * (2 * z - 1));
  }
  return 0;
}

double loss_derivative(LossKind kind, double z, double y) {
  switch (kind) {
    case LossKind::Squared:
      return 2 * (z - y);
    case LossKind::Hinge:
      return 1.0 - (2 * y - 1) * (2 * z - 1) > 0 ? -2 * (2 * y - 1) : 0.0;
  }
  return 0;
}

namespace {

const LabeledSet* find_labels(std::span<const LabeledSet> labeled, const std::string& predicate) {
  const auto it = std::find_if(labeled.begin(), labeled.end(), [&](const LabeledSet& l) { return l.predicate == predicate; });
  return it == labeled.end() ? nullptr : &*it;
}

void check_fitting_weight(double lambda_pi, const LabeledSet* labels, const std::string& predicate) {
  if (lambda_pi > 0 && (!labels || labels->examples.empty())) {
    throw Error(Errc::EmptyLabeledSet, "predicate '" + predicate + "' has lambda_pi > 0 but no labeled examples");
  }
}

}  // namespace

double empirical_risk(std::span<const KernelExpansion> expansions, std::span<const LabeledSet> labeled,
                      const SampleSet& samples, const ObjectiveConfig& cfg) {
  double risk = 0;
  for (const auto& e : expansions) {
    const double lambda_pi = cfg.fitting_weight(e.predicate);
    const LabeledSet* labels = find_labels(labeled, e.predicate);
    check_fitting_weight(lambda_pi, labels, e.predicate);
    if (lambda_pi == 0) continue;
    double sum = 0;
    for (const auto& ex : labels->examples) sum += loss_value(cfg.loss, expansion_eval(e, ex.args, samples), ex.target);
    risk += lambda_pi * sum / static_cast<double>(labels->examples.size());
  }
  return risk;
}

double regularizer(std::span<const KernelExpansion> expansions, std::span<const Eigen::MatrixXd> grams,
                   const ObjectiveConfig& cfg) {
  if (expansions.size() != grams.size()) {
    throw Error(Errc::DimensionMismatch, std::to_string(expansions.size()) + " expansions but " +
                                             std::to_string(grams.size()) + " gram matrices");
  }
  double n = 0;
  for (std::size_t k = 0; k < expansions.size(); ++k) {
    n += cfg.norm_weight(expansions[k].predicate) * rkhs_norm_sq(expansions[k], grams[k]);
  }
  return n;
}

double constraint_penalty(std::span<const KernelExpansion> expansions, std::span<const CompiledClause> clauses,
                          const SampleSet& samples, const ObjectiveConfig& cfg) {
  std::map<std::string, const KernelExpansion*> by_name;
  for (const auto& e : expansions) by_name[e.predicate] = &e;
  const AtomEvaluator predict = [&](const AtomRef& atom) -> std::optional<double> {
    const auto it = by_name.find(atom.predicate);
    if (it == by_name.end()) return std::nullopt;
    return expansion_eval(*it->second, atom.args, samples);
  };
  double v = 0;
  for (const auto& c : clauses) {
    const double lambda_v = cfg.clause_weight(c.name);
    if (lambda_v == 0) continue;
    v += lambda_v * eval_graph(c.graph, predict).penalty;
  }
  return v;
}

Objective::Objective(const SampleSet& samples, std::vector<KernelExpansion> expansions,
                     std::span<const LabeledSet> labeled, std::vector<CompiledClause> clauses, ObjectiveConfig cfg)
    : expansions_(std::move(expansions)), clauses_(std::move(clauses)), cfg_(std::move(cfg)) {
  std::map<std::string, std::size_t> predicate_of;
  std::vector<std::map<IdTuple, Eigen::Index>> support_index(expansions_.size());

  for (std::size_t k = 0; k < expansions_.size(); ++k) {
    auto& e = expansions_[k];
    predicate_of[e.predicate] = k;
    e.weights = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(e.support.size()));
    grams_.push_back(gram_matrix(e.kernel, e.support, samples));
    for (std::size_t i = 0; i < e.support.size(); ++i) support_index[k][e.support[i]] = static_cast<Eigen::Index>(i);

    const LabeledSet* labels = find_labels(labeled, e.predicate);
    check_fitting_weight(cfg_.fitting_weight(e.predicate), labels, e.predicate);
    labels_.emplace_back();
    labeled_support_.emplace_back(e.support.size(), false);
    if (!labels) continue;
    for (const auto& ex : labels->examples) {
      const auto it = support_index[k].find(ex.args);
      if (it == support_index[k].end()) {
        throw Error(Errc::DanglingSampleId, "labeled tuple of '" + e.predicate + "' is not in its support set");
      }
      labels_[k].push_back({it->second, ex.target});
      labeled_support_[k][static_cast<std::size_t>(it->second)] = true;
    }
  }

  for (const auto& c : clauses_) {
    auto& refs = clause_atoms_.emplace_back();
    for (const auto& atom : c.graph.atoms()) {
      const auto p = predicate_of.find(atom.predicate);
      if (p == predicate_of.end()) {
        throw Error(Errc::UnknownPredicate, "clause '" + c.name + "' uses '" + atom.predicate +
                                                "', which is not a learnable predicate");
      }
      const auto it = support_index[p->second].find(atom.args);
      if (it == support_index[p->second].end()) {
        throw Error(Errc::DanglingSampleId, "clause '" + c.name + "' evaluates '" + atom.predicate +
                                                "' outside its support set");
      }
      refs.push_back({p->second, it->second});
    }
  }
}

std::size_t Objective::predicate_index(const std::string& name) const {
  for (std::size_t k = 0; k < expansions_.size(); ++k) {
    if (expansions_[k].predicate == name) return k;
  }
  throw Error(Errc::UnknownPredicate, "no learnable predicate named '" + name + "'");
}

std::vector<KernelExpansion> Objective::with_weights(std::span<const Eigen::VectorXd> weights) const {
  std::vector<KernelExpansion> out = expansions_;
  for (std::size_t k = 0; k < out.size(); ++k) out[k].weights = weights[k];
  return out;
}

std::vector<Eigen::VectorXd> Objective::zero_weights() const {
  std::vector<Eigen::VectorXd> w;
  for (const auto& e : expansions_) w.push_back(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(e.support.size())));
  return w;
}

std::vector<Eigen::VectorXd> Objective::function_values(std::span<const Eigen::VectorXd> weights) const {
  if (weights.size() != expansions_.size()) {
    throw Error(Errc::DimensionMismatch, "expected weights for " + std::to_string(expansions_.size()) + " predicates");
  }
  std::vector<Eigen::VectorXd> f;
  f.reserve(weights.size());
  for (std::size_t k = 0; k < weights.size(); ++k) {
    if (weights[k].size() != grams_[k].rows()) {
      throw Error(Errc::DimensionMismatch, "weight vector of '" + expansions_[k].predicate + "' has the wrong size");
    }
    f.push_back(grams_[k] * weights[k]);
  }
  return f;
}

GraphValues Objective::clause_graph_values(std::size_t h, const std::vector<Eigen::VectorXd>& f) const {
  const auto& refs = clause_atoms_[h];
  std::vector<double> raw(refs.size());
  for (std::size_t a = 0; a < refs.size(); ++a) raw[a] = f[refs[a].predicate][refs[a].index];
  return eval_graph(clauses_[h].graph, raw);
}

Evaluation Objective::evaluate(std::span<const Eigen::VectorXd> weights, double constraint_scale,
                               bool with_gradient) const {
  const auto f = function_values(weights);
  Evaluation out;
  std::vector<Eigen::VectorXd> df;  // d objective / d f on each support tuple
  if (with_gradient) {
    for (const auto& fk : f) df.push_back(Eigen::VectorXd::Zero(fk.size()));
  }

  for (std::size_t k = 0; k < f.size(); ++k) {
    const double lambda_pi = cfg_.fitting_weight(expansions_[k].predicate);
    if (lambda_pi > 0 && !labels_[k].empty()) {
      const double scale = lambda_pi / static_cast<double>(labels_[k].size());
      double sum = 0;
      for (const auto& l : labels_[k]) {
        const double z = f[k][l.index];
        sum += loss_value(cfg_.loss, z, l.target);
        if (with_gradient) df[k][l.index] += scale * loss_derivative(cfg_.loss, z, l.target);
      }
      out.risk += scale * sum;
    }
    out.norm += cfg_.norm_weight(expansions_[k].predicate) * weights[k].dot(f[k]);
  }

  for (std::size_t h = 0; h < clauses_.size(); ++h) {
    const GraphValues values = clause_graph_values(h, f);
    const double lambda_v = cfg_.clause_weight(clauses_[h].name);
    out.clause_penalties.push_back(values.penalty);
    out.penalty += lambda_v * values.penalty;
    const double upstream = constraint_scale * lambda_v;
    if (with_gradient && upstream != 0) {
      const auto grad = backprop_graph(clauses_[h].graph, values, upstream);
      const auto& refs = clause_atoms_[h];
      for (std::size_t a = 0; a < refs.size(); ++a) df[refs[a].predicate][refs[a].index] += grad[a];
    }
  }

  out.objective = out.risk + out.norm + constraint_scale * out.penalty;
  if (!std::isfinite(out.objective)) throw Error(Errc::NonFiniteLoss, "objective evaluated to a non-finite value");

  if (with_gradient) {
    double sq = 0;
    for (std::size_t k = 0; k < f.size(); ++k) {
      const double lambda_r = cfg_.norm_weight(expansions_[k].predicate);
      out.gradient.push_back(grams_[k] * (df[k] + 2 * lambda_r * weights[k]));
      sq += out.gradient.back().squaredNorm();
    }
    out.gradient_norm = std::sqrt(sq);
  }
  return out;
}

std::vector<GraphValues> Objective::clause_values(std::span<const Eigen::VectorXd> weights) const {
  const auto f = function_values(weights);
  std::vector<GraphValues> out;
  for (std::size_t h = 0; h < clauses_.size(); ++h) out.push_back(clause_graph_values(h, f));
  return out;
}

std::vector<double> Objective::supervised_clause_penalties(std::span<const Eigen::VectorXd> weights) const {
  const auto values = clause_values(weights);
  std::vector<double> out;
  for (std::size_t h = 0; h < clauses_.size(); ++h) {
    const auto& graph = clauses_[h].graph;
    const auto& refs = clause_atoms_[h];
    out.push_back(restricted_penalty(graph, values[h], [&](const GroundedGraph::Grounding& g) {
      const auto atoms = graph.atoms_under(g.truth);
      return !atoms.empty() && std::all_of(atoms.begin(), atoms.end(), [&](std::size_t a) {
        return labeled_support_[refs[a].predicate][static_cast<std::size_t>(refs[a].index)];
      });
    }));
  }
  return out;
}

}  // namespace kfol
