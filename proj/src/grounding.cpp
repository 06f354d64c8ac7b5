#include "kfol/grounding.hpp"

#include <algorithm>
#include <limits>
#include <random>

namespace kfol {

NodeId GroundedGraph::add_node(Node node) {
  nodes_.push_back(std::move(node));
  return nodes_.size() - 1;
}

NodeId GroundedGraph::add_atom(AtomRef atom) {
  if (const auto it = atom_nodes_.find(atom); it != atom_nodes_.end()) return it->second;
  const std::size_t index = atoms_.size();
  atoms_.push_back(atom);
  const NodeId id = add_node({NodeKind::LearnableAtom, {}, 0, index});
  atom_nodes_.emplace(std::move(atom), id);
  return id;
}

std::vector<std::size_t> GroundedGraph::atoms_under(NodeId node) const {
  std::vector<bool> seen(nodes_.size(), false);
  std::vector<NodeId> stack{node};
  std::vector<std::size_t> out;
  while (!stack.empty()) {
    const NodeId n = stack.back();
    stack.pop_back();
    if (seen[n]) continue;
    seen[n] = true;
    if (nodes_[n].kind == NodeKind::LearnableAtom) out.push_back(nodes_[n].atom);
    for (const NodeId c : nodes_[n].children) stack.push_back(c);
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

constexpr std::size_t kSaturated = std::numeric_limits<std::size_t>::max();

std::size_t saturating_mul(std::size_t a, std::size_t b) {
  if (a != 0 && b > kSaturated / a) return kSaturated;
  return a * b;
}

std::size_t saturating_pow(std::size_t base, std::size_t exp) {
  std::size_t r = 1;
  for (std::size_t i = 0; i < exp; ++i) r = saturating_mul(r, base);
  return r;
}

using Kind = GroundedGraph::NodeKind;

class Compiler {
 public:
  Compiler(const ClauseAst& clause, std::span<const SampleId> domain, const KnownTables& known)
      : clause_(clause), domain_(domain), known_(known), binding_(clause.prefix.size(), 0) {}

  // Truth node of the quantifier suffix starting at `level` under the current binding.
  NodeId expand(std::size_t level) {
    if (level == clause_.prefix.size()) return body(*clause_.body);
    std::vector<NodeId> children;
    children.reserve(domain_.size());
    for (const SampleId id : domain_) {
      binding_[level] = id;
      children.push_back(expand(level + 1));
    }
    const Kind kind = clause_.prefix[level].quantifier == Quantifier::Forall ? Kind::UniversalMean : Kind::ExistentialProduct;
    return graph_.add_node({kind, std::move(children)});
  }

  void bind(std::size_t level, SampleId id) { binding_[level] = id; }

  NodeId constant(double value) { return graph_.add_node({Kind::KnownConst, {}, value}); }
  NodeId negate(NodeId n) { return graph_.add_node({Kind::Not, {n}}); }
  NodeId conj(NodeId a, NodeId b) { return graph_.add_node({Kind::And, {a, b}}); }
  NodeId implies(NodeId a, NodeId b) { return negate(conj(a, negate(b))); }

  GroundedGraph& graph() { return graph_; }

 private:
  NodeId body(const Expr& e) {
    switch (e.kind) {
      case Expr::Kind::Atom:
        return atom(e);
      case Expr::Kind::Not:
        return negate(body(*e.lhs));
      case Expr::Kind::And:
        return conj(body(*e.lhs), body(*e.rhs));
      case Expr::Kind::Or: {
        const NodeId a = body(*e.lhs);
        const NodeId b = body(*e.rhs);
        return graph_.add_node({Kind::Or, {a, b}});
      }
      case Expr::Kind::Implies: {
        const NodeId a = body(*e.lhs);
        const NodeId b = body(*e.rhs);
        return implies(a, b);
      }
      case Expr::Kind::Iff: {
        const NodeId a = body(*e.lhs);
        const NodeId b = body(*e.rhs);
        return conj(implies(a, b), implies(b, a));
      }
    }
    return 0;
  }

  NodeId atom(const Expr& e) {
    IdTuple args;
    args.reserve(e.args.size());
    for (const auto& v : e.args) args.push_back(binding_[clause_.variable_index(v)]);
    if (const auto it = known_.find(e.predicate); it != known_.end()) {
      if (it->second.arity != args.size()) {
        throw Error(Errc::ArityMismatch, "known predicate '" + e.predicate + "' has arity " +
                                             std::to_string(it->second.arity) + ", atom uses " +
                                             std::to_string(args.size()),
                    e.position);
      }
      return constant(it->second.value(args));
    }
    return graph_.add_atom({e.predicate, std::move(args)});
  }

  const ClauseAst& clause_;
  std::span<const SampleId> domain_;
  const KnownTables& known_;
  std::vector<SampleId> binding_;
  GroundedGraph graph_;
};

struct LeadingTuple {
  IdTuple ids;
  double guard;
};

// Cartesian enumeration of `width` variables over the domain, in lexicographic
// order of domain positions.
template <typename Visit>
void for_each_tuple(std::span<const SampleId> domain, std::size_t width, Visit&& visit) {
  if (domain.empty() && width > 0) return;
  std::vector<std::size_t> pos(width, 0);
  IdTuple ids(width, domain.empty() ? 0 : domain[0]);
  while (true) {
    visit(ids);
    std::size_t k = width;
    while (k > 0) {
      --k;
      if (++pos[k] < domain.size()) {
        ids[k] = domain[pos[k]];
        break;
      }
      pos[k] = 0;
      ids[k] = domain[0];
      if (k == 0) return;
    }
    if (width == 0) return;
  }
}

}  // namespace

std::size_t grounding_count(const ClauseAst& clause, std::size_t domain_size) {
  return saturating_pow(domain_size, clause.prefix.size());
}

GroundedGraph ground_clause(const ClauseAst& clause, std::span<const SampleId> domain, const KnownTables& known,
                            const std::optional<std::string>& guard, const GroundingOptions& options) {
  std::size_t leading = 0;
  while (leading < clause.prefix.size() && clause.prefix[leading].quantifier == Quantifier::Forall) ++leading;
  const std::size_t inner = clause.prefix.size() - leading;

  const KnownPredicateTable* guard_table = nullptr;
  if (guard) {
    const auto it = known.find(*guard);
    if (it == known.end()) {
      throw Error(Errc::UnknownGuardPredicate, "guard '" + *guard + "' is not a known predicate");
    }
    guard_table = &it->second;
    const bool trailing_forall = std::any_of(clause.prefix.begin() + static_cast<std::ptrdiff_t>(leading),
                                             clause.prefix.end(),
                                             [](const QuantifiedVariable& v) { return v.quantifier == Quantifier::Forall; });
    if (trailing_forall) {
      throw Error(Errc::InvalidConfig, "a guard requires every universal variable to precede the existential ones");
    }
    if (guard_table->arity != leading) {
      throw Error(Errc::ArityMismatch, "guard '" + *guard + "' has arity " + std::to_string(guard_table->arity) +
                                           " but the clause has " + std::to_string(leading) + " universal variables");
    }
  }

  // Admitted assignments of the leading universal block.
  std::vector<LeadingTuple> admitted;
  std::size_t leading_count = saturating_pow(domain.size(), leading);
  if (guard_table) {
    if (guard_table->default_value > 0) {
      if (leading_count > options.max_groundings && options.subsample == 0) {
        throw Error(Errc::GroundingTooLarge, std::to_string(saturating_mul(leading_count, saturating_pow(domain.size(), inner))) +
                                                 " groundings exceed the cap of " + std::to_string(options.max_groundings));
      }
      for_each_tuple(domain, leading, [&](const IdTuple& ids) {
        const double d = guard_table->value(ids);
        if (d > 0) admitted.push_back({ids, d});
      });
    } else {
      for (const auto& [ids, d] : guard_table->entries) {
        const bool inside = std::all_of(ids.begin(), ids.end(), [&](SampleId id) {
          return std::binary_search(domain.begin(), domain.end(), id);
        });
        if (inside && d > 0) admitted.push_back({ids, d});
      }
    }
    leading_count = admitted.size();
  }

  const std::size_t enumerated = options.subsample > 0 ? options.subsample : leading_count;
  const std::size_t total = saturating_mul(enumerated, saturating_pow(domain.size(), inner));
  if (total > options.max_groundings) {
    throw Error(Errc::GroundingTooLarge,
                std::to_string(total) + " groundings exceed the cap of " + std::to_string(options.max_groundings));
  }

  Compiler compiler(clause, domain, known);
  GroundedGraph& graph = compiler.graph();
  std::vector<std::string> names;
  for (std::size_t i = 0; i < leading; ++i) names.push_back(clause.prefix[i].name);
  graph.set_grounding_variables(std::move(names));

  std::vector<NodeId> truths;
  auto emit = [&](const IdTuple& ids, double d) {
    for (std::size_t i = 0; i < leading; ++i) compiler.bind(i, ids[i]);
    NodeId truth = compiler.expand(leading);
    if (guard_table) truth = compiler.implies(compiler.constant(d), truth);
    graph.add_grounding({ids, truth, d});
    truths.push_back(truth);
  };

  if (leading == 0) {
    emit({}, 1.0);
  } else if (options.subsample > 0) {
    std::mt19937_64 rng(options.seed);
    if (guard_table) {
      if (!admitted.empty()) {
        std::uniform_int_distribution<std::size_t> pick(0, admitted.size() - 1);
        for (std::size_t s = 0; s < options.subsample; ++s) {
          const auto& t = admitted[pick(rng)];
          emit(t.ids, t.guard);
        }
      }
    } else if (!domain.empty()) {
      std::uniform_int_distribution<std::size_t> pick(0, domain.size() - 1);
      IdTuple ids(leading);
      for (std::size_t s = 0; s < options.subsample; ++s) {
        for (auto& id : ids) id = domain[pick(rng)];
        emit(ids, 1.0);
      }
    }
  } else if (guard_table) {
    for (const auto& t : admitted) emit(t.ids, t.guard);
  } else {
    for_each_tuple(domain, leading, [&](const IdTuple& ids) { emit(ids, 1.0); });
  }

  const NodeId truth_root = leading == 0 ? truths.front() : graph.add_node({Kind::UniversalMean, truths});
  graph.set_root(graph.add_node({Kind::OneMinus, {truth_root}}));
  graph.set_instantiations(saturating_mul(truths.size(), saturating_pow(domain.size(), inner)));
  return std::move(graph);
}

namespace {

double node_value(const GroundedGraph::Node& n, std::span<const double> v, const TNorm& tnorm) {
  switch (n.kind) {
    case Kind::KnownConst:
      return n.constant;
    case Kind::Not:
    case Kind::OneMinus:
      return 1.0 - v[n.children[0]];
    case Kind::And:
      return tnorm.conj(v[n.children[0]], v[n.children[1]]);
    case Kind::Or:
      return tnorm.disj(v[n.children[0]], v[n.children[1]]);
    case Kind::UniversalMean: {
      if (n.children.empty()) return 1.0;
      double sum = 0;
      for (const NodeId c : n.children) sum += v[c];
      return sum / static_cast<double>(n.children.size());
    }
    case Kind::ExistentialProduct: {
      if (n.children.empty()) return 0.0;
      double acc = v[n.children[0]];
      for (std::size_t i = 1; i < n.children.size(); ++i) acc = tnorm.disj(acc, v[n.children[i]]);
      return acc;
    }
    case Kind::LearnableAtom:
      break;
  }
  return 0;
}

}  // namespace

GraphValues eval_graph(const GroundedGraph& graph, std::span<const double> atom_raw, const TNorm& tnorm) {
  if (atom_raw.size() != graph.atoms().size()) {
    throw Error(Errc::MissingAtomValue, "expected " + std::to_string(graph.atoms().size()) + " atom values, got " +
                                            std::to_string(atom_raw.size()));
  }
  GraphValues out;
  out.atom_raw.assign(atom_raw.begin(), atom_raw.end());
  const auto nodes = graph.nodes();
  out.node_values.resize(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto& n = nodes[i];
    out.node_values[i] = n.kind == Kind::LearnableAtom ? squash(atom_raw[n.atom]) : node_value(n, out.node_values, tnorm);
  }
  out.penalty = out.node_values[graph.root()];
  return out;
}

GraphValues eval_graph(const GroundedGraph& graph, const AtomEvaluator& predict, const TNorm& tnorm) {
  std::vector<double> raw;
  raw.reserve(graph.atoms().size());
  for (const auto& atom : graph.atoms()) {
    const auto f = predict(atom);
    if (!f) {
      std::string args;
      for (const SampleId id : atom.args) args += (args.empty() ? "" : ",") + std::to_string(id);
      throw Error(Errc::MissingAtomValue, "no value for " + atom.predicate + "(" + args + ")");
    }
    raw.push_back(*f);
  }
  return eval_graph(graph, raw, tnorm);
}

std::vector<double> backprop_graph(const GroundedGraph& graph, const GraphValues& values, double upstream,
                                   const TNorm& tnorm) {
  const auto nodes = graph.nodes();
  if (values.node_values.size() != nodes.size() || values.atom_raw.size() != graph.atoms().size()) {
    throw Error(Errc::MissingAtomValue, "cached values do not belong to this graph");
  }
  const auto& v = values.node_values;
  std::vector<double> adj(nodes.size(), 0.0);
  std::vector<double> grad(graph.atoms().size(), 0.0);
  std::vector<double> prefix;
  adj[graph.root()] = upstream;

  for (std::size_t i = nodes.size(); i-- > 0;) {
    const double g = adj[i];
    if (g == 0.0) continue;
    const auto& n = nodes[i];
    switch (n.kind) {
      case Kind::LearnableAtom:
        grad[n.atom] += g * squash_derivative(values.atom_raw[n.atom]);
        break;
      case Kind::KnownConst:
        break;
      case Kind::Not:
      case Kind::OneMinus:
        adj[n.children[0]] -= g;
        break;
      case Kind::And: {
        const auto [pa, pb] = tnorm.conj_partials(v[n.children[0]], v[n.children[1]]);
        adj[n.children[0]] += g * pa;
        adj[n.children[1]] += g * pb;
        break;
      }
      case Kind::Or: {
        const auto [pa, pb] = tnorm.disj_partials(v[n.children[0]], v[n.children[1]]);
        adj[n.children[0]] += g * pa;
        adj[n.children[1]] += g * pb;
        break;
      }
      case Kind::UniversalMean: {
        const double share = g / static_cast<double>(n.children.size());
        for (const NodeId c : n.children) adj[c] += share;
        break;
      }
      case Kind::ExistentialProduct: {
        // Replay the left fold, then walk it backwards.
        const std::size_t k = n.children.size();
        if (k == 0) break;
        prefix.resize(k);
        prefix[0] = v[n.children[0]];
        for (std::size_t j = 1; j < k; ++j) prefix[j] = tnorm.disj(prefix[j - 1], v[n.children[j]]);
        double carry = g;
        for (std::size_t j = k; j-- > 1;) {
          const auto [p_acc, p_child] = tnorm.disj_partials(prefix[j - 1], v[n.children[j]]);
          adj[n.children[j]] += carry * p_child;
          carry *= p_acc;
        }
        adj[n.children[0]] += carry;
        break;
      }
    }
  }
  return grad;
}

double restricted_penalty(const GroundedGraph& graph, const GraphValues& values,
                          const std::function<bool(const GroundedGraph::Grounding&)>& keep) {
  double sum = 0;
  std::size_t count = 0;
  for (const auto& g : graph.groundings()) {
    if (!keep(g)) continue;
    sum += 1.0 - values.node_values[g.truth];
    ++count;
  }
  return count == 0 ? 0.0 : sum / static_cast<double>(count);
}

std::string dump_graph(const GroundedGraph& graph, const GraphValues* values) {
  static constexpr const char* kNames[] = {"atom", "const", "not", "and", "or", "forall_mean", "exists_prod", "one_minus"};
  std::string out;
  const auto nodes = graph.nodes();
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto& n = nodes[i];
    out += std::to_string(i) + ' ' + kNames[static_cast<int>(n.kind)];
    if (n.kind == Kind::LearnableAtom) {
      const auto& a = graph.atoms()[n.atom];
      out += ' ' + a.predicate + '(';
      for (std::size_t j = 0; j < a.args.size(); ++j) out += (j ? "," : "") + std::to_string(a.args[j]);
      out += ')';
    } else if (n.kind == Kind::KnownConst) {
      out += ' ' + format_double(n.constant);
    }
    out += " [";
    for (std::size_t j = 0; j < n.children.size(); ++j) out += (j ? " " : "") + std::to_string(n.children[j]);
    out += ']';
    if (values) out += " = " + format_double(values->node_values[i]);
    if (i == graph.root()) out += " root";
    out += '\n';
  }
  return out;
}

}  // namespace kfol
