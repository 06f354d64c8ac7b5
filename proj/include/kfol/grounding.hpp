#pragma once

// Compiles a prenex clause against the pooled sample set into a DAG whose
// root is the clause penalty under product t-norm semantics:
//
//   forall x: E      truth = mean over x in S of truth(E)
//   exists x: E      truth = 1 - prod over x in S of (1 - truth(E))
//   penalty          = 1 - truth(root)
//
// so a pure universal clause yields 1/|S|^q sum (1 - e) and a pure existential
// clause yields prod (1 - e). Implication A -> B is compiled as not(A and not B),
// A <-> B as (A -> B) and (B -> A). With a guard predicate d over the leading
// universal variables, only tuples with d > 0 are enumerated and each grounding
// contributes d * (1 - e) to the mean.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kfol/clause_file.hpp"
#include "kfol/data.hpp"
#include "kfol/fol.hpp"
#include "kfol/tnorm.hpp"

namespace kfol {

using NodeId = std::size_t;

struct AtomRef {
  std::string predicate;
  IdTuple args;

  auto operator<=>(const AtomRef&) const = default;
};

class GroundedGraph {
 public:
  enum class NodeKind { LearnableAtom, KnownConst, Not, And, Or, UniversalMean, ExistentialProduct, OneMinus };

  struct Node {
    NodeKind kind;
    std::vector<NodeId> children;  // always lower ids than the node itself
    double constant = 0;           // KnownConst
    std::size_t atom = 0;          // LearnableAtom: index into atoms()
  };

  /// One assignment of the leading universal variables (empty `ids` when the
  /// prefix starts with an existential). `truth` is the node holding the
  /// grounding's truth value, guard already applied.
  struct Grounding {
    IdTuple ids;
    NodeId truth;
    double guard = 1;
  };

  std::span<const Node> nodes() const { return nodes_; }
  std::span<const AtomRef> atoms() const { return atoms_; }
  std::span<const Grounding> groundings() const { return groundings_; }
  NodeId root() const { return root_; }
  /// Body instantiations produced by the expansion.
  std::size_t instantiations() const { return instantiations_; }

  /// Names of the leading universal variables, matching Grounding::ids.
  std::span<const std::string> grounding_variables() const { return grounding_variables_; }

  /// Learnable atom indices reachable from `node`.
  std::vector<std::size_t> atoms_under(NodeId node) const;

  NodeId add_node(Node node);
  NodeId add_atom(AtomRef atom);
  void add_grounding(Grounding g) { groundings_.push_back(std::move(g)); }
  void set_root(NodeId root) { root_ = root; }
  void set_instantiations(std::size_t n) { instantiations_ = n; }
  void set_grounding_variables(std::vector<std::string> names) { grounding_variables_ = std::move(names); }

 private:
  std::vector<Node> nodes_;
  std::vector<AtomRef> atoms_;
  std::map<AtomRef, NodeId> atom_nodes_;
  std::vector<Grounding> groundings_;
  std::vector<std::string> grounding_variables_;
  NodeId root_ = 0;
  std::size_t instantiations_ = 0;
};

struct GroundingOptions {
  std::size_t max_groundings = 1'000'000;
  /// When nonzero, draw this many leading universal groundings uniformly with
  /// replacement instead of enumerating them all (an approximation).
  std::size_t subsample = 0;
  std::uint64_t seed = 0;
};

/// Known predicates by name.
using KnownTables = std::map<std::string, KnownPredicateTable>;

/// Number of body instantiations a full expansion of `clause` would produce,
/// saturating at SIZE_MAX.
std::size_t grounding_count(const ClauseAst& clause, std::size_t domain_size);

GroundedGraph ground_clause(const ClauseAst& clause, std::span<const SampleId> domain, const KnownTables& known,
                            const std::optional<std::string>& guard = std::nullopt, const GroundingOptions& options = {});

struct GraphValues {
  double penalty = 0;
  std::vector<double> node_values;
  std::vector<double> atom_raw;  // pre-squash f value per atom
};

/// Returns the pre-squash value f_k(args), or nullopt when unavailable.
using AtomEvaluator = std::function<std::optional<double>(const AtomRef&)>;

GraphValues eval_graph(const GroundedGraph& graph, const AtomEvaluator& predict, const TNorm& tnorm = product_tnorm());

/// Same, with raw atom values supplied positionally (size must equal atoms().size()).
GraphValues eval_graph(const GroundedGraph& graph, std::span<const double> atom_raw, const TNorm& tnorm = product_tnorm());

/// d(upstream * penalty) / d(raw f) per atom, using cached values from eval_graph.
std::vector<double> backprop_graph(const GroundedGraph& graph, const GraphValues& values, double upstream = 1.0,
                                   const TNorm& tnorm = product_tnorm());

/// Mean of (1 - truth) over the groundings accepted by `keep`; 0 if none.
double restricted_penalty(const GroundedGraph& graph, const GraphValues& values,
                          const std::function<bool(const GroundedGraph::Grounding&)>& keep);

/// Plain-text listing, one node per line: id, kind, children, cached value.
std::string dump_graph(const GroundedGraph& graph, const GraphValues* values = nullptr);

}  // namespace kfol
