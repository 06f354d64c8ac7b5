#pragma once

#include <string>
#include <vector>

#include "kfol/clause_file.hpp"
#include "kfol/config.hpp"
#include "kfol/data.hpp"
#include "kfol/grounding.hpp"
#include "kfol/kernel.hpp"

namespace kfol {

struct LearnablePredicate {
  PredicateSignature signature;
  KernelSpec kernel;
  LabeledSet labels;
};

/// A fully loaded and cross-validated learning problem.
struct Problem {
  SampleSet samples;
  std::vector<SampleId> unlabeled;
  std::vector<SampleId> domain;  // pooled S = labeled arguments and unlabeled ids
  std::vector<PredicateSignature> signatures;
  std::vector<LearnablePredicate> learnable;
  KnownTables known;
  std::vector<ClauseEntry> clauses;
  ObjectiveConfig objective;
  TrainConfig train;
  GroundingOptions grounding;
  std::size_t support_cap = 5000;

  const LearnablePredicate* find_learnable(const std::string& name) const;
  std::vector<LabeledSet> labeled_sets() const;
};

/// Loads a JSON problem description; relative paths resolve against the
/// directory containing the config file. See README for the key reference.
Problem load_problem(const std::string& config_path);

/// Checks every cross reference (ids, predicate names, arities, weights) and
/// recomputes the pooled domain.
void finalize_problem(Problem& problem);

/// Writes the problem (config plus CSV/clause files) into `dir`.
void save_problem(const Problem& problem, const std::string& dir);

}  // namespace kfol
