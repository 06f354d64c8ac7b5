#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kfol/fol.hpp"

namespace kfol {

/// One clause line, e.g. `[w=2.5, guard=Linked, name=transitivity] forall x forall y: ...`.
/// All options in the bracket prefix are optional.
struct ClauseEntry {
  std::string name;                  // defaults to "c<line ordinal>", 1-based
  std::optional<double> weight;      // lambda_v for this clause when set
  std::optional<std::string> guard;  // known predicate restricting the universal groundings
  std::string source;                // clause text without the option prefix
  std::size_t line = 0;              // 1-based line in the file
  ClauseAst ast;
};

/// Parses a clause file: one clause per line, '#' starts a comment, blank lines
/// ignored. Errors are rethrown with the line number prepended.
std::vector<ClauseEntry> parse_clause_file(std::string_view text, const std::vector<PredicateSignature>& signatures);

std::vector<ClauseEntry> read_clause_file(const std::string& path, const std::vector<PredicateSignature>& signatures);

}  // namespace kfol
