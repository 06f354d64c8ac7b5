#pragma once

// First-order clause frontend: tokenizer, prenex-form parser, and printer.
//
// Grammar (ASCII keywords, whitespace-insensitive):
//
//   clause  := { quant IDENT } ':' iff          (prefix may be empty)
//   quant   := 'forall' | 'exists'
//   iff     := implies { '<->' implies }        (left-assoc)
//   implies := or [ '->' implies ]              (right-assoc)
//   or      := and { 'or' and }
//   and     := unary { 'and' unary }
//   unary   := 'not' unary | atom | '(' iff ')'
//   atom    := IDENT '(' IDENT { ',' IDENT } ')'
//
// Identifiers are [A-Za-z_][A-Za-z0-9_]* or a double-quoted string.

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "kfol/error.hpp"

namespace kfol {

enum class TokenKind {
  Forall, Exists, Identifier, LParen, RParen, Comma, Colon,
  And, Or, Not, Implies, Iff,
};

struct Token {
  TokenKind kind;
  std::string text;      // identifier text, empty for punctuation/keywords
  std::size_t position;  // byte offset into the source

  bool operator==(const Token&) const = default;
};

std::vector<Token> tokenize(std::string_view text);

enum class PredicateKind { Learnable, Known };

struct PredicateSignature {
  std::string name;
  std::size_t arity = 1;
  PredicateKind kind = PredicateKind::Learnable;
};

enum class Quantifier { Forall, Exists };

struct QuantifiedVariable {
  Quantifier quantifier;
  std::string name;

  bool operator==(const QuantifiedVariable&) const = default;
};

/// Quantifier-free clause body. Nodes are immutable and may be shared.
struct Expr {
  enum class Kind { Atom, Not, And, Or, Implies, Iff };

  Kind kind;
  std::string predicate;           // Atom only
  std::vector<std::string> args;   // Atom only, variable names
  std::shared_ptr<const Expr> lhs; // Not uses lhs only
  std::shared_ptr<const Expr> rhs;
  std::size_t position = 0;
};

using ExprPtr = std::shared_ptr<const Expr>;

ExprPtr make_atom(std::string predicate, std::vector<std::string> args, std::size_t position = 0);
ExprPtr make_not(ExprPtr child);
ExprPtr make_binary(Expr::Kind kind, ExprPtr lhs, ExprPtr rhs);

/// Structural equality (ignores source positions).
bool same_structure(const Expr& a, const Expr& b);

struct ClauseAst {
  std::vector<QuantifiedVariable> prefix;
  ExprPtr body;

  /// Index of `name` in the quantifier prefix, or prefix.size() if absent.
  std::size_t variable_index(std::string_view name) const;
};

bool same_structure(const ClauseAst& a, const ClauseAst& b);

ClauseAst parse_clause(const std::vector<Token>& tokens, const std::vector<PredicateSignature>& signatures);

inline ClauseAst parse_clause(std::string_view text, const std::vector<PredicateSignature>& signatures) {
  return parse_clause(tokenize(text), signatures);
}

/// Minimal-parenthesis rendering that reparses to the same structure.
std::string to_string(const Expr& expr);
std::string to_string(const ClauseAst& clause);

}  // namespace kfol
