#include "kfol/fol.hpp"

#include <algorithm>
#include <cctype>

namespace kfol {

namespace {

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

TokenKind keyword_or_identifier(std::string_view word) {
  if (word == "forall") return TokenKind::Forall;
  if (word == "exists") return TokenKind::Exists;
  if (word == "and") return TokenKind::And;
  if (word == "or") return TokenKind::Or;
  if (word == "not") return TokenKind::Not;
  return TokenKind::Identifier;
}

}  // namespace

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    switch (c) {
      case '(': out.push_back({TokenKind::LParen, {}, start}); ++i; continue;
      case ')': out.push_back({TokenKind::RParen, {}, start}); ++i; continue;
      case ',': out.push_back({TokenKind::Comma, {}, start}); ++i; continue;
      case ':': out.push_back({TokenKind::Colon, {}, start}); ++i; continue;
      default: break;
    }
    if (text.substr(i, 3) == "<->") {
      out.push_back({TokenKind::Iff, {}, start});
      i += 3;
      continue;
    }
    if (text.substr(i, 2) == "->") {
      out.push_back({TokenKind::Implies, {}, start});
      i += 2;
      continue;
    }
    if (c == '"') {
      const std::size_t close = text.find('"', i + 1);
      if (close == std::string_view::npos) {
        throw Error(Errc::UnterminatedIdentifier, "quoted identifier starting at " + std::to_string(start) + " is not closed",
                    start);
      }
      if (close == i + 1) throw Error(Errc::SyntaxError, "empty quoted identifier", start);
      out.push_back({TokenKind::Identifier, std::string(text.substr(i + 1, close - i - 1)), start});
      i = close + 1;
      continue;
    }
    if (is_ident_start(c)) {
      std::size_t j = i + 1;
      while (j < text.size() && is_ident_char(text[j])) ++j;
      const std::string_view word = text.substr(i, j - i);
      const TokenKind kind = keyword_or_identifier(word);
      out.push_back({kind, kind == TokenKind::Identifier ? std::string(word) : std::string{}, start});
      i = j;
      continue;
    }
    throw Error(Errc::UnknownCharacter, std::string("unexpected character '") + c + "' at " + std::to_string(start), start);
  }
  return out;
}

ExprPtr make_atom(std::string predicate, std::vector<std::string> args, std::size_t position) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Atom;
  e->predicate = std::move(predicate);
  e->args = std::move(args);
  e->position = position;
  return e;
}

ExprPtr make_not(ExprPtr child) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Not;
  e->position = child->position;
  e->lhs = std::move(child);
  return e;
}

ExprPtr make_binary(Expr::Kind kind, ExprPtr lhs, ExprPtr rhs) {
  auto e = std::make_shared<Expr>();
  e->kind = kind;
  e->position = lhs->position;
  e->lhs = std::move(lhs);
  e->rhs = std::move(rhs);
  return e;
}

bool same_structure(const Expr& a, const Expr& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Expr::Kind::Atom:
      return a.predicate == b.predicate && a.args == b.args;
    case Expr::Kind::Not:
      return same_structure(*a.lhs, *b.lhs);
    default:
      return same_structure(*a.lhs, *b.lhs) && same_structure(*a.rhs, *b.rhs);
  }
}

bool same_structure(const ClauseAst& a, const ClauseAst& b) {
  return a.prefix == b.prefix && same_structure(*a.body, *b.body);
}

std::size_t ClauseAst::variable_index(std::string_view name) const {
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (prefix[i].name == name) return i;
  }
  return prefix.size();
}

namespace {

class Parser {
 public:
  Parser(const std::vector<Token>& tokens, const std::vector<PredicateSignature>& signatures)
      : tokens_(tokens), signatures_(signatures) {}

  ClauseAst parse() {
    ClauseAst clause;
    while (peek(TokenKind::Forall) || peek(TokenKind::Exists)) {
      const Quantifier q = next().kind == TokenKind::Forall ? Quantifier::Forall : Quantifier::Exists;
      const Token& var = expect(TokenKind::Identifier, "variable name");
      if (clause.variable_index(var.text) != clause.prefix.size()) {
        throw Error(Errc::DuplicateVariable, "variable '" + var.text + "' quantified twice", var.position);
      }
      clause.prefix.push_back({q, var.text});
    }
    if (!clause.prefix.empty()) expect(TokenKind::Colon, "':' after quantifier prefix");
    prefix_ = &clause.prefix;
    clause.body = parse_iff();
    if (pos_ != tokens_.size()) {
      throw Error(Errc::SyntaxError, "unexpected trailing token", tokens_[pos_].position);
    }
    return clause;
  }

 private:
  ExprPtr parse_iff() {
    ExprPtr lhs = parse_implies();
    while (accept(TokenKind::Iff)) lhs = make_binary(Expr::Kind::Iff, lhs, parse_implies());
    return lhs;
  }

  ExprPtr parse_implies() {
    ExprPtr lhs = parse_or();
    if (accept(TokenKind::Implies)) return make_binary(Expr::Kind::Implies, lhs, parse_implies());
    return lhs;
  }

  ExprPtr parse_or() {
    ExprPtr lhs = parse_and();
    while (accept(TokenKind::Or)) lhs = make_binary(Expr::Kind::Or, lhs, parse_and());
    return lhs;
  }

  ExprPtr parse_and() {
    ExprPtr lhs = parse_unary();
    while (accept(TokenKind::And)) lhs = make_binary(Expr::Kind::And, lhs, parse_unary());
    return lhs;
  }

  ExprPtr parse_unary() {
    if (pos_ >= tokens_.size()) throw Error(Errc::SyntaxError, "unexpected end of clause", end_position());
    const Token& tok = tokens_[pos_];
    switch (tok.kind) {
      case TokenKind::Not:
        ++pos_;
        return make_not(parse_unary());
      case TokenKind::LParen: {
        ++pos_;
        ExprPtr inner = parse_iff();
        expect(TokenKind::RParen, "')'");
        return inner;
      }
      case TokenKind::Forall:
      case TokenKind::Exists:
        throw Error(Errc::NestedQuantifier, "quantifiers are only allowed in the leading prefix", tok.position);
      case TokenKind::Identifier:
        return parse_atom();
      default:
        throw Error(Errc::SyntaxError, "expected an atom, 'not' or '('", tok.position);
    }
  }

  ExprPtr parse_atom() {
    const Token& name = next();
    const auto sig = std::find_if(signatures_.begin(), signatures_.end(),
                                  [&](const PredicateSignature& s) { return s.name == name.text; });
    if (sig == signatures_.end()) {
      throw Error(Errc::UnknownPredicate, "unknown predicate '" + name.text + "'", name.position);
    }
    expect(TokenKind::LParen, "'(' after predicate name");
    std::vector<std::string> args;
    do {
      const Token& var = expect(TokenKind::Identifier, "variable name");
      if (std::none_of(prefix_->begin(), prefix_->end(), [&](const QuantifiedVariable& v) { return v.name == var.text; })) {
        throw Error(Errc::UnboundVariable, "variable '" + var.text + "' is not quantified", var.position);
      }
      args.push_back(var.text);
    } while (accept(TokenKind::Comma));
    expect(TokenKind::RParen, "')'");
    if (args.size() != sig->arity) {
      throw Error(Errc::ArityMismatch,
                  "predicate '" + sig->name + "' expects " + std::to_string(sig->arity) + " arguments, got " +
                      std::to_string(args.size()),
                  name.position);
    }
    return make_atom(name.text, std::move(args), name.position);
  }

  bool peek(TokenKind kind) const { return pos_ < tokens_.size() && tokens_[pos_].kind == kind; }

  bool accept(TokenKind kind) {
    if (!peek(kind)) return false;
    ++pos_;
    return true;
  }

  const Token& next() { return tokens_[pos_++]; }

  const Token& expect(TokenKind kind, const char* what) {
    if (pos_ >= tokens_.size()) {
      throw Error(Errc::SyntaxError, std::string("expected ") + what + " at end of clause", end_position());
    }
    if (tokens_[pos_].kind != kind) {
      throw Error(Errc::SyntaxError, std::string("expected ") + what, tokens_[pos_].position);
    }
    return next();
  }

  std::size_t end_position() const {
    if (tokens_.empty()) return 0;
    const Token& last = tokens_.back();
    return last.position + std::max<std::size_t>(1, last.text.size());
  }

  const std::vector<Token>& tokens_;
  const std::vector<PredicateSignature>& signatures_;
  const std::vector<QuantifiedVariable>* prefix_ = nullptr;
  std::size_t pos_ = 0;
};

int precedence(Expr::Kind kind) {
  switch (kind) {
    case Expr::Kind::Iff: return 1;
    case Expr::Kind::Implies: return 2;
    case Expr::Kind::Or: return 3;
    case Expr::Kind::And: return 4;
    case Expr::Kind::Not: return 5;
    case Expr::Kind::Atom: return 6;
  }
  return 0;
}

std::string identifier(const std::string& name) {
  const bool plain = !name.empty() && is_ident_start(name.front()) &&
                     std::all_of(name.begin(), name.end(), is_ident_char) &&
                     keyword_or_identifier(name) == TokenKind::Identifier;
  return plain ? name : '"' + name + '"';
}

void print(const Expr& e, int min_prec, std::string& out) {
  const int p = precedence(e.kind);
  const bool parens = p < min_prec;
  if (parens) out += '(';
  switch (e.kind) {
    case Expr::Kind::Atom:
      out += identifier(e.predicate);
      out += '(';
      for (std::size_t i = 0; i < e.args.size(); ++i) {
        if (i) out += ", ";
        out += identifier(e.args[i]);
      }
      out += ')';
      break;
    case Expr::Kind::Not:
      out += "not ";
      print(*e.lhs, p, out);
      break;
    case Expr::Kind::Implies:
      print(*e.lhs, p + 1, out);
      out += " -> ";
      print(*e.rhs, p, out);
      break;
    default: {
      const char* op = e.kind == Expr::Kind::And ? " and " : e.kind == Expr::Kind::Or ? " or " : " <-> ";
      print(*e.lhs, p, out);
      out += op;
      print(*e.rhs, p + 1, out);
      break;
    }
  }
  if (parens) out += ')';
}

}  // namespace

ClauseAst parse_clause(const std::vector<Token>& tokens, const std::vector<PredicateSignature>& signatures) {
  return Parser(tokens, signatures).parse();
}

std::string to_string(const Expr& expr) {
  std::string out;
  print(expr, 0, out);
  return out;
}

std::string to_string(const ClauseAst& clause) {
  std::string out;
  for (const auto& v : clause.prefix) {
    out += v.quantifier == Quantifier::Forall ? "forall " : "exists ";
    out += identifier(v.name);
    out += ' ';
  }
  if (!clause.prefix.empty()) {
    out.back() = ':';
    out += ' ';
  }
  out += to_string(*clause.body);
  return out;
}

}  // namespace kfol
