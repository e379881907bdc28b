#pragma once

// Lexing, parsing and printing of formula text.
//
// Accepted operator spellings:
//
//   not      ¬  -        and  ∧  &        or  ∨  |
//   implies  →  ->       iff  ↔  <->      xor ⊕
//   forall   ∀  all      exists ∃ exists
//
// Quantifier blocks take one or more comma-separated variables and may be
// stacked in any order (∀x ∃y ∀z, ∀x,y). A quantifier's scope extends as far
// to the right as possible. Binding strength, tightest first: not, and, or,
// xor, implies, iff; every binary connective groups to the right.

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "folforge/diagnostic.hpp"
#include "folforge/formula.hpp"

namespace folforge {

enum class TokenKind {
  Identifier,
  LParen,
  RParen,
  Comma,
  Not,
  And,
  Or,
  Implies,
  Iff,
  Xor,
  Forall,
  Exists,
  SpecialChar,     // character outside the formula alphabet ($ . : ...)
  UnknownOperator, // operator outside the fixed alphabet (> < = + ...)
  End,
};

struct Token {
  TokenKind kind;
  Span span;
  std::string text;
};

/// Never fails: characters outside the alphabet become SpecialChar or
/// UnknownOperator tokens so the parser can report the leftmost problem.
std::vector<Token> tokenize(std::string_view text);

/// Why the recursive-descent parser stopped.
struct ParseFailure {
  enum class Reason {
    UnexpectedToken,   // a token that cannot appear here
    UnexpectedEnd,     // input ended inside a formula
    TrailingInput,     // a complete formula followed by more tokens
    BadCharacter,      // SpecialChar / UnknownOperator token reached
    MissingVariable,   // quantifier symbol without a variable list
    RepeatedVariable,  // the same name twice in one quantifier block
  };

  Reason reason;
  Token token;       // token at the failure point (End for UnexpectedEnd)
  int paren_depth;   // open-paren depth at the failure point
  std::string expected;
};

/// Parses without classification; the building block of parse().
std::variant<Formula, ParseFailure> parse_raw(std::string_view text);

class ParseResult {
 public:
  explicit ParseResult(Formula f) : value_(std::move(f)) {}
  explicit ParseResult(Diagnostic d) : value_(std::move(d)) {}

  bool ok() const { return std::holds_alternative<Formula>(value_); }
  explicit operator bool() const { return ok(); }
  const Formula& formula() const { return std::get<Formula>(value_); }
  const Diagnostic& diagnostic() const { return std::get<Diagnostic>(value_); }

 private:
  std::variant<Formula, Diagnostic> value_;
};

/// Parses one formula; failures are classified into a single Diagnostic.
ParseResult parse(std::string_view text);

enum class PrintStyle { Unicode, Ascii };

/// Canonical text. Ascii has no xor symbol, so Xor(a, b) prints as
/// ((a | b) & -(a & b)).
std::string print(const Formula& f, PrintStyle style = PrintStyle::Unicode);
std::string print(const Term& t);

}  // namespace folforge
