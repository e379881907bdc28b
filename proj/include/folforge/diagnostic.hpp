#pragma once

// Translation-error taxonomy: the fixed kind -> category table and the
// Diagnostic value every checker in the toolkit reports through.

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

#include "folforge/formula.hpp"

namespace folforge {

enum class Category { Parsing, Type, Token, Sense, Arities };

enum class DiagnosticKind {
  ParenthesisImbalance,
  InvalidOperatorSequence,
  CompletionError,
  MissingQuantifier,
  QuantifierLocation,
  MissingVariable,
  SpecialToken,
  UnknownOperator,
  PredicateError,
  IncorrectQuantifier,
  PredicateMismatch,
  ArityMismatch,
  SubjectPredicate,
};

inline constexpr DiagnosticKind kAllKinds[] = {
    DiagnosticKind::ParenthesisImbalance, DiagnosticKind::InvalidOperatorSequence,
    DiagnosticKind::CompletionError,      DiagnosticKind::MissingQuantifier,
    DiagnosticKind::QuantifierLocation,   DiagnosticKind::MissingVariable,
    DiagnosticKind::SpecialToken,         DiagnosticKind::UnknownOperator,
    DiagnosticKind::PredicateError,       DiagnosticKind::IncorrectQuantifier,
    DiagnosticKind::PredicateMismatch,    DiagnosticKind::ArityMismatch,
    DiagnosticKind::SubjectPredicate,
};

enum class Severity { Error, Lint };

Category category_of(DiagnosticKind kind);

std::string_view to_string(Category c);
std::string_view to_string(DiagnosticKind k);
std::string_view to_string(Severity s);
std::optional<DiagnosticKind> kind_from_string(std::string_view s);

struct Diagnostic {
  DiagnosticKind kind;
  Severity severity = Severity::Error;
  Span span;
  std::string message;
  // Offending symbol when there is one (variable, predicate, constant).
  std::string subject;
  // Index of the formula within a corpus; 0 for single-formula checks.
  std::size_t source = 0;

  Category category() const { return category_of(kind); }
  bool is_error() const { return severity == Severity::Error; }
};

Diagnostic make_diagnostic(DiagnosticKind kind, Severity severity, Span span, std::string message,
                           std::string subject = {}, std::size_t source = 0);

}  // namespace folforge
