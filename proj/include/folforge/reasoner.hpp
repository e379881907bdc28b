#pragma once

// Deductive labelling of (premises, conclusion) pairs.
//
// prove() clausifies, grounds the clauses over a depth-bounded Herbrand
// universe and decides the ground set with DPLL. Grounding over a subset of
// the Herbrand universe preserves unsatisfiability, so True/False answers are
// always sound; a truncated universe can only weaken an answer to Unknown.

#include <chrono>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "folforge/diagnostic.hpp"
#include "folforge/formula.hpp"
#include "folforge/normal_form.hpp"

namespace folforge::reasoner {

struct Budget {
  std::size_t max_ground_clauses = 100000;
  // 1: skolem/function symbols applied to constants only.
  std::size_t max_term_depth = 1;
  std::chrono::milliseconds wall_time{10000};
};

/// Throws std::invalid_argument unless every field is positive.
void validate(const Budget& budget);

class Outcome {
 public:
  enum class Value { True, False, Unknown, Error, Exhausted };

  static Outcome truth(bool value) { return Outcome(value ? Value::True : Value::False); }
  static Outcome unknown() { return Outcome(Value::Unknown); }
  static Outcome exhausted() { return Outcome(Value::Exhausted); }
  static Outcome error(Diagnostic d) { return Outcome(Value::Error, std::move(d)); }

  Value value() const { return value_; }
  const std::optional<Diagnostic>& diagnostic() const { return diagnostic_; }
  bool decisive() const { return value_ == Value::True || value_ == Value::False; }

  /// "True" | "False" | "Unknown" | "Error:<kind>" | "Exhausted"
  std::string to_string() const;

  bool operator==(const Outcome& other) const { return to_string() == other.to_string(); }

 private:
  explicit Outcome(Value v, std::optional<Diagnostic> d = std::nullopt) : value_(v), diagnostic_(std::move(d)) {}

  Value value_;
  std::optional<Diagnostic> diagnostic_;
};

/// Gold-label spelling used in datasets; "Uncertain" is accepted for Unknown.
std::optional<Outcome::Value> label_from_string(std::string_view s);
std::string_view label_to_string(Outcome::Value v);

struct ProveResult {
  Outcome outcome;
  // Set only in strict mode: premises alone are unsatisfiable.
  bool contradictory_premises = false;
};

/// Free variables are universally closed before proving. A corpus with an
/// arity conflict yields Error(ArityMismatch).
Outcome prove(const std::vector<Formula>& premises, const Formula& conclusion, const Budget& budget = {});

/// Like prove(); `strict` additionally runs the False check after a True
/// answer and reports inconsistent premises.
ProveResult prove_checked(const std::vector<Formula>& premises, const Formula& conclusion, const Budget& budget,
                          bool strict);

/// Parses first; a parse failure yields Error(<kind>).
Outcome prove_text(const std::vector<std::string>& premises, std::string_view conclusion, const Budget& budget = {});

// ---------------------------------------------------------------------------
// Grounding

struct GroundLiteral {
  bool positive;
  std::size_t atom;
};

struct GroundClauses {
  std::vector<std::vector<GroundLiteral>> clauses;
  std::vector<std::string> atoms;  // printed ground atoms, indexed by GroundLiteral::atom
  std::vector<Term> universe;

  /// Clauses as printed literals, e.g. {"¬R(rex)", "F(rex)"}.
  std::vector<std::vector<std::string>> to_strings() const;
};

struct Exhausted {};

/// Instantiates every clause over the Herbrand universe built from the
/// clause constants plus `constants`, closed under function application up to
/// budget.max_term_depth. An empty universe gets one fresh constant.
std::variant<GroundClauses, Exhausted> ground(const ClauseSet& clauses, const Budget& budget,
                                              const std::vector<std::string>& constants = {});

/// DPLL with unit propagation. nullopt when the deadline passes.
std::optional<bool> satisfiable(const GroundClauses& ground,
                                std::chrono::steady_clock::time_point deadline = std::chrono::steady_clock::time_point::max());

// ---------------------------------------------------------------------------
// Finite-model oracle

/// Brute-force entailment by enumerating every truth assignment over the
/// ground atoms of a finite domain (named constants plus one element per
/// existential-polarity variable). Evaluates formulas directly, without
/// clausification. Throws std::invalid_argument on function symbols,
/// existentials under universals, or more than `max_atoms` ground atoms.
Outcome oracle_prove(const std::vector<Formula>& premises, const Formula& conclusion, std::size_t max_atoms = 24);

}  // namespace folforge::reasoner
