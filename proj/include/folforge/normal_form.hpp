#pragma once

// Clause normal form: implication/iff/xor elimination, negation normal form,
// skolemization and distribution into a set of clauses.

#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "folforge/formula.hpp"

namespace folforge {

struct Literal {
  bool positive = true;
  std::string predicate;
  std::vector<Term> args;

  bool operator==(const Literal&) const = default;
};

using Clause = std::vector<Literal>;

/// Where a skolem symbol came from.
struct SkolemOrigin {
  std::string variable;  // the existential variable it replaces
  std::size_t arity = 0; // number of enclosing universals
  std::size_t formula = 0;
  Span quantifier;       // header span of the source quantifier, when parsed
};

struct ClauseSet {
  std::vector<Clause> clauses;
  std::map<std::string, SkolemOrigin> skolem_map;
};

/// Negation normal form over And/Or/Not(atom) and quantifiers; Implies, Iff
/// and Xor are eliminated.
Formula to_nnf(const Formula& f);

/// Clausifies one closed formula. Skolem symbols are sk1, sk2, ... skipping
/// any name already used in the input.
ClauseSet clausify(const Formula& f);

/// Clausifies several closed formulas with one shared skolem namespace.
ClauseSet clausify(const std::vector<Formula>& formulas);

struct ClauseLimitExceeded : std::runtime_error {
  ClauseLimitExceeded() : std::runtime_error("clause limit exceeded during CNF distribution") {}
};

/// As above, but throws ClauseLimitExceeded as soon as CNF distribution
/// would produce more than `max_clauses` clauses for one formula.
ClauseSet clausify(const std::vector<Formula>& formulas, std::size_t max_clauses);

std::string print(const Literal& lit);
std::string print(const Clause& clause);

}  // namespace folforge
