#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "folforge/diagnostic.hpp"
#include "folforge/formula.hpp"
#include "folforge/syntax.hpp"

namespace folforge {

/// A predicate symbol as declared in a Pred_x block, e.g. "Have(x, y)".
struct PredicateDecl {
  std::string name;
  std::size_t arity = 0;
  std::vector<Term> sample_args;

  bool operator==(const PredicateDecl& other) const {
    return name == other.name && sample_args == other.sample_args;
  }
};

/// Parses "Name(arg, ...)" or a bare "Name". A trailing ":::" gloss is
/// ignored. Returns nullopt for anything that is not a declaration.
std::optional<PredicateDecl> parse_predicate_decl(std::string_view text);
std::string print(const PredicateDecl& decl);

/// Maps a failed parse to exactly one Error diagnostic. The first blocking
/// problem (leftmost) determines the kind.
Diagnostic classify_failure(std::string_view text, const ParseFailure& failure);

/// Per-formula checks: free variables (MissingQuantifier, Error), rebound or
/// unused quantifier variables (QuantifierLocation, Lint), variable-free atoms
/// under several quantified variables (MissingVariable, Lint). Sorted by span.
std::vector<Diagnostic> lint_formula(const Formula& f);

/// Cross-formula checks: ArityMismatch (Error), SubjectPredicate (Lint),
/// PredicateMismatch for trailing-"s" name pairs (Lint).
std::vector<Diagnostic> lint_corpus(const std::vector<Formula>& formulas,
                                    const std::vector<PredicateDecl>& predicates = {});

using TaxonomyKey = std::pair<Category, DiagnosticKind>;
using Histogram = std::map<TaxonomyKey, std::size_t>;

Histogram taxonomy_report(const std::vector<Diagnostic>& diags);

/// {"Category/Kind": count, ...} in table order.
std::string histogram_json(const Histogram& h);
/// "category,kind,count" header plus one row per entry.
std::string histogram_csv(const Histogram& h);

std::size_t error_count(const std::vector<Diagnostic>& diags);

/// {"kind","category","severity","span":[begin,end],"message","subject","source"}
nlohmann::ordered_json to_json(const Diagnostic& d);

/// "error Parsing/ParenthesisImbalance [4,9): message"
std::string format_diagnostic(const Diagnostic& d);

}  // namespace folforge
