#pragma once

// Abstract syntax for Prover9-style first-order formulas.
//
// Formula is an immutable handle onto a shared node. Copies are cheap and
// nodes are never mutated after construction, so values can be shared freely
// between threads.

#include <cstddef>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace folforge {

/// Half-open byte range into the source text a node was parsed from.
struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;

  bool operator==(const Span&) const = default;
};

struct Term {
  enum class Kind { Variable, Constant, Function };

  Kind kind = Kind::Constant;
  std::string name;
  std::vector<Term> args;
  Span span;  // not part of equality

  static Term variable(std::string name, Span span = {});
  static Term constant(std::string name, Span span = {});
  static Term function(std::string name, std::vector<Term> args, Span span = {});

  bool is_variable() const { return kind == Kind::Variable; }
  bool operator==(const Term& other) const;
};

enum class Connective { And, Or, Implies, Iff, Xor };
enum class QuantifierKind { Forall, Exists };

struct FormulaNode;

class Formula {
 public:
  explicit Formula(std::shared_ptr<const FormulaNode> node) : node_(std::move(node)) {}

  const FormulaNode& node() const { return *node_; }

  template <typename T>
  const T* get() const;
  template <typename T>
  bool is() const { return get<T>() != nullptr; }

  /// Source span of the whole formula; zero-width when built programmatically.
  Span span() const;

  bool operator==(const Formula& other) const;

 private:
  std::shared_ptr<const FormulaNode> node_;
};

struct Atom {
  std::string predicate;
  std::vector<Term> args;
};

struct Negation {
  Formula operand;
};

struct Binary {
  Connective op;
  Formula left;
  Formula right;
};

struct Quantified {
  QuantifierKind kind;
  std::vector<std::string> vars;
  Formula body;
};

struct FormulaNode {
  std::variant<Atom, Negation, Binary, Quantified> value;
  Span span;
  // For quantifiers: the quantifier symbol through the end of the variable list.
  Span header;
};

template <typename T>
const T* Formula::get() const {
  return std::get_if<T>(&node_->value);
}

inline Span Formula::span() const { return node_->span; }

// Builders. Spans default to empty; the parser passes real ones.
Formula make_atom(std::string predicate, std::vector<Term> args = {}, Span span = {});
Formula make_not(Formula operand, Span span = {});
Formula make_binary(Connective op, Formula left, Formula right, Span span = {});
Formula make_quantified(QuantifierKind kind, std::vector<std::string> vars, Formula body,
                        Span span = {}, Span header = {});

inline Formula make_and(Formula l, Formula r) { return make_binary(Connective::And, std::move(l), std::move(r)); }
inline Formula make_or(Formula l, Formula r) { return make_binary(Connective::Or, std::move(l), std::move(r)); }
inline Formula make_implies(Formula l, Formula r) {
  return make_binary(Connective::Implies, std::move(l), std::move(r));
}
inline Formula make_iff(Formula l, Formula r) { return make_binary(Connective::Iff, std::move(l), std::move(r)); }
inline Formula make_xor(Formula l, Formula r) { return make_binary(Connective::Xor, std::move(l), std::move(r)); }
inline Formula make_forall(std::vector<std::string> vars, Formula body) {
  return make_quantified(QuantifierKind::Forall, std::move(vars), std::move(body));
}
inline Formula make_exists(std::vector<std::string> vars, Formula body) {
  return make_quantified(QuantifierKind::Exists, std::move(vars), std::move(body));
}

/// Identifier alphabet [A-Za-z0-9_], nonempty.
bool is_identifier(std::string_view s);

/// Naming convention for identifiers not bound by any quantifier: a single
/// letter u-z, optionally followed by digits, is a (free) variable; anything
/// else is a constant.
bool is_free_variable_name(std::string_view s);

/// Variables occurring outside any quantifier that binds them.
std::set<std::string> free_variables(const Formula& f);

/// Free variables in order of first occurrence (left to right).
std::vector<std::string> free_variables_ordered(const Formula& f);

/// Wraps `f` in one universal block per free variable, first occurrence outermost.
Formula universal_closure(const Formula& f);

/// Replaces every Xor(a, b) with (a | b) & -(a & b), recursively.
Formula expand_xor(const Formula& f);

std::string_view to_string(Connective op);
std::string_view to_string(QuantifierKind kind);

}  // namespace folforge
