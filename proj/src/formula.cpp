#include "folforge/formula.hpp"

#include <algorithm>
#include <cctype>

namespace folforge {

Term Term::variable(std::string name, Span span) { return Term{Kind::Variable, std::move(name), {}, span}; }

Term Term::constant(std::string name, Span span) { return Term{Kind::Constant, std::move(name), {}, span}; }

Term Term::function(std::string name, std::vector<Term> args, Span span) {
  return Term{Kind::Function, std::move(name), std::move(args), span};
}

bool Term::operator==(const Term& other) const {
  return kind == other.kind && name == other.name && args == other.args;
}

Formula make_atom(std::string predicate, std::vector<Term> args, Span span) {
  return Formula(std::make_shared<const FormulaNode>(
      FormulaNode{Atom{std::move(predicate), std::move(args)}, span, {}}));
}

Formula make_not(Formula operand, Span span) {
  return Formula(std::make_shared<const FormulaNode>(FormulaNode{Negation{std::move(operand)}, span, {}}));
}

Formula make_binary(Connective op, Formula left, Formula right, Span span) {
  return Formula(
      std::make_shared<const FormulaNode>(FormulaNode{Binary{op, std::move(left), std::move(right)}, span, {}}));
}

Formula make_quantified(QuantifierKind kind, std::vector<std::string> vars, Formula body, Span span, Span header) {
  return Formula(std::make_shared<const FormulaNode>(
      FormulaNode{Quantified{kind, std::move(vars), std::move(body)}, span, header}));
}

bool Formula::operator==(const Formula& other) const {
  if (node_ == other.node_) return true;
  const auto& a = node_->value;
  const auto& b = other.node_->value;
  if (a.index() != b.index()) return false;
  if (const auto* x = std::get_if<Atom>(&a)) {
    const auto& y = std::get<Atom>(b);
    return x->predicate == y.predicate && x->args == y.args;
  }
  if (const auto* x = std::get_if<Negation>(&a)) return x->operand == std::get<Negation>(b).operand;
  if (const auto* x = std::get_if<Binary>(&a)) {
    const auto& y = std::get<Binary>(b);
    return x->op == y.op && x->left == y.left && x->right == y.right;
  }
  const auto& x = std::get<Quantified>(a);
  const auto& y = std::get<Quantified>(b);
  return x.kind == y.kind && x.vars == y.vars && x.body == y.body;
}

bool is_identifier(std::string_view s) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isalnum(c) || c == '_'; });
}

bool is_free_variable_name(std::string_view s) {
  if (s.empty() || s[0] < 'u' || s[0] > 'z') return false;
  return std::all_of(s.begin() + 1, s.end(), [](unsigned char c) { return std::isdigit(c); });
}

namespace {

void collect_term_free(const Term& t, const std::vector<std::string>& bound, std::vector<std::string>& out) {
  if (t.kind == Term::Kind::Variable) {
    if (std::find(bound.begin(), bound.end(), t.name) == bound.end() &&
        std::find(out.begin(), out.end(), t.name) == out.end()) {
      out.push_back(t.name);
    }
    return;
  }
  for (const auto& a : t.args) collect_term_free(a, bound, out);
}

void collect_free(const Formula& f, std::vector<std::string>& bound, std::vector<std::string>& out) {
  if (const auto* a = f.get<Atom>()) {
    for (const auto& t : a->args) collect_term_free(t, bound, out);
  } else if (const auto* n = f.get<Negation>()) {
    collect_free(n->operand, bound, out);
  } else if (const auto* b = f.get<Binary>()) {
    collect_free(b->left, bound, out);
    collect_free(b->right, bound, out);
  } else {
    const auto& q = *f.get<Quantified>();
    const auto mark = bound.size();
    bound.insert(bound.end(), q.vars.begin(), q.vars.end());
    collect_free(q.body, bound, out);
    bound.resize(mark);
  }
}

}  // namespace

std::vector<std::string> free_variables_ordered(const Formula& f) {
  std::vector<std::string> bound;
  std::vector<std::string> out;
  collect_free(f, bound, out);
  return out;
}

std::set<std::string> free_variables(const Formula& f) {
  auto ordered = free_variables_ordered(f);
  return {ordered.begin(), ordered.end()};
}

Formula universal_closure(const Formula& f) {
  auto vars = free_variables_ordered(f);
  Formula out = f;
  for (auto it = vars.rbegin(); it != vars.rend(); ++it) out = make_forall({*it}, out);
  return out;
}

Formula expand_xor(const Formula& f) {
  if (f.is<Atom>()) return f;
  if (const auto* n = f.get<Negation>()) return make_not(expand_xor(n->operand));
  if (const auto* q = f.get<Quantified>()) return make_quantified(q->kind, q->vars, expand_xor(q->body));
  const auto& b = *f.get<Binary>();
  auto l = expand_xor(b.left);
  auto r = expand_xor(b.right);
  if (b.op != Connective::Xor) return make_binary(b.op, l, r);
  return make_and(make_or(l, r), make_not(make_and(l, r)));
}

std::string_view to_string(Connective op) {
  switch (op) {
    case Connective::And: return "and";
    case Connective::Or: return "or";
    case Connective::Implies: return "implies";
    case Connective::Iff: return "iff";
    case Connective::Xor: return "xor";
  }
  return "?";
}

std::string_view to_string(QuantifierKind kind) { return kind == QuantifierKind::Forall ? "forall" : "exists"; }

}  // namespace folforge
