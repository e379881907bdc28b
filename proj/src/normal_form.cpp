#include "folforge/normal_form.hpp"

#include <algorithm>
#include <limits>
#include <set>

#include "folforge/syntax.hpp"

namespace folforge {

namespace {

Formula nnf(const Formula& f, bool negated) {
  if (f.is<Atom>()) return negated ? make_not(f, f.span()) : f;
  if (const auto* n = f.get<Negation>()) return nnf(n->operand, !negated);
  if (const auto* q = f.get<Quantified>()) {
    auto kind = q->kind;
    if (negated) kind = kind == QuantifierKind::Forall ? QuantifierKind::Exists : QuantifierKind::Forall;
    return make_quantified(kind, q->vars, nnf(q->body, negated), f.span(), f.node().header);
  }
  const auto& b = *f.get<Binary>();
  const auto& l = b.left;
  const auto& r = b.right;
  switch (b.op) {
    case Connective::And:
      return negated ? make_or(nnf(l, true), nnf(r, true)) : make_and(nnf(l, false), nnf(r, false));
    case Connective::Or:
      return negated ? make_and(nnf(l, true), nnf(r, true)) : make_or(nnf(l, false), nnf(r, false));
    case Connective::Implies:
      return negated ? make_and(nnf(l, false), nnf(r, true)) : make_or(nnf(l, true), nnf(r, false));
    case Connective::Iff:
    case Connective::Xor: {
      const bool equal = (b.op == Connective::Iff) != negated;
      if (equal) return make_and(make_or(nnf(l, true), nnf(r, false)), make_or(nnf(l, false), nnf(r, true)));
      return make_or(make_and(nnf(l, false), nnf(r, true)), make_and(nnf(l, true), nnf(r, false)));
    }
  }
  return f;
}

void collect_symbols(const Term& t, std::set<std::string>& out) {
  out.insert(t.name);
  for (const auto& a : t.args) collect_symbols(a, out);
}

void collect_symbols(const Formula& f, std::set<std::string>& out) {
  if (const auto* a = f.get<Atom>()) {
    out.insert(a->predicate);
    for (const auto& t : a->args) collect_symbols(t, out);
  } else if (const auto* n = f.get<Negation>()) {
    collect_symbols(n->operand, out);
  } else if (const auto* b = f.get<Binary>()) {
    collect_symbols(b->left, out);
    collect_symbols(b->right, out);
  } else {
    const auto& q = *f.get<Quantified>();
    out.insert(q.vars.begin(), q.vars.end());
    collect_symbols(q.body, out);
  }
}

Term substitute(const Term& t, const std::map<std::string, Term>& env) {
  if (t.kind == Term::Kind::Variable) {
    auto it = env.find(t.name);
    return it == env.end() ? t : it->second;
  }
  if (t.kind == Term::Kind::Constant) return t;
  std::vector<Term> args;
  args.reserve(t.args.size());
  for (const auto& a : t.args) args.push_back(substitute(a, env));
  return Term::function(t.name, std::move(args));
}

class Skolemizer {
 public:
  Skolemizer(std::set<std::string> taken, ClauseSet& out) : taken_(std::move(taken)), out_(out) {}

  Formula run(const Formula& f, std::size_t formula_index) {
    formula_ = formula_index;
    std::map<std::string, Term> env;
    std::vector<Term> universals;
    return walk(f, env, universals);
  }

 private:
  std::string fresh(const std::string& base) {
    if (taken_.insert(base).second) return base;
    for (std::size_t i = 1;; ++i) {
      auto name = base + "_" + std::to_string(i);
      if (taken_.insert(name).second) return name;
    }
  }

  std::string fresh_skolem() {
    for (;;) {
      auto name = "sk" + std::to_string(++skolem_counter_);
      if (taken_.insert(name).second) return name;
    }
  }

  Formula walk(const Formula& f, std::map<std::string, Term>& env, std::vector<Term>& universals) {
    if (const auto* a = f.get<Atom>()) {
      std::vector<Term> args;
      for (const auto& t : a->args) args.push_back(substitute(t, env));
      return make_atom(a->predicate, std::move(args), f.span());
    }
    if (const auto* n = f.get<Negation>()) return make_not(walk(n->operand, env, universals));
    if (const auto* b = f.get<Binary>()) {
      auto l = walk(b->left, env, universals);
      auto r = walk(b->right, env, universals);
      return make_binary(b->op, l, r);
    }
    const auto& q = *f.get<Quantified>();
    auto saved = env;
    const auto mark = universals.size();
    for (const auto& v : q.vars) {
      if (q.kind == QuantifierKind::Forall) {
        auto term = Term::variable(variable_names_.insert(v).second ? v : fresh(v));
        taken_.insert(term.name);
        env[v] = term;
        universals.push_back(term);
      } else {
        auto name = fresh_skolem();
        out_.skolem_map[name] = SkolemOrigin{v, universals.size(), formula_, f.node().header};
        env[v] = universals.empty() ? Term::constant(name) : Term::function(name, universals);
      }
    }
    auto body = walk(q.body, env, universals);
    universals.resize(mark);
    env = std::move(saved);
    return body;
  }

  std::set<std::string> taken_;
  std::set<std::string> variable_names_;
  ClauseSet& out_;
  std::size_t formula_ = 0;
  std::size_t skolem_counter_ = 0;
};

std::vector<Clause> cnf(const Formula& f, std::size_t limit) {
  if (const auto* a = f.get<Atom>()) return {{Literal{true, a->predicate, a->args}}};
  if (const auto* n = f.get<Negation>()) {
    const auto& a = *n->operand.get<Atom>();
    return {{Literal{false, a.predicate, a.args}}};
  }
  const auto& b = *f.get<Binary>();
  auto l = cnf(b.left, limit);
  auto r = cnf(b.right, limit);
  const bool conj = b.op == Connective::And;
  if (conj ? l.size() + r.size() > limit : (!l.empty() && r.size() > limit / l.size())) throw ClauseLimitExceeded();
  if (conj) {
    l.insert(l.end(), r.begin(), r.end());
    return l;
  }
  std::vector<Clause> out;
  out.reserve(l.size() * r.size());
  for (const auto& cl : l) {
    for (const auto& cr : r) {
      Clause merged = cl;
      for (const auto& lit : cr) {
        if (std::find(merged.begin(), merged.end(), lit) == merged.end()) merged.push_back(lit);
      }
      out.push_back(std::move(merged));
    }
  }
  return out;
}

bool tautology(const Clause& c) {
  for (const auto& a : c) {
    for (const auto& b : c) {
      if (a.positive && !b.positive && a.predicate == b.predicate && a.args == b.args) return true;
    }
  }
  return false;
}

}  // namespace

Formula to_nnf(const Formula& f) { return nnf(f, false); }

ClauseSet clausify(const std::vector<Formula>& formulas, std::size_t max_clauses) {
  std::set<std::string> taken;
  for (const auto& f : formulas) collect_symbols(f, taken);
  ClauseSet out;
  Skolemizer skolemizer(std::move(taken), out);
  for (std::size_t i = 0; i < formulas.size(); ++i) {
    auto matrix = skolemizer.run(to_nnf(formulas[i]), i);
    for (auto& clause : cnf(matrix, max_clauses)) {
      if (tautology(clause)) continue;
      if (std::find(out.clauses.begin(), out.clauses.end(), clause) == out.clauses.end()) {
        out.clauses.push_back(std::move(clause));
      }
    }
  }
  return out;
}

ClauseSet clausify(const std::vector<Formula>& formulas) {
  return clausify(formulas, std::numeric_limits<std::size_t>::max());
}

ClauseSet clausify(const Formula& f) { return clausify(std::vector<Formula>{f}); }

std::string print(const Literal& lit) {
  return (lit.positive ? "" : "¬") + print(make_atom(lit.predicate, lit.args));
}

std::string print(const Clause& clause) {
  std::string out = "[";
  for (std::size_t i = 0; i < clause.size(); ++i) {
    if (i) out += ", ";
    out += print(clause[i]);
  }
  return out + "]";
}

}  // namespace folforge
