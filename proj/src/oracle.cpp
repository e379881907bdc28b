#include <algorithm>
#include <cstdint>
#include <map>
#include <stdexcept>

#include "folforge/reasoner.hpp"

namespace folforge::reasoner {

namespace {

constexpr unsigned kPositive = 1, kNegative = 2, kBoth = 3;

unsigned flip(unsigned p) { return ((p & kPositive) ? kNegative : 0) | ((p & kNegative) ? kPositive : 0); }

struct Scan {
  std::vector<std::string> constants;
  std::map<std::string, std::size_t> predicates;
  std::size_t fresh = 0;
};

void scan_term(const Term& t, Scan& s) {
  if (t.kind == Term::Kind::Function) throw std::invalid_argument("oracle: function symbol " + t.name);
  if (t.kind == Term::Kind::Constant) {
    for (const auto& c : s.constants) {
      if (c == t.name) return;
    }
    s.constants.push_back(t.name);
  }
}

// universal_depth: number of enclosing quantifiers that act universally.
void scan(const Formula& f, unsigned pol, std::size_t universal_depth, Scan& s) {
  if (const auto* a = f.get<Atom>()) {
    auto [it, inserted] = s.predicates.emplace(a->predicate, a->args.size());
    if (!inserted && it->second != a->args.size()) throw std::invalid_argument("oracle: arity conflict");
    for (const auto& t : a->args) scan_term(t, s);
  } else if (const auto* n = f.get<Negation>()) {
    scan(n->operand, flip(pol), universal_depth, s);
  } else if (const auto* b = f.get<Binary>()) {
    switch (b->op) {
      case Connective::And:
      case Connective::Or:
        scan(b->left, pol, universal_depth, s);
        scan(b->right, pol, universal_depth, s);
        break;
      case Connective::Implies:
        scan(b->left, flip(pol), universal_depth, s);
        scan(b->right, pol, universal_depth, s);
        break;
      case Connective::Iff:
      case Connective::Xor:
        scan(b->left, kBoth, universal_depth, s);
        scan(b->right, kBoth, universal_depth, s);
        break;
    }
  } else {
    const auto& q = *f.get<Quantified>();
    const unsigned as_forall = q.kind == QuantifierKind::Forall ? pol : flip(pol);
    const bool existential = as_forall & kNegative;
    const bool universal = as_forall & kPositive;
    if (existential) {
      if (universal_depth > 0) throw std::invalid_argument("oracle: existential under universal");
      s.fresh += q.vars.size();
    }
    scan(q.body, pol, universal_depth + (universal ? q.vars.size() : 0), s);
  }
}

// Formulas are expanded over the finite domain into a flat propositional
// circuit once; each truth assignment then costs one linear pass.
class Circuit {
 public:
  enum class Op { Atom, Not, And, Or, Implies, Iff, Xor, True, False };

  Circuit(const Scan& s, std::size_t domain_size) : domain_(domain_size) {
    for (std::size_t i = 0; i < s.constants.size(); ++i) constant_index_[s.constants[i]] = i;
    std::size_t offset = 0;
    for (const auto& [name, arity] : s.predicates) {
      std::size_t count = 1;
      for (std::size_t i = 0; i < arity; ++i) count *= domain_;
      offsets_[name] = offset;
      offset += count;
    }
    atoms_ = offset;
  }

  std::size_t atoms() const { return atoms_; }
  // Atoms that occur in the expanded formulas; the others cannot matter.
  std::size_t referenced_atoms() const { return dense_.size(); }

  /// Returns the node index of the expanded formula.
  std::size_t add(const Formula& f) {
    env_.clear();
    return expand(f);
  }

  void evaluate(std::uint64_t assignment) {
    values_.resize(nodes_.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      const auto& n = nodes_[i];
      bool v = false;
      switch (n.op) {
        case Op::Atom: v = (assignment >> n.a) & 1U; break;
        case Op::Not: v = !values_[n.a]; break;
        case Op::And: v = values_[n.a] && values_[n.b]; break;
        case Op::Or: v = values_[n.a] || values_[n.b]; break;
        case Op::Implies: v = !values_[n.a] || values_[n.b]; break;
        case Op::Iff: v = values_[n.a] == values_[n.b]; break;
        case Op::Xor: v = values_[n.a] != values_[n.b]; break;
        case Op::True: v = true; break;
        case Op::False: v = false; break;
      }
      values_[i] = v;
    }
  }

  bool value(std::size_t node) const { return values_[node]; }

 private:
  struct Node {
    Op op;
    std::size_t a = 0;
    std::size_t b = 0;
  };

  std::size_t push(Op op, std::size_t a = 0, std::size_t b = 0) {
    nodes_.push_back(Node{op, a, b});
    return nodes_.size() - 1;
  }

  std::size_t value(const Term& t) const {
    if (t.kind == Term::Kind::Variable) {
      for (auto it = env_.rbegin(); it != env_.rend(); ++it) {
        if (it->first == t.name) return it->second;
      }
      throw std::invalid_argument("oracle: free variable " + t.name);
    }
    return constant_index_.at(t.name);
  }

  std::size_t expand(const Formula& f) {
    if (const auto* a = f.get<Atom>()) {
      std::size_t index = 0;
      for (const auto& t : a->args) index = index * domain_ + value(t);
      const auto atom = offsets_.at(a->predicate) + index;
      auto [it, inserted] = dense_.emplace(atom, dense_.size());
      return push(Op::Atom, it->second);
    }
    if (const auto* n = f.get<Negation>()) return push(Op::Not, expand(n->operand));
    if (const auto* b = f.get<Binary>()) {
      const auto l = expand(b->left);
      const auto r = expand(b->right);
      switch (b->op) {
        case Connective::And: return push(Op::And, l, r);
        case Connective::Or: return push(Op::Or, l, r);
        case Connective::Implies: return push(Op::Implies, l, r);
        case Connective::Iff: return push(Op::Iff, l, r);
        case Connective::Xor: return push(Op::Xor, l, r);
      }
    }
    const auto& q = *f.get<Quantified>();
    return quantify(q, 0);
  }

  std::size_t quantify(const Quantified& q, std::size_t var) {
    if (var == q.vars.size()) return expand(q.body);
    const bool forall = q.kind == QuantifierKind::Forall;
    std::size_t acc = push(forall ? Op::True : Op::False);
    for (std::size_t d = 0; d < domain_; ++d) {
      env_.emplace_back(q.vars[var], d);
      const auto inner = quantify(q, var + 1);
      env_.pop_back();
      acc = push(forall ? Op::And : Op::Or, acc, inner);
    }
    return acc;
  }

  std::size_t domain_;
  std::size_t atoms_ = 0;
  std::map<std::string, std::size_t> constant_index_;
  std::map<std::string, std::size_t> offsets_;
  std::vector<std::pair<std::string, std::size_t>> env_;
  std::map<std::size_t, std::size_t> dense_;
  std::vector<Node> nodes_;
  std::vector<char> values_;
};

}  // namespace

Outcome oracle_prove(const std::vector<Formula>& premises, const Formula& conclusion, std::size_t max_atoms) {
  std::vector<Formula> closed;
  for (const auto& p : premises) closed.push_back(universal_closure(p));
  const auto goal = universal_closure(conclusion);

  Scan s;
  for (const auto& p : closed) scan(p, kPositive, 0, s);
  scan(goal, kBoth, 0, s);
  const std::size_t domain = std::max<std::size_t>(1, s.constants.size() + s.fresh);

  Circuit circuit(s, domain);
  if (circuit.atoms() > max_atoms || circuit.atoms() > 62) throw std::invalid_argument("oracle: too many ground atoms");
  std::vector<std::size_t> roots;
  for (const auto& p : closed) roots.push_back(circuit.add(p));
  const auto goal_root = circuit.add(goal);

  bool any_model = false, goal_true = false, goal_false = false;
  const std::uint64_t limit = std::uint64_t{1} << circuit.referenced_atoms();
  for (std::uint64_t m = 0; m < limit; ++m) {
    circuit.evaluate(m);
    bool ok = true;
    for (auto r : roots) ok = ok && circuit.value(r);
    if (!ok) continue;
    any_model = true;
    (circuit.value(goal_root) ? goal_true : goal_false) = true;
    if (goal_true && goal_false) return Outcome::unknown();
  }
  if (!any_model || !goal_false) return Outcome::truth(true);
  return Outcome::truth(false);
}

}  // namespace folforge::reasoner
