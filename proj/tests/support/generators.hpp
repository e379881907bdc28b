#pragma once

// Random formula generators shared by the property tests and the acceptance
// suite. Seeded std::mt19937_64 keeps every run reproducible.

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "folforge/formula.hpp"

namespace folforge::testing {

struct GeneratorConfig {
  int max_depth = 6;
  std::vector<std::pair<std::string, std::size_t>> predicates = {{"P", 1}, {"Q", 2}, {"R", 1}, {"S", 0}};
  std::vector<std::string> constants = {"a", "b", "alice"};
  std::vector<std::string> variables = {"x", "y", "z", "w"};
  bool allow_xor = true;
  bool allow_functions = true;
};

class FormulaGenerator {
 public:
  explicit FormulaGenerator(std::uint64_t seed, GeneratorConfig config = {}) : rng_(seed), cfg_(std::move(config)) {}

  Formula next() {
    std::vector<std::string> bound;
    return formula(cfg_.max_depth, bound);
  }

 private:
  std::size_t pick(std::size_t n) { return static_cast<std::size_t>(rng_() % n); }

  Term term(const std::vector<std::string>& bound, int depth) {
    const auto roll = pick(10);
    if (cfg_.allow_functions && depth > 0 && roll == 0) {
      return Term::function("f", {term(bound, depth - 1)});
    }
    if (!bound.empty() && roll < 6) return Term::variable(bound[pick(bound.size())]);
    return Term::constant(cfg_.constants[pick(cfg_.constants.size())]);
  }

  Formula atom(const std::vector<std::string>& bound) {
    const auto& [name, arity] = cfg_.predicates[pick(cfg_.predicates.size())];
    std::vector<Term> args;
    for (std::size_t i = 0; i < arity; ++i) args.push_back(term(bound, 1));
    return make_atom(name, std::move(args));
  }

  Formula formula(int depth, std::vector<std::string>& bound) {
    if (depth <= 0) return atom(bound);
    const auto roll = pick(12);
    if (roll < 3) return atom(bound);
    if (roll < 5) return make_not(formula(depth - 1, bound));
    if (roll < 10) {
      static constexpr Connective kOps[] = {Connective::And, Connective::Or, Connective::Implies, Connective::Iff,
                                            Connective::Xor};
      auto op = kOps[pick(cfg_.allow_xor ? 5 : 4)];
      auto l = formula(depth - 1, bound);
      auto r = formula(depth - 1, bound);
      return make_binary(op, l, r);
    }
    std::vector<std::string> vars;
    const auto count = 1 + pick(2);
    for (std::size_t i = 0; i < count; ++i) {
      const auto& v = cfg_.variables[pick(cfg_.variables.size())];
      if (std::find(vars.begin(), vars.end(), v) == vars.end()) vars.push_back(v);
    }
    const auto mark = bound.size();
    bound.insert(bound.end(), vars.begin(), vars.end());
    auto body = formula(depth - 1, bound);
    bound.resize(mark);
    return make_quantified(pick(2) ? QuantifierKind::Forall : QuantifierKind::Exists, vars, body);
  }

  std::mt19937_64 rng_;
  GeneratorConfig cfg_;
};

// Small entailment problems in the shape of rule-based reasoning corpora:
// ground facts, universally quantified rules, disjunctions and top-level
// existentials. Function-free and with no existential under a universal, so
// every instance stays within the model-enumeration oracle's fragment.
struct ReasoningInstance {
  std::vector<Formula> premises;
  Formula conclusion;
};

class InstanceGenerator {
 public:
  explicit InstanceGenerator(std::uint64_t seed) : rng_(seed) {}

  ReasoningInstance next() {
    const auto n_constants = 1 + pick(3);
    constants_.assign(kConstants, kConstants + n_constants);
    ReasoningInstance out{{}, make_atom("P", {Term::constant("a")})};
    const auto n_premises = 1 + pick(5);
    for (std::size_t i = 0; i < n_premises; ++i) out.premises.push_back(premise());
    out.conclusion = conclusion();
    return out;
  }

 private:
  static constexpr const char* kConstants[] = {"a", "b", "c"};

  std::size_t pick(std::size_t n) { return static_cast<std::size_t>(rng_() % n); }
  Term constant() { return Term::constant(constants_[pick(constants_.size())]); }

  Formula literal(const Term& t) {
    Formula a = pick(4) == 0 ? make_atom("L", {t, constant()}) : make_atom(pick(2) ? "P" : "Q", {t});
    return pick(4) == 0 ? make_not(a) : a;
  }

  Formula premise() {
    const auto x = Term::variable("x");
    switch (pick(6)) {
      case 0:
      case 1:
        return literal(constant());
      case 2: {
        auto body = pick(2) ? make_and(literal(x), literal(x)) : literal(x);
        return make_forall({"x"}, make_implies(body, literal(x)));
      }
      case 3:
        return make_forall({"x"}, make_implies(literal(x), literal(x)));
      case 4:
        return make_or(literal(constant()), literal(constant()));
      default:
        return make_exists({"x"}, make_and(literal(x), literal(x)));
    }
  }

  Formula conclusion() {
    const auto x = Term::variable("x");
    switch (pick(5)) {
      case 0:
        return make_forall({"x"}, make_implies(literal(x), literal(x)));
      case 1:
        return make_exists({"x"}, literal(x));
      default:
        return literal(constant());
    }
  }

  std::mt19937_64 rng_;
  std::vector<std::string> constants_;
};

}  // namespace folforge::testing
