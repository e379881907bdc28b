#include <doctest.h>

#include <set>

#include "folforge/normal_form.hpp"
#include "folforge/reasoner.hpp"
#include "folforge/syntax.hpp"
#include "support/generators.hpp"

using namespace folforge;

namespace {

Formula parsed(std::string_view text) {
  auto r = parse(text);
  INFO("text: " << text);
  REQUIRE(r.ok());
  return r.formula();
}

std::vector<std::string> printed(const ClauseSet& cs) {
  std::vector<std::string> out;
  for (const auto& c : cs.clauses) out.push_back(print(c));
  return out;
}

void symbols(const Term& t, std::set<std::string>& out) {
  out.insert(t.name);
  for (const auto& a : t.args) symbols(a, out);
}

void symbols(const Formula& f, std::set<std::string>& out) {
  if (const auto* a = f.get<Atom>()) {
    out.insert(a->predicate);
    for (const auto& t : a->args) symbols(t, out);
  } else if (const auto* n = f.get<Negation>()) {
    symbols(n->operand, out);
  } else if (const auto* b = f.get<Binary>()) {
    symbols(b->left, out);
    symbols(b->right, out);
  } else {
    const auto& q = *f.get<Quantified>();
    out.insert(q.vars.begin(), q.vars.end());
    symbols(q.body, out);
  }
}

bool nnf_shape(const Formula& f) {
  if (f.is<Atom>()) return true;
  if (const auto* n = f.get<Negation>()) return n->operand.is<Atom>();
  if (const auto* b = f.get<Binary>()) {
    return (b->op == Connective::And || b->op == Connective::Or) && nnf_shape(b->left) && nnf_shape(b->right);
  }
  return nnf_shape(f.get<Quantified>()->body);
}

bool has_existential_under_universal(const Formula& f, bool under) {
  if (const auto* n = f.get<Negation>()) return has_existential_under_universal(n->operand, under);
  if (const auto* b = f.get<Binary>()) {
    return has_existential_under_universal(b->left, under) || has_existential_under_universal(b->right, under);
  }
  if (const auto* q = f.get<Quantified>()) {
    if (q->kind == QuantifierKind::Exists && under) return true;
    return has_existential_under_universal(q->body, under || q->kind == QuantifierKind::Forall);
  }
  return false;
}

}  // namespace

TEST_CASE("clausify: implication rule") {
  CHECK(printed(clausify(parsed("∀x (Rabbit(x) → Furry(x))"))) == std::vector<std::string>{"[¬Rabbit(x), Furry(x)]"});
}

TEST_CASE("clausify: existential becomes a skolem constant") {
  auto cs = clausify(parsed("∃x Cat(x)"));
  CHECK(printed(cs) == std::vector<std::string>{"[Cat(sk1)]"});
  REQUIRE(cs.skolem_map.count("sk1"));
  CHECK(cs.skolem_map.at("sk1").variable == "x");
  CHECK(cs.skolem_map.at("sk1").arity == 0);
}

TEST_CASE("clausify: existential under a universal becomes a skolem function") {
  auto cs = clausify(parsed("∀x ∃y Likes(x, y)"));
  CHECK(printed(cs) == std::vector<std::string>{"[Likes(x, sk1(x))]"});
  CHECK(cs.skolem_map.at("sk1").arity == 1);
  CHECK(cs.skolem_map.at("sk1").quantifier.begin == 5);
}

TEST_CASE("clausify: negated universal is existential") {
  CHECK(printed(clausify(parsed("¬∀x P(x)"))) == std::vector<std::string>{"[¬P(sk1)]"});
}

TEST_CASE("clausify: iff and xor expand to two clauses") {
  CHECK(printed(clausify(parsed("A(c) ↔ B(c)"))) ==
        std::vector<std::string>{"[¬A(c), B(c)]", "[A(c), ¬B(c)]"});
  CHECK(printed(clausify(parsed("A(c) ⊕ B(c)"))) == std::vector<std::string>{"[A(c), B(c)]", "[¬B(c), ¬A(c)]"});
}

TEST_CASE("clausify: tautologies and duplicates are dropped") {
  CHECK(clausify(parsed("P(a) ∨ ¬P(a)")).clauses.empty());
  CHECK(printed(clausify(parsed("P(a) ∧ P(a)"))) == std::vector<std::string>{"[P(a)]"});
}

TEST_CASE("clausify: skolem names skip symbols already in the input") {
  auto cs = clausify(parsed("∃x (P(x) ∧ Q(sk1))"));
  CHECK(printed(cs) == std::vector<std::string>{"[P(sk2)]", "[Q(sk1)]"});
}

TEST_CASE("clausify: shared namespace across formulas") {
  auto cs = clausify(std::vector<Formula>{parsed("∃x P(x)"), parsed("∃x Q(x)")});
  CHECK(printed(cs) == std::vector<std::string>{"[P(sk1)]", "[Q(sk2)]"});
  CHECK(cs.skolem_map.at("sk2").formula == 1);
}

TEST_CASE("nnf: only and/or over literals remain") {
  testing::FormulaGenerator gen(7);
  for (int i = 0; i < 200; ++i) {
    auto f = gen.next();
    INFO(print(f));
    CHECK(nnf_shape(to_nnf(f)));
  }
}

TEST_CASE("property: skolem symbols are fresh") {
  testing::GeneratorConfig cfg;
  cfg.max_depth = 4;
  cfg.allow_xor = false;
  cfg.constants = {"a", "sk1", "sk2"};
  testing::FormulaGenerator gen(11, cfg);
  std::size_t skolems = 0;
  for (int i = 0; i < 300; ++i) {
    auto f = universal_closure(gen.next());
    std::set<std::string> used;
    symbols(f, used);
    auto cs = clausify(f);
    for (const auto& [name, origin] : cs.skolem_map) {
      ++skolems;
      INFO(print(f) << " skolem " << name);
      CHECK(used.count(name) == 0);
    }
  }
  CHECK(skolems > 50);
}

TEST_CASE("property: clausification preserves satisfiability") {
  testing::GeneratorConfig cfg;
  cfg.max_depth = 4;
  cfg.allow_functions = false;
  cfg.predicates = {{"P", 1}, {"R", 1}, {"S", 0}, {"Q", 2}};
  cfg.constants = {"a", "b"};
  cfg.variables = {"x", "y"};
  testing::FormulaGenerator gen(2024, cfg);
  const auto probe = make_atom("Zprobe");
  std::size_t checked = 0, sat = 0;
  for (int i = 0; checked < 200 && i < 20000; ++i) {
    auto f = universal_closure(gen.next());
    if (i % 4 == 1) f = make_and(f, universal_closure(gen.next()));
    if (i % 4 == 2) f = make_not(f);
    if (i % 4 == 3) f = make_and(f, make_not(f));
    if (has_existential_under_universal(to_nnf(f), false)) continue;
    reasoner::Outcome expected = reasoner::Outcome::unknown();
    try {
      expected = reasoner::oracle_prove({f}, probe);
    } catch (const std::invalid_argument&) {
      continue;
    }
    const bool oracle_sat = expected.value() == reasoner::Outcome::Value::Unknown;
    auto grounded = reasoner::ground(clausify(f), reasoner::Budget{});
    REQUIRE(std::holds_alternative<reasoner::GroundClauses>(grounded));
    auto decided = reasoner::satisfiable(std::get<reasoner::GroundClauses>(grounded));
    REQUIRE(decided.has_value());
    INFO(print(f));
    CHECK(*decided == oracle_sat);
    ++checked;
    sat += oracle_sat;
  }
  CHECK(checked == 200);
  CHECK(sat > 40);
  CHECK(sat < 160);
}
