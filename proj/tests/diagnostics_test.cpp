#include <doctest.h>

#include <algorithm>

#include "folforge/diagnostics.hpp"

using namespace folforge;

namespace {

Formula parsed(std::string_view text) {
  auto r = parse(text);
  INFO("text: " << text);
  REQUIRE(r.ok());
  return r.formula();
}

std::vector<DiagnosticKind> kinds(const std::vector<Diagnostic>& diags) {
  std::vector<DiagnosticKind> out;
  for (const auto& d : diags) out.push_back(d.kind);
  return out;
}

bool contains(const std::vector<Diagnostic>& diags, DiagnosticKind kind) {
  return std::any_of(diags.begin(), diags.end(), [&](const Diagnostic& d) { return d.kind == kind; });
}

}  // namespace

TEST_CASE("category table is fixed") {
  using K = DiagnosticKind;
  CHECK(category_of(K::ParenthesisImbalance) == Category::Parsing);
  CHECK(category_of(K::InvalidOperatorSequence) == Category::Parsing);
  CHECK(category_of(K::CompletionError) == Category::Parsing);
  CHECK(category_of(K::MissingQuantifier) == Category::Type);
  CHECK(category_of(K::QuantifierLocation) == Category::Type);
  CHECK(category_of(K::MissingVariable) == Category::Type);
  CHECK(category_of(K::SpecialToken) == Category::Token);
  CHECK(category_of(K::UnknownOperator) == Category::Token);
  CHECK(category_of(K::PredicateError) == Category::Sense);
  CHECK(category_of(K::IncorrectQuantifier) == Category::Sense);
  CHECK(category_of(K::PredicateMismatch) == Category::Sense);
  CHECK(category_of(K::ArityMismatch) == Category::Arities);
  CHECK(category_of(K::SubjectPredicate) == Category::Arities);
  for (auto k : kAllKinds) CHECK(kind_from_string(to_string(k)) == k);
}

TEST_CASE("lint_formula: missing quantifier") {
  auto diags = lint_formula(parsed("BerkeleyCollege(x) ∧ ResidentialCollegeAt(x, yaleUniversity)"));
  REQUIRE(diags.size() == 1);
  CHECK(diags[0].kind == DiagnosticKind::MissingQuantifier);
  CHECK(diags[0].subject == "x");
  CHECK(diags[0].severity == Severity::Error);
  CHECK(diags[0].span.begin == 16);
}

TEST_CASE("lint_formula: rebound variable is a quantifier-location lint") {
  auto diags = lint_formula(parsed("∃y(Own(emily,y) ∧ Roommate(y)) → ∃y(Own(emily,y) ∧ LiveIn(emily, apartment))"));
  CHECK(contains(diags, DiagnosticKind::QuantifierLocation));
  CHECK(error_count(diags) == 0);
}

TEST_CASE("lint_formula: unused binder") {
  auto diags = lint_formula(parsed("∀x (P(a))"));
  CHECK(kinds(diags) == std::vector{DiagnosticKind::QuantifierLocation});
}

TEST_CASE("lint_formula: missing variable under several quantifiers") {
  auto diags = lint_formula(parsed(
      "∀x ∃y (In(indonesia) ∧ Prosecutor(x) ∧ SpecialCrime(y) → InvestigatePersonally(x, y))"));
  REQUIRE(kinds(diags) == std::vector{DiagnosticKind::MissingVariable});
  CHECK(diags[0].subject == "In");
  CHECK(lint_formula(parsed("∀x (Big(x) ∧ Red(bob) → Nice(x))")).empty());
}

TEST_CASE("lint_formula: a rebound variable counts once for missing variable") {
  auto diags = lint_formula(parsed("∃y (Own(emily, y) ∧ Roommate(y)) → ∃y (Own(emily, y) ∧ LiveIn(emily, apartment))"));
  CHECK(kinds(diags) == std::vector{DiagnosticKind::QuantifierLocation});
  CHECK(kinds(lint_formula(parsed("∀x ∃y (R(x, y) ∧ Q(a))"))) == std::vector{DiagnosticKind::MissingVariable});
}

TEST_CASE("lint_formula: clean formula") {
  CHECK(lint_formula(parsed("∀x (P(x) → Q(x))")).empty());
}

TEST_CASE("lint_formula output is ordered by span") {
  auto diags = lint_formula(parsed("R(z) ∧ ∀x (P(a)) ∧ Q(y, w)"));
  REQUIRE(diags.size() == 4);
  for (std::size_t i = 1; i < diags.size(); ++i) CHECK(diags[i - 1].span.begin <= diags[i].span.begin);
}

TEST_CASE("lint_corpus: arity mismatch") {
  auto diags = lint_corpus({parsed("Sees(Tiger, Mouse)"), parsed("∀x((Visits(x,Rabbit) ∧ Sees(Mouse)) → Visits(x,Tiger))")});
  REQUIRE(diags.size() == 1);
  CHECK(diags[0].kind == DiagnosticKind::ArityMismatch);
  CHECK(diags[0].message == "Sees: 2 vs 1");
  CHECK(diags[0].source == 1);
  CHECK(diags[0].is_error());
}

TEST_CASE("lint_corpus: subject predicate") {
  auto diags = lint_corpus({parsed("Platypus(platypus) ∧ ¬Teeth(platypus)")});
  REQUIRE(diags.size() == 1);
  CHECK(diags[0].kind == DiagnosticKind::SubjectPredicate);
  CHECK(diags[0].subject == "platypus");
  CHECK(diags[0].severity == Severity::Lint);
}

TEST_CASE("lint_corpus: plural predicate pair") {
  auto diags = lint_corpus({parsed("Cat(tom)"), parsed("Cats(tom)")});
  REQUIRE(diags.size() == 1);
  CHECK(diags[0].kind == DiagnosticKind::PredicateMismatch);
  CHECK(diags[0].subject == "Cat/Cats");
}

TEST_CASE("lint_corpus: declarations take part in arity checks") {
  auto decl = parse_predicate_decl("Have(x, y) ::: x has y");
  REQUIRE(decl);
  CHECK(decl->arity == 2);
  CHECK(print(*decl) == "Have(x, y)");
  auto diags = lint_corpus({parsed("Have(rex)")}, {*decl});
  CHECK(kinds(diags) == std::vector{DiagnosticKind::ArityMismatch});
  CHECK_FALSE(parse_predicate_decl("Rabbits are furry."));
}

TEST_CASE("sense kinds never come from static lint") {
  for (auto text : {"∃x (FleaBeetle(x) → ¬InFamily(x, chrysomelidae))", "¬Solid2Pointers(jack) ∧ Successful3Pointers(jack)"}) {
    auto f = parsed(text);
    for (const auto& d : lint_formula(f)) CHECK(d.category() != Category::Sense);
    for (const auto& d : lint_corpus({f})) {
      CHECK(d.kind != DiagnosticKind::IncorrectQuantifier);
      CHECK(d.kind != DiagnosticKind::PredicateError);
    }
  }
}

TEST_CASE("taxonomy_report counts") {
  CHECK(taxonomy_report({}).empty());
  auto mq = make_diagnostic(DiagnosticKind::MissingQuantifier, Severity::Error, {}, "");
  auto st = make_diagnostic(DiagnosticKind::SpecialToken, Severity::Error, {}, "");
  auto h = taxonomy_report({mq, mq, st});
  CHECK(h.size() == 2);
  CHECK(h.at({Category::Type, DiagnosticKind::MissingQuantifier}) == 2);
  CHECK(h.at({Category::Token, DiagnosticKind::SpecialToken}) == 1);
  CHECK(histogram_json(h) == R"({"Type/MissingQuantifier":2,"Token/SpecialToken":1})");
  CHECK(histogram_csv(h) == "category,kind,count\nType,MissingQuantifier,2\nToken,SpecialToken,1\n");
}
