#include "folforge/diagnostics.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

#include <json.hpp>

namespace folforge {

Category category_of(DiagnosticKind kind) {
  switch (kind) {
    case DiagnosticKind::ParenthesisImbalance:
    case DiagnosticKind::InvalidOperatorSequence:
    case DiagnosticKind::CompletionError:
      return Category::Parsing;
    case DiagnosticKind::MissingQuantifier:
    case DiagnosticKind::QuantifierLocation:
    case DiagnosticKind::MissingVariable:
      return Category::Type;
    case DiagnosticKind::SpecialToken:
    case DiagnosticKind::UnknownOperator:
      return Category::Token;
    case DiagnosticKind::PredicateError:
    case DiagnosticKind::IncorrectQuantifier:
    case DiagnosticKind::PredicateMismatch:
      return Category::Sense;
    case DiagnosticKind::ArityMismatch:
    case DiagnosticKind::SubjectPredicate:
      return Category::Arities;
  }
  return Category::Parsing;
}

std::string_view to_string(Category c) {
  switch (c) {
    case Category::Parsing: return "Parsing";
    case Category::Type: return "Type";
    case Category::Token: return "Token";
    case Category::Sense: return "Sense";
    case Category::Arities: return "Arities";
  }
  return "?";
}

std::string_view to_string(DiagnosticKind k) {
  switch (k) {
    case DiagnosticKind::ParenthesisImbalance: return "ParenthesisImbalance";
    case DiagnosticKind::InvalidOperatorSequence: return "InvalidOperatorSequence";
    case DiagnosticKind::CompletionError: return "CompletionError";
    case DiagnosticKind::MissingQuantifier: return "MissingQuantifier";
    case DiagnosticKind::QuantifierLocation: return "QuantifierLocation";
    case DiagnosticKind::MissingVariable: return "MissingVariable";
    case DiagnosticKind::SpecialToken: return "SpecialToken";
    case DiagnosticKind::UnknownOperator: return "UnknownOperator";
    case DiagnosticKind::PredicateError: return "PredicateError";
    case DiagnosticKind::IncorrectQuantifier: return "IncorrectQuantifier";
    case DiagnosticKind::PredicateMismatch: return "PredicateMismatch";
    case DiagnosticKind::ArityMismatch: return "ArityMismatch";
    case DiagnosticKind::SubjectPredicate: return "SubjectPredicate";
  }
  return "?";
}

std::string_view to_string(Severity s) { return s == Severity::Error ? "error" : "lint"; }

std::optional<DiagnosticKind> kind_from_string(std::string_view s) {
  for (auto k : kAllKinds) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

Diagnostic make_diagnostic(DiagnosticKind kind, Severity severity, Span span, std::string message,
                           std::string subject, std::size_t source) {
  return Diagnostic{kind, severity, span, std::move(message), std::move(subject), source};
}

std::size_t error_count(const std::vector<Diagnostic>& diags) {
  return static_cast<std::size_t>(std::count_if(diags.begin(), diags.end(), [](const auto& d) { return d.is_error(); }));
}

// ---------------------------------------------------------------------------
// Predicate declarations

std::optional<PredicateDecl> parse_predicate_decl(std::string_view text) {
  if (auto sep = text.find(":::"); sep != std::string_view::npos) text = text.substr(0, sep);
  auto raw = parse_raw(text);
  const auto* f = std::get_if<Formula>(&raw);
  if (!f) return std::nullopt;
  const auto* a = f->get<Atom>();
  if (!a) return std::nullopt;
  return PredicateDecl{a->predicate, a->args.size(), a->args};
}

std::string print(const PredicateDecl& decl) {
  std::string out = decl.name;
  if (decl.sample_args.empty()) return out;
  out += '(';
  for (std::size_t i = 0; i < decl.sample_args.size(); ++i) {
    if (i) out += ", ";
    out += print(decl.sample_args[i]);
  }
  out += ')';
  return out;
}

// ---------------------------------------------------------------------------
// Failure classification

namespace {

bool is_binary_operator(TokenKind k) {
  return k == TokenKind::And || k == TokenKind::Or || k == TokenKind::Implies || k == TokenKind::Iff ||
         k == TokenKind::Xor;
}

bool parens_balanced(std::string_view text) {
  int depth = 0;
  for (const auto& t : tokenize(text)) {
    if (t.kind == TokenKind::LParen) ++depth;
    if (t.kind == TokenKind::RParen && --depth < 0) return false;
  }
  return depth == 0;
}

}  // namespace

Diagnostic classify_failure(std::string_view text, const ParseFailure& failure) {
  using Reason = ParseFailure::Reason;
  const auto& tok = failure.token;
  const Span at = tok.span;
  const Span to_end{tok.span.begin, text.size()};
  auto diag = [&](DiagnosticKind kind, Span span, std::string message) {
    return make_diagnostic(kind, Severity::Error, span, std::move(message), tok.text);
  };

  switch (failure.reason) {
    case Reason::BadCharacter:
      if (tok.kind == TokenKind::UnknownOperator) {
        return diag(DiagnosticKind::UnknownOperator, at, "unsupported operator '" + tok.text + "'");
      }
      return diag(DiagnosticKind::SpecialToken, at, "invalid token '" + tok.text + "'");

    case Reason::MissingVariable:
      return diag(DiagnosticKind::QuantifierLocation, at, "quantifier without a variable");

    case Reason::RepeatedVariable:
      return diag(DiagnosticKind::QuantifierLocation, at, "variable '" + tok.text + "' repeated in one quantifier");

    case Reason::UnexpectedEnd:
      if (failure.paren_depth > 0) {
        return diag(DiagnosticKind::ParenthesisImbalance, at,
                    std::to_string(failure.paren_depth) + " unclosed parenthesis");
      }
      if (tokenize(text).size() == 1) return diag(DiagnosticKind::CompletionError, at, "empty formula");
      return diag(DiagnosticKind::CompletionError, at, "formula ends before it is complete");

    case Reason::TrailingInput: {
      if (tok.kind == TokenKind::RParen) {
        return diag(DiagnosticKind::ParenthesisImbalance, at, "unmatched ')'");
      }
      if (tok.kind == TokenKind::Forall || tok.kind == TokenKind::Exists) {
        return diag(DiagnosticKind::QuantifierLocation, at, "quantifier after a complete formula");
      }
      const auto rest = text.substr(tok.span.begin);
      if (std::holds_alternative<Formula>(parse_raw(rest))) {
        return diag(DiagnosticKind::InvalidOperatorSequence, at, "missing connective between formulas");
      }
      return diag(DiagnosticKind::CompletionError, to_end, "trailing text after formula");
    }

    case Reason::UnexpectedToken:
      if (tok.kind == TokenKind::RParen && (failure.paren_depth <= 0 || !parens_balanced(text))) {
        return diag(DiagnosticKind::ParenthesisImbalance, at, "unmatched ')'");
      }
      if (tok.kind == TokenKind::Forall || tok.kind == TokenKind::Exists) {
        return diag(DiagnosticKind::QuantifierLocation, at, "quantifier where a connective is expected");
      }
      if (is_binary_operator(tok.kind)) {
        return diag(DiagnosticKind::InvalidOperatorSequence, at, "operator '" + tok.text + "' is missing an operand");
      }
      return diag(DiagnosticKind::InvalidOperatorSequence, at,
                  "unexpected '" + tok.text + "', expected " + failure.expected);
  }
  return diag(DiagnosticKind::InvalidOperatorSequence, at, "unparseable formula");
}

// ---------------------------------------------------------------------------
// Formula lint

namespace {

class FormulaLinter {
 public:
  std::vector<Diagnostic> run(const Formula& f) {
    walk(f);
    std::stable_sort(out_.begin(), out_.end(),
                     [](const Diagnostic& a, const Diagnostic& b) { return a.span.begin < b.span.begin; });
    return std::move(out_);
  }

 private:
  struct Binder {
    std::string name;
    Span header;
    bool used = false;
  };

  void walk(const Formula& f) {
    if (const auto* a = f.get<Atom>()) {
      atom(*a, f.span());
    } else if (const auto* n = f.get<Negation>()) {
      walk(n->operand);
    } else if (const auto* b = f.get<Binary>()) {
      walk(b->left);
      walk(b->right);
    } else {
      quantified(*f.get<Quantified>(), f.node().header);
    }
  }

  void quantified(const Quantified& q, Span header) {
    const auto mark = scope_.size();
    for (const auto& v : q.vars) {
      const bool rebound = std::any_of(scope_.begin(), scope_.end(), [&](const Binder& b) { return b.name == v; });
      if (rebound) {
        out_.push_back(make_diagnostic(DiagnosticKind::QuantifierLocation, Severity::Lint, header,
                                       "variable '" + v + "' is bound again inside its own scope", v));
      }
      scope_.push_back(Binder{v, header});
    }
    walk(q.body);
    for (std::size_t i = mark; i < scope_.size(); ++i) {
      if (!scope_[i].used) {
        out_.push_back(make_diagnostic(DiagnosticKind::QuantifierLocation, Severity::Lint, header,
                                       "quantified variable '" + scope_[i].name + "' does not occur in its scope",
                                       scope_[i].name));
      }
    }
    scope_.resize(mark);
  }

  // Returns true when the term mentions a bound variable.
  bool term(const Term& t) {
    if (t.kind == Term::Kind::Variable) {
      for (auto it = scope_.rbegin(); it != scope_.rend(); ++it) {
        if (it->name == t.name) {
          it->used = true;
          return true;
        }
      }
      if (reported_free_.insert(t.name).second) {
        out_.push_back(make_diagnostic(DiagnosticKind::MissingQuantifier, Severity::Error, t.span,
                                       "variable '" + t.name + "' has no quantifier", t.name));
      }
      return false;
    }
    bool any = false;
    for (const auto& a : t.args) any = term(a) || any;
    return any;
  }

  void atom(const Atom& a, Span span) {
    bool any_bound = false;
    for (const auto& t : a.args) any_bound = term(t) || any_bound;
    if (!any_bound && !a.args.empty() && distinct_bound() >= 2) {
      out_.push_back(make_diagnostic(DiagnosticKind::MissingVariable, Severity::Lint, span,
                                     "'" + a.predicate + "' mentions none of the quantified variables", a.predicate));
    }
  }

  // A rebound name is still one variable.
  std::size_t distinct_bound() const {
    std::set<std::string> names;
    for (const auto& b : scope_) names.insert(b.name);
    return names.size();
  }

  std::vector<Binder> scope_;
  std::set<std::string> reported_free_;
  std::vector<Diagnostic> out_;
};

}  // namespace

std::vector<Diagnostic> lint_formula(const Formula& f) { return FormulaLinter{}.run(f); }

// ---------------------------------------------------------------------------
// Corpus lint

namespace {

struct Occurrence {
  std::string name;
  std::size_t arity;
  std::size_t source;
  Span span;
};

void collect_constants(const Term& t, std::vector<std::pair<std::string, std::size_t>>& out, std::size_t source) {
  if (t.kind == Term::Kind::Constant) out.emplace_back(t.name, source);
  for (const auto& a : t.args) collect_constants(a, out, source);
}

void collect(const Formula& f, std::size_t source, std::vector<Occurrence>& atoms,
             std::vector<std::pair<std::string, std::size_t>>& constants) {
  if (const auto* a = f.get<Atom>()) {
    atoms.push_back(Occurrence{a->predicate, a->args.size(), source, f.span()});
    for (const auto& t : a->args) collect_constants(t, constants, source);
  } else if (const auto* n = f.get<Negation>()) {
    collect(n->operand, source, atoms, constants);
  } else if (const auto* b = f.get<Binary>()) {
    collect(b->left, source, atoms, constants);
    collect(b->right, source, atoms, constants);
  } else {
    collect(f.get<Quantified>()->body, source, atoms, constants);
  }
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

}  // namespace

std::vector<Diagnostic> lint_corpus(const std::vector<Formula>& formulas, const std::vector<PredicateDecl>& predicates) {
  std::vector<Occurrence> atoms;
  std::vector<std::pair<std::string, std::size_t>> constants;
  for (std::size_t i = 0; i < formulas.size(); ++i) collect(formulas[i], i, atoms, constants);
  // Declarations are indexed after the formulas.
  for (std::size_t i = 0; i < predicates.size(); ++i) {
    atoms.push_back(Occurrence{predicates[i].name, predicates[i].arity, formulas.size() + i, {}});
  }

  std::vector<Diagnostic> out;

  std::map<std::string, std::size_t> first_arity;
  std::set<std::string> arity_reported;
  for (const auto& occ : atoms) {
    auto [it, inserted] = first_arity.emplace(occ.name, occ.arity);
    if (inserted || it->second == occ.arity || arity_reported.count(occ.name)) continue;
    arity_reported.insert(occ.name);
    out.push_back(make_diagnostic(DiagnosticKind::ArityMismatch, Severity::Error, occ.span,
                                  occ.name + ": " + std::to_string(it->second) + " vs " + std::to_string(occ.arity),
                                  occ.name, occ.source));
  }

  std::map<std::string, std::string> predicate_by_lower;
  std::set<std::string> predicate_names;
  for (const auto& occ : atoms) {
    predicate_by_lower.emplace(lower(occ.name), occ.name);
    predicate_names.insert(occ.name);
  }

  std::set<std::string> subject_reported;
  for (const auto& [name, source] : constants) {
    auto it = predicate_by_lower.find(lower(name));
    if (it == predicate_by_lower.end() || !subject_reported.insert(name).second) continue;
    out.push_back(make_diagnostic(DiagnosticKind::SubjectPredicate, Severity::Lint, {},
                                  "'" + name + "' is used both as a constant and as predicate '" + it->second + "'",
                                  name, source));
  }

  std::set<std::string> plural_reported;
  for (const auto& occ : atoms) {
    const auto plural = occ.name + "s";
    if (!predicate_names.count(plural) || !plural_reported.insert(occ.name).second) continue;
    out.push_back(make_diagnostic(DiagnosticKind::PredicateMismatch, Severity::Lint, occ.span,
                                  "predicates '" + occ.name + "' and '" + plural + "' differ only by plural form",
                                  occ.name + "/" + plural, occ.source));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Histograms

Histogram taxonomy_report(const std::vector<Diagnostic>& diags) {
  Histogram h;
  for (const auto& d : diags) ++h[{d.category(), d.kind}];
  return h;
}

std::string histogram_json(const Histogram& h) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& [key, count] : h) {
    j[std::string(to_string(key.first)) + "/" + std::string(to_string(key.second))] = count;
  }
  return j.dump();
}

std::string histogram_csv(const Histogram& h) {
  std::ostringstream out;
  out << "category,kind,count\n";
  for (const auto& [key, count] : h) out << to_string(key.first) << ',' << to_string(key.second) << ',' << count << '\n';
  return out.str();
}

nlohmann::ordered_json to_json(const Diagnostic& d) {
  nlohmann::ordered_json j;
  j["kind"] = std::string(to_string(d.kind));
  j["category"] = std::string(to_string(d.category()));
  j["severity"] = std::string(to_string(d.severity));
  j["span"] = {d.span.begin, d.span.end};
  j["message"] = d.message;
  j["subject"] = d.subject;
  j["source"] = d.source;
  return j;
}

std::string format_diagnostic(const Diagnostic& d) {
  std::ostringstream out;
  out << to_string(d.severity) << ' ' << to_string(d.category()) << '/' << to_string(d.kind) << " [" << d.span.begin
      << ',' << d.span.end << "): " << d.message;
  return out.str();
}

}  // namespace folforge
