#include "folforge/perturb.hpp"

#include <algorithm>
#include <atomic>
#include <limits>
#include <thread>
#include <cmath>
#include <functional>
#include <set>
#include <stdexcept>

#include "folforge/rng.hpp"
#include "folforge/syntax.hpp"

namespace folforge::perturb {

namespace {

constexpr std::pair<PerturbKind, std::string_view> kNames[] = {
    {PerturbKind::OmitOnePredicate, "OmitOnePredicate"},
    {PerturbKind::OmitOneVariable, "OmitOneVariable"},
    {PerturbKind::OmitVariableAndPredicate, "OmitVariableAndPredicate"},
    {PerturbKind::OmitOrAddOneVariable, "OmitOrAddOneVariable"},
    {PerturbKind::AddPluralPredicate, "AddPluralPredicate"},
    {PerturbKind::DuplicatePredicate, "DuplicatePredicate"},
    {PerturbKind::ChangeQuantifierPosition, "ChangeQuantifierPosition"},
    {PerturbKind::OmitOneQuantifier, "OmitOneQuantifier"},
    {PerturbKind::OmitLastBracket, "OmitLastBracket"},
    {PerturbKind::AddOrOmitNegation, "AddOrOmitNegation"},
    {PerturbKind::OmitArgsFromFacts, "OmitArgsFromFacts"},
    {PerturbKind::AddOrOmitQuantifierPW, "AddOrOmitQuantifierPW"},
    {PerturbKind::SwapOperators, "SwapOperators"},
    {PerturbKind::AddPluralPredicatesFOL, "AddPluralPredicatesFOL"},
};

// ---------------------------------------------------------------------------
// Tree addressing: a path lists child indices from the root.

using Path = std::vector<int>;

void collect_paths(const Formula& f, Path& cur, std::vector<Path>& out) {
  out.push_back(cur);
  auto child = [&](const Formula& c, int i) {
    cur.push_back(i);
    collect_paths(c, cur, out);
    cur.pop_back();
  };
  if (const auto* n = f.get<Negation>()) {
    child(n->operand, 0);
  } else if (const auto* b = f.get<Binary>()) {
    child(b->left, 0);
    child(b->right, 1);
  } else if (const auto* q = f.get<Quantified>()) {
    child(q->body, 0);
  }
}

std::vector<Path> paths(const Formula& f) {
  std::vector<Path> out;
  Path cur;
  collect_paths(f, cur, out);
  return out;
}

Formula at(const Formula& f, const Path& p, std::size_t i = 0) {
  if (i == p.size()) return f;
  if (const auto* n = f.get<Negation>()) return at(n->operand, p, i + 1);
  if (const auto* b = f.get<Binary>()) return at(p[i] == 0 ? b->left : b->right, p, i + 1);
  return at(f.get<Quantified>()->body, p, i + 1);
}

Formula replace(const Formula& f, const Path& p, const Formula& g, std::size_t i = 0) {
  if (i == p.size()) return g;
  if (const auto* n = f.get<Negation>()) return make_not(replace(n->operand, p, g, i + 1));
  if (const auto* b = f.get<Binary>()) {
    return p[i] == 0 ? make_binary(b->op, replace(b->left, p, g, i + 1), b->right)
                     : make_binary(b->op, b->left, replace(b->right, p, g, i + 1));
  }
  const auto& q = *f.get<Quantified>();
  return make_quantified(q.kind, q.vars, replace(q.body, p, g, i + 1));
}

template <typename Pred>
std::vector<Path> select(const Formula& f, Pred pred) {
  std::vector<Path> out;
  for (auto& p : paths(f)) {
    if (pred(at(f, p), p)) out.push_back(std::move(p));
  }
  return out;
}

bool term_has_variable(const Term& t) {
  if (t.kind == Term::Kind::Variable) return true;
  return std::any_of(t.args.begin(), t.args.end(), term_has_variable);
}

bool is_fact(const Formula& f) {
  const auto* a = f.get<Atom>();
  return a && std::none_of(a->args.begin(), a->args.end(), term_has_variable);
}

// Variables bound by quantifiers strictly above `p`.
std::set<std::string> bound_above(const Formula& f, const Path& p) {
  std::set<std::string> out;
  Formula cur = f;
  for (int step : p) {
    if (const auto* q = cur.get<Quantified>()) out.insert(q->vars.begin(), q->vars.end());
    if (const auto* n = cur.get<Negation>()) {
      cur = n->operand;
    } else if (const auto* b = cur.get<Binary>()) {
      cur = step == 0 ? b->left : b->right;
    } else {
      cur = cur.get<Quantified>()->body;
    }
  }
  return out;
}

void collect_vars(const Formula& f, std::set<std::string>& out) {
  std::function<void(const Term&)> term = [&](const Term& t) {
    if (t.kind == Term::Kind::Variable) out.insert(t.name);
    for (const auto& a : t.args) term(a);
  };
  if (const auto* a = f.get<Atom>()) {
    for (const auto& t : a->args) term(t);
  } else if (const auto* n = f.get<Negation>()) {
    collect_vars(n->operand, out);
  } else if (const auto* b = f.get<Binary>()) {
    collect_vars(b->left, out);
    collect_vars(b->right, out);
  } else {
    const auto& q = *f.get<Quantified>();
    out.insert(q.vars.begin(), q.vars.end());
    collect_vars(q.body, out);
  }
}

bool has_kind(const std::vector<Diagnostic>& diags, std::initializer_list<DiagnosticKind> kinds) {
  return std::any_of(diags.begin(), diags.end(), [&](const Diagnostic& d) {
    return std::find(kinds.begin(), kinds.end(), d.kind) != kinds.end();
  });
}

// Blocks whose removal leaves one of their variables free (and still read as
// a variable after reparsing).
std::vector<Path> omittable_quantifiers(const Formula& f) {
  return select(f, [&](const Formula& g, const Path& p) {
    const auto* q = g.get<Quantified>();
    if (!q) return false;
    const auto free = free_variables(q->body);
    const auto above = bound_above(f, p);
    return std::any_of(q->vars.begin(), q->vars.end(), [&](const std::string& v) {
      return free.count(v) && !above.count(v) && is_free_variable_name(v);
    });
  });
}

std::optional<std::string> omit_quantifier(const Formula& f, Rng& rng) {
  const auto text = print(f);
  const auto reparsed = parse(text);
  if (!reparsed) return std::nullopt;
  const auto candidates = omittable_quantifiers(reparsed.formula());
  if (candidates.empty()) return std::nullopt;
  const auto node = at(reparsed.formula(), candidates[rng.index(candidates.size())]);
  const auto header = node.node().header;
  auto end = header.end;
  while (end < text.size() && text[end] == ' ') ++end;
  return text.substr(0, header.begin) + text.substr(end);
}

std::optional<std::string> change_quantifier_position(const Formula& f, Rng& rng) {
  const auto quantifiers = select(f, [](const Formula& g, const Path&) { return g.is<Quantified>(); });
  if (quantifiers.empty()) return std::nullopt;
  std::vector<std::size_t> idx(quantifiers.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  rng.shuffle(idx);
  const auto original = print(f);
  for (auto qi : idx) {
    const auto& qp = quantifiers[qi];
    const auto& q = *at(f, qp).get<Quantified>();
    const auto removed = replace(f, qp, q.body);
    std::vector<std::string> legal;
    for (const auto& target : paths(removed)) {
      const auto moved = replace(removed, target, make_quantified(q.kind, q.vars, at(removed, target)));
      auto text = print(moved);
      if (text == original) continue;
      auto re = parse(text);
      if (!re) continue;
      if (has_kind(lint_formula(re.formula()), {DiagnosticKind::QuantifierLocation, DiagnosticKind::MissingQuantifier})) {
        if (std::find(legal.begin(), legal.end(), text) == legal.end()) legal.push_back(std::move(text));
      }
    }
    if (!legal.empty()) return legal[rng.index(legal.size())];
  }
  return std::nullopt;
}

std::string fresh_variable(const Formula& f) {
  std::set<std::string> used;
  collect_vars(f, used);
  for (const char* v : {"x", "y", "z", "u", "v", "w"}) {
    if (!used.count(v)) return v;
  }
  for (std::size_t i = 1;; ++i) {
    auto v = "x" + std::to_string(i);
    if (!used.count(v)) return v;
  }
}

std::optional<std::string> add_or_omit_quantifier(const Formula& f, Rng& rng) {
  const bool can_omit = !omittable_quantifiers(f).empty();
  if (can_omit && rng.coin()) return omit_quantifier(f, rng);
  // Adding: rebinding a variable the formula already binds, or an unused
  // binder when there is none; both read as misplaced quantifiers.
  std::vector<std::string> bound;
  for (const auto& p : select(f, [](const Formula& g, const Path&) { return g.is<Quantified>(); })) {
    for (const auto& v : at(f, p).get<Quantified>()->vars) bound.push_back(v);
  }
  const auto var = bound.empty() ? fresh_variable(f) : bound[rng.index(bound.size())];
  return print(make_quantified(rng.coin() ? QuantifierKind::Forall : QuantifierKind::Exists, {var}, f));
}

std::optional<std::string> toggle_negation(const Formula& f, Rng& rng) {
  const auto facts = select(f, [](const Formula& g, const Path&) { return is_fact(g); });
  if (facts.empty()) return std::nullopt;
  auto p = facts[rng.index(facts.size())];
  const auto atom = at(f, p);
  if (!p.empty()) {
    Path parent(p.begin(), p.end() - 1);
    if (at(f, parent).is<Negation>()) return print(replace(f, parent, atom));
  }
  return print(replace(f, p, make_not(atom)));
}

std::optional<std::string> omit_fact_argument(const Formula& f, Rng& rng) {
  const auto facts = select(f, [](const Formula& g, const Path&) { return is_fact(g) && g.get<Atom>()->args.size() >= 2; });
  if (facts.empty()) return std::nullopt;
  const auto p = facts[rng.index(facts.size())];
  const auto& a = *at(f, p).get<Atom>();
  auto args = a.args;
  args.erase(args.begin() + static_cast<std::ptrdiff_t>(rng.index(args.size())));
  return print(replace(f, p, make_atom(a.predicate, std::move(args))));
}

std::optional<std::string> swap_operator(const Formula& f, Rng& rng) {
  const auto ops = select(f, [](const Formula& g, const Path&) {
    const auto* b = g.get<Binary>();
    return b && (b->op == Connective::And || b->op == Connective::Implies);
  });
  if (ops.empty()) return std::nullopt;
  const auto p = ops[rng.index(ops.size())];
  const auto& b = *at(f, p).get<Binary>();
  const auto op = b.op == Connective::And ? Connective::Implies : Connective::And;
  return print(replace(f, p, make_binary(op, b.left, b.right)));
}

std::optional<std::string> pluralize_atom(const Formula& f, Rng& rng) {
  const auto atoms = select(f, [](const Formula& g, const Path&) { return g.is<Atom>(); });
  const auto p = atoms[rng.index(atoms.size())];
  const auto& a = *at(f, p).get<Atom>();
  return print(replace(f, p, make_atom(a.predicate + "s", a.args)));
}

// ---------------------------------------------------------------------------
// Predicate sets

std::size_t max_arity_index(const std::vector<PredicateDecl>& preds) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < preds.size(); ++i) {
    if (preds[i].arity > preds[best].arity) best = i;
  }
  return best;
}

PredicateDecl with_args(const PredicateDecl& d, std::vector<Term> args) {
  return PredicateDecl{d.name, args.size(), std::move(args)};
}

Term next_variable(const PredicateDecl& d) {
  for (const char* v : {"x", "y", "z", "u", "v", "w"}) {
    const bool used = std::any_of(d.sample_args.begin(), d.sample_args.end(), [&](const Term& t) { return t.name == v; });
    if (!used) return Term::variable(v);
  }
  return Term::variable("x" + std::to_string(d.arity));
}

}  // namespace

std::string_view to_string(PerturbKind k) {
  for (const auto& [kind, name] : kNames) {
    if (kind == k) return name;
  }
  return "?";
}

std::optional<PerturbKind> kind_from_string(std::string_view s) {
  for (const auto& [kind, name] : kNames) {
    if (name == s) return kind;
  }
  return std::nullopt;
}

bool is_predicate_kind(PerturbKind k) {
  return std::find(std::begin(kPredicateKinds), std::end(kPredicateKinds), k) != std::end(kPredicateKinds);
}

std::vector<PerturbKind> kinds_for(Style style, Task task) {
  using K = PerturbKind;
  if (style == Style::Folio) {
    if (task == Task::Predicate) return {K::OmitOnePredicate, K::OmitOneVariable, K::OmitVariableAndPredicate};
    return {K::ChangeQuantifierPosition, K::OmitOneQuantifier, K::OmitLastBracket};
  }
  if (task == Task::Predicate) return {K::OmitOnePredicate, K::OmitOrAddOneVariable, K::AddPluralPredicate, K::DuplicatePredicate};
  return {K::AddOrOmitNegation, K::OmitArgsFromFacts, K::AddOrOmitQuantifierPW, K::SwapOperators, K::AddPluralPredicatesFOL};
}

std::optional<std::vector<PredicateDecl>> perturb_predicates(const std::vector<PredicateDecl>& preds, PerturbKind kind,
                                                             std::uint64_t seed) {
  Rng rng(seed);
  auto out = preds;
  switch (kind) {
    case PerturbKind::OmitOnePredicate:
      if (out.empty()) return std::nullopt;
      out.erase(out.begin() + static_cast<std::ptrdiff_t>(rng.index(out.size())));
      return out;
    case PerturbKind::OmitOneVariable:
    case PerturbKind::OmitVariableAndPredicate: {
      if (out.empty()) return std::nullopt;
      const auto i = max_arity_index(out);
      if (out[i].arity == 0) return std::nullopt;
      if (kind == PerturbKind::OmitVariableAndPredicate && out.size() < 2) return std::nullopt;
      auto args = out[i].sample_args;
      args.pop_back();
      out[i] = with_args(out[i], std::move(args));
      if (kind == PerturbKind::OmitVariableAndPredicate) {
        auto j = rng.index(out.size() - 1);
        if (j >= i) ++j;
        out.erase(out.begin() + static_cast<std::ptrdiff_t>(j));
      }
      return out;
    }
    case PerturbKind::OmitOrAddOneVariable: {
      if (out.empty()) return std::nullopt;
      const auto i = rng.index(out.size());
      auto args = out[i].sample_args;
      if (args.size() > 1) {
        args.pop_back();
      } else {
        args.push_back(next_variable(out[i]));
      }
      out[i] = with_args(out[i], std::move(args));
      return out;
    }
    case PerturbKind::AddPluralPredicate: {
      if (out.empty()) return std::nullopt;
      auto copy = out[rng.index(out.size())];
      copy.name += "s";
      out.push_back(std::move(copy));
      return out;
    }
    case PerturbKind::DuplicatePredicate: {
      if (out.empty()) return std::nullopt;
      const auto& src = out[rng.index(out.size())];
      auto args = src.sample_args;
      args.push_back(next_variable(src));
      out.push_back(with_args(src, std::move(args)));
      return out;
    }
    default:
      throw std::invalid_argument(std::string(to_string(kind)) + " is not a predicate perturbation");
  }
}

std::optional<std::string> perturb_fol(const Formula& f, PerturbKind kind, std::uint64_t seed) {
  Rng rng(seed);
  std::optional<std::string> out;
  switch (kind) {
    case PerturbKind::OmitLastBracket: {
      auto text = print(f);
      if (text.empty() || text.back() != ')') return std::nullopt;
      text.pop_back();
      out = text;
      break;
    }
    case PerturbKind::OmitOneQuantifier: out = omit_quantifier(f, rng); break;
    case PerturbKind::ChangeQuantifierPosition: out = change_quantifier_position(f, rng); break;
    case PerturbKind::AddOrOmitNegation: out = toggle_negation(f, rng); break;
    case PerturbKind::OmitArgsFromFacts: out = omit_fact_argument(f, rng); break;
    case PerturbKind::AddOrOmitQuantifierPW: out = add_or_omit_quantifier(f, rng); break;
    case PerturbKind::SwapOperators: out = swap_operator(f, rng); break;
    case PerturbKind::AddPluralPredicatesFOL: out = pluralize_atom(f, rng); break;
    default:
      throw std::invalid_argument(std::string(to_string(kind)) + " is not a FOL perturbation");
  }
  if (out && *out == print(f)) return std::nullopt;
  return out;
}

std::vector<DiagnosticKind> expected_diagnostics(PerturbKind kind) {
  using D = DiagnosticKind;
  switch (kind) {
    case PerturbKind::OmitLastBracket: return {D::ParenthesisImbalance};
    case PerturbKind::OmitOneQuantifier: return {D::MissingQuantifier};
    case PerturbKind::ChangeQuantifierPosition: return {D::QuantifierLocation, D::MissingQuantifier};
    case PerturbKind::AddOrOmitQuantifierPW: return {D::QuantifierLocation, D::MissingQuantifier};
    case PerturbKind::AddPluralPredicatesFOL: return {D::PredicateMismatch};
    case PerturbKind::OmitArgsFromFacts: return {D::ArityMismatch};
    case PerturbKind::AddPluralPredicate: return {D::PredicateMismatch};
    case PerturbKind::DuplicatePredicate: return {D::ArityMismatch};
    default: return {};
  }
}

// ---------------------------------------------------------------------------
// Verifier instances

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::Manual: return "Manual";
    case Provenance::Harvested: return "Harvested";
    case Provenance::Correct: return "Correct";
  }
  return "?";
}

std::string_view to_string(Task t) { return t == Task::Predicate ? "Predicate" : "FOL"; }

nlohmann::ordered_json to_json(const VerifierInstance& v) {
  nlohmann::ordered_json j;
  j["task"] = to_string(v.task);
  j["context"] = v.context;
  j["target"] = v.target;
  j["provenance"] = to_string(v.provenance);
  j["kind"] = v.kind ? nlohmann::ordered_json(to_string(*v.kind)) : nlohmann::ordered_json(nullptr);
  return j;
}

std::string predicate_block(const std::vector<std::string>& predicates) {
  std::string out;
  for (const auto& p : predicates) {
    if (!out.empty()) out += '\n';
    auto d = parse_predicate_decl(p);
    out += d ? print(*d) : p;
  }
  return out;
}

std::string predicate_context(const std::vector<std::string>& premises, const std::string& conclusion,
                              const std::vector<std::string>& predicates) {
  std::string out = "Premises:\n";
  for (const auto& p : premises) out += p + "\n";
  return out + "Conclusion:\n" + conclusion + "\nPredicates:\n" + predicate_block(predicates);
}

std::string fol_context(const std::vector<std::string>& predicates, const std::string& fol, const std::string& sentence) {
  return "Predicates:\n" + predicate_block(predicates) + "\nFOL:\n" + fol + "\nSentence:\n" + sentence;
}

namespace {

std::string canonical_fol(const std::string& text) {
  auto r = parse(text);
  return r ? print(r.formula()) : text;
}

std::vector<std::string> canonical_predicates(const std::vector<std::string>& preds) {
  std::vector<std::string> out;
  for (const auto& p : preds) {
    auto d = parse_predicate_decl(p);
    out.push_back(d ? print(*d) : p);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<std::string> printed(const std::vector<PredicateDecl>& decls) {
  std::vector<std::string> out;
  for (const auto& d : decls) out.push_back(print(d));
  return out;
}

struct Statement {
  std::string fol;
  std::string nl;
};

std::vector<Statement> statements(const Record& r) {
  std::vector<Statement> out;
  for (std::size_t i = 0; i < r.premises.size(); ++i) out.push_back({(*r.premises_fol)[i], r.premises[i]});
  out.push_back({*r.conclusion_fol, r.conclusion});
  return out;
}

}  // namespace

std::vector<VerifierInstance> harvest_errors(const std::vector<HarvestPair>& pairs) {
  std::vector<VerifierInstance> out;
  for (const auto& [pred, gold] : pairs) {
    const auto gold_preds = gold.predicates.value_or(std::vector<std::string>{});
    if (canonical_predicates(pred.predicates) != canonical_predicates(gold_preds)) {
      out.push_back({Task::Predicate, predicate_context(gold.premises, gold.conclusion, pred.predicates),
                     predicate_block(gold_preds), Provenance::Harvested, std::nullopt});
    }
    if (!gold.premises_fol || !gold.conclusion_fol) continue;
    auto predicted = pred.premises;
    predicted.push_back(pred.conclusion);
    const auto golds = statements(gold);
    for (std::size_t i = 0; i < std::min(predicted.size(), golds.size()); ++i) {
      const auto want = canonical_fol(golds[i].fol);
      if (canonical_fol(predicted[i].fol) == want) continue;
      out.push_back({Task::FOL, fol_context(pred.predicates, predicted[i].fol, golds[i].nl), want, Provenance::Harvested,
                     std::nullopt});
    }
  }
  return out;
}

nlohmann::ordered_json DatasetReport::to_json() const {
  nlohmann::ordered_json j;
  j["records_used"] = records_used;
  j["records_skipped"] = records_skipped;
  j["skipped_draws"] = skipped_draws;
  j["per_provenance"] = per_provenance;
  j["per_kind"] = per_kind;
  return j;
}

namespace {

constexpr int kMaxAttempts = 32;

struct RecordOutput {
  std::vector<VerifierInstance> instances;
  std::size_t skipped_draws = 0;
};

RecordOutput perturb_record(const Record& rec, const std::vector<PerturbKind>& kinds, double ratio, std::uint64_t seed) {
  RecordOutput out;
  Rng rng(seed);
  std::vector<PredicateDecl> decls;
  for (const auto& p : *rec.predicates) {
    if (auto d = parse_predicate_decl(p)) decls.push_back(*d);
  }
  const auto gold_block = predicate_block(*rec.predicates);
  std::vector<PerturbKind> pred_kinds, fol_kinds;
  for (auto k : kinds) (is_predicate_kind(k) ? pred_kinds : fol_kinds).push_back(k);

  out.instances.push_back(
      {Task::Predicate, predicate_context(rec.premises, rec.conclusion, *rec.predicates), "correct", Provenance::Correct, std::nullopt});
  const auto pred_quota = pred_kinds.empty() ? 0 : static_cast<std::size_t>(std::ceil(ratio * 1.0 - 1e-9));
  for (std::size_t slot = 0; slot < pred_quota; ++slot) {
    bool done = false;
    for (int attempt = 0; attempt < kMaxAttempts && !done; ++attempt) {
      const auto kind = pred_kinds[rng.index(pred_kinds.size())];
      auto perturbed = perturb_predicates(decls, kind, rng.below(std::numeric_limits<std::uint64_t>::max()));
      if (!perturbed) continue;
      out.instances.push_back({Task::Predicate, predicate_context(rec.premises, rec.conclusion, printed(*perturbed)),
                               gold_block, Provenance::Manual, kind});
      done = true;
    }
    if (!done) ++out.skipped_draws;
  }

  const auto stmts = statements(rec);
  std::vector<std::optional<Formula>> parsed;
  for (const auto& s : stmts) {
    auto r = parse(s.fol);
    parsed.push_back(r ? std::optional<Formula>(r.formula()) : std::nullopt);
    out.instances.push_back({Task::FOL, fol_context(*rec.predicates, r ? print(r.formula()) : s.fol, s.nl), "correct",
                             Provenance::Correct, std::nullopt});
  }
  const auto fol_quota =
      fol_kinds.empty() ? 0 : static_cast<std::size_t>(std::ceil(ratio * static_cast<double>(stmts.size()) - 1e-9));
  for (std::size_t slot = 0; slot < fol_quota; ++slot) {
    bool done = false;
    for (int attempt = 0; attempt < kMaxAttempts && !done; ++attempt) {
      const auto i = rng.index(stmts.size());
      const auto kind = fol_kinds[rng.index(fol_kinds.size())];
      if (!parsed[i]) continue;
      auto text = perturb_fol(*parsed[i], kind, rng.below(std::numeric_limits<std::uint64_t>::max()));
      if (!text) continue;
      out.instances.push_back(
          {Task::FOL, fol_context(*rec.predicates, *text, stmts[i].nl), print(*parsed[i]), Provenance::Manual, kind});
      done = true;
    }
    if (!done) ++out.skipped_draws;
  }
  return out;
}

}  // namespace

std::vector<VerifierInstance> build_verifier_dataset(const std::vector<Record>& seeds, const Config& config,
                                                     const std::vector<VerifierInstance>& harvested,
                                                     DatasetReport* report) {
  if (seeds.empty()) throw std::invalid_argument("no seed records");
  if (!(config.perturbed_fraction > 0.5 && config.perturbed_fraction < 1.0)) {
    throw std::invalid_argument("perturbed_fraction must lie in (0.5, 1)");
  }
  std::vector<PerturbKind> kinds = config.kinds;
  if (kinds.empty()) {
    kinds.assign(std::begin(kPredicateKinds), std::end(kPredicateKinds));
    kinds.insert(kinds.end(), std::begin(kFolKinds), std::end(kFolKinds));
  }
  const double ratio = config.perturbed_fraction / (1.0 - config.perturbed_fraction);

  std::vector<RecordOutput> per_record(seeds.size());
  DatasetReport rep;
  std::vector<std::size_t> usable;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    const auto& r = seeds[i];
    if (r.predicates && r.premises_fol && r.conclusion_fol && r.premises_fol->size() == r.premises.size()) {
      usable.push_back(i);
    } else {
      ++rep.records_skipped;
    }
  }
  // Records are independent; each gets its own derived stream.
  std::vector<std::thread> pool;
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t k; (k = next.fetch_add(1)) < usable.size();) {
      const auto i = usable[k];
      per_record[i] = perturb_record(seeds[i], kinds, ratio, derive_seed(config.seed, i));
    }
  };
  const auto workers = std::max<std::size_t>(1, std::min(config.workers, usable.size()));
  if (workers == 1) {
    work();
  } else {
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  std::vector<VerifierInstance> out;
  for (auto i : usable) {
    rep.skipped_draws += per_record[i].skipped_draws;
    out.insert(out.end(), per_record[i].instances.begin(), per_record[i].instances.end());
  }
  out.insert(out.end(), harvested.begin(), harvested.end());
  rep.records_used = usable.size();
  for (const auto& v : out) {
    ++rep.per_provenance[std::string(to_string(v.task)) + "/" + std::string(to_string(v.provenance))];
    if (v.kind) ++rep.per_kind[std::string(to_string(*v.kind))];
  }
  if (report) *report = rep;
  return out;
}

}  // namespace folforge::perturb
