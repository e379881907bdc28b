#include "folforge/reasoner.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <stdexcept>
#include <unordered_map>

#include "folforge/diagnostics.hpp"
#include "folforge/syntax.hpp"

namespace folforge::reasoner {

void validate(const Budget& budget) {
  if (budget.max_ground_clauses == 0 || budget.max_term_depth == 0 || budget.wall_time.count() <= 0) {
    throw std::invalid_argument("reasoner budget values must be positive");
  }
}

std::string Outcome::to_string() const {
  switch (value_) {
    case Value::True: return "True";
    case Value::False: return "False";
    case Value::Unknown: return "Unknown";
    case Value::Exhausted: return "Exhausted";
    case Value::Error:
      return "Error:" + std::string(diagnostic_ ? folforge::to_string(diagnostic_->kind) : "Unknown");
  }
  return "?";
}

std::optional<Outcome::Value> label_from_string(std::string_view s) {
  std::string lower(s);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "true") return Outcome::Value::True;
  if (lower == "false") return Outcome::Value::False;
  if (lower == "unknown" || lower == "uncertain") return Outcome::Value::Unknown;
  return std::nullopt;
}

std::string_view label_to_string(Outcome::Value v) {
  switch (v) {
    case Outcome::Value::True: return "True";
    case Outcome::Value::False: return "False";
    case Outcome::Value::Unknown: return "Unknown";
    case Outcome::Value::Error: return "Error";
    case Outcome::Value::Exhausted: return "Exhausted";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Grounding

std::vector<std::vector<std::string>> GroundClauses::to_strings() const {
  std::vector<std::vector<std::string>> out;
  for (const auto& c : clauses) {
    std::vector<std::string> lits;
    for (const auto& l : c) lits.push_back((l.positive ? "" : "¬") + atoms[l.atom]);
    out.push_back(std::move(lits));
  }
  return out;
}

namespace {

using Clock = std::chrono::steady_clock;

void scan_term(const Term& t, std::vector<std::string>& constants, std::map<std::string, std::size_t>& functions,
               std::set<std::string>& names) {
  names.insert(t.name);
  if (t.kind == Term::Kind::Constant) {
    if (std::find(constants.begin(), constants.end(), t.name) == constants.end()) constants.push_back(t.name);
  } else if (t.kind == Term::Kind::Function) {
    functions.emplace(t.name, t.args.size());
  }
  for (const auto& a : t.args) scan_term(a, constants, functions, names);
}

void collect_variables(const Term& t, std::vector<std::string>& vars) {
  if (t.kind == Term::Kind::Variable) {
    if (std::find(vars.begin(), vars.end(), t.name) == vars.end()) vars.push_back(t.name);
    return;
  }
  for (const auto& a : t.args) collect_variables(a, vars);
}

Term instantiate(const Term& t, const std::vector<std::string>& vars, const std::vector<const Term*>& values) {
  if (t.kind == Term::Kind::Variable) {
    auto it = std::find(vars.begin(), vars.end(), t.name);
    return it == vars.end() ? t : *values[static_cast<std::size_t>(it - vars.begin())];
  }
  if (t.kind == Term::Kind::Constant) return t;
  std::vector<Term> args;
  for (const auto& a : t.args) args.push_back(instantiate(a, vars, values));
  return Term::function(t.name, std::move(args));
}

std::size_t term_depth(const Term& t) {
  std::size_t d = 0;
  for (const auto& a : t.args) d = std::max(d, term_depth(a) + 1);
  return d;
}

std::string atom_key(const std::string& predicate, const std::vector<Term>& args) {
  std::string key = predicate;
  if (args.empty()) return key;
  key += '(';
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) key += ", ";
    key += print(args[i]);
  }
  return key + ')';
}

std::variant<GroundClauses, Exhausted> ground_until(const ClauseSet& cs, const Budget& budget,
                                                    const std::vector<std::string>& extra_constants,
                                                    Clock::time_point deadline) {
  std::vector<std::string> constants;
  std::map<std::string, std::size_t> functions;
  std::set<std::string> names;
  for (const auto& clause : cs.clauses) {
    for (const auto& lit : clause) {
      names.insert(lit.predicate);
      for (const auto& t : lit.args) scan_term(t, constants, functions, names);
    }
  }
  for (const auto& c : extra_constants) {
    if (std::find(constants.begin(), constants.end(), c) == constants.end()) constants.push_back(c);
  }

  GroundClauses out;
  for (const auto& c : constants) out.universe.push_back(Term::constant(c));
  if (out.universe.empty()) {
    std::string name = "c0";
    for (std::size_t i = 1; names.count(name); ++i) name = "c" + std::to_string(i);
    out.universe.push_back(Term::constant(name));
  }

  std::set<std::string> seen_terms;
  for (const auto& t : out.universe) seen_terms.insert(print(t));
  for (std::size_t depth = 1; depth <= budget.max_term_depth && !functions.empty(); ++depth) {
    const auto previous = out.universe;
    for (const auto& [name, arity] : functions) {
      std::vector<std::size_t> idx(arity, 0);
      for (;;) {
        std::vector<Term> args;
        for (auto i : idx) args.push_back(previous[i]);
        auto term = Term::function(name, std::move(args));
        if (seen_terms.insert(print(term)).second) out.universe.push_back(std::move(term));
        if (out.universe.size() > budget.max_ground_clauses) return Exhausted{};
        std::size_t k = 0;
        while (k < arity && ++idx[k] == previous.size()) idx[k++] = 0;
        if (k == arity) break;
      }
    }
  }

  std::unordered_map<std::string, std::size_t> atom_index;
  std::set<std::vector<std::pair<bool, std::size_t>>> seen_clauses;
  std::size_t produced = 0;
  const auto n = out.universe.size();

  for (const auto& clause : cs.clauses) {
    std::vector<std::string> vars;
    for (const auto& lit : clause) {
      for (const auto& t : lit.args) collect_variables(t, vars);
    }
    std::size_t instances = 1;
    for (std::size_t i = 0; i < vars.size(); ++i) {
      if (instances > budget.max_ground_clauses / n) return Exhausted{};
      instances *= n;
    }
    if (produced + instances > budget.max_ground_clauses) return Exhausted{};
    produced += instances;

    std::vector<std::size_t> idx(vars.size(), 0);
    std::vector<const Term*> values(vars.size());
    for (std::size_t count = 0;; ++count) {
      if ((count & 1023) == 0 && Clock::now() > deadline) return Exhausted{};
      for (std::size_t i = 0; i < vars.size(); ++i) values[i] = &out.universe[idx[i]];

      std::vector<std::pair<bool, std::size_t>> ground;
      bool too_deep = false;
      for (const auto& lit : clause) {
        std::vector<Term> args;
        for (const auto& t : lit.args) {
          args.push_back(instantiate(t, vars, values));
          too_deep = too_deep || term_depth(args.back()) > budget.max_term_depth;
        }
        if (too_deep) break;
        auto key = atom_key(lit.predicate, args);
        auto [it, inserted] = atom_index.emplace(key, out.atoms.size());
        if (inserted) out.atoms.push_back(std::move(key));
        ground.emplace_back(lit.positive, it->second);
      }
      std::vector<std::pair<bool, std::size_t>> unique;
      for (const auto& lit : ground) {
        if (std::find(unique.begin(), unique.end(), lit) == unique.end()) unique.push_back(lit);
      }
      auto key = unique;
      std::sort(key.begin(), key.end());
      bool tautology = false;
      for (std::size_t i = 1; i < key.size(); ++i) {
        if (key[i].second == key[i - 1].second) tautology = true;
      }
      if (!too_deep && !tautology && seen_clauses.insert(key).second) {
        std::vector<GroundLiteral> lits;
        for (const auto& [pos, atom] : unique) lits.push_back(GroundLiteral{pos, atom});
        out.clauses.push_back(std::move(lits));
      }

      std::size_t k = 0;
      while (k < vars.size() && ++idx[k] == n) idx[k++] = 0;
      if (k == vars.size()) break;
    }
  }
  return out;
}

// Chronological-backtracking DPLL over two-watched-literal clauses.
class Dpll {
 public:
  explicit Dpll(const GroundClauses& g) : assign_(g.atoms.size(), 0), watches_(2 * g.atoms.size()) {
    for (const auto& c : g.clauses) {
      std::vector<int> lits;
      for (const auto& l : c) lits.push_back(static_cast<int>(2 * l.atom + (l.positive ? 0 : 1)));
      if (lits.empty()) {
        trivially_unsat_ = true;
      } else if (lits.size() == 1) {
        units_.push_back(lits[0]);
      } else {
        watches_[static_cast<std::size_t>(lits[0])].push_back(clauses_.size());
        watches_[static_cast<std::size_t>(lits[1])].push_back(clauses_.size());
        clauses_.push_back(std::move(lits));
      }
    }
  }

  std::optional<bool> solve(Clock::time_point deadline) {
    if (trivially_unsat_) return false;
    for (int u : units_) {
      if (value(u) == -1) return false;
      if (value(u) == 0) enqueue(u);
    }
    if (!propagate()) return false;
    std::size_t steps = 0;
    for (;;) {
      if ((++steps & 255) == 0 && Clock::now() > deadline) return std::nullopt;
      const int var = next_unassigned();
      if (var < 0) return true;
      decisions_.push_back(Decision{trail_.size(), 2 * var + 1, false});
      enqueue(2 * var + 1);
      while (!propagate()) {
        while (!decisions_.empty() && decisions_.back().flipped) {
          undo_to(decisions_.back().trail_size);
          decisions_.pop_back();
        }
        if (decisions_.empty()) return false;
        auto& d = decisions_.back();
        undo_to(d.trail_size);
        d.flipped = true;
        d.literal ^= 1;
        enqueue(d.literal);
      }
    }
  }

 private:
  struct Decision {
    std::size_t trail_size;
    int literal;
    bool flipped;
  };

  // 1 true, -1 false, 0 unassigned.
  int value(int lit) const {
    const int v = assign_[static_cast<std::size_t>(lit >> 1)];
    return (lit & 1) ? -v : v;
  }

  void enqueue(int lit) {
    assign_[static_cast<std::size_t>(lit >> 1)] = static_cast<signed char>((lit & 1) ? -1 : 1);
    trail_.push_back(lit);
  }

  void undo_to(std::size_t size) {
    while (trail_.size() > size) {
      assign_[static_cast<std::size_t>(trail_.back() >> 1)] = 0;
      trail_.pop_back();
    }
    head_ = std::min(head_, size);
  }

  int next_unassigned() {
    while (cursor_ < assign_.size() && assign_[cursor_] != 0) ++cursor_;
    if (cursor_ < assign_.size()) return static_cast<int>(cursor_);
    for (std::size_t i = 0; i < assign_.size(); ++i) {
      if (assign_[i] == 0) {
        cursor_ = i;
        return static_cast<int>(i);
      }
    }
    return -1;
  }

  bool propagate() {
    while (head_ < trail_.size()) {
      const int falsified = trail_[head_++] ^ 1;
      auto& list = watches_[static_cast<std::size_t>(falsified)];
      std::size_t keep = 0;
      for (std::size_t i = 0; i < list.size(); ++i) {
        const auto ci = list[i];
        auto& c = clauses_[ci];
        if (c[0] == falsified) std::swap(c[0], c[1]);
        if (value(c[0]) == 1) {
          list[keep++] = ci;
          continue;
        }
        bool moved = false;
        for (std::size_t k = 2; k < c.size(); ++k) {
          if (value(c[k]) != -1) {
            std::swap(c[1], c[k]);
            watches_[static_cast<std::size_t>(c[1])].push_back(ci);
            moved = true;
            break;
          }
        }
        if (moved) continue;
        list[keep++] = ci;
        if (value(c[0]) == -1) {
          for (std::size_t j = i + 1; j < list.size(); ++j) list[keep++] = list[j];
          list.resize(keep);
          return false;
        }
        enqueue(c[0]);
      }
      list.resize(keep);
    }
    return true;
  }

  std::vector<signed char> assign_;
  std::vector<std::vector<std::size_t>> watches_;
  std::vector<std::vector<int>> clauses_;
  std::vector<int> units_;
  std::vector<int> trail_;
  std::vector<Decision> decisions_;
  std::size_t head_ = 0;
  std::size_t cursor_ = 0;
  bool trivially_unsat_ = false;
};

// nullopt: budget exhausted.
std::optional<bool> unsatisfiable(const std::vector<Formula>& formulas, const Budget& budget,
                                  Clock::time_point deadline) {
  ClauseSet clauses;
  try {
    clauses = clausify(formulas, budget.max_ground_clauses);
  } catch (const ClauseLimitExceeded&) {
    return std::nullopt;
  }
  auto grounded = ground_until(clauses, budget, {}, deadline);
  const auto* g = std::get_if<GroundClauses>(&grounded);
  if (!g) return std::nullopt;
  auto sat = satisfiable(*g, deadline);
  if (!sat) return std::nullopt;
  return !*sat;
}

}  // namespace

std::variant<GroundClauses, Exhausted> ground(const ClauseSet& clauses, const Budget& budget,
                                              const std::vector<std::string>& constants) {
  validate(budget);
  return ground_until(clauses, budget, constants, Clock::now() + budget.wall_time);
}

std::optional<bool> satisfiable(const GroundClauses& ground, Clock::time_point deadline) {
  return Dpll(ground).solve(deadline);
}

// ---------------------------------------------------------------------------
// prove

ProveResult prove_checked(const std::vector<Formula>& premises, const Formula& conclusion, const Budget& budget,
                          bool strict) {
  validate(budget);
  std::vector<Formula> corpus = premises;
  corpus.push_back(conclusion);
  for (const auto& d : lint_corpus(corpus)) {
    if (d.kind == DiagnosticKind::ArityMismatch) return {Outcome::error(d), false};
  }

  const auto deadline = Clock::now() + budget.wall_time;
  std::vector<Formula> base;
  for (const auto& p : premises) base.push_back(universal_closure(p));
  const auto closed = universal_closure(conclusion);

  auto with_negation = base;
  with_negation.push_back(make_not(closed));
  const auto entailed = unsatisfiable(with_negation, budget, deadline);
  if (!entailed) return {Outcome::exhausted(), false};

  if (*entailed && !strict) return {Outcome::truth(true), false};

  auto with_conclusion = base;
  with_conclusion.push_back(closed);
  const auto refuted = unsatisfiable(with_conclusion, budget, deadline);
  if (*entailed) return {Outcome::truth(true), refuted.value_or(false)};
  if (!refuted) return {Outcome::exhausted(), false};
  return {*refuted ? Outcome::truth(false) : Outcome::unknown(), false};
}

Outcome prove(const std::vector<Formula>& premises, const Formula& conclusion, const Budget& budget) {
  return prove_checked(premises, conclusion, budget, false).outcome;
}

Outcome prove_text(const std::vector<std::string>& premises, std::string_view conclusion, const Budget& budget) {
  std::vector<Formula> parsed;
  for (const auto& p : premises) {
    auto r = parse(p);
    if (!r) return Outcome::error(r.diagnostic());
    parsed.push_back(r.formula());
  }
  auto c = parse(conclusion);
  if (!c) return Outcome::error(c.diagnostic());
  return prove(parsed, c.formula(), budget);
}

}  // namespace folforge::reasoner
