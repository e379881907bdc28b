#include "folforge/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <optional>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

#include "folforge/extraction.hpp"
#include "folforge/syntax.hpp"

namespace folforge::pipeline {

std::string_view to_string(Stage s) {
  switch (s) {
    case Stage::Format: return "format";
    case Stage::Syntax: return "syntax";
    case Stage::Semantic: return "semantic";
  }
  return "?";
}

namespace {

struct Analysis {
  std::optional<Rejection> rejection;
  std::vector<Diagnostic> diagnostics;  // everything found, for error_distribution
  Record output;
};

Diagnostic completion(std::string message) {
  return make_diagnostic(DiagnosticKind::CompletionError, Severity::Error, {}, std::move(message));
}

// Quantifier kinds in pre-order, for spotting ∀/∃ swaps.
void quantifiers(const Formula& f, std::vector<QuantifierKind>& out) {
  if (const auto* n = f.get<Negation>()) {
    quantifiers(n->operand, out);
  } else if (const auto* b = f.get<Binary>()) {
    quantifiers(b->left, out);
    quantifiers(b->right, out);
  } else if (const auto* q = f.get<Quantified>()) {
    out.push_back(q->kind);
    quantifiers(q->body, out);
  }
}

void atoms(const Formula& f, std::vector<const Atom*>& out) {
  if (const auto* a = f.get<Atom>()) {
    out.push_back(a);
  } else if (const auto* n = f.get<Negation>()) {
    atoms(n->operand, out);
  } else if (const auto* b = f.get<Binary>()) {
    atoms(b->left, out);
    atoms(b->right, out);
  } else {
    atoms(f.get<Quantified>()->body, out);
  }
}

std::optional<std::vector<Formula>> parse_all(const std::vector<std::string>& texts) {
  std::vector<Formula> out;
  for (const auto& t : texts) {
    auto r = parse(t);
    if (!r) return std::nullopt;
    out.push_back(r.formula());
  }
  return out;
}

Analysis analyze(const Record& rec, const Options& opts, bool collect_all) {
  Analysis a;
  a.output = rec;
  auto reject = [&](Stage stage, std::vector<Diagnostic> diags, std::string reason) {
    if (!a.rejection) a.rejection = Rejection{stage, std::move(diags), std::move(reason)};
  };

  // Format
  std::vector<std::string> fols;
  std::vector<std::string> predicates = rec.predicates.value_or(std::vector<std::string>{});
  if (rec.generation) {
    auto ex = extract(*rec.generation, rec.premises.size());
    if (!ex) {
      a.diagnostics = ex.diagnostics();
      reject(Stage::Format, ex.diagnostics(), "extraction");
      return a;
    }
    const auto& t = ex.translation();
    predicates = t.predicates;
    for (const auto& p : t.premises) fols.push_back(p.fol);
    fols.push_back(t.conclusion.fol);
  } else if (rec.premises_fol && rec.conclusion_fol && rec.premises_fol->size() == rec.premises.size()) {
    fols = *rec.premises_fol;
    fols.push_back(*rec.conclusion_fol);
  } else {
    std::string msg = !rec.premises_fol || !rec.conclusion_fol
                          ? "record carries neither a generation nor premise/conclusion FOLs"
                          : "expected " + std::to_string(rec.premises.size()) + " premise FOL(s), found " +
                                std::to_string(rec.premises_fol->size());
    a.diagnostics = {completion(msg)};
    reject(Stage::Format, a.diagnostics, "missing_fol");
    return a;
  }

  // Syntax
  std::vector<Formula> formulas;
  std::vector<Diagnostic> syntax;
  bool parse_failed = false;
  for (std::size_t i = 0; i < fols.size(); ++i) {
    auto r = parse(fols[i]);
    if (!r) {
      auto d = r.diagnostic();
      d.source = i;
      syntax.push_back(d);
      parse_failed = true;
      continue;
    }
    formulas.push_back(r.formula());
    for (auto d : lint_formula(r.formula())) {
      d.source = i;
      syntax.push_back(std::move(d));
    }
  }
  std::vector<PredicateDecl> decls;
  for (const auto& p : predicates) {
    if (auto d = parse_predicate_decl(p)) decls.push_back(*d);
  }
  if (!parse_failed) {
    for (auto& d : lint_corpus(formulas, decls)) syntax.push_back(std::move(d));
  }
  a.diagnostics = syntax;
  const auto errors = error_count(syntax);
  if (errors > 0 || (opts.strict_lints && !syntax.empty())) {
    reject(Stage::Syntax, syntax, errors > 0 ? (parse_failed ? "parse" : "lint") : "lint");
    if (!collect_all || parse_failed || errors > 0) return a;
  }

  // Semantic
  const std::vector<Formula> premises(formulas.begin(), formulas.end() - 1);
  const auto& conclusion = formulas.back();
  const auto proved = reasoner::prove_checked(premises, conclusion, opts.budget, opts.strict_lints);
  const auto value = proved.outcome.value();
  if (value == Label::Exhausted) {
    reject(Stage::Semantic, {}, "exhausted");
  } else if (value != rec.gold_label) {
    std::vector<Formula> reference;
    if (rec.reference) {
      std::vector<std::string> texts = rec.reference->premises_fol;
      texts.push_back(rec.reference->conclusion_fol);
      reference = parse_all(texts).value_or(std::vector<Formula>{});
    }
    const auto kind = attribute_mismatch(formulas, reference);
    auto d = make_diagnostic(kind, Severity::Error, {},
                             "prover says " + proved.outcome.to_string() + ", gold label is " +
                                 std::string(reasoner::label_to_string(rec.gold_label)));
    a.diagnostics.push_back(d);
    reject(Stage::Semantic, {d}, "label_mismatch");
  } else if (opts.strict_lints && proved.contradictory_premises) {
    reject(Stage::Semantic, {}, "contradictory_premises");
  }
  if (a.rejection) return a;

  std::vector<std::string> canonical;
  for (const auto& f : formulas) canonical.push_back(print(f));
  a.output.conclusion_fol = canonical.back();
  canonical.pop_back();
  a.output.premises_fol = std::move(canonical);
  if (!predicates.empty() || rec.predicates) a.output.predicates = predicates;
  a.output.generation.reset();
  return a;
}

}  // namespace

DiagnosticKind attribute_mismatch(const std::vector<Formula>& translated, const std::vector<Formula>& reference) {
  if (reference.size() != translated.size()) return DiagnosticKind::PredicateError;
  for (std::size_t i = 0; i < translated.size(); ++i) {
    const auto& t = translated[i];
    const auto& r = reference[i];
    if (print(t) == print(r)) continue;
    std::vector<QuantifierKind> qt, qr;
    quantifiers(t, qt);
    quantifiers(r, qr);
    if (qt.size() == qr.size() && qt != qr) return DiagnosticKind::IncorrectQuantifier;
    std::vector<const Atom*> at, ar;
    atoms(t, at);
    atoms(r, ar);
    if (at.size() == ar.size()) {
      for (std::size_t k = 0; k < at.size(); ++k) {
        if (at[k]->predicate != ar[k]->predicate && at[k]->args == ar[k]->args) return DiagnosticKind::PredicateMismatch;
      }
    }
    return DiagnosticKind::PredicateError;
  }
  return DiagnosticKind::PredicateError;
}

FilterResult filter_record(const Record& rec, const Options& opts) {
  auto a = analyze(rec, opts, false);
  if (a.rejection) return std::move(*a.rejection);
  return std::move(a.output);
}

std::string FilterReport::retention() const {
  std::ostringstream s;
  s << std::fixed << std::setprecision(1) << (total() ? 100.0 * static_cast<double>(retained) / static_cast<double>(total()) : 0.0)
    << '%';
  return s.str();
}

nlohmann::ordered_json FilterReport::to_json() const {
  nlohmann::ordered_json j;
  j["input"] = total();
  j["retained"] = retained;
  j["rejected_format"] = rejected_format;
  j["rejected_syntax"] = rejected_syntax;
  j["rejected_semantic"] = rejected_semantic;
  j["exhausted"] = exhausted;
  j["retention"] = retention();
  j["per_kind"] = nlohmann::ordered_json::parse(histogram_json(per_kind));
  return j;
}

namespace {

template <typename T, typename Fn>
std::vector<T> parallel_map(std::size_t n, std::size_t workers, Fn fn) {
  std::vector<std::optional<T>> slots(n);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < n;) {
      try {
        slots[i].emplace(fn(i));
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  workers = std::max<std::size_t>(1, std::min(workers, n));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  std::vector<T> out;
  out.reserve(n);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

}  // namespace

std::vector<FilterResult> filter_all(const std::vector<Record>& records, const Options& opts) {
  return parallel_map<FilterResult>(records.size(), opts.workers,
                                    [&](std::size_t i) { return filter_record(records[i], opts); });
}

FilterReport build_dataset(const std::vector<Record>& records, std::ostream& out, const Options& opts) {
  FilterReport report;
  for (const auto& r : filter_all(records, opts)) {
    if (r.retained()) {
      ++report.retained;
      write_record(out, r.record());
      continue;
    }
    const auto& rej = r.rejection();
    switch (rej.stage) {
      case Stage::Format: ++report.rejected_format; break;
      case Stage::Syntax: ++report.rejected_syntax; break;
      case Stage::Semantic: ++report.rejected_semantic; break;
    }
    if (rej.reason == "exhausted") ++report.exhausted;
    for (const auto& [key, count] : taxonomy_report(rej.diagnostics)) report.per_kind[key] += count;
  }
  return report;
}

FilterReport build_dataset(const std::string& in_path, const std::string& out_path, const Options& opts) {
  const auto records = read_records_file(in_path);
  const std::string tmp = out_path + ".tmp";
  try {
    FilterReport report;
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) throw std::runtime_error("cannot write " + tmp);
      report = build_dataset(records, out, opts);
      out.flush();
      if (!out) throw std::runtime_error("write failed for " + tmp);
    }
    std::filesystem::rename(tmp, out_path);
    return report;
  } catch (...) {
    std::error_code ec;
    std::filesystem::remove(tmp, ec);
    throw;
  }
}

Histogram error_distribution(const std::vector<Record>& records, const Options& opts) {
  auto per_record = parallel_map<std::vector<Diagnostic>>(
      records.size(), opts.workers, [&](std::size_t i) { return analyze(records[i], opts, true).diagnostics; });
  Histogram h;
  for (const auto& diags : per_record) {
    for (const auto& [key, count] : taxonomy_report(diags)) h[key] += count;
  }
  return h;
}

}  // namespace folforge::pipeline
