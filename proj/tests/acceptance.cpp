// Acceptance criteria 1-8: one PASS/FAIL line each; exit status 1 on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "folforge/augment.hpp"
#include "folforge/cli.hpp"
#include "folforge/diagnostics.hpp"
#include "folforge/perturb.hpp"
#include "folforge/pipeline.hpp"
#include "folforge/reasoner.hpp"
#include "folforge/syntax.hpp"
#include "folforge/verify.hpp"
#include "support/corpus.hpp"
#include "support/detection.hpp"
#include "support/generators.hpp"

using namespace folforge;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::optional<Formula> parsed(std::string_view text) {
  auto r = parse(text);
  if (!r) return std::nullopt;
  return r.formula();
}

std::vector<Formula> parsed_all(const std::vector<std::string>& texts) {
  std::vector<Formula> out;
  for (const auto& t : texts) out.push_back(*parsed(t));
  return out;
}

// ---------------------------------------------------------------------------
// 1. Taxonomy coverage over the error table's own example strings.

std::vector<DiagnosticKind> static_kinds(const std::vector<std::string>& texts) {
  std::vector<DiagnosticKind> out;
  std::vector<Formula> formulas;
  for (const auto& t : texts) {
    auto r = parse(t);
    if (!r) {
      out.push_back(r.diagnostic().kind);
      continue;
    }
    for (const auto& d : lint_formula(r.formula())) out.push_back(d.kind);
    formulas.push_back(r.formula());
  }
  for (const auto& d : lint_corpus(formulas)) out.push_back(d.kind);
  return out;
}

Outcome taxonomy() {
  struct Row {
    DiagnosticKind kind;
    std::function<std::vector<DiagnosticKind>()> detect;
  };
  auto statics = [](std::vector<std::string> texts) { return [texts] { return static_kinds(texts); }; };
  // Sense rows: the table pairs each erroneous translation with the true one.
  auto sense = [](std::vector<std::string> error, std::vector<std::string> truth) {
    return [error, truth] {
      return std::vector<DiagnosticKind>{pipeline::attribute_mismatch(parsed_all(error), parsed_all(truth))};
    };
  };
  const std::vector<Row> rows = {
      {DiagnosticKind::MissingQuantifier, statics({"BerkeleyCollege(x) ∧ ResidentialCollegeAt(x, yaleUniversity)"})},
      {DiagnosticKind::ParenthesisImbalance,
       statics({"BeneficialTo(cherry, people) ⊕ On(cherry, warningList)) → ¬RedFruit(cherry)"})},
      {DiagnosticKind::CompletionError,
       statics({"∀x (Athlete(x) → ¬NeverExercises(x)) Never: does not exist a time"})},
      {DiagnosticKind::QuantifierLocation,
       statics({"∃y (Own(emily, y) ∧ Roommate(y)) → ∃y (Own(emily, y) ∧ LiveIn(emily, apartment))"})},
      {DiagnosticKind::MissingVariable,
       statics({"∀x ∃y (In(indonesia) ∧ Prosecutor(x) ∧ SpecialCrime(y) → InvestigatePersonally(x, y))"})},
      {DiagnosticKind::SpecialToken, statics({"Endowment(yale, 42.3 billion)"})},
      {DiagnosticKind::UnknownOperator, statics({"∀x (Rating(x, y) ∧ y > 4 → Listed(x))"})},
      {DiagnosticKind::PredicateError,
       sense({"¬Solid2Pointers(jack) ∧ Successful3Pointers(jack)"}, {"¬GoodAt(jack, twos) ∧ GoodAt(jack, threes)"})},
      {DiagnosticKind::IncorrectQuantifier,
       sense({"∃x (FleaBeetle(x) → ¬InFamily(x, chrysomelidae))"}, {"∀x (FleaBeetle(x) → ¬In(x, chrysomelidaeFamily))"})},
      {DiagnosticKind::PredicateMismatch,
       sense({"¬High(NewHaven)", "Low(towerA)"}, {"¬High(NewHaven)", "¬High(towerA)"})},
      {DiagnosticKind::ArityMismatch,
       statics({"Sees(Tiger, Mouse)", "∀x (((Visits(x, Rabbit)) ∧ (Sees(Mouse))) → (Visits(x, Tiger)))"})},
      {DiagnosticKind::SubjectPredicate,
       statics({"Platypus(platypus) ∧ ¬Teeth(platypus) ∧ Mammal(platypus)"})},
  };
  const auto t0 = Clock::now();
  std::size_t hits = 0;
  std::string misses;
  for (const auto& row : rows) {
    const auto got = row.detect();
    // Exact: the expected kind is reported and nothing else is.
    const bool exact = !got.empty() && std::all_of(got.begin(), got.end(), [&](auto k) { return k == row.kind; });
    if (exact) {
      ++hits;
    } else {
      misses += " " + std::string(to_string(row.kind));
    }
  }
  const auto secs = seconds_since(t0);
  return {hits == 12 && rows.size() == 12 && secs < 1.0,
          std::to_string(hits) + "/12 kinds exact in " + fmt("%.3f", secs) + " s" +
              (misses.empty() ? "" : "; missed:" + misses)};
}

// ---------------------------------------------------------------------------
// 2. parse . print identity in both styles.

Outcome round_trip() {
  testing::FormulaGenerator gen(2718);
  const auto t0 = Clock::now();
  std::size_t ok = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto f = gen.next();
    auto u = parse(print(f, PrintStyle::Unicode));
    auto a = parse(print(f, PrintStyle::Ascii));
    // Ascii has no xor symbol; it round-trips to the xor-free equivalent.
    if (u && u.formula() == f && a && a.formula() == expand_xor(f)) ++ok;
  }
  const auto secs = seconds_since(t0);
  return {ok == 1000 && secs < 5.0, std::to_string(ok) + "/1000 in " + fmt("%.2f", secs) + " s"};
}

// ---------------------------------------------------------------------------
// 3. Prover vs model-enumeration oracle.

Outcome prover_oracle() {
  testing::InstanceGenerator gen(31337);
  const auto t0 = Clock::now();
  std::size_t compared = 0, agree = 0;
  std::map<std::string, std::size_t> labels;
  for (int i = 0; compared < 200 && i < 20000; ++i) {
    auto inst = gen.next();
    if (inst.premises.size() + 1 > 5) continue;
    reasoner::Outcome want = reasoner::Outcome::unknown();
    try {
      want = reasoner::oracle_prove(inst.premises, inst.conclusion);
    } catch (const std::invalid_argument&) {
      continue;
    }
    ++compared;
    const auto got = reasoner::prove(inst.premises, inst.conclusion);
    if (got == want) ++agree;
    ++labels[want.to_string()];
  }
  const auto secs = seconds_since(t0);
  std::string mix;
  for (const auto& [k, v] : labels) mix += " " + k + "=" + std::to_string(v);
  return {compared == 200 && agree == 200 && secs < 60.0,
          std::to_string(agree) + "/" + std::to_string(compared) + " agree in " + fmt("%.2f", secs) + " s; labels:" + mix};
}

// ---------------------------------------------------------------------------
// 4. Augmentation arithmetic.

std::vector<Record> corpus_with_mean(double mean, std::uint64_t seed) {
  // 1000 records whose premise counts sum to exactly 1000 * mean.
  const std::size_t total = static_cast<std::size_t>(std::llround(mean * 1000));
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> counts(1000, total / 1000);
  for (std::size_t extra = total % 1000, i = 0; i < extra; ++i) ++counts[i];
  // Spread the counts without changing the sum.
  for (int i = 0; i < 5000; ++i) {
    auto a = rng() % 1000, b = rng() % 1000;
    if (counts[a] > 1) --counts[a], ++counts[b];
  }
  std::vector<Record> out;
  for (std::size_t r = 0; r < counts.size(); ++r) {
    Record rec;
    rec.id = "a" + std::to_string(r);
    rec.conclusion = "C.";
    rec.conclusion_fol = "C(a)";
    rec.predicates = std::vector<std::string>{"C(x)"};
    rec.premises_fol = std::vector<std::string>{};
    for (std::size_t k = 0; k < counts[r]; ++k) {
      rec.premises.push_back("S" + std::to_string(k) + ".");
      rec.premises_fol->push_back("C(a)");
    }
    out.push_back(std::move(rec));
  }
  return out;
}

Outcome augmentation() {
  std::string detail;
  bool pass = true;
  for (auto [mean, target] : {std::pair{18.0, 20.0}, std::pair{5.3, 7.0}}) {
    const auto records = corpus_with_mean(mean, static_cast<std::uint64_t>(mean * 10));
    augment::Summary s;
    const auto examples = augment::augment_corpus(records, &s);
    std::size_t expected = 0;
    for (const auto& r : records) expected += r.premises.size() + 2;
    const double growth = s.growth();
    const bool ok = examples.size() == expected && s.examples == expected &&
                    std::abs(growth - target) <= 0.05 * target;
    pass = pass && ok;
    detail += (detail.empty() ? "" : "; ") + fmt("mean %.1f", mean) + " -> " + fmt("%.2fx", growth) +
              fmt(" (target %.0fx)", target);
  }
  return {pass, detail};
}

// ---------------------------------------------------------------------------
// 5. Pipeline filtering counts.

Outcome filtering() {
  auto corpus = testing::synthetic_corpus(100, {50, 30, 10, 10});
  pipeline::Options opts;
  std::ostringstream kept;
  auto report = pipeline::build_dataset(corpus.records, kept, opts);
  std::istringstream again(kept.str());
  auto retained = read_records(again);
  std::ostringstream sink;
  auto second = pipeline::build_dataset(retained, sink, opts);
  const bool counts = report.retained == 50 && report.rejected_semantic == 30 && report.rejected_syntax == 10 &&
                      report.rejected_format == 10;
  const bool refilter = second.retained == retained.size() && second.total() == retained.size();
  return {counts && refilter, "retained " + std::to_string(report.retained) + ", semantic " +
                                  std::to_string(report.rejected_semantic) + ", syntax " +
                                  std::to_string(report.rejected_syntax) + ", format " +
                                  std::to_string(report.rejected_format) + "; re-filter " + second.retention()};
}

// ---------------------------------------------------------------------------
// 6. Perturbation detectability.

Outcome detectability() {
  testing::GeneratorConfig cfg;
  cfg.max_depth = 5;
  cfg.allow_functions = false;
  const auto formulas = testing::clean_formulas(606, 3000, cfg);
  bool pass = true;
  std::string detail;
  for (auto kind : perturb::kFolKinds) {
    if (perturb::expected_diagnostics(kind).empty()) continue;
    std::size_t applied = 0, hit = 0;
    for (std::size_t i = 0; i < formulas.size() && applied < 100; ++i) {
      auto text = perturb::perturb_fol(formulas[i], kind, i);
      if (!text) continue;
      ++applied;
      if (testing::detected(formulas[i], *text, kind)) ++hit;
    }
    pass = pass && applied == 100 && hit == applied;
    detail += std::string(detail.empty() ? "" : ", ") + std::string(perturb::to_string(kind)) + " " +
              std::to_string(hit) + "/" + std::to_string(applied);
  }
  // Semantic kinds: a witness whose prove label changes.
  auto flips = [](perturb::PerturbKind kind, const char* premise, const char* conclusion) {
    auto p = *parsed(premise);
    auto c = *parsed(conclusion);
    auto text = perturb::perturb_fol(p, kind, 1);
    if (!text) return false;
    auto q = parsed(*text);
    return q && reasoner::prove({p}, c) != reasoner::prove({*q}, c);
  };
  const bool swap = flips(perturb::PerturbKind::SwapOperators, "∀x (P(x) ∧ Q(x))", "P(a)");
  const bool neg = flips(perturb::PerturbKind::AddOrOmitNegation, "P(a)", "P(a)");
  pass = pass && swap && neg;
  detail += std::string("; label flips: SwapOperators ") + (swap ? "yes" : "no") + ", AddOrOmitNegation " +
            (neg ? "yes" : "no");
  return {pass, detail};
}

// ---------------------------------------------------------------------------
// 7. Verifier modes.

Outcome verifier_modes() {
  Record rec;
  rec.id = "m";
  rec.premises = {"All rabbits are cute.", "Rex is a rabbit."};
  rec.conclusion = "Rex is cute.";
  rec.gold_label = Label::True;
  const std::vector<std::string> script = {"Rabbit(x)\nCute(x)", "∀x (Rabbit(x) → Cute(x))", "Rabbit(rex", "Cute(rex)"};
  verify::RuleCorrector pv;
  auto fixer = [] { return verify::MockCorrector(std::map<std::string, std::string>{{"Rabbit(rex", "Rabbit(rex)"}}); };
  auto fv_on = fixer(), fv_off = fixer();
  verify::MockPlayback on_gen(script), off_gen(script);
  auto on = verify::run_incremental(on_gen, rec, verify::Mode::OnOn, &pv, &fv_on);
  auto off = verify::run_incremental(off_gen, rec, verify::Mode::OnOff, &pv, &fv_off);
  const auto& pon = on_gen.prompts();
  const auto& poff = off_gen.prompts();
  const bool steps = pon.size() == 4 && poff.size() == 4;
  const bool same_prefix = steps && pon[0] == poff[0] && pon[1] == poff[1] && pon[2] == poff[2];
  const bool forward = steps && pon[3].find("\nRabbit(rex) ::: Rex is a rabbit.") != std::string::npos;
  const bool not_forward = steps && poff[3].find("\nRabbit(rex ::: Rex is a rabbit.") != std::string::npos;
  const bool final_fixed = on.translation.premises[1].fol == "Rabbit(rex)" && off.translation.premises[1].fol == "Rabbit(rex)";
  std::ostringstream d;
  d << "steps OnOn=" << pon.size() << " OnOff=" << poff.size() << "; correction fed forward: OnOn "
    << (forward ? "yes" : "no") << ", OnOff " << (not_forward ? "no" : "yes") << "; final translations corrected: "
    << (final_fixed ? "both" : "not both");
  return {steps && same_prefix && forward && not_forward && final_fixed, d.str()};
}

// ---------------------------------------------------------------------------
// 8. CLI determinism.

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism() {
  const auto dir = fs::temp_directory_path() / "folforge_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  {
    std::ofstream out(dir / "records.jsonl");
    for (const auto& r : testing::synthetic_corpus(808, {40, 12, 4, 4}).records) write_record(out, r);
  }
  auto cli = [&](std::vector<std::string> args) {
    args.insert(args.begin(), "folforge");
    std::ostringstream out, err;
    return folforge::cli::run(args, out, err);
  };
  auto path = [&](const std::string& name) { return (dir / name).string(); };
  struct Cmd {
    std::string name;
    std::function<std::vector<std::string>(const std::string& tag, const std::string& workers)> args;
    std::vector<std::string> outputs;
  };
  const std::vector<Cmd> cmds = {
      {"filter",
       [&](const std::string& t, const std::string& w) {
         return std::vector<std::string>{"filter", "--in", path("records.jsonl"), "--out", path("kept" + t + ".jsonl"),
                                         "--report", path("report" + t + ".json"), "--workers", w};
       },
       {"kept", "report"}},
      {"perturb --seed 7",
       [&](const std::string& t, const std::string& w) {
         return std::vector<std::string>{"perturb", "--in", path("kept_seed.jsonl"), "--out", path("verifier" + t + ".jsonl"),
                                         "--report", path("composition" + t + ".json"), "--seed", "7", "--workers", w};
       },
       {"verifier", "composition"}},
      {"augment",
       [&](const std::string& t, const std::string& w) {
         return std::vector<std::string>{"augment", "--in", path("kept_seed.jsonl"), "--out", path("sft" + t + ".jsonl"),
                                         "--workers", w};
       },
       {"sft"}},
  };
  bool pass = true;
  std::string detail;
  for (const auto& cmd : cmds) {
    bool same = true;
    const std::vector<std::pair<std::string, std::string>> runs = {{"_a", "1"}, {"_b", "1"}, {"_c", "4"}};
    for (const auto& [tag, workers] : runs) same = same && cli(cmd.args(tag, workers)) == 0;
    if (cmd.name == "filter") fs::copy_file(dir / "kept_a.jsonl", dir / "kept_seed.jsonl", fs::copy_options::overwrite_existing);
    for (const auto& stem : cmd.outputs) {
      auto ext = stem == "report" || stem == "composition" ? ".json" : ".jsonl";
      const auto a = slurp(dir / (stem + "_a" + ext));
      same = same && !a.empty() && a == slurp(dir / (stem + "_b" + ext)) && a == slurp(dir / (stem + "_c" + ext));
    }
    pass = pass && same;
    detail += (detail.empty() ? "" : ", ") + cmd.name + (same ? " identical" : " DIFFERS");
  }
  fs::remove_all(dir);
  return {pass, detail + " (two runs, workers 1 vs 4)"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"taxonomy coverage", taxonomy},
      {"parser round-trip", round_trip},
      {"prover-oracle equivalence", prover_oracle},
      {"augmentation arithmetic", augmentation},
      {"pipeline filtering", filtering},
      {"perturbation detectability", detectability},
      {"verifier-mode semantics", verifier_modes},
      {"determinism", determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o{false, ""};
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << i + 1 << " (" << criteria[i].first << "): " << o.detail
              << std::endl;
  }
  return failures ? 1 : 0;
}
