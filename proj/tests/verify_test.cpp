#include <doctest.h>

#include <httplib.h>

#include <random>
#include <thread>

#include "folforge/syntax.hpp"
#include "folforge/verify.hpp"
#include "support/generators.hpp"

using namespace folforge;
using namespace folforge::verify;

namespace {

Record two_premise_record() {
  Record r;
  r.id = "r1";
  r.premises = {"All rabbits are cute.", "Rex is a rabbit."};
  r.conclusion = "Rex is cute.";
  r.gold_label = Label::True;
  return r;
}

const std::vector<std::string> kScript = {
    "Predicates:\nRabbit(x) ::: x is a rabbit\nCute(x) ::: x is cute",
    "∀x (Rabbit(x) → Cute(x)) ::: All rabbits are cute.",
    "Rabbit(rex",  // wrong at step 2
    "Cute(rex) ::: Rex is cute.",
};

MockCorrector fixing_corrector() { return MockCorrector(std::map<std::string, std::string>{{"Rabbit(rex", "Rabbit(rex)"}}); }

}  // namespace

TEST_CASE("MockPlayback replays in order and fails when exhausted") {
  MockPlayback gen({"a", "b"});
  CHECK(gen.generate("p1", 3) == "a");
  CHECK(gen.generate("p2", 4) == "b");
  CHECK_THROWS_AS(gen.generate("p3", 5), GeneratorError);
  CHECK(gen.prompts() == std::vector<std::string>{"p1", "p2", "p3"});
  CHECK(gen.budgets() == std::vector<std::size_t>{3, 4, 5});
}

TEST_CASE("run_vanilla routes one call through extraction") {
  auto rec = two_premise_record();
  const std::string block =
      "Predicates:\nRabbit(x) ::: x is a rabbit\nCute(x) ::: x is cute\nPremises:\n"
      "∀x (Rabbit(x) → Cute(x)) ::: All rabbits are cute.\nRabbit(rex) ::: Rex is a rabbit.\n"
      "Conclusion:\nCute(rex) ::: Rex is cute.";
  MockPlayback clean({block});
  auto r = run_vanilla(clean, rec);
  REQUIRE(r.ok());
  CHECK(clean.prompts().size() == 1);
  CHECK(r.translation().premises.size() == 2);

  MockPlayback wrapped({"Sure! Here is the translation.\n\n" + block + "\n\nLet me know if you need more."});
  auto w = run_vanilla(wrapped, rec);
  REQUIRE(w.ok());
  CHECK(w.translation() == r.translation());

  MockPlayback short_one({"Premises:\nRabbit(rex) ::: Rex is a rabbit.\nConclusion:\nCute(rex) ::: Rex is cute."});
  auto s = run_vanilla(short_one, rec);
  REQUIRE_FALSE(s.ok());
  CHECK(s.diagnostics().front().kind == DiagnosticKind::CompletionError);
}

TEST_CASE("OnOn feeds the correction forward, OnOff corrects only the final translation") {
  auto rec = two_premise_record();
  RuleCorrector pv;

  MockPlayback on_gen(kScript);
  auto fv_on = fixing_corrector();
  auto on = run_incremental(on_gen, rec, Mode::OnOn, &pv, &fv_on);

  MockPlayback off_gen(kScript);
  auto fv_off = fixing_corrector();
  auto off = run_incremental(off_gen, rec, Mode::OnOff, &pv, &fv_off);

  REQUIRE(on_gen.prompts().size() == 4);
  REQUIRE(off_gen.prompts().size() == 4);
  const auto& step3_on = on_gen.prompts()[3];
  const auto& step3_off = off_gen.prompts()[3];
  CHECK(step3_on.find("Rabbit(rex) ::: Rex is a rabbit.") != std::string::npos);
  CHECK(step3_off.find("Rabbit(rex ::: Rex is a rabbit.") != std::string::npos);
  // Prompts agree up to and including the erroneous step.
  for (std::size_t i = 0; i < 3; ++i) CHECK(on_gen.prompts()[i] == off_gen.prompts()[i]);
  CHECK(on.translation.premises[1].fol == "Rabbit(rex)");
  CHECK(off.translation.premises[1].fol == "Rabbit(rex)");
  CHECK(on.translation == off.translation);
}

TEST_CASE("mode None passes generations through unchanged") {
  auto rec = two_premise_record();
  std::vector<std::string> raw = {"Rabbit(x)\nCute(x)", "∀x (Rabbit(x) → Cute(x))", "Rabbit(rex", "Cute(rex)"};
  MockPlayback gen(raw);
  auto r = run_incremental(gen, rec, Mode::None, nullptr, nullptr);
  CHECK(r.transcript == "Predicates:\n" + raw[0] + "\nPremises:\n" + raw[1] + " ::: " + rec.premises[0] + "\n" + raw[2] +
                            " ::: " + rec.premises[1] + "\nConclusion:\n" + raw[3] + " ::: " + rec.conclusion);
  CHECK(r.translation.premises[1].fol == "Rabbit(rex");
  CHECK(r.audit.size() == 4);
  for (const auto& e : r.audit) CHECK(e.verdict == "generated");
}

TEST_CASE("prompts accumulate every accepted output") {
  auto rec = two_premise_record();
  MockPlayback gen(kScript);
  RuleCorrector rule;
  run_incremental(gen, rec, Mode::OnOn, &rule, &rule);
  const auto& p = gen.prompts();
  CHECK(p[0] == std::string(augment::kPredicateInstruction) + "\n\n" + augment::input_core(rec));
  CHECK(p[1].rfind(augment::kFolInstruction, 0) == 0);
  CHECK(p[1].find("Predicates:\nRabbit(x) ::: x is a rabbit\nCute(x) ::: x is cute") != std::string::npos);
  CHECK(p[2].find("∀x (Rabbit(x) → Cute(x)) ::: All rabbits are cute.") != std::string::npos);
  // The rule corrector balances the parenthesis online.
  CHECK(p[3].find("\nRabbit(rex) ::: Rex is a rabbit.") != std::string::npos);
}

TEST_CASE("domino effect: a corrupting FOL corrector degrades later prompts only online") {
  auto rec = two_premise_record();
  std::vector<std::string> clean = {"Rabbit(x)\nCute(x)", "∀x (Rabbit(x) → Cute(x))", "Rabbit(rex)", "Cute(rex)"};
  MockCorrector corrupt([](Task, const std::string& fol) { return "¬" + fol; });
  RuleCorrector pv;

  MockPlayback none_gen(clean), on_gen(clean), off_gen(clean);
  run_incremental(none_gen, rec, Mode::None, nullptr, nullptr);
  auto on = run_incremental(on_gen, rec, Mode::OnOn, &pv, &corrupt);
  auto off = run_incremental(off_gen, rec, Mode::OnOff, &pv, &corrupt);
  CHECK(off_gen.prompts() == none_gen.prompts());
  CHECK(on_gen.prompts()[0] == none_gen.prompts()[0]);
  CHECK(on_gen.prompts()[1] == none_gen.prompts()[1]);
  for (std::size_t i = 2; i < 4; ++i) {
    CHECK(on_gen.prompts()[i] != none_gen.prompts()[i]);
    CHECK(on_gen.prompts()[i].find("¬∀x") != std::string::npos);
  }
  CHECK(on.translation.conclusion.fol == "¬Cute(rex)");
  CHECK(off.translation.conclusion.fol == "¬Cute(rex)");
}

TEST_CASE("unparseable replacement keeps the original and warns") {
  auto rec = two_premise_record();
  std::vector<std::string> clean = {"Rabbit(x)\nCute(x)", "∀x (Rabbit(x) → Cute(x))", "Rabbit(rex)", "Cute(rex)"};
  MockCorrector broken([](Task, const std::string&) { return std::string("((("); });
  RuleCorrector pv;
  MockPlayback gen(clean);
  auto r = run_incremental(gen, rec, Mode::OnOn, &pv, &broken);
  CHECK(r.translation.premises[0].fol == clean[1]);
  std::size_t warnings = 0;
  for (const auto& e : r.audit) {
    if (e.phase == "verify_fol") {
      CHECK(e.verdict == "rejected");
      CHECK(e.warning.has_value());
      CHECK_FALSE(e.replacement.has_value());
      ++warnings;
    }
  }
  CHECK(warnings == 3);
}

TEST_CASE("generator failure aborts with the partial audit log") {
  auto rec = two_premise_record();
  MockPlayback gen({"Rabbit(x)", "∀x (Rabbit(x) → Cute(x))"});
  RuleCorrector rule;
  try {
    run_incremental(gen, rec, Mode::OnOn, &rule, &rule);
    FAIL("expected RunError");
  } catch (const RunError& e) {
    CHECK(std::string(e.what()).find("step 2") != std::string::npos);
    // step 0 generate + verify, step 1 generate + verify
    CHECK(e.audit.size() == 4);
    CHECK(e.audit.back().phase == "verify_fol");
  }
}

TEST_CASE("token policy picks the short budget for short sentences") {
  TokenPolicy p;
  CHECK(p.budget_for("Rex is a rabbit.") == 16);
  CHECK(p.budget_for("All rabbits that are cute are furry.") == 128);
  CHECK(p.budget_for("one two three four five") == 128);
  CHECK(p.budget_for("") == 16);
  TokenPolicy bad;
  bad.short_budget = 128;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  auto rec = two_premise_record();
  MockPlayback gen(kScript);
  run_incremental(gen, rec, Mode::None, nullptr, nullptr);
  CHECK(gen.budgets() == std::vector<std::size_t>{128, 16, 16, 16});
  rec.premises[0] = "Every rabbit in the garden is cute.";
  MockPlayback gen2(kScript);
  run_incremental(gen2, rec, Mode::None, nullptr, nullptr);
  CHECK(gen2.budgets() == std::vector<std::size_t>{128, 128, 16, 16});
}

TEST_CASE("audit log reconstructs the run") {
  auto rec = two_premise_record();
  for (auto mode : {Mode::None, Mode::OnOff, Mode::OnOn}) {
    MockPlayback gen(kScript);
    RuleCorrector rule;
    auto r = run_incremental(gen, rec, mode, &rule, &rule);
    CHECK(reconstruct(r.audit, rec) == r.translation);
    for (const auto& e : r.audit) {
      CHECK(e.prompt_hash.size() == 16);
      auto j = to_json(e);
      CHECK(j.contains("step"));
      CHECK(j.contains("verdict"));
      CHECK(j.contains("replacement") == e.replacement.has_value());
    }
  }
  CHECK(prompt_hash("") == "cbf29ce484222325");
  CHECK(prompt_hash("a") == "af63dc4c8601ec8c");
}

TEST_CASE("rule_correct examples") {
  const std::vector<std::string> preds = {"P(x)", "Q(x)"};
  auto closure = rule_correct_fol("P(x) ∧ Q(x)", preds);
  REQUIRE(closure.kind == Verdict::Kind::Replacement);
  CHECK(closure.text == "∀x (P(x) ∧ Q(x))");
  CHECK(fol_error_count(closure.text, preds) == 0);

  auto paren = rule_correct_fol("∀x (P(x) → Q(x)", preds);
  REQUIRE(paren.kind == Verdict::Kind::Replacement);
  CHECK(paren.text == "∀x (P(x) → Q(x))");

  CHECK(rule_correct_fol("∀x (P(x) → Q(x))", preds).kind == Verdict::Kind::Correct);

  auto extra = rule_correct_fol("∀x (P(x) → Q(x))) ", preds);
  REQUIRE(extra.kind == Verdict::Kind::Replacement);
  CHECK(extra.text == "∀x (P(x) → Q(x))");

  auto prose = rule_correct_fol("∀x (P(x) → Q(x)) which means every P is Q", preds);
  REQUIRE(prose.kind == Verdict::Kind::Replacement);
  CHECK(prose.text == "∀x (P(x) → Q(x))");

  const std::vector<std::string> loves = {"Loves(x, y)", "Loves(x, y)", "Loves(x)", "Person(x)"};
  auto truncated = rule_correct_fol("∀x ∀y (Loves(x, y, x) → Person(x))", loves);
  REQUIRE(truncated.kind == Verdict::Kind::Replacement);
  CHECK(truncated.text == "∀x ∀y (Loves(x, y) → Person(x))");
  auto padded = rule_correct_fol("∀x (Person(x) → Loves(x) ∧ Loves(x, alice))", loves);
  REQUIRE(padded.kind == Verdict::Kind::Replacement);
  CHECK(padded.text == "∀x (Person(x) → (Loves(x, x) ∧ Loves(x, alice)))");

  auto hopeless = rule_correct_fol("→ → ∧", preds);
  CHECK(hopeless.kind == Verdict::Kind::NotRepaired);
  CHECK(hopeless.text == "→ → ∧");
}

TEST_CASE("rule_correct predicates") {
  CHECK(rule_correct_predicates({"Cat(x)", "Furry(x)"}).kind == Verdict::Kind::Correct);
  auto plural = rule_correct_predicates({"Cat(x)", "Cats(x)", "Furry(x)"});
  REQUIRE(plural.kind == Verdict::Kind::Replacement);
  CHECK(plural.text == "Cat(x)\nFurry(x)");
  auto arity = rule_correct_predicates({"Owns(x, y)", "Owns(x)", "Owns(x, y)", "this is prose"});
  REQUIRE(arity.kind == Verdict::Kind::Replacement);
  CHECK(arity.text == "Owns(x, y)");

  RuleCorrector rule;
  auto v = rule.correct(Task::Predicate, perturb::predicate_context({"Tom is a cat."}, "Tom is furry.", {"Cat(x)", "Cats(x)"}));
  CHECK(v.kind == Verdict::Kind::Replacement);
  CHECK(v.text == "Cat(x)");
}

TEST_CASE("property: rule_correct replacements strictly reduce errors; correct is never false") {
  testing::GeneratorConfig cfg;
  cfg.max_depth = 4;
  testing::FormulaGenerator formulas(99, cfg);
  std::mt19937_64 rng(5);
  const std::vector<std::string> preds = {"P(x)", "Q(x, y)", "R(x)", "S"};
  const std::vector<std::string> noise = {"(", ")", ")", " x", " and then", ",", "∀"};
  std::size_t replaced = 0, correct = 0, kept = 0;
  for (int i = 0; i < 600; ++i) {
    auto text = print(formulas.next());
    const auto edits = rng() % 3;
    for (std::uint64_t e = 0; e < edits; ++e) {
      const auto at = rng() % (text.size() + 1);
      if (rng() % 2 && at < text.size() && static_cast<unsigned char>(text[at]) < 0x80) {
        text.erase(at, 1);
      } else if (at == text.size() || static_cast<unsigned char>(text[at]) < 0x80) {
        text.insert(at, noise[rng() % noise.size()]);
      }
    }
    const auto before = fol_error_count(text, preds);
    auto v = rule_correct_fol(text, preds);
    switch (v.kind) {
      case Verdict::Kind::Correct:
        CHECK(before == 0);
        ++correct;
        break;
      case Verdict::Kind::Replacement:
        CHECK(parse(v.text).ok());
        CHECK(fol_error_count(v.text, preds) < before);
        ++replaced;
        break;
      case Verdict::Kind::NotRepaired:
        CHECK(before > 0);
        CHECK(v.text == text);
        ++kept;
        break;
    }
  }
  CHECK(replaced > 50);
  CHECK(correct > 50);
  CHECK(kept > 0);
}

TEST_CASE("context round trips") {
  auto fc = parse_fol_context(perturb::fol_context({"P(x)", "Q(x)"}, "∀x P(x)", "All are P."));
  REQUIRE(fc);
  CHECK(fc->predicates == std::vector<std::string>{"P(x)", "Q(x)"});
  CHECK(fc->fol == "∀x P(x)");
  CHECK(fc->sentence == "All are P.");
  auto pc = parse_predicate_context(perturb::predicate_context({"a.", "b."}, "c.", {"P(x)"}));
  REQUIRE(pc);
  CHECK(pc->premises == std::vector<std::string>{"a.", "b."});
  CHECK(pc->conclusion == "c.");
  CHECK(pc->predicates == std::vector<std::string>{"P(x)"});
  CHECK_FALSE(parse_fol_context("garbage"));
}

TEST_CASE("ExternalEndpoint speaks the JSON protocol against a local server") {
  httplib::Server server;
  std::string seen_auth;
  nlohmann::json seen_body;
  server.Post("/gen", [&](const httplib::Request& req, httplib::Response& res) {
    seen_auth = req.get_header_value("Authorization");
    seen_body = nlohmann::json::parse(req.body);
    if (seen_body["prompt"] == "slow") std::this_thread::sleep_for(std::chrono::milliseconds(1500));
    if (seen_body["prompt"] == "bad") {
      res.status = 500;
      return;
    }
    if (seen_body["prompt"] == "shape") {
      res.set_content("{\"nope\": 1}", "application/json");
      return;
    }
    const auto prompt = seen_body["prompt"].get<std::string>();
    res.set_content(nlohmann::json{{"text", prompt.find("FOL:") != std::string::npos ? "correct" : "echo:" + prompt}}.dump(),
                    "application/json");
  });
  const int port = server.bind_to_any_port("127.0.0.1");
  std::thread th([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  EndpointConfig cfg{"http://127.0.0.1:" + std::to_string(port) + "/gen", "secret", std::chrono::milliseconds(500)};
  ExternalEndpoint gen(cfg);
  CHECK(gen.generate("hello", 7) == "echo:hello");
  CHECK(seen_auth == "Bearer secret");
  CHECK(seen_body["max_new_tokens"] == 7);
  CHECK_THROWS_AS(gen.generate("bad", 1), GeneratorError);
  CHECK_THROWS_AS(gen.generate("shape", 1), GeneratorError);
  const auto t0 = std::chrono::steady_clock::now();
  CHECK_THROWS_AS(gen.generate("slow", 1), GeneratorError);
  CHECK(std::chrono::steady_clock::now() - t0 < std::chrono::milliseconds(1400));

  ExternalCorrector corrector(cfg);
  CHECK(corrector.correct(Task::FOL, perturb::fol_context({"P(x)"}, "P(a)", "a is P.")).kind == Verdict::Kind::Correct);
  auto v = corrector.correct(Task::Predicate, "ctx");
  CHECK(v.kind == Verdict::Kind::Replacement);
  CHECK(v.text == "echo:ctx");

  server.stop();
  th.join();

  ExternalEndpoint dead(EndpointConfig{"http://127.0.0.1:" + std::to_string(port) + "/gen", "", std::chrono::milliseconds(300)});
  CHECK_THROWS_AS(dead.generate("x", 1), GeneratorError);
  CHECK_THROWS_AS(ExternalEndpoint(EndpointConfig{"https://example.com", "", std::chrono::milliseconds(1)}), std::invalid_argument);
}

TEST_CASE("infer_all keeps input order across workers") {
  std::vector<Record> records;
  for (int i = 0; i < 12; ++i) {
    auto r = two_premise_record();
    r.id = "r" + std::to_string(i);
    r.conclusion = "Item " + std::to_string(i) + " is cute.";
    records.push_back(r);
  }
  auto factory = [](const Record& rec) {
    return std::make_shared<MockPlayback>(std::vector<std::string>{
        "Rabbit(x)\nCute(x)", "∀x (Rabbit(x) → Cute(x))", "Rabbit(rex", "Cute(" + rec.id + ")"});
  };
  RuleCorrector rule;
  InferOptions opts;
  opts.mode = Mode::OnOn;
  opts.workers = 1;
  auto serial = infer_all(records, factory, &rule, &rule, opts);
  opts.workers = 4;
  auto parallel = infer_all(records, factory, &rule, &rule, opts);
  REQUIRE(serial.size() == 12);
  for (std::size_t i = 0; i < serial.size(); ++i) {
    CHECK(serial[i].id == records[i].id);
    REQUIRE(serial[i].translation);
    CHECK(serial[i].translation->conclusion.fol == "Cute(" + records[i].id + ")");
    CHECK(serial[i].translation->premises[1].fol == "Rabbit(rex)");
    CHECK(*serial[i].translation == *parallel[i].translation);
  }
}
