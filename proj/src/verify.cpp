#include "folforge/verify.hpp"

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <set>
#include <atomic>
#include <thread>

#include <httplib.h>

#include "folforge/diagnostics.hpp"
#include "folforge/syntax.hpp"

namespace folforge::verify {

namespace {

std::string trim(std::string_view s) {
  const auto* ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  return std::string(s.substr(b, s.find_last_not_of(ws) - b + 1));
}

std::vector<std::string> lines_of(std::string_view text) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    out.emplace_back(text.substr(pos, nl - pos));
    pos = nl + 1;
  }
  return out;
}

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

bool is_header(const std::string& line) {
  const auto l = lower(trim(line));
  return l == "predicates:" || l == "premises:" || l == "conclusion:" || l == "fol:";
}

std::vector<PredicateDecl> decls_of(const std::vector<std::string>& predicates) {
  std::vector<PredicateDecl> out;
  for (const auto& p : predicates) {
    if (auto d = parse_predicate_decl(p)) out.push_back(*d);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Repairs

std::string balance_parens(const std::string& text) {
  std::string out;
  int depth = 0;
  for (char c : text) {
    if (c == ')') {
      if (depth == 0) continue;
      --depth;
    } else if (c == '(') {
      ++depth;
    }
    out += c;
  }
  out = trim(out);
  out.append(static_cast<std::size_t>(depth), ')');
  return out;
}

// Drops prose following a formula: cut at the first token the parser could
// not place, then rebalance.
std::optional<Formula> salvage(std::string text) {
  for (int round = 0; round < 4; ++round) {
    auto r = parse_raw(text);
    if (auto* f = std::get_if<Formula>(&r)) return *f;
    const auto& fail = std::get<ParseFailure>(r);
    const auto at = fail.token.span.begin;
    if (fail.reason == ParseFailure::Reason::TrailingInput ||
        ((fail.reason == ParseFailure::Reason::UnexpectedToken || fail.reason == ParseFailure::Reason::BadCharacter) &&
         at > 0 && fail.token.kind != TokenKind::RParen)) {
      auto cut = balance_parens(trim(text.substr(0, at)));
      if (cut == text) return std::nullopt;
      text = std::move(cut);
    } else {
      auto balanced = balance_parens(text);
      if (balanced == text) return std::nullopt;
      text = std::move(balanced);
    }
  }
  return std::nullopt;
}

std::map<std::string, std::size_t> majority_arity(const std::vector<PredicateDecl>& decls) {
  std::map<std::string, std::map<std::size_t, std::size_t>> counts;
  std::vector<std::string> order;
  for (const auto& d : decls) {
    if (!counts.count(d.name)) order.push_back(d.name);
    ++counts[d.name][d.arity];
  }
  std::map<std::string, std::size_t> out;
  for (const auto& name : order) {
    std::size_t best = 0, best_count = 0;
    for (const auto& d : decls) {
      if (d.name != name) continue;
      const auto c = counts[name][d.arity];
      if (c > best_count) best = d.arity, best_count = c;
    }
    out[name] = best;
  }
  return out;
}

Formula fix_arity(const Formula& f, const std::map<std::string, std::size_t>& arity, std::vector<std::string>& bound) {
  if (const auto* a = f.get<Atom>()) {
    auto it = arity.find(a->predicate);
    if (it == arity.end() || it->second == a->args.size()) return f;
    auto args = a->args;
    if (args.size() > it->second) {
      args.resize(it->second);
    } else {
      if (bound.empty()) return f;
      while (args.size() < it->second) args.push_back(Term::variable(bound.front()));
    }
    return make_atom(a->predicate, std::move(args));
  }
  if (const auto* n = f.get<Negation>()) return make_not(fix_arity(n->operand, arity, bound));
  if (const auto* b = f.get<Binary>()) {
    return make_binary(b->op, fix_arity(b->left, arity, bound), fix_arity(b->right, arity, bound));
  }
  const auto& q = *f.get<Quantified>();
  const auto mark = bound.size();
  bound.insert(bound.end(), q.vars.begin(), q.vars.end());
  auto body = fix_arity(q.body, arity, bound);
  bound.resize(mark);
  return make_quantified(q.kind, q.vars, body);
}

struct PredicateProblems {
  std::size_t count = 0;
  std::vector<std::string> kept;
};

PredicateProblems predicate_problems(const std::vector<std::string>& predicates) {
  PredicateProblems out;
  std::vector<PredicateDecl> decls;
  for (const auto& p : predicates) {
    if (trim(p).empty()) continue;
    if (auto d = parse_predicate_decl(p)) {
      decls.push_back(*d);
    } else {
      ++out.count;
    }
  }
  const auto majority = majority_arity(decls);
  std::set<std::string> names;
  for (const auto& d : decls) names.insert(d.name);
  std::set<std::pair<std::string, std::size_t>> seen;
  for (const auto& d : decls) {
    const bool minority = majority.at(d.name) != d.arity;
    const bool plural = d.name.size() > 1 && d.name.back() == 's' && names.count(d.name.substr(0, d.name.size() - 1));
    const bool duplicate = !seen.insert({d.name, d.arity}).second;
    if (minority || plural) {
      ++out.count;
    } else if (!duplicate) {
      out.kept.push_back(print(d));
    }
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Generators

std::string MockPlayback::generate(const std::string& prompt, std::size_t max_new_tokens) {
  prompts_.push_back(prompt);
  budgets_.push_back(max_new_tokens);
  if (next_ >= outputs_.size()) throw GeneratorError("playback script exhausted after " + std::to_string(next_) + " call(s)");
  return outputs_[next_++];
}

EndpointConfig EndpointConfig::from_env() {
  EndpointConfig c;
  if (const char* url = std::getenv("FOLFORGE_GEN_URL")) c.url = url;
  if (const char* token = std::getenv("FOLFORGE_GEN_TOKEN")) c.token = token;
  return c;
}

ExternalEndpoint::ExternalEndpoint(EndpointConfig config) : config_(std::move(config)) {
  const std::string scheme = "http://";
  if (config_.url.rfind(scheme, 0) != 0) {
    throw std::invalid_argument("endpoint URL must start with http:// (got '" + config_.url + "')");
  }
  if (config_.timeout.count() <= 0) throw std::invalid_argument("endpoint timeout must be positive");
  const auto slash = config_.url.find('/', scheme.size());
  host_ = config_.url.substr(0, slash);
  path_ = slash == std::string::npos ? "/" : config_.url.substr(slash);
  if (host_.size() == scheme.size()) throw std::invalid_argument("endpoint URL has no host");
}

std::string ExternalEndpoint::generate(const std::string& prompt, std::size_t max_new_tokens) {
  httplib::Client client(host_);
  client.set_connection_timeout(config_.timeout);
  client.set_read_timeout(config_.timeout);
  client.set_write_timeout(config_.timeout);
  httplib::Headers headers;
  if (!config_.token.empty()) headers.emplace("Authorization", "Bearer " + config_.token);
  nlohmann::json body = {{"prompt", prompt}, {"max_new_tokens", max_new_tokens}};
  auto res = client.Post(path_, headers, body.dump(), "application/json");
  if (!res) throw GeneratorError("endpoint request failed: " + httplib::to_string(res.error()));
  if (res->status != 200) throw GeneratorError("endpoint returned HTTP " + std::to_string(res->status));
  auto reply = nlohmann::json::parse(res->body, nullptr, false);
  if (reply.is_discarded() || !reply.is_object() || !reply.contains("text") || !reply["text"].is_string()) {
    throw GeneratorError("endpoint reply is not {\"text\": string}");
  }
  return reply["text"].get<std::string>();
}

// ---------------------------------------------------------------------------
// Contexts

std::optional<FolContext> parse_fol_context(const std::string& context) {
  if (context.rfind("Predicates:\n", 0) != 0) return std::nullopt;
  const auto fol_at = context.find("\nFOL:\n");
  if (fol_at == std::string::npos) return std::nullopt;
  const auto sent_at = context.find("\nSentence:\n", fol_at + 6);
  if (sent_at == std::string::npos) return std::nullopt;
  FolContext out;
  for (auto& l : lines_of(context.substr(12, fol_at - 12))) {
    if (!trim(l).empty()) out.predicates.push_back(trim(l));
  }
  out.fol = context.substr(fol_at + 6, sent_at - fol_at - 6);
  out.sentence = context.substr(sent_at + 11);
  return out;
}

std::optional<PredicateContext> parse_predicate_context(const std::string& context) {
  if (context.rfind("Premises:\n", 0) != 0) return std::nullopt;
  const auto concl_at = context.find("Conclusion:\n");
  if (concl_at == std::string::npos) return std::nullopt;
  const auto pred_at = context.find("\nPredicates:\n", concl_at);
  if (pred_at == std::string::npos) return std::nullopt;
  PredicateContext out;
  for (auto& l : lines_of(context.substr(10, concl_at - 10))) {
    if (!l.empty()) out.premises.push_back(l);
  }
  out.conclusion = context.substr(concl_at + 12, pred_at - concl_at - 12);
  for (auto& l : lines_of(context.substr(pred_at + 13))) {
    if (!trim(l).empty()) out.predicates.push_back(trim(l));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Rule-based correction

std::size_t fol_error_count(const std::string& fol, const std::vector<std::string>& predicates) {
  auto r = parse(fol);
  if (!r) return 1;
  // Judge the formula only, against the majority arity of each declared name.
  auto decls = decls_of(predicates);
  const auto majority = majority_arity(decls);
  decls.erase(std::remove_if(decls.begin(), decls.end(),
                             [&](const PredicateDecl& d) { return majority.at(d.name) != d.arity; }),
              decls.end());
  return error_count(lint_formula(r.formula())) + error_count(lint_corpus({r.formula()}, decls));
}

Verdict rule_correct_fol(const std::string& fol, const std::vector<std::string>& predicates) {
  const auto before = fol_error_count(fol, predicates);
  if (before == 0) return Verdict::correct();
  auto f = salvage(trim(fol));
  if (!f) return Verdict::not_repaired(fol);
  std::vector<std::string> bound;
  auto fixed = universal_closure(fix_arity(*f, majority_arity(decls_of(predicates)), bound));
  auto candidate = print(fixed);
  if (fol_error_count(candidate, predicates) < before) return Verdict::replace(candidate);
  return Verdict::not_repaired(fol);
}

Verdict rule_correct_predicates(const std::vector<std::string>& predicates) {
  auto problems = predicate_problems(predicates);
  if (problems.count == 0) return Verdict::correct();
  if (problems.kept.empty()) return Verdict::not_repaired(perturb::predicate_block(predicates));
  return Verdict::replace(perturb::predicate_block(problems.kept));
}

Verdict RuleCorrector::correct(Task task, const std::string& context) {
  if (task == Task::FOL) {
    auto c = parse_fol_context(context);
    if (!c) return Verdict::not_repaired(context);
    return rule_correct_fol(c->fol, c->predicates);
  }
  auto c = parse_predicate_context(context);
  if (!c) return Verdict::not_repaired(context);
  return rule_correct_predicates(c->predicates);
}

Verdict ExternalCorrector::correct(Task, const std::string& context) {
  auto reply = trim(endpoint_.generate(context, max_new_tokens_));
  if (lower(reply) == "correct") return Verdict::correct();
  return Verdict::replace(reply);
}

MockCorrector::MockCorrector(std::map<std::string, std::string> table)
    : fn_([table = std::move(table)](Task, const std::string& candidate) {
        auto it = table.find(candidate);
        return it == table.end() ? std::string("correct") : it->second;
      }) {}

Verdict MockCorrector::correct(Task task, const std::string& context) {
  std::string candidate;
  if (task == Task::FOL) {
    auto c = parse_fol_context(context);
    candidate = c ? c->fol : context;
  } else {
    auto c = parse_predicate_context(context);
    candidate = c ? perturb::predicate_block(c->predicates) : context;
  }
  auto reply = fn_(task, candidate);
  if (reply == "correct") return Verdict::correct();
  return Verdict::replace(reply);
}

// ---------------------------------------------------------------------------
// Runs

std::string_view to_string(Mode m) {
  switch (m) {
    case Mode::None: return "none";
    case Mode::OnOff: return "on-off";
    case Mode::OnOn: return "on-on";
  }
  return "none";
}

std::optional<Mode> mode_from_string(std::string_view s) {
  const auto l = lower(std::string(s));
  if (l == "none") return Mode::None;
  if (l == "on-off" || l == "onoff") return Mode::OnOff;
  if (l == "on-on" || l == "onon") return Mode::OnOn;
  return std::nullopt;
}

void TokenPolicy::validate() const {
  if (default_max_new_tokens == 0) throw std::invalid_argument("default_max_new_tokens must be positive");
  if (short_budget == 0 || short_budget >= default_max_new_tokens) {
    throw std::invalid_argument("short_budget must be positive and below default_max_new_tokens");
  }
}

std::size_t TokenPolicy::budget_for(const std::string& sentence) const {
  std::size_t words = 0;
  bool in_word = false;
  for (unsigned char c : sentence) {
    const bool space = std::isspace(c) != 0;
    if (!space && !in_word) ++words;
    in_word = !space;
  }
  return words < short_sentence_word_threshold ? short_budget : default_max_new_tokens;
}

nlohmann::ordered_json to_json(const AuditEntry& e) {
  nlohmann::ordered_json j;
  j["step"] = e.step;
  j["phase"] = e.phase;
  j["prompt_hash"] = e.prompt_hash;
  j["raw_output"] = e.raw_output;
  j["verdict"] = e.verdict;
  if (e.replacement) j["replacement"] = *e.replacement;
  if (e.warning) j["warning"] = *e.warning;
  return j;
}

std::string prompt_hash(const std::string& prompt) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : prompt) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string incremental_prompt(const Record& rec, std::size_t step, const std::string& transcript,
                               const Instructions& instructions) {
  auto out = (step == 0 ? instructions.predicate : instructions.fol) + "\n\n" + augment::input_core(rec);
  if (!transcript.empty()) out += "\n\n" + transcript;
  return out;
}

ExtractResult run_vanilla(Generator& gen, const Record& rec, const TokenPolicy& policy,
                          const Instructions& instructions) {
  const auto prompt = instructions.fol + "\n\n" + augment::input_core(rec);
  return extract(gen.generate(prompt, policy.default_max_new_tokens * (rec.premises.size() + 2)), rec.premises.size());
}

namespace {

std::vector<std::string> clean_predicates(const std::string& raw) {
  std::vector<std::string> out;
  for (const auto& line : lines_of(raw)) {
    if (is_header(line)) continue;
    auto l = trim(strip_enumeration(line));
    if (!l.empty()) out.push_back(l);
  }
  return out;
}

std::string clean_fol(const std::string& raw) {
  for (const auto& line : lines_of(raw)) {
    if (is_header(line)) continue;
    auto l = trim(strip_enumeration(line));
    if (l.empty()) continue;
    const auto sep = l.find(":::");
    return sep == std::string::npos ? l : trim(l.substr(0, sep));
  }
  return {};
}

std::string join_lines(const std::vector<std::string>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "\n" : "") + v[i];
  return out;
}

// Rebuilds the transcript from the accepted outputs after `done` FOL steps.
std::string transcript_of(const Record& rec, const std::vector<std::string>& preds,
                          const std::vector<std::string>& fols) {
  const auto n = rec.premises.size();
  std::string out = "Predicates:\n" + join_lines(preds);
  for (std::size_t k = 0; k < fols.size(); ++k) {
    if (k < n) {
      out += (k == 0 ? "\nPremises:\n" : "\n") + fols[k] + " ::: " + rec.premises[k];
    } else {
      out += std::string(n == 0 ? "\nPremises:" : "") + "\nConclusion:\n" + fols[k] + " ::: " + rec.conclusion;
    }
  }
  return out;
}

std::string sentence_at(const Record& rec, std::size_t fol_index) {
  return fol_index < rec.premises.size() ? rec.premises[fol_index] : rec.conclusion;
}

Translation translation_of(const Record& rec, const std::vector<std::string>& preds,
                           const std::vector<std::string>& fols) {
  Translation t;
  t.predicates = preds;
  for (std::size_t k = 0; k < rec.premises.size(); ++k) t.premises.push_back({rec.premises[k], fols.at(k)});
  t.conclusion = {rec.conclusion, fols.at(rec.premises.size())};
  return t;
}

AuditEntry verify_entry(std::size_t step, const char* phase, const std::string& context, const Verdict& v) {
  AuditEntry e{step, phase, prompt_hash(context), {}, {}, std::nullopt, std::nullopt};
  switch (v.kind) {
    case Verdict::Kind::Correct:
      e.raw_output = "correct";
      e.verdict = "correct";
      break;
    case Verdict::Kind::NotRepaired:
      e.raw_output = v.text;
      e.verdict = "not_repaired";
      break;
    case Verdict::Kind::Replacement:
      e.raw_output = v.text;
      e.verdict = "replaced";
      e.replacement = v.text;
      break;
  }
  return e;
}

// Verifies the FOL at `index`; applies a parseable replacement in place.
void verify_fol(Corrector& fv, const Record& rec, const std::vector<std::string>& preds, std::vector<std::string>& fols,
                std::size_t index, std::vector<AuditEntry>& audit) {
  const auto context = perturb::fol_context(preds, fols[index], sentence_at(rec, index));
  auto entry = verify_entry(index + 1, "verify_fol", context, fv.correct(Task::FOL, context));
  if (entry.replacement) {
    if (parse(*entry.replacement)) {
      fols[index] = *entry.replacement;
    } else {
      entry.verdict = "rejected";
      entry.replacement.reset();
      entry.warning = "replacement does not parse; original kept";
    }
  }
  audit.push_back(std::move(entry));
}

void verify_predicates(Corrector& pv, const Record& rec, std::vector<std::string>& preds,
                       std::vector<AuditEntry>& audit) {
  const auto context = perturb::predicate_context(rec.premises, rec.conclusion, preds);
  auto entry = verify_entry(0, "verify_predicates", context, pv.correct(Task::Predicate, context));
  if (entry.replacement) {
    auto replaced = clean_predicates(*entry.replacement);
    const bool valid = !replaced.empty() && std::all_of(replaced.begin(), replaced.end(), [](const std::string& p) {
      return parse_predicate_decl(p).has_value();
    });
    if (valid) {
      preds = std::move(replaced);
    } else {
      entry.verdict = "rejected";
      entry.replacement.reset();
      entry.warning = "replacement is not a predicate list; original kept";
    }
  }
  audit.push_back(std::move(entry));
}

}  // namespace

IncrementalResult run_incremental(Generator& gen, const Record& rec, Mode mode, Corrector* pv, Corrector* fv,
                                  const TokenPolicy& policy, const Instructions& instructions) {
  if (mode != Mode::None && (!pv || !fv)) throw std::invalid_argument("verifier mode requires both correctors");
  policy.validate();
  const auto n = rec.premises.size();
  std::vector<AuditEntry> audit;
  std::vector<std::string> preds;
  std::vector<std::string> fols;

  auto call = [&](std::size_t step, const std::string& prompt, std::size_t budget) {
    std::string raw;
    try {
      raw = gen.generate(prompt, budget);
    } catch (const std::exception& e) {
      throw RunError("generation failed at step " + std::to_string(step) + ": " + e.what(), audit);
    }
    audit.push_back({step, "generate", prompt_hash(prompt), raw, "generated", std::nullopt, std::nullopt});
    return raw;
  };

  preds = clean_predicates(call(0, incremental_prompt(rec, 0, "", instructions), policy.default_max_new_tokens));
  if (mode != Mode::None) verify_predicates(*pv, rec, preds, audit);

  for (std::size_t k = 0; k <= n; ++k) {
    const auto prompt = incremental_prompt(rec, k + 1, transcript_of(rec, preds, fols), instructions);
    fols.push_back(clean_fol(call(k + 1, prompt, policy.budget_for(sentence_at(rec, k)))));
    if (mode == Mode::OnOn) verify_fol(*fv, rec, preds, fols, k, audit);
  }
  if (mode == Mode::OnOff) {
    for (std::size_t k = 0; k <= n; ++k) verify_fol(*fv, rec, preds, fols, k, audit);
  }
  return {translation_of(rec, preds, fols), transcript_of(rec, preds, fols), std::move(audit)};
}

Translation reconstruct(const std::vector<AuditEntry>& audit, const Record& rec) {
  std::vector<std::string> preds;
  std::vector<std::string> fols(rec.premises.size() + 1);
  for (const auto& e : audit) {
    if (e.phase == "generate") {
      if (e.step == 0) {
        preds = clean_predicates(e.raw_output);
      } else {
        fols.at(e.step - 1) = clean_fol(e.raw_output);
      }
    } else if (e.replacement) {
      if (e.phase == "verify_predicates") {
        preds = clean_predicates(*e.replacement);
      } else {
        fols.at(e.step - 1) = *e.replacement;
      }
    }
  }
  return translation_of(rec, preds, fols);
}

}  // namespace folforge::verify

namespace folforge::verify {

namespace {

class LockedCorrector : public Corrector {
 public:
  explicit LockedCorrector(Corrector& inner) : inner_(inner) {}
  Verdict correct(Task task, const std::string& context) override {
    std::lock_guard<std::mutex> lock(mutex_);
    return inner_.correct(task, context);
  }

 private:
  Corrector& inner_;
  std::mutex mutex_;
};

class LockedGenerator : public Generator {
 public:
  LockedGenerator(std::shared_ptr<Generator> inner, std::mutex& mutex) : inner_(std::move(inner)), mutex_(mutex) {}
  std::string generate(const std::string& prompt, std::size_t max_new_tokens) override {
    std::lock_guard<std::mutex> lock(mutex_);
    return inner_->generate(prompt, max_new_tokens);
  }

 private:
  std::shared_ptr<Generator> inner_;
  std::mutex& mutex_;
};

}  // namespace

std::vector<InferItem> infer_all(const std::vector<Record>& records, const GeneratorFactory& factory, Corrector* pv,
                                 Corrector* fv, const InferOptions& opts) {
  opts.policy.validate();
  std::optional<LockedCorrector> locked_pv, locked_fv;
  if (pv && pv->single_flight()) pv = &locked_pv.emplace(*pv);
  if (fv && fv->single_flight()) fv = &locked_fv.emplace(*fv);
  std::mutex registry_mutex;
  std::map<const Generator*, std::mutex> generator_mutexes;

  std::vector<InferItem> out(records.size());
  auto run_one = [&](std::size_t i) {
    const auto& rec = records[i];
    auto& item = out[i];
    item.id = rec.id;
    std::shared_ptr<Generator> gen = factory(rec);
    if (gen->single_flight()) {
      std::lock_guard<std::mutex> lock(registry_mutex);
      gen = std::make_shared<LockedGenerator>(gen, generator_mutexes[gen.get()]);
    }
    try {
      if (opts.strategy == Strategy::Vanilla) {
        auto r = run_vanilla(*gen, rec, opts.policy, opts.instructions);
        if (r) {
          item.translation = r.translation();
        } else {
          item.diagnostics = r.diagnostics();
        }
      } else {
        auto r = run_incremental(*gen, rec, opts.mode, pv, fv, opts.policy, opts.instructions);
        item.translation = std::move(r.translation);
        item.audit = std::move(r.audit);
      }
    } catch (const RunError& e) {
      item.error = e.what();
      item.audit = e.audit;
    } catch (const GeneratorError& e) {
      item.error = e.what();
    }
  };

  const auto workers = std::max<std::size_t>(1, std::min(opts.workers, records.size()));
  if (workers == 1) {
    for (std::size_t i = 0; i < records.size(); ++i) run_one(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr failure;
  std::mutex failure_mutex;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i; (i = next++) < records.size();) {
        try {
          run_one(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace folforge::verify
