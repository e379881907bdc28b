#pragma once

// Inference harness: vanilla and incremental generation through a pluggable
// Generator, with predicate/FOL verification in None, OnOff and OnOn modes.

#include <chrono>
#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "folforge/augment.hpp"
#include "folforge/extraction.hpp"
#include "folforge/perturb.hpp"
#include "folforge/record.hpp"

namespace folforge::verify {

using perturb::Task;

struct GeneratorError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class Generator {
 public:
  virtual ~Generator() = default;
  virtual std::string generate(const std::string& prompt, std::size_t max_new_tokens) = 0;
  /// True when the implementation cannot take concurrent calls.
  virtual bool single_flight() const { return false; }
};

/// Replays scripted outputs in order and records every call.
class MockPlayback : public Generator {
 public:
  explicit MockPlayback(std::vector<std::string> outputs) : outputs_(std::move(outputs)) {}

  std::string generate(const std::string& prompt, std::size_t max_new_tokens) override;
  bool single_flight() const override { return true; }

  const std::vector<std::string>& prompts() const { return prompts_; }
  const std::vector<std::size_t>& budgets() const { return budgets_; }

 private:
  std::vector<std::string> outputs_;
  std::size_t next_ = 0;
  std::vector<std::string> prompts_;
  std::vector<std::size_t> budgets_;
};

struct EndpointConfig {
  std::string url;    // http://host:port/path
  std::string token;  // bearer token, optional
  std::chrono::milliseconds timeout{60000};

  /// Reads FOLFORGE_GEN_URL and FOLFORGE_GEN_TOKEN.
  static EndpointConfig from_env();
};

/// POST {"prompt","max_new_tokens"} -> {"text"}. Transport errors, non-200
/// replies, malformed bodies and timeouts throw GeneratorError.
class ExternalEndpoint : public Generator {
 public:
  explicit ExternalEndpoint(EndpointConfig config);
  std::string generate(const std::string& prompt, std::size_t max_new_tokens) override;

 private:
  EndpointConfig config_;
  std::string host_;
  std::string path_;
};

// ---------------------------------------------------------------------------
// Correctors

struct Verdict {
  enum class Kind { Correct, Replacement, NotRepaired };
  Kind kind = Kind::Correct;
  std::string text;  // replacement, or the original for NotRepaired

  static Verdict correct() { return {Kind::Correct, {}}; }
  static Verdict replace(std::string t) { return {Kind::Replacement, std::move(t)}; }
  static Verdict not_repaired(std::string t) { return {Kind::NotRepaired, std::move(t)}; }
};

class Corrector {
 public:
  virtual ~Corrector() = default;
  /// `context` uses perturb::predicate_context / perturb::fol_context layouts.
  virtual Verdict correct(Task task, const std::string& context) = 0;
  virtual bool single_flight() const { return false; }
};

/// Diagnostics-driven repairs; see rule_correct_fol / rule_correct_predicates.
class RuleCorrector : public Corrector {
 public:
  Verdict correct(Task task, const std::string& context) override;
};

/// Sends the context as the prompt; a reply of "correct" (trimmed) accepts.
class ExternalCorrector : public Corrector {
 public:
  explicit ExternalCorrector(EndpointConfig config, std::size_t max_new_tokens = 128)
      : endpoint_(std::move(config)), max_new_tokens_(max_new_tokens) {}
  Verdict correct(Task task, const std::string& context) override;

 private:
  ExternalEndpoint endpoint_;
  std::size_t max_new_tokens_;
};

/// Looks the candidate (FOL text, or the predicate block) up in a table;
/// unknown candidates are accepted.
class MockCorrector : public Corrector {
 public:
  using Fn = std::function<std::string(Task, const std::string& candidate)>;
  explicit MockCorrector(std::map<std::string, std::string> table);
  explicit MockCorrector(Fn fn) : fn_(std::move(fn)) {}
  Verdict correct(Task task, const std::string& context) override;

 private:
  Fn fn_;
};

struct FolContext {
  std::vector<std::string> predicates;
  std::string fol;
  std::string sentence;
};
struct PredicateContext {
  std::vector<std::string> premises;
  std::string conclusion;
  std::vector<std::string> predicates;
};
std::optional<FolContext> parse_fol_context(const std::string& context);
std::optional<PredicateContext> parse_predicate_context(const std::string& context);

/// Blocking problems of a candidate FOL: one for a parse failure, otherwise
/// the Error diagnostics of lint_formula plus arity conflicts against the
/// declarations.
std::size_t fol_error_count(const std::string& fol, const std::vector<std::string>& predicates);

/// Drops trailing prose, balances parentheses, unifies arities with the
/// declarations' majority arity and universally closes free variables.
/// Correct when nothing blocks; a Replacement always has strictly fewer
/// errors than the input; otherwise NotRepaired with the original text.
Verdict rule_correct_fol(const std::string& fol, const std::vector<std::string>& predicates);

/// Drops lines that are not declarations, minority-arity duplicates and
/// plural twins of an existing name.
Verdict rule_correct_predicates(const std::vector<std::string>& predicates);

// ---------------------------------------------------------------------------
// Runs

enum class Mode { None, OnOff, OnOn };
std::string_view to_string(Mode m);
std::optional<Mode> mode_from_string(std::string_view s);

struct TokenPolicy {
  std::size_t default_max_new_tokens = 128;
  std::size_t short_sentence_word_threshold = 5;
  std::size_t short_budget = 16;

  /// Throws std::invalid_argument unless short_budget < default.
  void validate() const;
  std::size_t budget_for(const std::string& sentence) const;
};

struct AuditEntry {
  std::size_t step = 0;
  std::string phase;  // "generate", "verify_predicates", "verify_fol"
  std::string prompt_hash;
  std::string raw_output;
  std::string verdict;  // "generated", "correct", "replaced", "not_repaired", "rejected"
  std::optional<std::string> replacement;
  std::optional<std::string> warning;
};
nlohmann::ordered_json to_json(const AuditEntry& e);

/// 16 hex digits of FNV-1a 64.
std::string prompt_hash(const std::string& prompt);

struct RunError : std::runtime_error {
  RunError(const std::string& what, std::vector<AuditEntry> partial)
      : std::runtime_error(what), audit(std::move(partial)) {}
  std::vector<AuditEntry> audit;
};

struct Instructions {
  std::string predicate = augment::kPredicateInstruction;
  std::string fol = augment::kFolInstruction;
};

/// One call for the whole translation, routed through extraction.
ExtractResult run_vanilla(Generator& gen, const Record& rec, const TokenPolicy& policy = {},
                          const Instructions& instructions = {});

struct IncrementalResult {
  Translation translation;
  // Accepted outputs as fed back into prompts, in the augmentation layout.
  std::string transcript;
  std::vector<AuditEntry> audit;
};

/// n+2 generation steps. Throws RunError carrying the partial audit log when
/// the generator fails.
IncrementalResult run_incremental(Generator& gen, const Record& rec, Mode mode, Corrector* predicate_verifier,
                                  Corrector* fol_verifier, const TokenPolicy& policy = {},
                                  const Instructions& instructions = {});

/// Rebuilds the final translation from an audit log alone.
Translation reconstruct(const std::vector<AuditEntry>& audit, const Record& rec);

enum class Strategy { Vanilla, Incremental };

struct InferItem {
  std::string id;
  std::optional<Translation> translation;
  std::vector<Diagnostic> diagnostics;  // vanilla extraction failures
  std::vector<AuditEntry> audit;        // incremental runs, partial on error
  std::string error;                    // generator failure, empty otherwise
};

/// Generator for one record; the same instance may be returned for several.
using GeneratorFactory = std::function<std::shared_ptr<Generator>(const Record&)>;

struct InferOptions {
  Strategy strategy = Strategy::Incremental;
  Mode mode = Mode::None;
  TokenPolicy policy;
  Instructions instructions;
  std::size_t workers = 1;
};

/// Runs records concurrently (each run stays sequential); results keep input
/// order. Single-flight generators and correctors are serialized.
std::vector<InferItem> infer_all(const std::vector<Record>& records, const GeneratorFactory& factory,
                                 Corrector* predicate_verifier, Corrector* fol_verifier, const InferOptions& opts);

/// Prompt for step `step` given the accepted transcript so far.
std::string incremental_prompt(const Record& rec, std::size_t step, const std::string& transcript,
                               const Instructions& instructions = {});

}  // namespace folforge::verify
