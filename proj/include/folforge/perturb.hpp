#pragma once

// Controlled corruptions of clean predicates and formulas, plus assembly of
// verifier training corpora from them.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "folforge/diagnostics.hpp"
#include "folforge/extraction.hpp"
#include "folforge/record.hpp"

namespace folforge::perturb {

enum class PerturbKind {
  // predicate kinds
  OmitOnePredicate,
  OmitOneVariable,
  OmitVariableAndPredicate,
  OmitOrAddOneVariable,
  AddPluralPredicate,
  DuplicatePredicate,
  // FOL kinds
  ChangeQuantifierPosition,
  OmitOneQuantifier,
  OmitLastBracket,
  AddOrOmitNegation,
  OmitArgsFromFacts,
  AddOrOmitQuantifierPW,
  SwapOperators,
  AddPluralPredicatesFOL,
};

inline constexpr PerturbKind kPredicateKinds[] = {
    PerturbKind::OmitOnePredicate,     PerturbKind::OmitOneVariable,    PerturbKind::OmitVariableAndPredicate,
    PerturbKind::OmitOrAddOneVariable, PerturbKind::AddPluralPredicate, PerturbKind::DuplicatePredicate,
};
inline constexpr PerturbKind kFolKinds[] = {
    PerturbKind::ChangeQuantifierPosition, PerturbKind::OmitOneQuantifier,     PerturbKind::OmitLastBracket,
    PerturbKind::AddOrOmitNegation,        PerturbKind::OmitArgsFromFacts,     PerturbKind::AddOrOmitQuantifierPW,
    PerturbKind::SwapOperators,            PerturbKind::AddPluralPredicatesFOL,
};

enum class Style { Folio, ProofWriter };
enum class Task { Predicate, FOL };

std::string_view to_string(PerturbKind k);
std::optional<PerturbKind> kind_from_string(std::string_view s);
bool is_predicate_kind(PerturbKind k);
/// The kinds each dataset style uses for a task.
std::vector<PerturbKind> kinds_for(Style style, Task task);

/// nullopt is the skip signal (kind not applicable to this input).
std::optional<std::vector<PredicateDecl>> perturb_predicates(const std::vector<PredicateDecl>& preds, PerturbKind kind,
                                                             std::uint64_t seed);

/// Returns possibly ill-formed text that differs from print(f); nullopt when
/// the kind does not apply.
std::optional<std::string> perturb_fol(const Formula& f, PerturbKind kind, std::uint64_t seed);

/// The diagnostic kinds a syntactic FOL perturbation is expected to trigger;
/// empty for semantic kinds (SwapOperators, AddOrOmitNegation).
std::vector<DiagnosticKind> expected_diagnostics(PerturbKind kind);

enum class Provenance { Manual, Harvested, Correct };
std::string_view to_string(Provenance p);
std::string_view to_string(Task t);

struct VerifierInstance {
  Task task;
  std::string context;
  std::string target;  // "correct" or the corrected text
  Provenance provenance;
  std::optional<PerturbKind> kind;  // set for Manual
};

nlohmann::ordered_json to_json(const VerifierInstance& v);

/// Context layouts shared with the inference harness.
std::string predicate_context(const std::vector<std::string>& premises, const std::string& conclusion,
                              const std::vector<std::string>& predicates);
std::string fol_context(const std::vector<std::string>& predicates, const std::string& fol, const std::string& sentence);

/// Predicates printed one per line, canonical form.
std::string predicate_block(const std::vector<std::string>& predicates);

struct HarvestPair {
  Translation predicted;
  Record gold;  // needs predicates, premises_fol, conclusion_fol
};

/// Instances only for components whose canonical form differs from gold.
std::vector<VerifierInstance> harvest_errors(const std::vector<HarvestPair>& pairs);

struct Config {
  double perturbed_fraction = 0.6;
  std::vector<PerturbKind> kinds;  // empty: every kind
  std::uint64_t seed = 0;
  std::size_t workers = 1;
};

struct DatasetReport {
  std::size_t records_used = 0;
  std::size_t records_skipped = 0;  // missing predicates or FOLs
  std::map<std::string, std::size_t> per_kind;
  std::map<std::string, std::size_t> per_provenance;  // "Predicate/Correct", ...
  std::size_t skipped_draws = 0;                      // quota slots with no applicable kind

  nlohmann::ordered_json to_json() const;
};

/// Throws std::invalid_argument for an empty seed list or a fraction outside
/// (0.5, 1).
std::vector<VerifierInstance> build_verifier_dataset(const std::vector<Record>& seeds, const Config& config,
                                                     const std::vector<VerifierInstance>& harvested = {},
                                                     DatasetReport* report = nullptr);

}  // namespace folforge::perturb
