#pragma once

// Silver-data filtering: extraction (format) -> parse + lint (syntax) ->
// prove against the gold label (semantic). The earliest failing stage owns
// the rejection.

#include <cstddef>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "folforge/diagnostics.hpp"
#include "folforge/reasoner.hpp"
#include "folforge/record.hpp"

namespace folforge::pipeline {

enum class Stage { Format, Syntax, Semantic };
std::string_view to_string(Stage s);

struct Options {
  reasoner::Budget budget;
  // Reject on Lint-severity diagnostics and on contradictory premises too.
  bool strict_lints = false;
  std::size_t workers = 1;
};

struct Rejection {
  Stage stage;
  std::vector<Diagnostic> diagnostics;
  // "extraction", "missing_fol", "parse", "lint", "label_mismatch", "exhausted", "contradictory_premises"
  std::string reason;
};

class FilterResult {
 public:
  FilterResult(Record r) : value_(std::move(r)) {}
  FilterResult(Rejection r) : value_(std::move(r)) {}

  bool retained() const { return std::holds_alternative<Record>(value_); }
  const Record& record() const { return std::get<Record>(value_); }
  const Rejection& rejection() const { return std::get<Rejection>(value_); }

 private:
  std::variant<Record, Rejection> value_;
};

/// Retained records carry canonical Unicode FOLs in premises_fol /
/// conclusion_fol, predicates from the generation when there was one, and no
/// generation text.
FilterResult filter_record(const Record& rec, const Options& opts = {});

/// Which Sense kind explains a label mismatch, comparing each translated
/// formula with its reference: IncorrectQuantifier, PredicateMismatch or
/// PredicateError (also the answer when there is no reference).
DiagnosticKind attribute_mismatch(const std::vector<Formula>& translated, const std::vector<Formula>& reference);

struct FilterReport {
  std::size_t retained = 0;
  std::size_t rejected_format = 0;
  std::size_t rejected_syntax = 0;
  std::size_t rejected_semantic = 0;
  // Semantic rejections caused by budget exhaustion (subset of rejected_semantic).
  std::size_t exhausted = 0;
  Histogram per_kind;

  std::size_t total() const { return retained + rejected_format + rejected_syntax + rejected_semantic; }
  /// Retention as a percentage string with one decimal, e.g. "70.0%".
  std::string retention() const;
  nlohmann::ordered_json to_json() const;
};

/// Runs filter_record over `records` with opts.workers threads. Results come
/// back in input order.
std::vector<FilterResult> filter_all(const std::vector<Record>& records, const Options& opts = {});

/// Writes retained records as JSONL in input order.
FilterReport build_dataset(const std::vector<Record>& records, std::ostream& out, const Options& opts = {});

/// File variant: writes to a temporary sibling and renames on success; the
/// temporary is removed when anything fails.
FilterReport build_dataset(const std::string& in_path, const std::string& out_path, const Options& opts = {});

/// Every diagnostic the stages can produce for each record, including lints
/// on records that would be retained and the Sense kind of a label mismatch.
Histogram error_distribution(const std::vector<Record>& records, const Options& opts = {});

}  // namespace folforge::pipeline
