#pragma once

// Corpus record and its JSONL encoding.

#include <istream>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "folforge/reasoner.hpp"

namespace folforge {

using Label = reasoner::Outcome::Value;

struct ReferenceFol {
  std::vector<std::string> premises_fol;
  std::string conclusion_fol;

  bool operator==(const ReferenceFol&) const = default;
};

struct Record {
  std::string id;
  std::vector<std::string> premises;
  std::string conclusion;
  Label gold_label = Label::Unknown;
  std::optional<std::vector<std::string>> predicates;
  std::optional<std::vector<std::string>> premises_fol;
  std::optional<std::string> conclusion_fol;
  // Extensions: raw generator text, and gold FOLs used to attribute mismatches.
  std::optional<std::string> generation;
  std::optional<ReferenceFol> reference;

  bool operator==(const Record&) const = default;
};

struct RecordError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

nlohmann::ordered_json to_json(const Record& r);
/// Throws RecordError on missing or mistyped fields or an unknown label.
Record record_from_json(const nlohmann::ordered_json& j);

/// One record per non-blank line. Errors name the offending line.
std::vector<Record> read_records(std::istream& in);
std::vector<Record> read_records_file(const std::string& path);
void write_record(std::ostream& out, const Record& r);

}  // namespace folforge
