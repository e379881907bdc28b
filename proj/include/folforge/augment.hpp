#pragma once

// Incremental augmentation: one record with n premises becomes n+2 examples
// whose outputs grow by one block per step.

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "folforge/record.hpp"

namespace folforge::augment {

inline constexpr const char* kPredicateInstruction = "Generate predicates for the given natural language sentences.";
inline constexpr const char* kFolInstruction =
    "Given a premise and conclusion, generate the first order logic form of the premises and conclusion.";

enum class Instruction { PredicateGen, FOLGen };

struct Options {
  std::string predicate_instruction = kPredicateInstruction;
  std::string fol_instruction = kFolInstruction;
};

struct AugmentedExample {
  Instruction instruction;
  std::string instruction_text;
  std::string input;
  std::string output;
  std::string source_id;
  std::size_t step = 0;
};

struct AugmentError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// "Premises:\n<p1>\n...\nConclusion:\n<c>", shared by every step.
std::string input_core(const Record& rec);

/// Throws AugmentError when predicates, premises_fol or conclusion_fol are
/// missing or premises_fol does not match the premise count.
std::vector<AugmentedExample> split_record(const Record& rec, const Options& opts = {});

/// nullopt when the premise and premise-FOL counts differ.
std::optional<Record> one_to_one_filter(const Record& rec);

struct Summary {
  std::size_t records_in = 0;
  std::size_t records_dropped = 0;
  std::size_t examples = 0;

  double growth() const { return records_in ? static_cast<double>(examples) / static_cast<double>(records_in) : 0.0; }
};

/// one_to_one_filter then split_record over the corpus, in input order.
std::vector<AugmentedExample> augment_corpus(const std::vector<Record>& records, Summary* summary = nullptr,
                                             const Options& opts = {});

/// {"instruction","input","output","source_id","step"}; instruction holds
/// the instruction text.
nlohmann::ordered_json to_json(const AugmentedExample& e);

}  // namespace folforge::augment
