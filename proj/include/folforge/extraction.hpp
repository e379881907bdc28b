#pragma once

// Recovers structured translations from free-form generator output.
//
// Recognized layout (headers case-insensitive, content may follow a header on
// the same line, lines may carry "1." / "-" / "*" enumeration prefixes):
//
//   Predicates:
//   Rabbit(x) ::: x is a rabbit
//   Premises:
//   Rabbit(rex) ::: Rex is a rabbit.
//   Conclusion:
//   Furry(rex) ::: Rex is furry.
//
// The Predicates section is optional. Lines without ":::" inside the
// Premises section are treated as prose and skipped; inside the Conclusion
// section the first such line after a pair ends the block.

#include <cstddef>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "folforge/diagnostic.hpp"

namespace folforge {

struct SentencePair {
  std::string nl;
  std::string fol;

  bool operator==(const SentencePair&) const = default;
};

struct Translation {
  std::vector<std::string> predicates;
  std::vector<SentencePair> premises;
  SentencePair conclusion;

  bool operator==(const Translation&) const = default;
};

class ExtractResult {
 public:
  ExtractResult(Translation t) : value_(std::move(t)) {}
  ExtractResult(std::vector<Diagnostic> d) : value_(std::move(d)) {}

  bool ok() const { return std::holds_alternative<Translation>(value_); }
  explicit operator bool() const { return ok(); }
  const Translation& translation() const { return std::get<Translation>(value_); }
  const std::vector<Diagnostic>& diagnostics() const { return std::get<std::vector<Diagnostic>>(value_); }

 private:
  std::variant<Translation, std::vector<Diagnostic>> value_;
};

/// Strips "1.", "2)", "(3)", "-", "*", "•" list markers and surrounding
/// whitespace. A "-" directly followed by a non-space is kept (ASCII negation).
std::string strip_enumeration(std::string_view line);

/// Succeeds only with exactly `expected_premises` premise pairs and one
/// conclusion pair. When several blocks appear, the last complete one wins.
/// Failures are CompletionError diagnostics describing the deficit.
ExtractResult extract(std::string_view raw, std::size_t expected_premises);

/// {"predicates":[...],"premises":[{"nl","fol"}],"conclusion":{"nl","fol"}}
nlohmann::ordered_json to_json(const Translation& t);
Translation translation_from_json(const nlohmann::ordered_json& j);

}  // namespace folforge
