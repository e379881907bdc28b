#include "folforge/augment.hpp"

namespace folforge::augment {

namespace {

std::string join(const std::vector<std::string>& lines) {
  std::string out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (i) out += '\n';
    out += lines[i];
  }
  return out;
}

}  // namespace

std::string input_core(const Record& rec) {
  return "Premises:\n" + join(rec.premises) + (rec.premises.empty() ? "" : "\n") + "Conclusion:\n" + rec.conclusion;
}

std::vector<AugmentedExample> split_record(const Record& rec, const Options& opts) {
  if (!rec.predicates) throw AugmentError("record " + rec.id + " has no predicates");
  if (!rec.premises_fol || !rec.conclusion_fol) throw AugmentError("record " + rec.id + " has no FOL translations");
  if (rec.premises_fol->size() != rec.premises.size()) {
    throw AugmentError("record " + rec.id + ": premise and premise-FOL counts differ");
  }
  const auto n = rec.premises.size();
  const auto input = input_core(rec);
  std::vector<AugmentedExample> out;
  std::string output = "Predicates:\n" + join(*rec.predicates);
  out.push_back({Instruction::PredicateGen, opts.predicate_instruction, input, output, rec.id, 0});
  for (std::size_t k = 0; k < n; ++k) {
    output += (k == 0 ? "\nPremises:\n" : "\n") + (*rec.premises_fol)[k] + " ::: " + rec.premises[k];
    out.push_back({Instruction::FOLGen, opts.fol_instruction, input, output, rec.id, k + 1});
  }
  output += std::string(n == 0 ? "\nPremises:" : "") + "\nConclusion:\n" + *rec.conclusion_fol + " ::: " + rec.conclusion;
  out.push_back({Instruction::FOLGen, opts.fol_instruction, input, output, rec.id, n + 1});
  return out;
}

std::optional<Record> one_to_one_filter(const Record& rec) {
  const auto fols = rec.premises_fol ? rec.premises_fol->size() : 0;
  if (fols != rec.premises.size()) return std::nullopt;
  return rec;
}

std::vector<AugmentedExample> augment_corpus(const std::vector<Record>& records, Summary* summary,
                                             const Options& opts) {
  std::vector<AugmentedExample> out;
  Summary s;
  for (const auto& rec : records) {
    ++s.records_in;
    auto kept = one_to_one_filter(rec);
    if (!kept) {
      ++s.records_dropped;
      continue;
    }
    auto ex = split_record(*kept, opts);
    out.insert(out.end(), ex.begin(), ex.end());
  }
  s.examples = out.size();
  if (summary) *summary = s;
  return out;
}

nlohmann::ordered_json to_json(const AugmentedExample& e) {
  return {{"instruction", e.instruction_text},
          {"input", e.input},
          {"output", e.output},
          {"source_id", e.source_id},
          {"step", e.step}};
}

}  // namespace folforge::augment
