#include "folforge/record.hpp"

#include <fstream>

namespace folforge {

using nlohmann::ordered_json;

ordered_json to_json(const Record& r) {
  ordered_json j;
  j["id"] = r.id;
  j["premises"] = r.premises;
  j["conclusion"] = r.conclusion;
  j["gold_label"] = reasoner::label_to_string(r.gold_label);
  if (r.predicates) j["predicates"] = *r.predicates;
  if (r.premises_fol) j["premises_fol"] = *r.premises_fol;
  if (r.conclusion_fol) j["conclusion_fol"] = *r.conclusion_fol;
  if (r.generation) j["generation"] = *r.generation;
  if (r.reference) {
    j["reference"] = {{"premises_fol", r.reference->premises_fol}, {"conclusion_fol", r.reference->conclusion_fol}};
  }
  return j;
}

Record record_from_json(const ordered_json& j) {
  if (!j.is_object()) throw RecordError("record must be a JSON object");
  try {
    Record r;
    r.id = j.at("id").is_string() ? j.at("id").get<std::string>() : j.at("id").dump();
    r.premises = j.at("premises").get<std::vector<std::string>>();
    r.conclusion = j.at("conclusion").get<std::string>();
    const auto label = j.at("gold_label").get<std::string>();
    auto value = reasoner::label_from_string(label);
    if (!value) throw RecordError("unknown gold_label \"" + label + "\"");
    r.gold_label = *value;
    if (j.contains("predicates")) r.predicates = j["predicates"].get<std::vector<std::string>>();
    if (j.contains("premises_fol")) r.premises_fol = j["premises_fol"].get<std::vector<std::string>>();
    if (j.contains("conclusion_fol")) r.conclusion_fol = j["conclusion_fol"].get<std::string>();
    if (j.contains("generation")) r.generation = j["generation"].get<std::string>();
    if (j.contains("reference")) {
      const auto& ref = j["reference"];
      r.reference = ReferenceFol{ref.at("premises_fol").get<std::vector<std::string>>(),
                                 ref.at("conclusion_fol").get<std::string>()};
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw RecordError(e.what());
  }
}

std::vector<Record> read_records(std::istream& in) {
  std::vector<Record> out;
  std::string line;
  for (std::size_t n = 1; std::getline(in, line); ++n) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(record_from_json(ordered_json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw RecordError("line " + std::to_string(n) + ": " + e.what());
    } catch (const RecordError& e) {
      throw RecordError("line " + std::to_string(n) + ": " + e.what());
    }
  }
  return out;
}

std::vector<Record> read_records_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_records(in);
}

void write_record(std::ostream& out, const Record& r) { out << to_json(r).dump() << '\n'; }

}  // namespace folforge
