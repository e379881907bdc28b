#include "folforge/extraction.hpp"

#include <cctype>
#include <optional>
#include <regex>
#include <sstream>

#include "folforge/diagnostics.hpp"

namespace folforge {

namespace {

std::string_view trim(std::string_view s) {
  const auto* ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  return s.substr(b, s.find_last_not_of(ws) - b + 1);
}

enum class Section { None, Predicates, Premises, Conclusion };

struct Header {
  Section section;
  std::string rest;
};

std::optional<Header> header(const std::string& line) {
  static const std::regex re(R"(^[#*_\s]*(predicates?|premises?|conclusions?)[*_\s]*:[*_]*\s*(.*)$)",
                             std::regex::icase);
  std::smatch m;
  if (!std::regex_match(line, m, re)) return std::nullopt;
  std::string word = m[1].str();
  const auto c = static_cast<char>(std::tolower(static_cast<unsigned char>(word[0])));
  const auto section = c == 'c' ? Section::Conclusion : (word.size() > 3 && std::tolower(word[3]) == 'm') ? Section::Premises
                                                                                                          : Section::Predicates;
  return Header{section, m[2].str()};
}

std::optional<SentencePair> split_pair(std::string_view line) {
  const auto at = line.find(":::");
  if (at == std::string_view::npos) return std::nullopt;
  SentencePair p{std::string(trim(line.substr(at + 3))), std::string(trim(line.substr(0, at)))};
  if (p.fol.empty()) return std::nullopt;
  return p;
}

struct Block {
  std::vector<std::string> predicates;
  std::vector<SentencePair> premises;
  std::vector<SentencePair> conclusions;
  bool saw_premises = false;
  bool saw_conclusion = false;
  bool closed = false;

  bool empty() const { return predicates.empty() && !saw_premises && !saw_conclusion; }
};

std::vector<Diagnostic> deficit(const Block& b, std::size_t expected) {
  std::vector<Diagnostic> out;
  auto add = [&](std::string msg) {
    out.push_back(make_diagnostic(DiagnosticKind::CompletionError, Severity::Error, {}, std::move(msg)));
  };
  if (!b.saw_premises) add("missing Premises: section");
  if (!b.saw_conclusion) add("missing Conclusion: section");
  if (b.saw_premises && b.premises.size() != expected) {
    add("expected " + std::to_string(expected) + " premise pair(s), found " + std::to_string(b.premises.size()));
  }
  if (b.saw_conclusion && b.conclusions.size() != 1) {
    add("expected 1 conclusion pair, found " + std::to_string(b.conclusions.size()));
  }
  return out;
}

}  // namespace

std::string strip_enumeration(std::string_view line) {
  static const std::regex re(R"(^\s*(?:\(?\d+[.):]|\*|•|-(?=\s)|\(?[a-z][.)](?=\s))\s*)");
  auto s = std::string(trim(line));
  std::smatch m;
  if (std::regex_search(s, m, re)) s = s.substr(static_cast<std::size_t>(m.length(0)));
  return std::string(trim(s));
}

ExtractResult extract(std::string_view raw, std::size_t expected_premises) {
  std::vector<Block> blocks(1);
  Section section = Section::None;

  std::istringstream in{std::string(raw)};
  std::string raw_line;
  while (std::getline(in, raw_line)) {
    auto line = strip_enumeration(raw_line);
    if (line.empty()) continue;

    if (auto h = header(line)) {
      auto& cur = blocks.back();
      const bool restart = h->section == Section::Predicates ? !cur.empty()
                           : h->section == Section::Premises ? (cur.saw_premises || cur.saw_conclusion)
                                                             : cur.saw_conclusion;
      if (restart) blocks.emplace_back();
      section = h->section;
      if (section == Section::Premises) blocks.back().saw_premises = true;
      if (section == Section::Conclusion) blocks.back().saw_conclusion = true;
      line = strip_enumeration(h->rest);
      if (line.empty()) continue;
    }

    auto& cur = blocks.back();
    switch (section) {
      case Section::None:
        break;
      case Section::Predicates:
        if (parse_predicate_decl(line)) cur.predicates.push_back(line);
        break;
      case Section::Premises:
        if (auto p = split_pair(line)) cur.premises.push_back(std::move(*p));
        break;
      case Section::Conclusion:
        if (auto p = split_pair(line)) {
          cur.conclusions.push_back(std::move(*p));
        } else if (!cur.conclusions.empty()) {
          section = Section::None;
        }
        break;
    }
  }

  for (auto it = blocks.rbegin(); it != blocks.rend(); ++it) {
    if (it->saw_premises && it->saw_conclusion && it->premises.size() == expected_premises &&
        it->conclusions.size() == 1) {
      return Translation{it->predicates, it->premises, it->conclusions.front()};
    }
  }
  for (auto it = blocks.rbegin(); it != blocks.rend(); ++it) {
    if (!it->empty()) return deficit(*it, expected_premises);
  }
  return deficit(blocks.back(), expected_premises);
}

nlohmann::ordered_json to_json(const Translation& t) {
  nlohmann::ordered_json j;
  j["predicates"] = t.predicates;
  j["premises"] = nlohmann::ordered_json::array();
  for (const auto& p : t.premises) j["premises"].push_back({{"nl", p.nl}, {"fol", p.fol}});
  j["conclusion"] = {{"nl", t.conclusion.nl}, {"fol", t.conclusion.fol}};
  return j;
}

Translation translation_from_json(const nlohmann::ordered_json& j) {
  Translation t;
  t.predicates = j.value("predicates", std::vector<std::string>{});
  for (const auto& p : j.at("premises")) t.premises.push_back({p.value("nl", ""), p.at("fol").get<std::string>()});
  t.conclusion = {j.at("conclusion").value("nl", ""), j.at("conclusion").at("fol").get<std::string>()};
  return t;
}

}  // namespace folforge
