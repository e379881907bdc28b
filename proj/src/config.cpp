#include "folforge/config.hpp"

#include <algorithm>
#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <variant>

namespace folforge {

namespace {

using Value = std::variant<std::int64_t, double, bool, std::string, std::vector<std::string>>;

std::string trim(std::string_view s) {
  const auto* ws = " \t\r";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  return std::string(s.substr(b, s.find_last_not_of(ws) - b + 1));
}

// Parses a quoted string starting at s[i] == '"'; advances i past the quote.
std::string quoted(std::string_view s, std::size_t& i) {
  std::string out;
  for (++i; i < s.size(); ++i) {
    char c = s[i];
    if (c == '"') {
      ++i;
      return out;
    }
    if (c == '\\') {
      if (++i >= s.size()) break;
      switch (s[i]) {
        case 'n': out += '\n'; break;
        case 't': out += '\t'; break;
        case '"': out += '"'; break;
        case '\\': out += '\\'; break;
        default: throw ConfigError(std::string("unknown escape \\") + s[i]);
      }
      continue;
    }
    out += c;
  }
  throw ConfigError("unterminated string");
}

void skip_ws(std::string_view s, std::size_t& i) {
  while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
}

void expect_end(std::string_view s, std::size_t i) {
  skip_ws(s, i);
  if (i < s.size() && s[i] != '#') throw ConfigError("unexpected text after value");
}

Value parse_value(std::string_view s) {
  std::size_t i = 0;
  skip_ws(s, i);
  if (i == s.size()) throw ConfigError("missing value");
  if (s[i] == '"') {
    auto str = quoted(s, i);
    expect_end(s, i);
    return str;
  }
  if (s[i] == '[') {
    std::vector<std::string> items;
    ++i;
    for (;;) {
      skip_ws(s, i);
      if (i < s.size() && s[i] == ']') {
        ++i;
        break;
      }
      if (i >= s.size() || s[i] != '"') throw ConfigError("arrays hold double-quoted strings only");
      items.push_back(quoted(s, i));
      skip_ws(s, i);
      if (i < s.size() && s[i] == ',') {
        ++i;
      } else if (i < s.size() && s[i] == ']') {
        ++i;
        break;
      } else {
        throw ConfigError("expected ',' or ']' in array");
      }
    }
    expect_end(s, i);
    return items;
  }
  auto word = trim(s.substr(i, s.find('#', i) == std::string_view::npos ? std::string_view::npos : s.find('#', i) - i));
  if (word == "true") return true;
  if (word == "false") return false;
  errno = 0;
  char* end = nullptr;
  if (word.find_first_of(".eE") == std::string::npos) {
    const long long v = std::strtoll(word.c_str(), &end, 10);
    if (errno == 0 && end && *end == '\0' && !word.empty()) return static_cast<std::int64_t>(v);
  } else {
    const double v = std::strtod(word.c_str(), &end);
    if (errno == 0 && end && *end == '\0') return v;
  }
  throw ConfigError("cannot read value '" + word + "' (strings need double quotes)");
}

std::size_t as_count(const Value& v, const std::string& key) {
  const auto* i = std::get_if<std::int64_t>(&v);
  if (!i || *i < 0) throw ConfigError(key + " must be a non-negative integer");
  return static_cast<std::size_t>(*i);
}

bool as_bool(const Value& v, const std::string& key) {
  const auto* b = std::get_if<bool>(&v);
  if (!b) throw ConfigError(key + " must be true or false");
  return *b;
}

std::string as_string(const Value& v, const std::string& key) {
  const auto* s = std::get_if<std::string>(&v);
  if (!s) throw ConfigError(key + " must be a string");
  return *s;
}

double as_number(const Value& v, const std::string& key) {
  if (const auto* d = std::get_if<double>(&v)) return *d;
  if (const auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
  throw ConfigError(key + " must be a number");
}

void apply(Config& c, const std::string& section, const std::string& key, const Value& v) {
  const auto name = section + "." + key;
  auto unknown = [&] { throw ConfigError("unknown key '" + name + "'"); };
  if (section == "reasoner") {
    if (key == "max_ground_clauses") c.budget.max_ground_clauses = as_count(v, name);
    else if (key == "max_term_depth") c.budget.max_term_depth = as_count(v, name);
    else if (key == "wall_time_ms") c.budget.wall_time = std::chrono::milliseconds(as_count(v, name));
    else if (key == "strict") c.strict_premises = as_bool(v, name);
    else unknown();
  } else if (section == "tokens") {
    if (key == "default_max_new_tokens") c.tokens.default_max_new_tokens = as_count(v, name);
    else if (key == "short_sentence_word_threshold") c.tokens.short_sentence_word_threshold = as_count(v, name);
    else if (key == "short_budget") c.tokens.short_budget = as_count(v, name);
    else unknown();
  } else if (section == "verify") {
    if (key == "mode") {
      auto m = verify::mode_from_string(as_string(v, name));
      if (!m) throw ConfigError(name + " must be none, on-off or on-on");
      c.mode = *m;
    } else if (key == "predicate_instruction") {
      c.instructions.predicate = as_string(v, name);
    } else if (key == "fol_instruction") {
      c.instructions.fol = as_string(v, name);
    } else if (key == "corrector") {
      c.corrector = as_string(v, name);
    } else {
      unknown();
    }
  } else if (section == "endpoint") {
    if (key == "url") c.endpoint.url = as_string(v, name);
    else if (key == "token") c.endpoint.token = as_string(v, name);
    else if (key == "corrector_url") c.corrector_url = as_string(v, name);
    else if (key == "timeout_ms") c.endpoint.timeout = std::chrono::milliseconds(as_count(v, name));
    else unknown();
  } else if (section == "run") {
    if (key == "seed") c.seed = as_count(v, name);
    else if (key == "workers") c.workers = as_count(v, name);
    else unknown();
  } else if (section == "pipeline") {
    if (key == "strict_lints") c.strict_lints = as_bool(v, name);
    else unknown();
  } else if (section == "perturb") {
    if (key == "perturbed_fraction") {
      c.perturbed_fraction = as_number(v, name);
    } else if (key == "kinds") {
      const auto* items = std::get_if<std::vector<std::string>>(&v);
      if (!items) throw ConfigError(name + " must be an array of strings");
      c.kinds.clear();
      for (const auto& s : *items) {
        auto k = perturb::kind_from_string(s);
        if (!k) throw ConfigError("unknown perturbation kind '" + s + "'");
        c.kinds.push_back(*k);
      }
    } else {
      unknown();
    }
  } else if (section.empty()) {
    throw ConfigError("key '" + key + "' outside any section");
  } else {
    throw ConfigError("unknown section [" + section + "]");
  }
}

}  // namespace

void Config::validate() const {
  try {
    reasoner::validate(budget);
    tokens.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (workers == 0) throw ConfigError("run.workers must be at least 1");
  if (!(perturbed_fraction > 0.5 && perturbed_fraction < 1.0)) {
    throw ConfigError("perturb.perturbed_fraction must lie in (0.5, 1)");
  }
  if (corrector != "rule" && corrector != "endpoint") throw ConfigError("verify.corrector must be rule or endpoint");
  if (endpoint.timeout.count() <= 0) throw ConfigError("endpoint.timeout_ms must be positive");
}

Config parse_config(std::string_view text, Config base) {
  std::string section;
  std::istringstream in{std::string(text)};
  std::string raw;
  for (std::size_t line_no = 1; std::getline(in, raw); ++line_no) {
    try {
      auto line = trim(raw);
      if (line.empty() || line[0] == '#') continue;
      if (line[0] == '[') {
        const auto close = line.find(']');
        if (close == std::string::npos) throw ConfigError("unterminated section header");
        expect_end(line, close + 1);
        section = trim(std::string_view(line).substr(1, close - 1));
        static const char* kSections[] = {"reasoner", "tokens", "verify", "endpoint", "run", "pipeline", "perturb"};
        if (std::find(std::begin(kSections), std::end(kSections), section) == std::end(kSections)) {
          throw ConfigError("unknown section [" + section + "]");
        }
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw ConfigError("expected key = value");
      const auto key = trim(std::string_view(line).substr(0, eq));
      if (key.empty()) throw ConfigError("empty key");
      apply(base, section, key, parse_value(std::string_view(line).substr(eq + 1)));
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return base;
}

Config load_config(const std::string& path, Config base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config(ss.str(), std::move(base));
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

}  // namespace folforge
