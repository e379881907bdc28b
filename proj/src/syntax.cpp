#include "folforge/syntax.hpp"

#include <algorithm>
#include <cctype>
#include <cstdint>

#include "folforge/diagnostics.hpp"

namespace folforge {

namespace {

// Decodes one UTF-8 code point at `pos`. Returns the code point and its byte
// length; malformed sequences decode as U+FFFD with length 1.
std::pair<char32_t, std::size_t> decode_utf8(std::string_view s, std::size_t pos) {
  const auto b0 = static_cast<unsigned char>(s[pos]);
  if (b0 < 0x80) return {b0, 1};
  std::size_t len = 0;
  char32_t cp = 0;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    return {0xFFFD, 1};
  }
  if (pos + len > s.size()) return {0xFFFD, 1};
  for (std::size_t i = 1; i < len; ++i) {
    const auto b = static_cast<unsigned char>(s[pos + i]);
    if ((b & 0xC0) != 0x80) return {0xFFFD, 1};
    cp = (cp << 6) | (b & 0x3F);
  }
  return {cp, len};
}

bool is_math_operator(char32_t cp) {
  return (cp >= 0x2190 && cp <= 0x21FF) ||  // arrows
         (cp >= 0x2200 && cp <= 0x22FF) ||  // mathematical operators
         (cp >= 0x27F0 && cp <= 0x27FF) ||  // long arrows
         (cp >= 0x2A00 && cp <= 0x2AFF) ||  // supplemental operators
         cp == 0x00D7 || cp == 0x00F7;      // multiplication, division
}

bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

}  // namespace

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  std::size_t i = 0;
  auto push = [&](TokenKind kind, std::size_t len) {
    out.push_back(Token{kind, Span{i, i + len}, std::string(text.substr(i, len))});
    i += len;
  };
  while (i < text.size()) {
    const char c = text[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      ++i;
      continue;
    }
    if (is_ident_char(c)) {
      std::size_t j = i;
      while (j < text.size() && is_ident_char(text[j])) ++j;
      push(TokenKind::Identifier, j - i);
      continue;
    }
    if (static_cast<unsigned char>(c) >= 0x80) {
      auto [cp, len] = decode_utf8(text, i);
      switch (cp) {
        case U'¬': push(TokenKind::Not, len); break;
        case U'∧': push(TokenKind::And, len); break;
        case U'∨': push(TokenKind::Or, len); break;
        case U'→': push(TokenKind::Implies, len); break;
        case U'↔': push(TokenKind::Iff, len); break;
        case U'⊕': push(TokenKind::Xor, len); break;
        case U'∀': push(TokenKind::Forall, len); break;
        case U'∃': push(TokenKind::Exists, len); break;
        default:
          push(is_math_operator(cp) ? TokenKind::UnknownOperator : TokenKind::SpecialChar, len);
      }
      continue;
    }
    switch (c) {
      case '(': push(TokenKind::LParen, 1); break;
      case ')': push(TokenKind::RParen, 1); break;
      case ',': push(TokenKind::Comma, 1); break;
      case '&': push(TokenKind::And, 1); break;
      case '|': push(TokenKind::Or, 1); break;
      case '-':
        if (i + 1 < text.size() && text[i + 1] == '>') {
          push(TokenKind::Implies, 2);
        } else {
          push(TokenKind::Not, 1);
        }
        break;
      case '<':
        if (text.substr(i, 3) == "<->") {
          push(TokenKind::Iff, 3);
        } else {
          push(TokenKind::UnknownOperator, 1);
        }
        break;
      case '>': case '=': case '+': case '*': case '/': case '^': case '~': case '!':
        push(TokenKind::UnknownOperator, 1);
        break;
      default:
        push(TokenKind::SpecialChar, 1);
    }
  }
  out.push_back(Token{TokenKind::End, Span{text.size(), text.size()}, {}});
  return out;
}

namespace {

struct ParseAbort {
  ParseFailure failure;
};

constexpr int kLevels = 5;

TokenKind level_token(int level) {
  static constexpr TokenKind kTokens[kLevels] = {TokenKind::Iff, TokenKind::Implies, TokenKind::Xor, TokenKind::Or,
                                                 TokenKind::And};
  return kTokens[level];
}

Connective level_connective(int level) {
  static constexpr Connective kOps[kLevels] = {Connective::Iff, Connective::Implies, Connective::Xor, Connective::Or,
                                               Connective::And};
  return kOps[level];
}

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  Formula parse_all() {
    auto f = parse_binary(0);
    if (peek().kind != TokenKind::End) fail(ParseFailure::Reason::TrailingInput, "end of input");
    return f;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)];
  }

  const Token& advance() {
    const auto& t = tokens_[pos_];
    if (t.kind == TokenKind::LParen) ++depth_;
    if (t.kind == TokenKind::RParen) --depth_;
    if (pos_ + 1 < tokens_.size()) ++pos_;
    return t;
  }

  [[noreturn]] void fail(ParseFailure::Reason reason, std::string expected) const {
    const auto& t = peek();
    if (t.kind == TokenKind::SpecialChar || t.kind == TokenKind::UnknownOperator) {
      reason = ParseFailure::Reason::BadCharacter;
    } else if (t.kind == TokenKind::End && reason == ParseFailure::Reason::UnexpectedToken) {
      reason = ParseFailure::Reason::UnexpectedEnd;
    }
    throw ParseAbort{ParseFailure{reason, t, depth_, std::move(expected)}};
  }

  void expect(TokenKind kind, const char* what) {
    if (peek().kind != kind) fail(ParseFailure::Reason::UnexpectedToken, what);
    advance();
  }

  bool is_bound(const std::string& name) const {
    return std::find(bound_.begin(), bound_.end(), name) != bound_.end();
  }

  Formula parse_binary(int level) {
    if (level == kLevels) return parse_unary();
    auto lhs = parse_binary(level + 1);
    if (peek().kind != level_token(level)) return lhs;
    advance();
    auto rhs = parse_binary(level);
    return make_binary(level_connective(level), lhs, rhs, Span{lhs.span().begin, rhs.span().end});
  }

  bool at_quantifier() const {
    const auto& t = peek();
    if (t.kind == TokenKind::Forall || t.kind == TokenKind::Exists) return true;
    return t.kind == TokenKind::Identifier && (t.text == "all" || t.text == "exists") &&
           peek(1).kind == TokenKind::Identifier;
  }

  Formula parse_unary() {
    const auto& t = peek();
    if (t.kind == TokenKind::Not) {
      const auto begin = advance().span.begin;
      auto operand = parse_unary();
      return make_not(operand, Span{begin, operand.span().end});
    }
    if (at_quantifier()) return parse_quantified();
    if (t.kind == TokenKind::LParen) {
      advance();
      auto f = parse_binary(0);
      expect(TokenKind::RParen, "')'");
      return f;
    }
    if (t.kind == TokenKind::Identifier) return parse_atom();
    fail(ParseFailure::Reason::UnexpectedToken, "formula");
  }

  Formula parse_quantified() {
    const auto& head = advance();
    const auto kind = (head.kind == TokenKind::Forall || head.text == "all") ? QuantifierKind::Forall
                                                                              : QuantifierKind::Exists;
    const auto begin = head.span.begin;
    if (peek().kind != TokenKind::Identifier) fail(ParseFailure::Reason::MissingVariable, "variable");
    std::vector<std::string> vars;
    std::size_t header_end = 0;
    for (;;) {
      const auto& v = advance();
      if (std::find(vars.begin(), vars.end(), v.text) != vars.end()) {
        --pos_;
        fail(ParseFailure::Reason::RepeatedVariable, "distinct variable");
      }
      vars.push_back(v.text);
      header_end = v.span.end;
      if (peek().kind == TokenKind::Comma && peek(1).kind == TokenKind::Identifier) {
        advance();
        continue;
      }
      break;
    }
    const auto mark = bound_.size();
    bound_.insert(bound_.end(), vars.begin(), vars.end());
    auto body = parse_binary(0);
    bound_.resize(mark);
    return make_quantified(kind, std::move(vars), body, Span{begin, body.span().end}, Span{begin, header_end});
  }

  Formula parse_atom() {
    const auto& name = advance();
    if (peek().kind != TokenKind::LParen) return make_atom(name.text, {}, name.span);
    advance();
    auto args = parse_arguments();
    const auto end = peek().span.end;
    expect(TokenKind::RParen, "')' or ','");
    return make_atom(name.text, std::move(args), Span{name.span.begin, end});
  }

  std::vector<Term> parse_arguments() {
    std::vector<Term> args;
    args.push_back(parse_term());
    while (peek().kind == TokenKind::Comma) {
      advance();
      args.push_back(parse_term());
    }
    return args;
  }

  Term parse_term() {
    if (peek().kind != TokenKind::Identifier) fail(ParseFailure::Reason::UnexpectedToken, "term");
    const auto& name = advance();
    if (peek().kind == TokenKind::LParen) {
      advance();
      auto args = parse_arguments();
      const auto end = peek().span.end;
      expect(TokenKind::RParen, "')' or ','");
      return Term::function(name.text, std::move(args), Span{name.span.begin, end});
    }
    if (is_bound(name.text) || is_free_variable_name(name.text)) return Term::variable(name.text, name.span);
    return Term::constant(name.text, name.span);
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  int depth_ = 0;
  std::vector<std::string> bound_;
};

}  // namespace

std::variant<Formula, ParseFailure> parse_raw(std::string_view text) {
  Parser parser(tokenize(text));
  try {
    return parser.parse_all();
  } catch (const ParseAbort& abort) {
    return abort.failure;
  }
}

ParseResult parse(std::string_view text) {
  auto raw = parse_raw(text);
  if (auto* f = std::get_if<Formula>(&raw)) return ParseResult(std::move(*f));
  return ParseResult(classify_failure(text, std::get<ParseFailure>(raw)));
}

namespace {

struct Symbols {
  std::string_view not_, and_, or_, implies, iff, xor_, forall, exists;
  bool space_after_quantifier;
};

constexpr Symbols kUnicode{"¬", "∧", "∨", "→", "↔", "⊕", "∀", "∃", false};
constexpr Symbols kAscii{"-", "&", "|", "->", "<->", "", "all", "exists", true};

class Printer {
 public:
  explicit Printer(PrintStyle style) : ascii_(style == PrintStyle::Ascii), sym_(ascii_ ? kAscii : kUnicode) {}

  void formula(const Formula& f) {
    if (const auto* a = f.get<Atom>()) {
      atom(*a);
    } else if (const auto* n = f.get<Negation>()) {
      out_ += sym_.not_;
      const auto& op = n->operand;
      if (op.is<Atom>() || op.is<Negation>() || ascii_xor(op)) {
        formula(op);
      } else {
        parenthesized(op);
      }
    } else if (const auto* b = f.get<Binary>()) {
      binary(*b);
    } else {
      const auto& q = *f.get<Quantified>();
      out_ += q.kind == QuantifierKind::Forall ? sym_.forall : sym_.exists;
      if (sym_.space_after_quantifier) out_ += ' ';
      for (std::size_t i = 0; i < q.vars.size(); ++i) {
        if (i) out_ += ',';
        out_ += q.vars[i];
      }
      out_ += ' ';
      if (q.body.is<Quantified>()) {
        formula(q.body);
      } else {
        parenthesized(q.body);
      }
    }
  }

  void term(const Term& t) {
    out_ += t.name;
    if (t.args.empty()) return;
    out_ += '(';
    for (std::size_t i = 0; i < t.args.size(); ++i) {
      if (i) out_ += ", ";
      term(t.args[i]);
    }
    out_ += ')';
  }

  std::string take() { return std::move(out_); }

 private:
  bool ascii_xor(const Formula& f) const {
    const auto* b = f.get<Binary>();
    return ascii_ && b && b->op == Connective::Xor;
  }

  void atom(const Atom& a) {
    out_ += a.predicate;
    if (a.args.empty()) return;
    out_ += '(';
    for (std::size_t i = 0; i < a.args.size(); ++i) {
      if (i) out_ += ", ";
      term(a.args[i]);
    }
    out_ += ')';
  }

  void parenthesized(const Formula& f) {
    out_ += '(';
    formula(f);
    out_ += ')';
  }

  void operand(const Formula& f) {
    if (f.is<Atom>() || f.is<Negation>() || ascii_xor(f)) {
      formula(f);
    } else {
      parenthesized(f);
    }
  }

  void binary(const Binary& b) {
    if (ascii_ && b.op == Connective::Xor) {
      out_ += "((";
      operand(b.left);
      out_ += " | ";
      operand(b.right);
      out_ += ") & -(";
      operand(b.left);
      out_ += " & ";
      operand(b.right);
      out_ += "))";
      return;
    }
    operand(b.left);
    out_ += ' ';
    switch (b.op) {
      case Connective::And: out_ += sym_.and_; break;
      case Connective::Or: out_ += sym_.or_; break;
      case Connective::Implies: out_ += sym_.implies; break;
      case Connective::Iff: out_ += sym_.iff; break;
      case Connective::Xor: out_ += sym_.xor_; break;
    }
    out_ += ' ';
    operand(b.right);
  }

  bool ascii_;
  Symbols sym_;
  std::string out_;
};

}  // namespace

std::string print(const Formula& f, PrintStyle style) {
  Printer p(style);
  p.formula(f);
  return p.take();
}

std::string print(const Term& t) {
  Printer p(PrintStyle::Unicode);
  p.term(t);
  return p.take();
}

}  // namespace folforge
