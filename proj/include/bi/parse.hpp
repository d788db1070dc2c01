#pragma once

// Concrete syntax front-end.
//
//   formula := wterm (("-*" | "->") formula)?        right-assoc, weakest
//   wterm   := oterm ("\/" oterm)*                   left-assoc
//   oterm   := uterm (("/\" | "*") uterm)*           left-assoc, shared level
//   uterm   := atom | "T" | "Tm" | "F" | "(" formula ")"
//   bunch   := bterm (("," bterm)* | (";" bterm)*)
//   bterm   := formula | "empty+" | "empty*" | "_" | "(" bunch ")"
//   sequent := bunch "|-" formula
//
// `,` and `;` never mix at one level; doing so is a MixedContextError.
// `_` is the hole leaf of contextual bunches. Whitespace is insignificant,
// except that the unit lexemes `empty+`/`empty*` must be written without a
// gap ("empty * p" is the atom `empty` starred with `p`).

#include <algorithm>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bi/errors.hpp"
#include "bi/syntax.hpp"

namespace bi {

enum class Tok : std::uint8_t {
  LParen, RParen, LBracket, RBracket,
  Comma, Semi, Amp, At, Turnstile, FatArrow,
  Arrow, WandOp, AndOp, OrOp, StarOp,
  UnitAdd, UnitMul, Underscore,
  Ident, UpperIdent,
  End,
};

struct Token {
  Tok kind;
  std::string text;
  std::size_t offset;
};

inline const char* tok_name(Tok t) {
  switch (t) {
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::LBracket: return "'['";
    case Tok::RBracket: return "']'";
    case Tok::Comma: return "','";
    case Tok::Semi: return "';'";
    case Tok::Amp: return "'&'";
    case Tok::At: return "'@'";
    case Tok::Turnstile: return "'|-'";
    case Tok::FatArrow: return "'=>'";
    case Tok::Arrow: return "'->'";
    case Tok::WandOp: return "'-*'";
    case Tok::AndOp: return "'/\\'";
    case Tok::OrOp: return "'\\/'";
    case Tok::StarOp: return "'*'";
    case Tok::UnitAdd: return "'empty+'";
    case Tok::UnitMul: return "'empty*'";
    case Tok::Underscore: return "'_'";
    case Tok::Ident: return "identifier";
    case Tok::UpperIdent: return "uppercase identifier";
    case Tok::End: return "end of input";
  }
  return "?";
}

inline std::vector<Token> lex(std::string_view text) {
  std::vector<Token> out;
  std::size_t i = 0;
  auto is_ident_char = [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
  };
  while (i < text.size()) {
    char c = text[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') { ++i; continue; }
    if (c == '#') {
      while (i < text.size() && text[i] != '\n') ++i;
      continue;
    }
    std::size_t start = i;
    auto push = [&](Tok k, std::size_t len) {
      out.push_back({k, std::string(text.substr(start, len)), start});
      i = start + len;
    };
    switch (c) {
      case '(': push(Tok::LParen, 1); continue;
      case ')': push(Tok::RParen, 1); continue;
      case '[': push(Tok::LBracket, 1); continue;
      case ']': push(Tok::RBracket, 1); continue;
      case ',': push(Tok::Comma, 1); continue;
      case ';': push(Tok::Semi, 1); continue;
      case '&': push(Tok::Amp, 1); continue;
      case '@': push(Tok::At, 1); continue;
      case '*': push(Tok::StarOp, 1); continue;
      case '|':
        if (i + 1 < text.size() && text[i + 1] == '-') { push(Tok::Turnstile, 2); continue; }
        throw SyntaxError(i, {"'|-'"}, "'|'");
      case '-':
        if (i + 1 < text.size() && text[i + 1] == '>') { push(Tok::Arrow, 2); continue; }
        if (i + 1 < text.size() && text[i + 1] == '*') { push(Tok::WandOp, 2); continue; }
        throw SyntaxError(i, {"'->'", "'-*'"}, "'-'");
      case '=':
        if (i + 1 < text.size() && text[i + 1] == '>') { push(Tok::FatArrow, 2); continue; }
        throw SyntaxError(i, {"'=>'"}, "'='");
      case '/':
        if (i + 1 < text.size() && text[i + 1] == '\\') { push(Tok::AndOp, 2); continue; }
        throw SyntaxError(i, {"'/\\'"}, "'/'");
      case '\\':
        if (i + 1 < text.size() && text[i + 1] == '/') { push(Tok::OrOp, 2); continue; }
        throw SyntaxError(i, {"'\\/'"}, "'\\'");
      default: break;
    }
    if (c == '_') {
      if (i + 1 < text.size() && is_ident_char(text[i + 1]))
        throw SyntaxError(i, {"an atom (lowercase-initial)"}, "'_'-initial name");
      push(Tok::Underscore, 1);
      continue;
    }
    if (c >= 'a' && c <= 'z') {
      std::size_t j = i + 1;
      while (j < text.size() && is_ident_char(text[j])) ++j;
      std::string_view word = text.substr(i, j - i);
      if (word == "empty" && j < text.size() && (text[j] == '+' || text[j] == '*')) {
        push(text[j] == '+' ? Tok::UnitAdd : Tok::UnitMul, j - i + 1);
        continue;
      }
      push(Tok::Ident, j - i);
      continue;
    }
    if (c >= 'A' && c <= 'Z') {
      std::size_t j = i + 1;
      while (j < text.size() && is_ident_char(text[j])) ++j;
      push(Tok::UpperIdent, j - i);
      continue;
    }
    throw SyntaxError(i, {}, std::string("unexpected character '") + c + "'");
  }
  out.push_back({Tok::End, "", text.size()});
  return out;
}

namespace detail {

struct ParseFail {};  // internal backtracking signal; never escapes

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  Formula formula_top() {
    Formula f = formula();
    expect(Tok::End);
    return f;
  }
  Bunch bunch_top() {
    Bunch b = bunch();
    expect(Tok::End);
    return b;
  }
  Sequent sequent_top() {
    Sequent s = sequent();
    expect(Tok::End);
    return s;
  }
  Sequent sequent() {
    Bunch ant = bunch();
    expect(Tok::Turnstile);
    Formula suc = formula();
    return {std::move(ant), std::move(suc)};
  }

  Formula formula() {
    Formula l = wterm();
    if (peek().kind == Tok::Arrow || peek().kind == Tok::WandOp) {
      Tok op = next().kind;
      Formula r = formula();  // right associative
      return Formula::make(op == Tok::Arrow ? FormulaKind::Imp : FormulaKind::Wand, std::move(l),
                           std::move(r));
    }
    return l;
  }

  Bunch bunch() {
    Bunch first = bterm();
    Tok sep = peek().kind;
    if (sep != Tok::Comma && sep != Tok::Semi) return first;
    std::vector<Bunch> items;
    items.push_back(std::move(first));
    while (peek().kind == sep) {
      next();
      items.push_back(bterm());
    }
    // the other context-former at this level forces explicit nesting
    if (peek().kind == (sep == Tok::Comma ? Tok::Semi : Tok::Comma))
      throw MixedContextError(peek().offset);
    return Bunch::node(sep == Tok::Comma ? BunchKind::Mul : BunchKind::Add, std::move(items));
  }

  // raise the recorded furthest failure as a SyntaxError
  [[noreturn]] void raise() const {
    const Token& t = toks_[err_pos_ < toks_.size() ? err_pos_ : toks_.size() - 1];
    std::vector<std::string> expected = err_expected_;
    std::string found = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
    throw SyntaxError(t.offset, std::move(expected), std::move(found));
  }

 private:
  Formula wterm() {
    Formula l = oterm();
    while (peek().kind == Tok::OrOp) {
      next();
      l = Formula::lor(std::move(l), oterm());
    }
    return l;
  }
  Formula oterm() {
    Formula l = uterm();
    while (peek().kind == Tok::AndOp || peek().kind == Tok::StarOp) {
      Tok op = next().kind;
      l = Formula::make(op == Tok::AndOp ? FormulaKind::And : FormulaKind::Star, std::move(l),
                        uterm());
    }
    return l;
  }
  Formula uterm() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Ident:
        next();
        return Formula::atom(t.text);
      case Tok::UpperIdent:
        if (t.text == "T") { next(); return Formula::top(); }
        if (t.text == "Tm") { next(); return Formula::mtop(); }
        if (t.text == "F") { next(); return Formula::bot(); }
        fail({"'T'", "'Tm'", "'F'", "an atom"});
      case Tok::LParen: {
        next();
        Formula f = formula();
        expect(Tok::RParen);
        return f;
      }
      default:
        fail({"an atom", "'T'", "'Tm'", "'F'", "'('"});
    }
  }

  Bunch bterm() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::UnitAdd: next(); return Bunch::unit_add();
      case Tok::UnitMul: next(); return Bunch::unit_mul();
      case Tok::Underscore: next(); return Bunch::hole();
      case Tok::LParen: {
        // A '(' may open a formula leaf ("(p /\ q) -* r") or a grouped
        // bunch ("(p , q)"); try the formula reading first, backtrack once.
        std::size_t mark = pos_;
        try {
          return Bunch::leaf(formula());
        } catch (ParseFail&) {
          pos_ = mark;
        }
        next();
        Bunch b = bunch();
        expect(Tok::RParen);
        return b;
      }
      default:
        return Bunch::leaf(formula());
    }
  }

  const Token& peek() const { return toks_[pos_]; }
  const Token& next() { return toks_[pos_++]; }
  void expect(Tok k) {
    if (peek().kind != k) fail({tok_name(k)});
    next();
  }
  [[noreturn]] void fail(std::vector<std::string> expected) {
    if (pos_ > err_pos_) {
      err_pos_ = pos_;
      err_expected_ = std::move(expected);
    } else if (pos_ == err_pos_) {
      for (auto& e : expected)
        if (std::find(err_expected_.begin(), err_expected_.end(), e) == err_expected_.end())
          err_expected_.push_back(std::move(e));
    }
    throw ParseFail{};
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::size_t err_pos_ = 0;
  std::vector<std::string> err_expected_;
};

template <typename F>
auto run_parser(std::string_view text, F&& body) {
  Parser p(lex(text));
  try {
    return body(p);
  } catch (ParseFail&) {
    p.raise();
  }
}

}  // namespace detail

inline Formula parse_formula(std::string_view text) {
  return detail::run_parser(text, [](detail::Parser& p) { return p.formula_top(); });
}

inline Bunch parse_bunch(std::string_view text) {
  return detail::run_parser(text, [](detail::Parser& p) { return p.bunch_top(); });
}

inline Sequent parse_sequent(std::string_view text) {
  return detail::run_parser(text, [](detail::Parser& p) { return p.sequent_top(); });
}

}  // namespace bi
