#pragma once

// Base file format, one rule per line:
//
//   [P1 |- p1 & P2 |- p2] => P |- p
//   [] => m |- a                        # an axiom; '#' starts a comment
//
// Schematic metavariables are uppercase and must be declared first:
//
//   @alphabet XI p q f0                 fixed atom alphabet
//   @atoms X Y                          atom metavariables
//   @bunches L over XI                  bunch metavariable over an alphabet
//   @ctxs D over XI                     one-hole context metavariable
//
// In rule bodies a context metavariable is applied as D(...); bunch and
// atom metavariables appear bare. The names T, Tm and F are reserved by the
// formula syntax and cannot be metavariables.

#include <sstream>
#include <string>

#include "bi/base.hpp"
#include "bi/parse.hpp"
#include "bi/render.hpp"

namespace bi {

namespace detail {

class BaseFileParser {
 public:
  explicit BaseFileParser(std::string_view text) : toks_(lex(text)) {}

  Base parse(std::string name) {
    Base out(std::move(name));
    while (peek().kind != Tok::End) {
      if (peek().kind == Tok::At) {
        header(out);
      } else {
        rule_line(out);
      }
    }
    return out;
  }

 private:
  void header(Base& out) {
    expect(Tok::At);
    std::string word = expect(Tok::Ident).text;
    if (word == "alphabet") {
      std::string name = expect(Tok::UpperIdent).text;
      std::vector<Atom> atoms;
      while (peek().kind == Tok::Ident) atoms.push_back(next().text);
      out.declare_alphabet(name, std::move(atoms));
    } else if (word == "atoms") {
      while (peek().kind == Tok::UpperIdent) decls_[next().text] = {VarDecl::Kind::AtomVar, ""};
    } else if (word == "bunches" || word == "ctxs") {
      VarDecl::Kind kind = word == "bunches" ? VarDecl::Kind::BunchVar : VarDecl::Kind::CtxVar;
      std::vector<std::string> names;
      while (peek().kind == Tok::UpperIdent) names.push_back(next().text);
      std::string alphabet;
      if (peek().kind == Tok::Ident && peek().text == "over") {
        next();
        alphabet = expect(Tok::UpperIdent).text;
      }
      for (auto& n : names) decls_[n] = {kind, alphabet};
    } else {
      throw SyntaxError(peek().offset, {"'alphabet'", "'atoms'", "'bunches'", "'ctxs'"},
                        "'" + word + "'");
    }
  }

  void rule_line(Base& out) {
    expect(Tok::LBracket);
    std::vector<PatternSequent> premises;
    if (peek().kind != Tok::RBracket) {
      premises.push_back(pattern_sequent());
      while (peek().kind == Tok::Amp) {
        next();
        premises.push_back(pattern_sequent());
      }
    }
    expect(Tok::RBracket);
    expect(Tok::FatArrow);
    PatternSequent conclusion = pattern_sequent();

    bool is_schematic = false;
    auto scan = [&](const PatternSequent& s) {
      if (s.suc_is_var || !schematic::pattern_vars(s.antecedent).empty()) is_schematic = true;
    };
    for (const auto& p : premises) scan(p);
    scan(conclusion);

    if (is_schematic) {
      SchematicRule r;
      r.premises = std::move(premises);
      r.conclusion = std::move(conclusion);
      auto used = schematic::rule_vars(r);
      for (const std::string& v : used) {
        auto it = decls_.find(v);
        if (it == decls_.end())
          throw SyntaxError(0, {"a declared metavariable"}, "undeclared metavariable " + v);
        r.vars[v] = it->second;
      }
      out.add(std::move(r));
    } else {
      AtomicRule r;
      Bindings none;
      for (const auto& p : premises) r.premises.push_back(instantiate(p, none));
      r.conclusion = instantiate(conclusion, none);
      out.add(std::move(r));
    }
  }

  PatternSequent pattern_sequent() {
    PatternPtr ant = pattern_bunch();
    expect(Tok::Turnstile);
    PatternSequent out;
    out.antecedent = std::move(ant);
    if (peek().kind == Tok::UpperIdent) {
      Token t = next();
      require_decl(t, VarDecl::Kind::AtomVar);
      out.suc_is_var = true;
      out.succedent = t.text;
    } else {
      out.succedent = expect(Tok::Ident).text;
    }
    return out;
  }

  PatternPtr pattern_bunch() {
    PatternPtr first = pattern_term();
    Tok sep = peek().kind;
    if (sep != Tok::Comma && sep != Tok::Semi) return first;
    BunchKind k = sep == Tok::Comma ? BunchKind::Mul : BunchKind::Add;
    PatternPtr acc = first;
    while (peek().kind == sep) {
      next();
      // right-nest: binary pattern nodes compose associatively modulo
      // coherent equivalence, so nesting direction is immaterial
      acc = Pattern::node(k, {acc, pattern_term()});
    }
    if (peek().kind == (sep == Tok::Comma ? Tok::Semi : Tok::Comma))
      throw MixedContextError(peek().offset);
    return acc;
  }

  PatternPtr pattern_term() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::UnitAdd: next(); return Pattern::unit_add();
      case Tok::UnitMul: next(); return Pattern::unit_mul();
      case Tok::Ident: next(); return Pattern::lit(t.text);
      case Tok::UpperIdent: {
        Token name = next();
        if (peek().kind == Tok::LParen) {
          require_decl(name, VarDecl::Kind::CtxVar);
          next();
          PatternPtr inner = pattern_bunch();
          expect(Tok::RParen);
          return Pattern::ctx_app(name.text, std::move(inner));
        }
        auto it = decls_.find(name.text);
        if (it == decls_.end())
          throw SyntaxError(name.offset, {"a declared metavariable"},
                            "undeclared metavariable " + name.text);
        if (it->second.kind == VarDecl::Kind::AtomVar) return Pattern::atom_var(name.text);
        if (it->second.kind == VarDecl::Kind::BunchVar) return Pattern::bunch_var(name.text);
        throw SyntaxError(name.offset, {"'(' after a context metavariable"}, name.text);
      }
      case Tok::LParen: {
        next();
        PatternPtr inner = pattern_bunch();
        expect(Tok::RParen);
        return inner;
      }
      default:
        throw SyntaxError(t.offset, {"an atom", "a metavariable", "'empty+'", "'empty*'", "'('"},
                          t.kind == Tok::End ? "end of input" : "'" + t.text + "'");
    }
  }

  void require_decl(const Token& t, VarDecl::Kind kind) {
    auto it = decls_.find(t.text);
    if (it == decls_.end() || it->second.kind != kind)
      throw SyntaxError(t.offset, {"a declared metavariable of the right kind"}, t.text);
  }

  const Token& peek() const { return toks_[pos_]; }
  const Token& next() { return toks_[pos_++]; }
  const Token& expect(Tok k) {
    if (peek().kind != k)
      throw SyntaxError(peek().offset, {tok_name(k)},
                        peek().kind == Tok::End ? "end of input" : "'" + peek().text + "'");
    return toks_[pos_++];
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::map<std::string, VarDecl> decls_;
};

inline std::string render_pattern(const PatternPtr& p, bool parens_inside = false) {
  switch (p->kind) {
    case Pattern::Kind::LitAtom:
    case Pattern::Kind::AtomVar:
    case Pattern::Kind::BunchVar:
      return p->name;
    case Pattern::Kind::UnitAdd: return "empty+";
    case Pattern::Kind::UnitMul: return "empty*";
    case Pattern::Kind::CtxApp: return p->name + "(" + render_pattern(p->inner) + ")";
    case Pattern::Kind::Node: {
      const char* sep = p->node_kind == BunchKind::Add ? " ; " : " , ";
      std::string body;
      for (std::size_t i = 0; i < p->children.size(); ++i) {
        if (i) body += sep;
        const PatternPtr& c = p->children[i];
        bool need = c->kind == Pattern::Kind::Node;
        body += need ? "(" + render_pattern(c) + ")" : render_pattern(c);
      }
      return parens_inside ? "(" + body + ")" : body;
    }
  }
  return "?";
}

inline std::string render_pattern_sequent(const PatternSequent& s) {
  return render_pattern(s.antecedent) + " |- " + s.succedent;
}

}  // namespace detail

inline Base parse_base(std::string_view text, std::string name = "") {
  return detail::BaseFileParser(text).parse(std::move(name));
}

inline std::string render_base(const Base& base) {
  std::ostringstream out;
  for (const auto& [name, atoms] : base.alphabets()) {
    out << "@alphabet " << name;
    for (const Atom& a : atoms) out << ' ' << a;
    out << '\n';
  }
  // collect metavariable declarations from the schematic rules
  std::map<std::string, VarDecl> decls;
  for (const SchematicRule& r : base.schematic_rules())
    for (const auto& [v, d] : r.vars) decls[v] = d;
  std::string atoms_line;
  for (const auto& [v, d] : decls) {
    switch (d.kind) {
      case VarDecl::Kind::AtomVar:
        atoms_line += " " + v;
        break;
      case VarDecl::Kind::BunchVar:
        out << "@bunches " << v << (d.alphabet.empty() ? "" : " over " + d.alphabet) << '\n';
        break;
      case VarDecl::Kind::CtxVar:
        out << "@ctxs " << v << (d.alphabet.empty() ? "" : " over " + d.alphabet) << '\n';
        break;
    }
  }
  if (!atoms_line.empty()) out << "@atoms" << atoms_line << '\n';
  auto rule_text = [](const std::vector<std::string>& premises, const std::string& conclusion) {
    std::string s = "[";
    for (std::size_t i = 0; i < premises.size(); ++i) {
      if (i) s += " & ";
      s += premises[i];
    }
    s += "] => " + conclusion;
    return s;
  };
  for (const AtomicRule& r : base.ground_rules()) {
    std::vector<std::string> ps;
    for (const Sequent& p : r.premises) ps.push_back(render(p));
    out << rule_text(ps, render(r.conclusion));
    if (!r.name.empty()) out << "   # " << r.name;
    out << '\n';
  }
  for (const SchematicRule& r : base.schematic_rules()) {
    std::vector<std::string> ps;
    for (const PatternSequent& p : r.premises) ps.push_back(detail::render_pattern_sequent(p));
    out << rule_text(ps, detail::render_pattern_sequent(r.conclusion));
    if (!r.name.empty()) out << "   # " << r.name;
    out << '\n';
  }
  return out.str();
}

}  // namespace bi
