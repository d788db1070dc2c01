#pragma once

// Printers. parse(render(x)) is structurally equal to x; parentheses are
// minimal for formulas and mark exactly the internal nesting of bunches.

#include <string>

#include "bi/syntax.hpp"

namespace bi {

namespace detail {

// precedence levels: 1 = -> -* (right-assoc), 2 = \/, 3 = /\ *, 4 = atoms
inline int formula_prec(const Formula& f) {
  switch (f.kind()) {
    case FormulaKind::Imp:
    case FormulaKind::Wand: return 1;
    case FormulaKind::Or: return 2;
    case FormulaKind::And:
    case FormulaKind::Star: return 3;
    default: return 4;
  }
}

inline void render_formula(const Formula& f, int min_prec, std::string& out) {
  int prec = formula_prec(f);
  bool parens = prec < min_prec;
  if (parens) out += '(';
  switch (f.kind()) {
    case FormulaKind::AtomF: out += f.atom_name(); break;
    case FormulaKind::Top: out += 'T'; break;
    case FormulaKind::Bot: out += 'F'; break;
    case FormulaKind::MTop: out += "Tm"; break;
    case FormulaKind::Imp:
    case FormulaKind::Wand:
      render_formula(f.left(), prec + 1, out);
      out += f.kind() == FormulaKind::Imp ? " -> " : " -* ";
      render_formula(f.right(), prec, out);
      break;
    case FormulaKind::Or:
    case FormulaKind::And:
    case FormulaKind::Star:
      render_formula(f.left(), prec, out);
      out += f.kind() == FormulaKind::Or ? " \\/ " : (f.kind() == FormulaKind::And ? " /\\ " : " * ");
      render_formula(f.right(), prec + 1, out);
      break;
  }
  if (parens) out += ')';
}

inline void render_bunch(const Bunch& b, std::string& out) {
  switch (b.kind()) {
    case BunchKind::UnitAdd: out += "empty+"; return;
    case BunchKind::UnitMul: out += "empty*"; return;
    case BunchKind::Hole: out += '_'; return;
    case BunchKind::Leaf: render_formula(b.payload(), 0, out); return;
    case BunchKind::Add:
    case BunchKind::Mul: {
      const char* sep = b.kind() == BunchKind::Add ? " ; " : " , ";
      bool first = true;
      for (const Bunch& c : b.children()) {
        if (!first) out += sep;
        first = false;
        if (c.is_internal()) {
          out += '(';
          render_bunch(c, out);
          out += ')';
        } else {
          render_bunch(c, out);
        }
      }
      return;
    }
  }
}

}  // namespace detail

inline std::string render(const Formula& f) {
  std::string out;
  detail::render_formula(f, 0, out);
  return out;
}

inline std::string render(const Bunch& b) {
  std::string out;
  detail::render_bunch(b, out);
  return out;
}

inline std::string render(const Sequent& s) {
  return render(s.antecedent) + " |- " + render(s.succedent);
}

}  // namespace bi
