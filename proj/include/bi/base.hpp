#pragma once

// Bases: finite sets of atomic rules over sequents of atoms, plus schematic
// rule families whose metavariables range over declared finite alphabets
// (atoms, bunches over an alphabet, one-hole contexts over an alphabet).
// Derivability in a base is the least relation closed under
// taut / initial / rule / weak / cont / exch / cut; derivations are explicit
// trees checked node by node.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "bi/bunch_algebra.hpp"
#include "bi/errors.hpp"
#include "bi/render.hpp"
#include "bi/syntax.hpp"

namespace bi {

// ---------------------------------------------------------------------------
// rules

struct AtomicRule {
  std::vector<Sequent> premises;  // atomic sequents
  Sequent conclusion;
  std::string name;  // optional label

  bool is_axiom() const { return premises.empty(); }

  friend bool operator==(const AtomicRule& a, const AtomicRule& b) {
    return a.conclusion == b.conclusion && a.premises == b.premises;
  }
};

// Pattern language for schematic rules. Leaves are literal atoms, atom
// metavariables, units, or whole-bunch metavariables; one-hole context
// metavariables apply to an inner pattern.
struct Pattern;
using PatternPtr = std::shared_ptr<const Pattern>;

struct Pattern {
  enum class Kind { LitAtom, AtomVar, UnitAdd, UnitMul, BunchVar, Node, CtxApp };
  Kind kind;
  std::string name;                 // LitAtom / AtomVar / BunchVar / CtxApp (the context var)
  BunchKind node_kind = BunchKind::Add;  // Node
  std::vector<PatternPtr> children;      // Node
  PatternPtr inner;                      // CtxApp

  static PatternPtr lit(Atom a) { return mk({Kind::LitAtom, std::move(a), {}, {}, nullptr}); }
  static PatternPtr atom_var(std::string v) { return mk({Kind::AtomVar, std::move(v), {}, {}, nullptr}); }
  static PatternPtr unit_add() { return mk({Kind::UnitAdd, {}, {}, {}, nullptr}); }
  static PatternPtr unit_mul() { return mk({Kind::UnitMul, {}, {}, {}, nullptr}); }
  static PatternPtr bunch_var(std::string v) { return mk({Kind::BunchVar, std::move(v), {}, {}, nullptr}); }
  static PatternPtr node(BunchKind k, std::vector<PatternPtr> cs) {
    return mk({Kind::Node, {}, k, std::move(cs), nullptr});
  }
  static PatternPtr ctx_app(std::string v, PatternPtr in) {
    return mk({Kind::CtxApp, std::move(v), {}, {}, std::move(in)});
  }

 private:
  static PatternPtr mk(Pattern p) { return std::make_shared<const Pattern>(std::move(p)); }
};

struct PatternSequent {
  PatternPtr antecedent;
  // succedent: literal atom or atom metavariable
  bool suc_is_var = false;
  std::string succedent;
};

// Metavariable declarations. Atom variables range over the atom universe in
// play; bunch and context variables range over canonical bunches / one-hole
// contexts over a named finite alphabet.
struct VarDecl {
  enum class Kind { AtomVar, BunchVar, CtxVar };
  Kind kind;
  std::string alphabet;  // BunchVar/CtxVar: name of the alphabet ("" = universe)
};

struct SchematicRule {
  std::vector<PatternSequent> premises;
  PatternSequent conclusion;
  std::map<std::string, VarDecl> vars;
  std::string name;
};

struct Bindings {
  std::map<std::string, Atom> atoms;
  std::map<std::string, Bunch> bunches;     // canonical values
  std::map<std::string, Bunch> contexts;    // raw bunch with exactly one hole

  friend bool operator==(const Bindings& a, const Bindings& b) {
    return a.atoms == b.atoms && a.bunches == b.bunches && a.contexts == b.contexts;
  }
};

inline Bunch instantiate(const PatternPtr& p, const Bindings& bs) {
  switch (p->kind) {
    case Pattern::Kind::LitAtom: return Bunch::atom_leaf(p->name);
    case Pattern::Kind::AtomVar: {
      auto it = bs.atoms.find(p->name);
      if (it == bs.atoms.end()) throw TranslationError("unbound atom variable " + p->name);
      return Bunch::atom_leaf(it->second);
    }
    case Pattern::Kind::UnitAdd: return Bunch::unit_add();
    case Pattern::Kind::UnitMul: return Bunch::unit_mul();
    case Pattern::Kind::BunchVar: {
      auto it = bs.bunches.find(p->name);
      if (it == bs.bunches.end()) throw TranslationError("unbound bunch variable " + p->name);
      return it->second;
    }
    case Pattern::Kind::Node: {
      std::vector<Bunch> cs;
      for (const PatternPtr& c : p->children) cs.push_back(instantiate(c, bs));
      return Bunch::node(p->node_kind, std::move(cs));
    }
    case Pattern::Kind::CtxApp: {
      auto it = bs.contexts.find(p->name);
      if (it == bs.contexts.end()) throw TranslationError("unbound context variable " + p->name);
      Bunch in = instantiate(p->inner, bs);
      return detail::plug_raw(it->second, in);
    }
  }
  throw TranslationError("bad pattern");
}

inline Sequent instantiate(const PatternSequent& p, const Bindings& bs) {
  Atom suc = p.succedent;
  if (p.suc_is_var) {
    auto it = bs.atoms.find(p.succedent);
    if (it == bs.atoms.end()) throw TranslationError("unbound atom variable " + p.succedent);
    suc = it->second;
  }
  return Sequent{instantiate(p.antecedent, bs), Formula::atom(suc)};
}

inline AtomicRule instantiate(const SchematicRule& r, const Bindings& bs) {
  AtomicRule out;
  out.name = r.name;
  for (const PatternSequent& p : r.premises) out.premises.push_back(instantiate(p, bs));
  out.conclusion = instantiate(r.conclusion, bs);
  return out;
}

// ---------------------------------------------------------------------------
// bases

class Base {
 public:
  Base() = default;
  explicit Base(std::string name) : name_(std::move(name)) {}

  const std::string& name() const { return name_; }
  void set_name(std::string n) { name_ = std::move(n); }

  void add(AtomicRule r) {
    for (const AtomicRule& have : ground_)
      if (have == r) return;  // set semantics
    ground_.push_back(std::move(r));
  }
  void add(SchematicRule r) { schematic_.push_back(std::move(r)); }
  void declare_alphabet(const std::string& name, std::vector<Atom> atoms) {
    std::sort(atoms.begin(), atoms.end());
    atoms.erase(std::unique(atoms.begin(), atoms.end()), atoms.end());
    alphabets_[name] = std::move(atoms);
  }

  const std::vector<AtomicRule>& ground_rules() const { return ground_; }
  const std::vector<SchematicRule>& schematic_rules() const { return schematic_; }
  const std::map<std::string, std::vector<Atom>>& alphabets() const { return alphabets_; }
  const std::vector<Atom>& alphabet(const std::string& name) const {
    auto it = alphabets_.find(name);
    if (it == alphabets_.end()) throw TranslationError("undeclared alphabet " + name);
    return it->second;
  }

  bool empty() const { return ground_.empty() && schematic_.empty(); }

  // atoms appearing anywhere in ground rules and declared alphabets
  std::set<Atom> mentioned_atoms() const {
    std::set<Atom> out;
    auto scan_bunch = [&](const Bunch& b, auto&& self) -> void {
      if (b.is_leaf() && b.payload().is_atom()) out.insert(b.payload().atom_name());
      if (b.is_internal())
        for (const Bunch& c : b.children()) self(c, self);
    };
    for (const AtomicRule& r : ground_) {
      for (const Sequent& s : r.premises) {
        scan_bunch(s.antecedent, scan_bunch);
        out.insert(s.succedent.atom_name());
      }
      scan_bunch(r.conclusion.antecedent, scan_bunch);
      out.insert(r.conclusion.succedent.atom_name());
    }
    for (const auto& [name, atoms] : alphabets_)
      for (const Atom& a : atoms) out.insert(a);
    auto scan_pattern = [&](const PatternPtr& p, auto&& self) -> void {
      if (p->kind == Pattern::Kind::LitAtom) out.insert(p->name);
      for (const PatternPtr& c : p->children) self(c, self);
      if (p->inner) self(p->inner, self);
    };
    for (const SchematicRule& r : schematic_) {
      for (const PatternSequent& p : r.premises) {
        scan_pattern(p.antecedent, scan_pattern);
        if (!p.suc_is_var) out.insert(p.succedent);
      }
      scan_pattern(r.conclusion.antecedent, scan_pattern);
      if (!r.conclusion.suc_is_var) out.insert(r.conclusion.succedent);
    }
    return out;
  }

 private:
  std::string name_;
  std::vector<AtomicRule> ground_;
  std::vector<SchematicRule> schematic_;
  std::map<std::string, std::vector<Atom>> alphabets_;
};

// rule-set union; left operand's rules come first
inline Base base_union(const Base& a, const Base& b) {
  Base out(a.name().empty() ? b.name() : a.name() + "+" + b.name());
  for (const AtomicRule& r : a.ground_rules()) out.add(r);
  for (const AtomicRule& r : b.ground_rules()) out.add(r);
  for (const SchematicRule& r : a.schematic_rules()) out.add(r);
  for (const SchematicRule& r : b.schematic_rules()) out.add(r);
  for (const auto& [n, atoms] : a.alphabets()) out.declare_alphabet(n, atoms);
  for (const auto& [n, atoms] : b.alphabets()) {
    std::vector<Atom> merged = atoms;
    if (a.alphabets().count(n)) {
      const auto& prev = a.alphabet(n);
      merged.insert(merged.end(), prev.begin(), prev.end());
    }
    out.declare_alphabet(n, merged);
  }
  return out;
}

// ---------------------------------------------------------------------------
// derivations (Def. 9 witness trees)

enum class BaseStep : std::uint8_t { Taut, Initial, Rule, Weak, Cont, Exch, Cut };

inline const char* base_step_name(BaseStep s) {
  switch (s) {
    case BaseStep::Taut: return "TAUT";
    case BaseStep::Initial: return "INITIAL";
    case BaseStep::Rule: return "RULE";
    case BaseStep::Weak: return "WEAK";
    case BaseStep::Cont: return "CONT";
    case BaseStep::Exch: return "EXCH";
    case BaseStep::Cut: return "CUT";
  }
  return "?";
}

struct BaseDerivation;
using BaseDerivationPtr = std::shared_ptr<const BaseDerivation>;

struct BaseDerivation {
  BaseStep step;
  Sequent sequent;                       // concluded sequent
  std::vector<BaseDerivationPtr> children;

  // WEAK: path to Q in the child's antecedent; node antecedent replaces it
  //       with the two-child add (Q ; extra).
  // CONT: path to Q in this node's antecedent; child has (Q ; Q) there.
  // CUT:  path to the cut atom's leaf in the second child's antecedent.
  OccurrencePath path;
  Bunch extra;  // WEAK only

  // INITIAL/RULE: which rule and, for schematic instances, its bindings
  int rule_index = -1;        // into ground_rules, or
  int schematic_index = -1;   // into schematic_rules
  Bindings bindings;

  static BaseDerivationPtr taut(const Atom& p) {
    auto d = std::make_shared<BaseDerivation>();
    d->step = BaseStep::Taut;
    d->sequent = {Bunch::atom_leaf(p), Formula::atom(p)};
    return d;
  }
  static BaseDerivationPtr initial(Sequent s, int rule_index, int schematic_index = -1,
                                   Bindings bs = {}) {
    auto d = std::make_shared<BaseDerivation>();
    d->step = BaseStep::Initial;
    d->sequent = std::move(s);
    d->rule_index = rule_index;
    d->schematic_index = schematic_index;
    d->bindings = std::move(bs);
    return d;
  }
  static BaseDerivationPtr rule(Sequent s, std::vector<BaseDerivationPtr> children, int rule_index,
                                int schematic_index = -1, Bindings bs = {}) {
    auto d = std::make_shared<BaseDerivation>();
    d->step = BaseStep::Rule;
    d->sequent = std::move(s);
    d->children = std::move(children);
    d->rule_index = rule_index;
    d->schematic_index = schematic_index;
    d->bindings = std::move(bs);
    return d;
  }
  static BaseDerivationPtr weak(Sequent s, BaseDerivationPtr child, OccurrencePath path,
                                Bunch extra) {
    auto d = std::make_shared<BaseDerivation>();
    d->step = BaseStep::Weak;
    d->sequent = std::move(s);
    d->children = {std::move(child)};
    d->path = std::move(path);
    d->extra = std::move(extra);
    return d;
  }
  static BaseDerivationPtr cont(Sequent s, BaseDerivationPtr child, OccurrencePath path) {
    auto d = std::make_shared<BaseDerivation>();
    d->step = BaseStep::Cont;
    d->sequent = std::move(s);
    d->children = {std::move(child)};
    d->path = std::move(path);
    return d;
  }
  static BaseDerivationPtr exch(Sequent s, BaseDerivationPtr child) {
    auto d = std::make_shared<BaseDerivation>();
    d->step = BaseStep::Exch;
    d->sequent = std::move(s);
    d->children = {std::move(child)};
    return d;
  }
  static BaseDerivationPtr cut(Sequent s, BaseDerivationPtr t_child, BaseDerivationPtr s_child,
                               OccurrencePath path) {
    auto d = std::make_shared<BaseDerivation>();
    d->step = BaseStep::Cut;
    d->sequent = std::move(s);
    d->children = {std::move(t_child), std::move(s_child)};
    d->path = std::move(path);
    return d;
  }
};

// ---------------------------------------------------------------------------
// checking

namespace detail {

inline void check_node(const Base& base, const BaseDerivation& d, const std::string& where) {
  auto err = [&](const std::string& reason) -> void {
    throw RuleError(where, base_step_name(d.step), reason);
  };
  if (!d.sequent.is_atomic()) err("sequent is not atomic");

  auto need_children = [&](std::size_t n) {
    if (d.children.size() != n)
      err("expected " + std::to_string(n) + " children, got " + std::to_string(d.children.size()));
  };

  switch (d.step) {
    case BaseStep::Taut: {
      need_children(0);
      if (!d.sequent.antecedent.is_leaf() ||
          !(d.sequent.antecedent.payload() == d.sequent.succedent))
        err("taut concludes p |- p only");
      break;
    }
    case BaseStep::Initial:
    case BaseStep::Rule: {
      AtomicRule inst;
      if (d.schematic_index >= 0) {
        if (d.schematic_index >= static_cast<int>(base.schematic_rules().size()))
          err("schematic rule index out of range");
        inst = instantiate(base.schematic_rules()[static_cast<std::size_t>(d.schematic_index)],
                           d.bindings);
      } else {
        if (d.rule_index < 0 || d.rule_index >= static_cast<int>(base.ground_rules().size()))
          err("rule index out of range");
        inst = base.ground_rules()[static_cast<std::size_t>(d.rule_index)];
      }
      if (d.step == BaseStep::Initial) {
        need_children(0);
        if (!inst.premises.empty()) err("initial requires an axiom (no premises)");
      } else {
        need_children(inst.premises.size());
        if (inst.premises.empty()) err("rule with no premises is INITIAL");
      }
      // instance boundaries are matched modulo coherent equivalence; explicit
      // EXCH nodes are not required around rule applications
      if (!(inst.conclusion.succedent == d.sequent.succedent) ||
          !coherently_equivalent(inst.conclusion.antecedent, d.sequent.antecedent))
        err("conclusion does not match the rule instance");
      for (std::size_t i = 0; i < inst.premises.size(); ++i) {
        const Sequent& have = d.children[i]->sequent;
        if (!(have.succedent == inst.premises[i].succedent) ||
            !coherently_equivalent(have.antecedent, inst.premises[i].antecedent))
          err("premise " + std::to_string(i) + " does not match the rule instance");
      }
      break;
    }
    case BaseStep::Weak: {
      need_children(1);
      const Sequent& child = d.children[0]->sequent;
      if (!(child.succedent == d.sequent.succedent)) err("weak changes the succedent");
      Bunch q = subbunch_at(child.antecedent, d.path);
      Bunch grown = replace_at(child.antecedent, d.path, Bunch::add2(q, d.extra));
      if (!(grown == d.sequent.antecedent))
        err("antecedent is not the child's with (Q ; Q') at the path");
      break;
    }
    case BaseStep::Cont: {
      need_children(1);
      const Sequent& child = d.children[0]->sequent;
      if (!(child.succedent == d.sequent.succedent)) err("cont changes the succedent");
      Bunch q = subbunch_at(d.sequent.antecedent, d.path);
      Bunch doubled = replace_at(d.sequent.antecedent, d.path, Bunch::add2(q, q));
      if (!(doubled == child.antecedent))
        err("child antecedent is not this one with (Q ; Q) at the path");
      break;
    }
    case BaseStep::Exch: {
      need_children(1);
      const Sequent& child = d.children[0]->sequent;
      if (!(child.succedent == d.sequent.succedent)) err("exch changes the succedent");
      if (!coherently_equivalent(child.antecedent, d.sequent.antecedent))
        err("antecedents are not coherently equivalent");
      break;
    }
    case BaseStep::Cut: {
      need_children(2);
      const Sequent& t = d.children[0]->sequent;   // T |- q
      const Sequent& sq = d.children[1]->sequent;  // S(q) |- p
      if (!(sq.succedent == d.sequent.succedent)) err("cut changes the succedent");
      Bunch at = subbunch_at(sq.antecedent, d.path);
      if (!at.is_leaf() || !(at.payload() == t.succedent))
        err("path does not address the cut atom in S");
      Bunch expect = replace_at(sq.antecedent, d.path, t.antecedent);
      if (!(expect == d.sequent.antecedent))
        err("antecedent is not S with T plugged at the path");
      break;
    }
  }
}

inline void check_tree(const Base& base, const BaseDerivation& d, std::string where) {
  check_node(base, d, where);
  for (std::size_t i = 0; i < d.children.size(); ++i)
    check_tree(base, *d.children[i], where + "." + std::to_string(i));
}

}  // namespace detail

// Validates every node of d against Def. 9 over `base`. Returns true on
// success; throws RuleError naming the first failing node otherwise.
inline bool check_base_derivation(const Base& base, const BaseDerivation& d) {
  detail::check_tree(base, d, "root");
  return true;
}

// ---------------------------------------------------------------------------
// search budgets and verdicts

struct SearchBudget {
  std::uint32_t max_depth = 12;
  std::uint32_t max_bunch_size = 24;
  std::uint64_t max_visited = 1000000;
};

struct SearchStats {
  std::uint64_t visited = 0;
  std::uint64_t facts = 0;
  bool saturation_complete = false;
  std::uint32_t saturation_bound = 0;
  std::string note;
};

enum class VerdictState : std::uint8_t { Proved, Refuted, Unknown };

inline const char* verdict_name(VerdictState s) {
  switch (s) {
    case VerdictState::Proved: return "Proved";
    case VerdictState::Refuted: return "Refuted";
    case VerdictState::Unknown: return "Unknown";
  }
  return "?";
}

template <typename Witness>
struct Verdict {
  VerdictState state = VerdictState::Unknown;
  std::optional<Witness> witness;  // Proved
  std::string reason;              // Refuted / Unknown
  SearchStats stats;

  bool proved() const { return state == VerdictState::Proved; }
  bool refuted() const { return state == VerdictState::Refuted; }
  bool unknown() const { return state == VerdictState::Unknown; }

  static Verdict prove(Witness w, SearchStats st = {}) {
    return {VerdictState::Proved, std::move(w), "", std::move(st)};
  }
  static Verdict refute(std::string reason, SearchStats st = {}) {
    return {VerdictState::Refuted, std::nullopt, std::move(reason), std::move(st)};
  }
  static Verdict unknown(std::string reason, SearchStats st = {}) {
    return {VerdictState::Unknown, std::nullopt, std::move(reason), std::move(st)};
  }
};

}  // namespace bi
