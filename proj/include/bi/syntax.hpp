#pragma once

// Core syntax: formulas over an atom alphabet and bunches over formula
// leaves. Both are immutable shared trees with precomputed hashes, so
// copies are cheap and values are safe to share across threads.
//
// Bunches use n-ary add/mul nodes as a storage convenience for the binary
// context-formers under associativity; raw parse trees are kept as written,
// canonical forms live in bunch_algebra.hpp.

#include <cassert>
#include <compare>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace bi {

using Atom = std::string;

namespace detail {
inline std::size_t hash_combine(std::size_t seed, std::size_t v) {
  // boost-style mix
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}
}  // namespace detail

enum class FormulaKind : std::uint8_t {
  AtomF,  // p
  Top,    // T
  Bot,    // F
  MTop,   // Tm
  And,    // additive conjunction
  Or,     // disjunction
  Imp,    // ->
  Star,   // *
  Wand,   // -*
};

inline bool is_binary(FormulaKind k) {
  return k == FormulaKind::And || k == FormulaKind::Or || k == FormulaKind::Imp ||
         k == FormulaKind::Star || k == FormulaKind::Wand;
}

class Formula {
 public:
  Formula() : Formula(top()) {}

  static Formula atom(Atom name) {
    assert(!name.empty());
    Node n;
    n.kind = FormulaKind::AtomF;
    n.name = std::move(name);
    n.hash = detail::hash_combine(0x41, std::hash<std::string>{}(n.name));
    return Formula(std::make_shared<const Node>(std::move(n)));
  }
  static Formula top() { return nullary(FormulaKind::Top, 0x54); }
  static Formula bot() { return nullary(FormulaKind::Bot, 0x46); }
  static Formula mtop() { return nullary(FormulaKind::MTop, 0x4d); }
  static Formula make(FormulaKind k, Formula l, Formula r) {
    assert(is_binary(k));
    Node n;
    n.kind = k;
    n.hash = detail::hash_combine(
        detail::hash_combine(static_cast<std::size_t>(k) * 0x100000001b3ULL, l.hash()), r.hash());
    n.sub.push_back(std::move(l));
    n.sub.push_back(std::move(r));
    return Formula(std::make_shared<const Node>(std::move(n)));
  }
  static Formula land(Formula l, Formula r) { return make(FormulaKind::And, std::move(l), std::move(r)); }
  static Formula lor(Formula l, Formula r) { return make(FormulaKind::Or, std::move(l), std::move(r)); }
  static Formula imp(Formula l, Formula r) { return make(FormulaKind::Imp, std::move(l), std::move(r)); }
  static Formula star(Formula l, Formula r) { return make(FormulaKind::Star, std::move(l), std::move(r)); }
  static Formula wand(Formula l, Formula r) { return make(FormulaKind::Wand, std::move(l), std::move(r)); }

  FormulaKind kind() const { return n_->kind; }
  bool is_atom() const { return n_->kind == FormulaKind::AtomF; }
  const Atom& atom_name() const {
    assert(is_atom());
    return n_->name;
  }
  const Formula& left() const { return n_->sub[0]; }
  const Formula& right() const { return n_->sub[1]; }
  std::size_t hash() const { return n_->hash; }

  friend bool operator==(const Formula& a, const Formula& b) {
    if (a.n_ == b.n_) return true;
    if (a.n_->hash != b.n_->hash || a.n_->kind != b.n_->kind) return false;
    if (a.n_->kind == FormulaKind::AtomF) return a.n_->name == b.n_->name;
    if (a.n_->sub.empty()) return true;
    return a.left() == b.left() && a.right() == b.right();
  }
  friend bool operator!=(const Formula& a, const Formula& b) { return !(a == b); }

  // Fixed total order: atoms first (by name), then the constants, then
  // binary kinds, recursing on subformulas. Used for canonical sorting.
  static int compare(const Formula& a, const Formula& b) {
    if (a.n_ == b.n_) return 0;
    auto rank = [](FormulaKind k) { return static_cast<int>(k); };
    if (rank(a.kind()) != rank(b.kind())) return rank(a.kind()) < rank(b.kind()) ? -1 : 1;
    if (a.kind() == FormulaKind::AtomF) return a.atom_name().compare(b.atom_name());
    if (!is_binary(a.kind())) return 0;
    if (int c = compare(a.left(), b.left()); c != 0) return c;
    return compare(a.right(), b.right());
  }

 private:
  struct Node {
    FormulaKind kind;
    Atom name;  // AtomF only
    std::vector<Formula> sub;
    std::size_t hash = 0;
  };

  explicit Formula(std::shared_ptr<const Node> n) : n_(std::move(n)) {}
  static Formula nullary(FormulaKind k, std::size_t salt) {
    Node n;
    n.kind = k;
    n.hash = detail::hash_combine(salt, static_cast<std::size_t>(k));
    return Formula(std::make_shared<const Node>(std::move(n)));
  }

  std::shared_ptr<const Node> n_;
};

enum class BunchKind : std::uint8_t {
  UnitAdd,  // empty+
  UnitMul,  // empty*
  Hole,     // the single hole of a contextual bunch
  Leaf,     // formula payload (atomic bunches use atom formulas)
  Mul,      // , node
  Add,      // ; node
};

class Bunch {
 public:
  Bunch() : Bunch(unit_add()) {}

  static Bunch unit_add() { return nullary(BunchKind::UnitAdd); }
  static Bunch unit_mul() { return nullary(BunchKind::UnitMul); }
  static Bunch hole() { return nullary(BunchKind::Hole); }
  static Bunch leaf(Formula f) {
    Node n;
    n.kind = BunchKind::Leaf;
    n.hash = detail::hash_combine(0x4c, f.hash());
    n.size = 1;
    n.holes = 0;
    n.payload = std::move(f);
    return Bunch(std::make_shared<const Node>(std::move(n)));
  }
  static Bunch atom_leaf(Atom a) { return leaf(Formula::atom(std::move(a))); }

  static Bunch add(std::vector<Bunch> children) { return node(BunchKind::Add, std::move(children)); }
  static Bunch mul(std::vector<Bunch> children) { return node(BunchKind::Mul, std::move(children)); }
  static Bunch add2(Bunch a, Bunch b) { return add({std::move(a), std::move(b)}); }
  static Bunch mul2(Bunch a, Bunch b) { return mul({std::move(a), std::move(b)}); }
  static Bunch node(BunchKind k, std::vector<Bunch> children) {
    assert(k == BunchKind::Add || k == BunchKind::Mul);
    assert(children.size() >= 2);
    Node n;
    n.kind = k;
    std::size_t h = static_cast<std::size_t>(k) * 0x100000001b3ULL;
    std::uint32_t sz = 1, holes = 0;
    for (const Bunch& c : children) {
      h = detail::hash_combine(h, c.hash());
      sz += c.size();
      holes += c.hole_count();
    }
    n.hash = h;
    n.size = sz;
    n.holes = holes;
    n.children = std::move(children);
    return Bunch(std::make_shared<const Node>(std::move(n)));
  }

  BunchKind kind() const { return n_->kind; }
  bool is_unit() const { return n_->kind == BunchKind::UnitAdd || n_->kind == BunchKind::UnitMul; }
  bool is_leaf() const { return n_->kind == BunchKind::Leaf; }
  bool is_hole() const { return n_->kind == BunchKind::Hole; }
  bool is_internal() const { return n_->kind == BunchKind::Add || n_->kind == BunchKind::Mul; }
  const Formula& payload() const {
    assert(is_leaf());
    return n_->payload;
  }
  const std::vector<Bunch>& children() const { return n_->children; }
  std::size_t hash() const { return n_->hash; }
  // total node count (internal + leaves + units + holes)
  std::uint32_t size() const { return n_->size; }
  std::uint32_t hole_count() const { return n_->holes; }

  // true when every leaf payload is an atom (holes and units allowed)
  bool is_atomic() const {
    if (is_leaf()) return payload().is_atom();
    for (const Bunch& c : children())
      if (!c.is_atomic()) return false;
    return true;
  }

  friend bool operator==(const Bunch& a, const Bunch& b) {
    if (a.n_ == b.n_) return true;
    if (a.n_->hash != b.n_->hash || a.n_->kind != b.n_->kind || a.n_->size != b.n_->size)
      return false;
    switch (a.n_->kind) {
      case BunchKind::Leaf:
        return a.payload() == b.payload();
      case BunchKind::Add:
      case BunchKind::Mul: {
        if (a.children().size() != b.children().size()) return false;
        for (std::size_t i = 0; i < a.children().size(); ++i)
          if (!(a.children()[i] == b.children()[i])) return false;
        return true;
      }
      default:
        return true;
    }
  }
  friend bool operator!=(const Bunch& a, const Bunch& b) { return !(a == b); }

  // Total order used for canonical child sorting:
  //   empty+ < empty* < hole < atom leaves < other formula leaves < mul < add,
  // recursing lexicographically below.
  static int compare(const Bunch& a, const Bunch& b) {
    if (a.n_ == b.n_) return 0;
    if (order_rank(a) != order_rank(b)) return order_rank(a) < order_rank(b) ? -1 : 1;
    if (a.is_leaf()) return Formula::compare(a.payload(), b.payload());
    if (!a.is_internal()) return 0;
    std::size_t n = std::min(a.children().size(), b.children().size());
    for (std::size_t i = 0; i < n; ++i)
      if (int c = compare(a.children()[i], b.children()[i]); c != 0) return c;
    if (a.children().size() != b.children().size())
      return a.children().size() < b.children().size() ? -1 : 1;
    return 0;
  }

 private:
  struct Node {
    BunchKind kind;
    Formula payload;  // Leaf only
    std::vector<Bunch> children;
    std::size_t hash = 0;
    std::uint32_t size = 0;
    std::uint32_t holes = 0;
  };

  static int order_rank(const Bunch& b) {
    switch (b.kind()) {
      case BunchKind::UnitAdd: return 0;
      case BunchKind::UnitMul: return 1;
      case BunchKind::Hole: return 2;
      case BunchKind::Leaf: return b.payload().is_atom() ? 3 : 4;
      case BunchKind::Mul: return 5;
      case BunchKind::Add: return 6;
    }
    return 7;
  }

  explicit Bunch(std::shared_ptr<const Node> n) : n_(std::move(n)) {}
  static Bunch nullary(BunchKind k) {
    Node n;
    n.kind = k;
    n.hash = detail::hash_combine(0x42, static_cast<std::size_t>(k));
    n.size = 1;
    n.holes = (k == BunchKind::Hole) ? 1 : 0;
    return Bunch(std::make_shared<const Node>(std::move(n)));
  }

  std::shared_ptr<const Node> n_;
};

// A sequent pairs a bunch of formulas with a succedent formula. Sequents of
// atoms are the special case where all leaves and the succedent are atoms.
struct Sequent {
  Bunch antecedent;
  Formula succedent;

  bool is_atomic() const { return succedent.is_atom() && antecedent.is_atomic(); }

  friend bool operator==(const Sequent& a, const Sequent& b) {
    return a.succedent == b.succedent && a.antecedent == b.antecedent;
  }
  friend bool operator!=(const Sequent& a, const Sequent& b) { return !(a == b); }
};

struct BunchHash {
  std::size_t operator()(const Bunch& b) const { return b.hash(); }
};
struct FormulaHash {
  std::size_t operator()(const Formula& f) const { return f.hash(); }
};
struct SequentHash {
  std::size_t operator()(const Sequent& s) const {
    return detail::hash_combine(s.antecedent.hash(), s.succedent.hash());
  }
};

}  // namespace bi
