#pragma once

// Bunches modulo coherent equivalence.
//
// Canonical form: add/mul nodes alternate, removable units are removed,
// every internal node has >= 2 children, and children are sorted under a
// fixed total order so multiset equality is plain list equality. A bunch
// equal (mod coherent equivalence) to a unit or a single leaf canonicalizes
// to that unit/leaf.
//
// Bunch-extension g >= g' holds when g arises from g' by inserting additive
// siblings at sub-bunch occurrences, modulo coherent equivalence. The
// decision procedure is a backtracking multiset matching on canonical forms,
// validated against a brute-force insertion closure (weakening_closure).

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "bi/errors.hpp"
#include "bi/syntax.hpp"

namespace bi {

// ---------------------------------------------------------------------------
// canonical forms

inline Bunch canonicalize_raw(const Bunch& b);

// A bunch in normal form. Only canonicalize() makes these.
class CanonicalBunch {
 public:
  CanonicalBunch() : b_(Bunch::unit_add()) {}
  const Bunch& get() const { return b_; }
  std::size_t hash() const { return b_.hash(); }
  std::uint32_t size() const { return b_.size(); }

  friend bool operator==(const CanonicalBunch& a, const CanonicalBunch& b) {
    return a.b_ == b.b_;
  }
  friend bool operator!=(const CanonicalBunch& a, const CanonicalBunch& b) { return !(a == b); }
  friend bool operator<(const CanonicalBunch& a, const CanonicalBunch& b) {
    return Bunch::compare(a.b_, b.b_) < 0;
  }

 private:
  friend CanonicalBunch canonicalize(const Bunch&);
  explicit CanonicalBunch(Bunch b) : b_(std::move(b)) {}
  Bunch b_;
};

struct CanonicalBunchHash {
  std::size_t operator()(const CanonicalBunch& b) const { return b.hash(); }
};

inline Bunch canonicalize_raw(const Bunch& b) {
  switch (b.kind()) {
    case BunchKind::UnitAdd:
    case BunchKind::UnitMul:
    case BunchKind::Hole:
    case BunchKind::Leaf:
      return b;
    case BunchKind::Add:
    case BunchKind::Mul: {
      const BunchKind kind = b.kind();
      const BunchKind unit = kind == BunchKind::Add ? BunchKind::UnitAdd : BunchKind::UnitMul;
      std::vector<Bunch> out;
      for (const Bunch& raw : b.children()) {
        Bunch c = canonicalize_raw(raw);
        if (c.kind() == unit) continue;          // removable unit
        if (c.kind() == kind) {                  // flatten same-kind child
          for (const Bunch& g : c.children()) out.push_back(g);
        } else {
          out.push_back(std::move(c));
        }
      }
      if (out.empty()) return kind == BunchKind::Add ? Bunch::unit_add() : Bunch::unit_mul();
      if (out.size() == 1) return out[0];
      std::sort(out.begin(), out.end(),
                [](const Bunch& x, const Bunch& y) { return Bunch::compare(x, y) < 0; });
      return Bunch::node(kind, std::move(out));
    }
  }
  return b;
}

inline CanonicalBunch canonicalize(const Bunch& b) { return CanonicalBunch(canonicalize_raw(b)); }

inline bool coherently_equivalent(const Bunch& x, const Bunch& y) {
  return canonicalize(x) == canonicalize(y);
}

// ---------------------------------------------------------------------------
// contextual bunches, plugging, occurrence paths

using OccurrencePath = std::vector<std::size_t>;

// A bunch with exactly one hole.
class BunchCtx {
 public:
  static BunchCtx identity() { return BunchCtx(Bunch::hole()); }
  explicit BunchCtx(Bunch b) : b_(std::move(b)) {
    if (b_.hole_count() != 1)
      throw PathError("contextual bunch must contain exactly one hole, got " +
                      std::to_string(b_.hole_count()));
  }
  const Bunch& get() const { return b_; }

  friend bool operator==(const BunchCtx& a, const BunchCtx& b) { return a.b_ == b.b_; }

 private:
  Bunch b_;
};

namespace detail {
inline Bunch plug_raw(const Bunch& ctx, const Bunch& d) {
  switch (ctx.kind()) {
    case BunchKind::Hole:
      return d;
    case BunchKind::Add:
    case BunchKind::Mul: {
      if (ctx.hole_count() == 0) return ctx;
      std::vector<Bunch> out;
      out.reserve(ctx.children().size());
      for (const Bunch& c : ctx.children()) out.push_back(plug_raw(c, d));
      return Bunch::node(ctx.kind(), std::move(out));
    }
    default:
      return ctx;
  }
}
}  // namespace detail

inline Bunch plug(const BunchCtx& ctx, const Bunch& d) { return detail::plug_raw(ctx.get(), d); }

inline const Bunch& subbunch_at(const Bunch& b, const OccurrencePath& path) {
  const Bunch* cur = &b;
  for (std::size_t idx : path) {
    if (!cur->is_internal() || idx >= cur->children().size())
      throw PathError("index " + std::to_string(idx) + " out of range");
    cur = &cur->children()[idx];
  }
  return *cur;
}

// Replace the sub-bunch at `path` by `d` (occurrence-precise substitution).
inline Bunch replace_at(const Bunch& b, const OccurrencePath& path, const Bunch& d,
                        std::size_t depth = 0) {
  if (depth == path.size()) return d;
  if (!b.is_internal() || path[depth] >= b.children().size())
    throw PathError("index " + std::to_string(path[depth]) + " out of range");
  std::vector<Bunch> out = b.children();
  out[path[depth]] = replace_at(out[path[depth]], path, d, depth + 1);
  return Bunch::node(b.kind(), std::move(out));
}

// Split b at path into a context and the addressed sub-bunch.
inline std::pair<BunchCtx, Bunch> context_at(const Bunch& b, const OccurrencePath& path) {
  Bunch sub = subbunch_at(b, path);
  Bunch ctx = replace_at(b, path, Bunch::hole());
  return {BunchCtx(std::move(ctx)), std::move(sub)};
}

// ---------------------------------------------------------------------------
// depth measures (computed on the canonical layering, one step per
// alternation level)

inline std::size_t nest_depth(const Bunch& b, const OccurrencePath& path) {
  subbunch_at(b, path);  // validates
  return path.size();
}

inline std::optional<OccurrencePath> find_hole(const Bunch& b) {
  if (b.is_hole()) return OccurrencePath{};
  if (!b.is_internal() || b.hole_count() == 0) return std::nullopt;
  for (std::size_t i = 0; i < b.children().size(); ++i) {
    if (auto p = find_hole(b.children()[i])) {
      p->insert(p->begin(), i);
      return p;
    }
  }
  return std::nullopt;
}

inline std::size_t hole_depth(const BunchCtx& ctx) {
  Bunch canon = canonicalize_raw(ctx.get());
  auto p = find_hole(canon);
  if (!p) throw PathError("context lost its hole during canonicalization");
  return p->size();
}

// ---------------------------------------------------------------------------
// single insertion steps (the sigma of bunch-extension, on canonical forms)
//
// Besides plain additive insertion at a node, two derived shapes are needed
// to cover all occurrences available in coherently-equivalent
// representatives:
//   MulUnit:      S  ~  S , empty*   then insert at the unit: S , (empty* ; d)
//   GroupPlain:   a proper sub-multiset G of a mul node regrouped and
//                 weakened: (G) ; d
//   GroupMulUnit: a proper sub-multiset G of an add node, via the unit
//                 trick: (G) , (empty* ; d)

struct InsertStep {
  enum class Kind { Plain, MulUnit, GroupPlain, GroupMulUnit };
  Kind kind;
  OccurrencePath node;             // node position in the canonical `before`
  std::vector<std::size_t> group;  // child indices at `node` (Group* kinds)
  Bunch material;                  // the inserted d
  Bunch before;                    // canonical
  Bunch after;                     // canonical
};

namespace detail {

inline Bunch bunch_of(BunchKind kind, std::vector<Bunch> items) {
  if (items.empty()) return kind == BunchKind::Add ? Bunch::unit_add() : Bunch::unit_mul();
  if (items.size() == 1) return items[0];
  return Bunch::node(kind, std::move(items));
}

inline void all_paths(const Bunch& b, OccurrencePath& cur, std::vector<OccurrencePath>& out) {
  out.push_back(cur);
  if (!b.is_internal()) return;
  for (std::size_t i = 0; i < b.children().size(); ++i) {
    cur.push_back(i);
    all_paths(b.children()[i], cur, out);
    cur.pop_back();
  }
}

inline std::vector<OccurrencePath> all_paths(const Bunch& b) {
  std::vector<OccurrencePath> out;
  OccurrencePath cur;
  all_paths(b, cur, out);
  return out;
}

// proper sub-multisets (by index) of size >= 2, excluding the full set
inline std::vector<std::vector<std::size_t>> proper_subgroups(std::size_t n) {
  std::vector<std::vector<std::size_t>> out;
  if (n < 3) return out;  // need |G| >= 2 and |G| <= n-1
  for (std::uint64_t mask = 0; mask < (1ULL << n); ++mask) {
    std::size_t bits = static_cast<std::size_t>(__builtin_popcountll(mask));
    if (bits < 2 || bits >= n) continue;
    std::vector<std::size_t> g;
    for (std::size_t i = 0; i < n; ++i)
      if (mask & (1ULL << i)) g.push_back(i);
    out.push_back(std::move(g));
  }
  return out;
}

}  // namespace bi::detail

// All single-insertion successors of canonical `before` with material `d`,
// canonicalized. Skips no-ops (inserting empty+ plainly is the identity).
inline std::vector<InsertStep> insertion_steps(const CanonicalBunch& before, const Bunch& material) {
  std::vector<InsertStep> out;
  const Bunch& a = before.get();
  const bool material_is_unit_add = material.kind() == BunchKind::UnitAdd;
  for (const OccurrencePath& path : detail::all_paths(a)) {
    const Bunch& sub = subbunch_at(a, path);
    if (!material_is_unit_add) {
      Bunch raw = replace_at(a, path, Bunch::add2(sub, material));
      out.push_back({InsertStep::Kind::Plain, path, {}, material, a, canonicalize_raw(raw)});
    }
    {
      Bunch grown = Bunch::mul2(sub, Bunch::add2(Bunch::unit_mul(), material));
      Bunch raw = replace_at(a, path, grown);
      out.push_back({InsertStep::Kind::MulUnit, path, {}, material, a, canonicalize_raw(raw)});
    }
    if (sub.is_internal()) {
      if (sub.children().size() > 12)
        throw BudgetError("insertion step enumeration over a node with " +
                          std::to_string(sub.children().size()) + " children");
      for (auto& group : detail::proper_subgroups(sub.children().size())) {
        std::vector<Bunch> in_group, rest;
        std::size_t gi = 0;
        for (std::size_t i = 0; i < sub.children().size(); ++i) {
          if (gi < group.size() && group[gi] == i) {
            in_group.push_back(sub.children()[i]);
            ++gi;
          } else {
            rest.push_back(sub.children()[i]);
          }
        }
        Bunch grouped = detail::bunch_of(sub.kind(), in_group);
        Bunch new_child;
        InsertStep::Kind kind;
        if (sub.kind() == BunchKind::Mul) {
          if (material_is_unit_add) continue;
          new_child = Bunch::add2(grouped, material);  // (G) ; d
          kind = InsertStep::Kind::GroupPlain;
        } else {
          new_child = Bunch::mul2(grouped, Bunch::add2(Bunch::unit_mul(), material));
          kind = InsertStep::Kind::GroupMulUnit;
        }
        rest.push_back(std::move(new_child));
        Bunch raw = replace_at(a, path, detail::bunch_of(sub.kind(), std::move(rest)));
        out.push_back({kind, path, group, material, a, canonicalize_raw(raw)});
      }
    }
  }
  // drop no-ops
  out.erase(std::remove_if(out.begin(), out.end(),
                           [&](const InsertStep& s) { return s.after == a; }),
            out.end());
  return out;
}

// ---------------------------------------------------------------------------
// deciding bunch-extension

namespace detail {

// Memoized matcher. match(a, b) == true iff a >= b, both canonical.
class ExtendsMemo {
 public:
  bool match(const Bunch& a, const Bunch& b) {
    if (a == b) return true;
    if (b.kind() == BunchKind::UnitAdd) return true;
    Key key{a, b};
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    bool r = false;
    // An empty+ child of a mul node in b is a wildcard: extending it by any
    // material replaces it outright (empty+ ; D == D), and extending by
    // empty* vaporizes it. Try the single-drop reductions first.
    if (has_droppable(b)) {
      for (const Bunch& reduced : unit_drops(b)) {
        if (match(a, reduced)) {
          r = true;
          break;
        }
      }
    }
    if (!r && a.is_internal()) r = match_layer(a, b, a.kind());
    memo_[std::move(key)] = r;
    return r;
  }

 private:
  struct Key {
    Bunch a, b;
    bool operator==(const Key& o) const { return a == o.a && b == o.b; }
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const {
      return bi::detail::hash_combine(k.a.hash(), k.b.hash());
    }
  };

  static bool has_droppable(const Bunch& b) {
    if (b.kind() == BunchKind::Mul) {
      for (const Bunch& c : b.children())
        if (c.kind() == BunchKind::UnitAdd) return true;
    }
    if (b.is_internal())
      for (const Bunch& c : b.children())
        if (has_droppable(c)) return true;
    return false;
  }

  // single removals of an empty+ child from some mul node of b, canonicalized
  static std::vector<Bunch> unit_drops(const Bunch& b) {
    std::vector<Bunch> out;
    for (const OccurrencePath& path : all_paths_of(b)) {
      const Bunch& sub = peek(b, path);
      if (sub.kind() != BunchKind::Mul) continue;
      for (std::size_t i = 0; i < sub.children().size(); ++i) {
        if (sub.children()[i].kind() != BunchKind::UnitAdd) continue;
        std::vector<Bunch> rest;
        for (std::size_t j = 0; j < sub.children().size(); ++j)
          if (j != i) rest.push_back(sub.children()[j]);
        Bunch replacement = rest.size() == 1 ? rest[0] : Bunch::node(BunchKind::Mul, std::move(rest));
        out.push_back(canonicalize_raw(put(b, path, replacement)));
        break;  // identical drops are interchangeable
      }
    }
    return out;
  }

  static const Bunch& peek(const Bunch& b, const OccurrencePath& path) {
    const Bunch* cur = &b;
    for (std::size_t i : path) cur = &cur->children()[i];
    return *cur;
  }
  static Bunch put(const Bunch& b, const OccurrencePath& path, const Bunch& d,
                   std::size_t depth = 0) {
    if (depth == path.size()) return d;
    std::vector<Bunch> out = b.children();
    out[path[depth]] = put(out[path[depth]], path, d, depth + 1);
    return Bunch::node(b.kind(), std::move(out));
  }
  static std::vector<OccurrencePath> all_paths_of(const Bunch& b) {
    std::vector<OccurrencePath> out;
    OccurrencePath cur;
    collect(b, cur, out);
    return out;
  }
  static void collect(const Bunch& b, OccurrencePath& cur, std::vector<OccurrencePath>& out) {
    out.push_back(cur);
    if (!b.is_internal()) return;
    for (std::size_t i = 0; i < b.children().size(); ++i) {
      cur.push_back(i);
      collect(b.children()[i], cur, out);
      cur.pop_back();
    }
  }

  // Layer matching. a is an internal node of kind K. The targets are b's
  // children when b has kind K, else the singleton {b}. Targets are
  // partitioned into groups; groups map onto distinct children of a, each
  // group matching its child recursively as a K-bunch. Leftover children
  // of a are free for K = add and must extend empty* for K = mul. An
  // empty+ target under mul may instead be marked absorbed (it can grow
  // into arbitrary spliced material), which frees the leftover check.
  bool match_layer(const Bunch& a, const Bunch& b, BunchKind k) {
    std::vector<Bunch> targets;
    if (b.kind() == k)
      targets = b.children();
    else
      targets.push_back(b);
    const std::vector<Bunch>& cs = a.children();
    std::vector<int> assign(targets.size(), -1);  // target index -> child, or -2 absorbed
    return assign_from(0, targets, cs, assign, k);
  }

  static constexpr int kAbsorbed = -2;

  bool assign_from(std::size_t t, const std::vector<Bunch>& targets, const std::vector<Bunch>& cs,
                   std::vector<int>& assign, BunchKind k) {
    if (t == targets.size()) return check_assignment(targets, cs, assign, k);
    for (std::size_t c = 0; c < cs.size(); ++c) {
      // identical children are interchangeable; use the leftmost copy first
      if (c > 0 && cs[c] == cs[c - 1]) {
        bool used_prev = false;
        for (std::size_t i = 0; i < t; ++i)
          if (assign[i] == static_cast<int>(c - 1)) used_prev = true;
        if (!used_prev) continue;
      }
      assign[t] = static_cast<int>(c);
      if (assign_from(t + 1, targets, cs, assign, k)) return true;
      assign[t] = -1;
    }
    if (k == BunchKind::Mul && targets[t].kind() == BunchKind::UnitAdd) {
      assign[t] = kAbsorbed;
      if (assign_from(t + 1, targets, cs, assign, k)) return true;
      assign[t] = -1;
    }
    return false;
  }

  bool check_assignment(const std::vector<Bunch>& targets, const std::vector<Bunch>& cs,
                        const std::vector<int>& assign, BunchKind k) {
    std::map<int, std::vector<Bunch>> groups;
    bool absorbed = false;
    for (std::size_t t = 0; t < targets.size(); ++t) {
      if (assign[t] == kAbsorbed)
        absorbed = true;
      else
        groups[assign[t]].push_back(targets[t]);
    }
    for (auto& [c, members] : groups) {
      Bunch target = canonicalize_raw(bunch_of(k, members));
      if (!match(cs[static_cast<std::size_t>(c)], target)) return false;
    }
    if (k == BunchKind::Mul && !absorbed) {
      Bunch unit = Bunch::unit_mul();
      for (std::size_t c = 0; c < cs.size(); ++c) {
        if (groups.count(static_cast<int>(c))) continue;
        if (!match(cs[c], unit)) return false;
      }
    }
    return true;
  }

  std::unordered_map<Key, bool, KeyHash> memo_;
};

}  // namespace detail

// Decides g >= g' (bunch-extension). Memo tables are per call.
inline bool extends(const Bunch& g, const Bunch& g_prime) {
  detail::ExtendsMemo memo;
  return memo.match(canonicalize_raw(g), canonicalize_raw(g_prime));
}

// Reusable session when many queries run against shared subterms.
class ExtendsSession {
 public:
  bool extends(const Bunch& g, const Bunch& g_prime) {
    return memo_.match(canonicalize_raw(g), canonicalize_raw(g_prime));
  }
  bool extends_canonical(const CanonicalBunch& g, const CanonicalBunch& g_prime) {
    return memo_.match(g.get(), g_prime.get());
  }

 private:
  detail::ExtendsMemo memo_;
};

// ---------------------------------------------------------------------------
// brute-force oracle: insertion closure

// All canonical bunches h with h >= g obtainable by inserting additive
// siblings drawn from `pool`, with canonical size <= size_bound. `cap`
// bounds the closure cardinality.
inline std::set<CanonicalBunch> weakening_closure(const Bunch& g, const std::vector<Bunch>& pool,
                                                  std::uint32_t size_bound,
                                                  std::size_t cap = 100000) {
  CanonicalBunch start = canonicalize(g);
  if (start.size() > size_bound)
    throw BudgetError("size_bound smaller than the seed bunch");
  std::set<CanonicalBunch> seen{start};
  std::vector<CanonicalBunch> frontier{start};
  while (!frontier.empty()) {
    std::vector<CanonicalBunch> next;
    for (const CanonicalBunch& h : frontier) {
      for (const Bunch& d : pool) {
        if (h.size() + d.size() > size_bound + 2) continue;  // cheap pre-filter
        for (const InsertStep& step : insertion_steps(h, d)) {
          if (step.after.size() > size_bound) continue;
          CanonicalBunch after = canonicalize(step.after);
          if (seen.insert(after).second) {
            if (seen.size() > cap) throw BudgetError("weakening closure exceeded cap");
            next.push_back(after);
          }
        }
      }
    }
    frontier = std::move(next);
  }
  return seen;
}

// ---------------------------------------------------------------------------
// guided step reconstruction: a concrete insertion chain witnessing g >= g'

namespace detail {

// candidate insertion materials: groupings of the target's nodes
inline std::vector<Bunch> grouping_materials(const Bunch& target) {
  std::set<CanonicalBunch> acc;
  std::vector<Bunch> out;
  auto add = [&](const Bunch& b) {
    CanonicalBunch c = canonicalize(b);
    if (acc.insert(c).second) out.push_back(c.get());
  };
  add(Bunch::unit_add());
  add(Bunch::unit_mul());
  for (const OccurrencePath& p : all_paths(target)) {
    const Bunch& sub = subbunch_at(target, p);
    add(sub);
    if (sub.is_internal()) {
      std::size_t n = sub.children().size();
      for (std::uint64_t mask = 1; mask + 1 < (1ULL << n); ++mask) {
        std::vector<Bunch> items;
        for (std::size_t i = 0; i < n; ++i)
          if (mask & (1ULL << i)) items.push_back(sub.children()[i]);
        if (items.empty()) continue;
        add(bunch_of(sub.kind(), std::move(items)));
      }
    }
  }
  return out;
}

}  // namespace detail

// A chain of single insertions from canonicalize(from) to canonicalize(to).
// Requires extends(to, from); throws PathError otherwise. Breadth-first over
// canonical states between source and target, pruned by the extension test.
inline std::vector<InsertStep> extension_steps(const Bunch& from, const Bunch& to) {
  ExtendsSession session;
  CanonicalBunch target = canonicalize(to);
  CanonicalBunch start = canonicalize(from);
  if (!session.extends_canonical(target, start))
    throw PathError("extension_steps: target does not extend source");
  if (start == target) return {};
  std::vector<Bunch> materials = detail::grouping_materials(target.get());

  struct NodeRec {
    CanonicalBunch state;
    int parent;
    InsertStep step;
  };
  std::vector<NodeRec> nodes;
  std::unordered_map<std::size_t, std::vector<int>> seen;  // hash -> node ids
  auto lookup = [&](const CanonicalBunch& s) -> bool {
    auto it = seen.find(s.hash());
    if (it == seen.end()) return false;
    for (int id : it->second)
      if (nodes[static_cast<std::size_t>(id)].state == s) return true;
    return false;
  };
  auto remember = [&](NodeRec rec) -> int {
    int id = static_cast<int>(nodes.size());
    seen[rec.state.hash()].push_back(id);
    nodes.push_back(std::move(rec));
    return id;
  };
  remember({start, -1, {}});
  std::deque<int> frontier{0};
  while (!frontier.empty()) {
    int cur_id = frontier.front();
    frontier.pop_front();
    CanonicalBunch cur = nodes[static_cast<std::size_t>(cur_id)].state;
    for (const Bunch& d : materials) {
      if (cur.size() + d.size() > target.size() + 2) continue;
      for (InsertStep& step : insertion_steps(cur, d)) {
        CanonicalBunch after = canonicalize(step.after);
        if (after.size() > target.size()) continue;
        if (lookup(after)) continue;
        if (!session.extends_canonical(target, after)) continue;
        int id = remember({after, cur_id, step});
        if (after == target) {
          std::vector<InsertStep> chain;
          for (int at = id; at > 0; at = nodes[static_cast<std::size_t>(at)].parent)
            chain.push_back(nodes[static_cast<std::size_t>(at)].step);
          std::reverse(chain.begin(), chain.end());
          return chain;
        }
        frontier.push_back(id);
      }
    }
  }
  throw PathError("extension_steps: no insertion chain found");
}

// ---------------------------------------------------------------------------
// contraction successors (additive duplicate removal, for saturation)

struct ContractStep {
  OccurrencePath node;       // add node in `before`
  std::vector<Bunch> once;   // the contracted group Q (children removed once)
  Bunch before;              // canonical
  Bunch after;               // canonical
  // representative with the explicit (Q ; Q) grouping, and the path of Q
  Bunch rep_before;          // == before mod coherent equivalence
  Bunch rep_after;           // == after mod coherent equivalence
  OccurrencePath q_path;     // position of Q inside rep_after
};

inline std::vector<ContractStep> contraction_steps(const CanonicalBunch& before) {
  std::vector<ContractStep> out;
  const Bunch& a = before.get();
  for (const OccurrencePath& path : detail::all_paths(a)) {
    const Bunch& sub = subbunch_at(a, path);
    if (sub.kind() != BunchKind::Add) continue;
    const std::vector<Bunch>& cs = sub.children();
    std::size_t n = cs.size();
    // enumerate sub-multisets G that occur twice disjointly: children sorted,
    // so take index sets; dedupe by the multiset of values.
    std::set<CanonicalBunch> seen_groups;
    for (std::uint64_t mask = 1; mask < (1ULL << n); ++mask) {
      std::vector<Bunch> group;
      std::map<std::size_t, int> used;  // child index -> taken
      for (std::size_t i = 0; i < n; ++i)
        if (mask & (1ULL << i)) {
          group.push_back(cs[i]);
          used[i] = 1;
        }
      if (group.size() * 2 > n) continue;
      // need a disjoint second copy of `group` among unused children
      std::vector<Bunch> remaining;
      for (std::size_t i = 0; i < n; ++i)
        if (!used.count(i)) remaining.push_back(cs[i]);
      // greedy multiset containment (children are sorted; equality exact)
      std::vector<Bunch> rest;
      std::vector<Bunch> need = group;
      for (const Bunch& r : remaining) {
        auto it = std::find(need.begin(), need.end(), r);
        if (it != need.end())
          need.erase(it);
        else
          rest.push_back(r);
      }
      if (!need.empty()) continue;
      Bunch q = detail::bunch_of(BunchKind::Add, group);
      CanonicalBunch q_c = canonicalize(q);
      if (!seen_groups.insert(q_c).second) continue;
      // representative: ((Q ; Q) ; rest) with Q;Q explicit
      Bunch qq = Bunch::add2(q, q);
      Bunch rep_sub_before, rep_sub_after;
      OccurrencePath q_path = path;
      if (rest.empty()) {
        rep_sub_before = qq;
        rep_sub_after = q;
      } else {
        std::vector<Bunch> items_b{qq};
        std::vector<Bunch> items_a{q};
        for (const Bunch& r : rest) { items_b.push_back(r); items_a.push_back(r); }
        rep_sub_before = Bunch::node(BunchKind::Add, std::move(items_b));
        rep_sub_after = Bunch::node(BunchKind::Add, std::move(items_a));
        q_path.push_back(0);
      }
      Bunch rep_before = replace_at(a, path, rep_sub_before);
      Bunch rep_after = replace_at(a, path, rep_sub_after);
      out.push_back({path, group, a, canonicalize_raw(rep_after), rep_before, rep_after,
                     rest.empty() ? path : q_path});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// enumeration of canonical atomic bunches (for oracles and saturation)

namespace detail {

struct EnumKey {
  std::uint32_t size;
  int cls;  // 0 = any, 1 = child-of-add (no add roots, no empty+), 2 = child-of-mul
  bool operator<(const EnumKey& o) const {
    return size != o.size ? size < o.size : cls < o.cls;
  }
};

class BunchEnumerator {
 public:
  explicit BunchEnumerator(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
    std::sort(atoms_.begin(), atoms_.end());
  }

  // all canonical bunches over the atom alphabet with size <= max_size
  std::vector<Bunch> up_to(std::uint32_t max_size) {
    std::vector<Bunch> out;
    for (std::uint32_t s = 1; s <= max_size; ++s) {
      const std::vector<Bunch>& v = of_size(s, 0);
      out.insert(out.end(), v.begin(), v.end());
    }
    return out;
  }

  const std::vector<Bunch>& of_size(std::uint32_t size, int cls) {
    EnumKey key{size, cls};
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    std::vector<Bunch> out;
    if (size == 1) {
      if (cls != 1) out.push_back(Bunch::unit_add());
      if (cls != 2) out.push_back(Bunch::unit_mul());
      for (const Atom& a : atoms_) out.push_back(Bunch::atom_leaf(a));
    } else if (size >= 3) {
      // internal node: 1 + sum of >= 2 children
      for (BunchKind k : {BunchKind::Add, BunchKind::Mul}) {
        if (cls == 1 && k == BunchKind::Add) continue;
        if (cls == 2 && k == BunchKind::Mul) continue;
        int child_cls = k == BunchKind::Add ? 1 : 2;
        std::vector<Bunch> acc;
        compose(size - 1, child_cls, 2, acc, k, out);
      }
    }
    auto [it, ok] = memo_.emplace(key, std::move(out));
    return it->second;
  }

 private:
  // children as a sorted multiset: enumerate non-decreasing sequences
  void compose(std::uint32_t budget, int child_cls, std::size_t min_children,
               std::vector<Bunch>& acc, BunchKind k, std::vector<Bunch>& out) {
    if (budget == 0) {
      if (acc.size() >= min_children) out.push_back(Bunch::node(k, acc));
      return;
    }
    for (std::uint32_t s = 1; s <= budget; ++s) {
      for (const Bunch& c : of_size(s, child_cls)) {
        if (!acc.empty() && Bunch::compare(acc.back(), c) > 0) continue;  // keep sorted
        acc.push_back(c);
        compose(budget - s, child_cls, min_children, acc, k, out);
        acc.pop_back();
      }
    }
  }

  std::vector<Atom> atoms_;
  std::map<EnumKey, std::vector<Bunch>> memo_;
};

}  // namespace detail

inline std::vector<Bunch> enumerate_canonical_bunches(const std::vector<Atom>& atoms,
                                                      std::uint32_t max_size) {
  detail::BunchEnumerator e(atoms);
  return e.up_to(max_size);
}

}  // namespace bi
