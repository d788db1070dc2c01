#pragma once

// Matching schematic rule patterns against canonical bunches, modulo
// coherent equivalence. Bunch metavariables bind canonical bunches; context
// metavariables bind one-hole contexts. Occurrence enumeration mirrors the
// insertion machinery: a pattern X occurs in A at tree nodes, at grouped
// sub-multisets of a node's children, and - when X is a unit - virtually at
// every position via the unit laws.

#include <functional>
#include <vector>

#include "bi/base.hpp"
#include "bi/bunch_algebra.hpp"

namespace bi {
namespace schematic {

// All contexts D (raw bunches with one hole) such that plug(D, x) is
// coherently equivalent to a, for canonical a and canonical x.
inline std::vector<Bunch> ctx_occurrences(const Bunch& a, const Bunch& x) {
  std::vector<Bunch> out;
  std::set<CanonicalBunch> dedupe;  // key: canonical of plug(ctx, marker)
  static const Bunch marker = Bunch::atom_leaf("_ctx_marker_");
  auto push = [&](const Bunch& ctx) {
    if (!dedupe.insert(canonicalize(detail::plug_raw(ctx, marker))).second) return;
    out.push_back(ctx);
  };

  const bool x_is_unit_add = x.kind() == BunchKind::UnitAdd;
  const bool x_is_unit_mul = x.kind() == BunchKind::UnitMul;

  for (const OccurrencePath& path : detail::all_paths(a)) {
    const Bunch& sub = subbunch_at(a, path);
    // exact node occurrence
    if (sub == x) push(replace_at(a, path, Bunch::hole()));
    // virtual unit occurrence: sub == sub ; empty+ == sub , empty*
    if (x_is_unit_add) push(replace_at(a, path, Bunch::add2(sub, Bunch::hole())));
    if (x_is_unit_mul) push(replace_at(a, path, Bunch::mul2(sub, Bunch::hole())));
    // grouped occurrences inside an internal node
    if (sub.is_internal() && sub.children().size() >= 3) {
      std::size_t n = sub.children().size();
      if (n > 12) throw BudgetError("context occurrence enumeration over a wide node");
      for (std::uint64_t mask = 3; mask + 1 < (1ULL << n); ++mask) {
        std::size_t bits = static_cast<std::size_t>(__builtin_popcountll(mask));
        if (bits < 2) continue;
        std::vector<Bunch> in_group, rest;
        for (std::size_t i = 0; i < n; ++i)
          ((mask >> i) & 1 ? in_group : rest).push_back(sub.children()[i]);
        Bunch grouped = detail::bunch_of(sub.kind(), std::move(in_group));
        if (grouped == x) {
          rest.push_back(Bunch::hole());
          push(replace_at(a, path, detail::bunch_of(sub.kind(), std::move(rest))));
        } else if (x_is_unit_add || x_is_unit_mul) {
          BunchKind wrap = x_is_unit_add ? BunchKind::Add : BunchKind::Mul;
          std::vector<Bunch> items = rest;
          items.push_back(Bunch::node(wrap, {grouped, Bunch::hole()}));
          push(replace_at(a, path, detail::bunch_of(sub.kind(), std::move(items))));
        }
      }
    }
  }
  return out;
}

// Extend `base_bindings` in all ways that make `pat` match canonical bunch
// `a` modulo coherent equivalence. Calls `yield` for each complete match.
inline void match_pattern(const PatternPtr& pat, const Bunch& a, const Bindings& base_bindings,
                          const std::function<void(const Bindings&)>& yield) {
  switch (pat->kind) {
    case Pattern::Kind::LitAtom:
      if (a.is_leaf() && a.payload().is_atom() && a.payload().atom_name() == pat->name)
        yield(base_bindings);
      return;
    case Pattern::Kind::AtomVar: {
      if (!a.is_leaf() || !a.payload().is_atom()) return;
      auto it = base_bindings.atoms.find(pat->name);
      if (it != base_bindings.atoms.end()) {
        if (it->second == a.payload().atom_name()) yield(base_bindings);
        return;
      }
      Bindings b = base_bindings;
      b.atoms[pat->name] = a.payload().atom_name();
      yield(b);
      return;
    }
    case Pattern::Kind::UnitAdd:
      if (a.kind() == BunchKind::UnitAdd) yield(base_bindings);
      return;
    case Pattern::Kind::UnitMul:
      if (a.kind() == BunchKind::UnitMul) yield(base_bindings);
      return;
    case Pattern::Kind::BunchVar: {
      auto it = base_bindings.bunches.find(pat->name);
      if (it != base_bindings.bunches.end()) {
        if (canonicalize(it->second) == canonicalize(a)) yield(base_bindings);
        return;
      }
      Bindings b = base_bindings;
      b.bunches[pat->name] = a;
      yield(b);
      return;
    }
    case Pattern::Kind::Node: {
      // binary split of a's layer, modulo equivalence: partition the layer
      // children (empty side = the unit of the kind)
      if (pat->children.size() != 2)
        throw TranslationError("only binary pattern nodes are supported");
      BunchKind k = pat->node_kind;
      std::vector<Bunch> layer;
      if (a.kind() == k)
        layer = a.children();
      else
        layer.push_back(a);
      std::size_t n = layer.size();
      if (n > 16) throw BudgetError("pattern split over a wide node");
      Bunch unit = k == BunchKind::Add ? Bunch::unit_add() : Bunch::unit_mul();
      for (std::uint64_t mask = 0; mask < (1ULL << n); ++mask) {
        std::vector<Bunch> left, right;
        for (std::size_t i = 0; i < n; ++i)
          (((mask >> i) & 1) ? left : right).push_back(layer[i]);
        Bunch l = left.empty() ? unit : detail::bunch_of(k, std::move(left));
        Bunch r = right.empty() ? unit : detail::bunch_of(k, std::move(right));
        match_pattern(pat->children[0], canonicalize_raw(l), base_bindings,
                      [&](const Bindings& b1) {
                        match_pattern(pat->children[1], canonicalize_raw(r), b1, yield);
                      });
      }
      return;
    }
    case Pattern::Kind::CtxApp: {
      // the inner pattern must be ground under the current bindings
      Bunch inner;
      try {
        inner = instantiate(pat->inner, base_bindings);
      } catch (const TranslationError&) {
        throw TranslationError("context application over an unbound inner pattern");
      }
      auto it = base_bindings.contexts.find(pat->name);
      if (it != base_bindings.contexts.end()) {
        if (coherently_equivalent(detail::plug_raw(it->second, inner), a)) yield(base_bindings);
        return;
      }
      for (const Bunch& ctx : ctx_occurrences(a, canonicalize_raw(inner))) {
        Bindings b = base_bindings;
        b.contexts[pat->name] = ctx;
        yield(b);
      }
      return;
    }
  }
}

// Match a pattern sequent against a fact.
inline void match_sequent(const PatternSequent& pat, const Sequent& fact, const Bindings& bs,
                          const std::function<void(const Bindings&)>& yield) {
  const Atom& fact_suc = fact.succedent.atom_name();
  if (pat.suc_is_var) {
    auto it = bs.atoms.find(pat.succedent);
    if (it != bs.atoms.end()) {
      if (it->second != fact_suc) return;
      match_pattern(pat.antecedent, fact.antecedent, bs, yield);
      return;
    }
    Bindings b = bs;
    b.atoms[pat.succedent] = fact_suc;
    match_pattern(pat.antecedent, fact.antecedent, b, yield);
    return;
  }
  if (pat.succedent != fact_suc) return;
  match_pattern(pat.antecedent, fact.antecedent, bs, yield);
}

// Variables of the rule not determined by matching premises/conclusion
// against facts must be enumerated from their declared ranges.
inline std::vector<std::string> pattern_vars(const PatternPtr& p) {
  std::vector<std::string> out;
  switch (p->kind) {
    case Pattern::Kind::AtomVar:
    case Pattern::Kind::BunchVar:
      out.push_back(p->name);
      break;
    case Pattern::Kind::CtxApp: {
      out.push_back(p->name);
      auto inner = pattern_vars(p->inner);
      out.insert(out.end(), inner.begin(), inner.end());
      break;
    }
    case Pattern::Kind::Node:
      for (const PatternPtr& c : p->children) {
        auto sub = pattern_vars(c);
        out.insert(out.end(), sub.begin(), sub.end());
      }
      break;
    default:
      break;
  }
  return out;
}

inline std::vector<std::string> rule_vars(const SchematicRule& r) {
  std::vector<std::string> out;
  auto take = [&](const PatternSequent& s) {
    auto v = pattern_vars(s.antecedent);
    out.insert(out.end(), v.begin(), v.end());
    if (s.suc_is_var) out.push_back(s.succedent);
  };
  for (const PatternSequent& s : r.premises) take(s);
  take(r.conclusion);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace schematic
}  // namespace bi
