#pragma once

// Forward-chaining saturation: the set of derivable atomic sequents with
// canonical antecedent size <= max_bunch_size, closed under all seven
// clauses of derivability-in-a-base restricted to that bound. When the
// fixpoint is reached within budget the result is COMPLETE and
// non-membership is a refutation relative to the bound and atom universe.
//
// Every fact carries provenance, so a checkable derivation tree can be
// reconstructed for any member.

#include <deque>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "bi/base.hpp"
#include "bi/bunch_algebra.hpp"
#include "bi/schematic.hpp"

namespace bi {

struct SatFact {
  CanonicalBunch antecedent;
  Atom succedent;

  bool operator<(const SatFact& o) const {
    if (succedent != o.succedent) return succedent < o.succedent;
    return antecedent < o.antecedent;
  }
  bool operator==(const SatFact& o) const {
    return succedent == o.succedent && antecedent == o.antecedent;
  }
};

class Saturation {
 public:
  // Runs to fixpoint or budget. The universe fixes the atoms over which
  // taut fires, schematic atom metavariables range, and weakening material
  // is drawn.
  Saturation(const Base& base, std::vector<Atom> universe, SearchBudget budget)
      : base_(base), budget_(budget) {
    std::sort(universe.begin(), universe.end());
    universe.erase(std::unique(universe.begin(), universe.end()), universe.end());
    universe_ = std::move(universe);
    run();
  }

  bool complete() const { return complete_; }
  std::uint32_t bound() const { return budget_.max_bunch_size; }
  const std::vector<Atom>& universe() const { return universe_; }
  std::uint64_t fact_count() const { return facts_.size(); }

  bool contains(const Bunch& antecedent, const Atom& succedent) const {
    return index_.count({canonicalize(antecedent), succedent}) > 0;
  }

  std::set<SatFact> facts() const {
    std::set<SatFact> out;
    for (const Fact& f : facts_) out.insert({f.ant, f.suc});
    return out;
  }

  SearchStats stats() const {
    SearchStats st;
    st.visited = processed_;
    st.facts = facts_.size();
    st.saturation_complete = complete_;
    st.saturation_bound = budget_.max_bunch_size;
    st.note = note_;
    return st;
  }

  // Reconstructs a Def. 9 derivation of a contained fact, concluding the
  // canonical sequent.
  BaseDerivationPtr derivation(const Bunch& antecedent, const Atom& succedent) const {
    auto it = index_.find({canonicalize(antecedent), succedent});
    if (it == index_.end()) throw PathError("fact is not in the saturation");
    return build(it->second);
  }

 private:
  enum class Via : std::uint8_t { Taut, Initial, Rule, WeakStep, ContStep, Cut };

  struct Fact {
    CanonicalBunch ant;
    Atom suc;
    Via via;
    std::vector<std::size_t> parents;
    // WeakStep / ContStep payloads
    InsertStep ins;
    ContractStep con;
    // Initial / Rule payloads
    int rule_index = -1;
    int schematic_index = -1;
    Bindings bindings;
    AtomicRule instance;
    // Cut payload
    OccurrencePath cut_path;
  };

  const Base& base_;
  SearchBudget budget_;
  std::vector<Atom> universe_;
  std::vector<Fact> facts_;
  std::map<SatFact, std::size_t> index_;
  std::deque<std::size_t> queue_;
  std::vector<Bunch> materials_;
  bool complete_ = false;
  std::uint64_t processed_ = 0;
  std::string note_;

  bool over_budget() const { return processed_ > budget_.max_visited; }

  bool add_fact(Fact f) {
    if (f.ant.size() > budget_.max_bunch_size) return false;
    SatFact key{f.ant, f.suc};
    if (index_.count(key)) return false;
    index_.emplace(key, facts_.size());
    queue_.push_back(facts_.size());
    facts_.push_back(std::move(f));
    return true;
  }

  void run() {
    materials_ = enumerate_canonical_bunches(
        universe_, budget_.max_bunch_size > 1 ? budget_.max_bunch_size - 1 : 1);

    // taut seeds
    for (const Atom& p : universe_) {
      Fact f;
      f.ant = canonicalize(Bunch::atom_leaf(p));
      f.suc = p;
      f.via = Via::Taut;
      add_fact(std::move(f));
    }
    // ground axioms and rules fire inside the loop; axioms seed here
    seed_axioms();

    while (!queue_.empty()) {
      if (over_budget()) {
        note_ = "visit budget exhausted before fixpoint";
        return;
      }
      std::size_t id = queue_.front();
      queue_.pop_front();
      ++processed_;
      expand(id);
    }
    complete_ = true;
  }

  void seed_axioms() {
    const auto& rules = base_.ground_rules();
    for (std::size_t i = 0; i < rules.size(); ++i) {
      if (!rules[i].is_axiom()) continue;
      Fact f;
      f.ant = canonicalize(rules[i].conclusion.antecedent);
      f.suc = rules[i].conclusion.succedent.atom_name();
      f.via = Via::Initial;
      f.rule_index = static_cast<int>(i);
      f.instance = rules[i];
      add_fact(std::move(f));
    }
    // schematic axioms: all bindings over the declared finite ranges
    const auto& schem = base_.schematic_rules();
    for (std::size_t i = 0; i < schem.size(); ++i) {
      if (!schem[i].premises.empty()) continue;
      enumerate_schematic_bindings(schem[i], [&](const Bindings& bs) {
        AtomicRule inst = instantiate(schem[i], bs);
        Fact f;
        f.ant = canonicalize(inst.conclusion.antecedent);
        f.suc = inst.conclusion.succedent.atom_name();
        f.via = Via::Initial;
        f.schematic_index = static_cast<int>(i);
        f.bindings = bs;
        f.instance = std::move(inst);
        add_fact(std::move(f));
      });
    }
  }

  // Enumerate all bindings of a schematic rule's variables over the finite
  // ranges: atoms from the universe, bunches from the canonical enumeration
  // over the declared alphabet, contexts likewise with a hole inserted.
  void enumerate_schematic_bindings(const SchematicRule& r,
                                    const std::function<void(const Bindings&)>& yield) {
    std::vector<std::string> vars = schematic::rule_vars(r);
    Bindings bs;
    fill_vars(r, vars, 0, bs, yield);
  }

  void fill_vars(const SchematicRule& r, const std::vector<std::string>& vars, std::size_t i,
                 Bindings& bs, const std::function<void(const Bindings&)>& yield) {
    if (i == vars.size()) {
      yield(bs);
      return;
    }
    const std::string& v = vars[i];
    auto decl_it = r.vars.find(v);
    VarDecl decl = decl_it == r.vars.end() ? VarDecl{VarDecl::Kind::AtomVar, ""} : decl_it->second;
    switch (decl.kind) {
      case VarDecl::Kind::AtomVar: {
        for (const Atom& a : universe_) {
          bs.atoms[v] = a;
          fill_vars(r, vars, i + 1, bs, yield);
        }
        bs.atoms.erase(v);
        return;
      }
      case VarDecl::Kind::BunchVar: {
        for (const Bunch& b : range_bunches(decl.alphabet)) {
          bs.bunches[v] = b;
          fill_vars(r, vars, i + 1, bs, yield);
        }
        bs.bunches.erase(v);
        return;
      }
      case VarDecl::Kind::CtxVar: {
        for (const Bunch& host : range_bunches(decl.alphabet)) {
          for (const OccurrencePath& at : detail::all_paths(host)) {
            bs.contexts[v] = replace_at(host, at, Bunch::hole());
            fill_vars(r, vars, i + 1, bs, yield);
          }
        }
        bs.contexts[v] = Bunch::hole();
        fill_vars(r, vars, i + 1, bs, yield);
        bs.contexts.erase(v);
        return;
      }
    }
  }

  const std::vector<Bunch>& range_bunches(const std::string& alphabet) {
    auto it = range_cache_.find(alphabet);
    if (it != range_cache_.end()) return it->second;
    std::vector<Atom> atoms =
        alphabet.empty() ? universe_ : base_.alphabet(alphabet);
    auto [jt, ok] = range_cache_.emplace(
        alphabet, enumerate_canonical_bunches(
                      atoms, budget_.max_bunch_size > 1 ? budget_.max_bunch_size - 1 : 1));
    return jt->second;
  }

  std::map<std::string, std::vector<Bunch>> range_cache_;

  void expand(std::size_t id) {
    weak_successors(id);
    cont_successors(id);
    cut_with(id);
    ground_rule_joins(id);
    schematic_rule_joins(id);
  }

  void weak_successors(std::size_t id) {
    CanonicalBunch ant = facts_[id].ant;
    Atom suc = facts_[id].suc;
    for (const Bunch& d : materials_) {
      if (ant.size() + d.size() > budget_.max_bunch_size + 2) continue;
      for (InsertStep& step : insertion_steps(ant, d)) {
        CanonicalBunch after = canonicalize(step.after);
        if (after.size() > budget_.max_bunch_size) continue;
        Fact f;
        f.ant = after;
        f.suc = suc;
        f.via = Via::WeakStep;
        f.parents = {id};
        f.ins = step;
        add_fact(std::move(f));
      }
    }
  }

  void cont_successors(std::size_t id) {
    CanonicalBunch ant = facts_[id].ant;
    Atom suc = facts_[id].suc;
    for (ContractStep& step : contraction_steps(ant)) {
      Fact f;
      f.ant = canonicalize(step.after);
      f.suc = suc;
      f.via = Via::ContStep;
      f.parents = {id};
      f.con = step;
      add_fact(std::move(f));
    }
  }

  void cut_with(std::size_t id) {
    // as T |- q against every S(q) |- p, and as S against every T
    std::size_t n = facts_.size();
    for (std::size_t other = 0; other < n; ++other) {
      try_cut(id, other);
      if (other != id) try_cut(other, id);
    }
  }

  // t_id plays T |- q; s_id plays S(q) |- p
  void try_cut(std::size_t t_id, std::size_t s_id) {
    const Atom& q = facts_[t_id].suc;
    const Bunch& s_ant = facts_[s_id].ant.get();
    Bunch q_leaf = Bunch::atom_leaf(q);
    for (const OccurrencePath& path : detail::all_paths(s_ant)) {
      if (!(subbunch_at(s_ant, path) == q_leaf)) continue;
      Bunch glued = replace_at(s_ant, path, facts_[t_id].ant.get());
      CanonicalBunch after = canonicalize(glued);
      if (after.size() > budget_.max_bunch_size) continue;
      Fact f;
      f.ant = after;
      f.suc = facts_[s_id].suc;
      f.via = Via::Cut;
      f.parents = {t_id, s_id};
      f.cut_path = path;
      add_fact(std::move(f));
    }
  }

  void ground_rule_joins(std::size_t id) {
    const auto& rules = base_.ground_rules();
    for (std::size_t i = 0; i < rules.size(); ++i) {
      const AtomicRule& r = rules[i];
      if (r.is_axiom()) continue;
      // the new fact must be usable as at least one premise
      bool relevant = false;
      for (const Sequent& p : r.premises)
        if (p.succedent.atom_name() == facts_[id].suc &&
            canonicalize(p.antecedent) == facts_[id].ant)
          relevant = true;
      if (!relevant) continue;
      bool all = true;
      for (const Sequent& p : r.premises)
        if (!contains(p.antecedent, p.succedent.atom_name())) all = false;
      if (!all) continue;
      Fact f;
      f.ant = canonicalize(r.conclusion.antecedent);
      f.suc = r.conclusion.succedent.atom_name();
      f.via = Via::Rule;
      f.rule_index = static_cast<int>(i);
      f.instance = r;
      for (const Sequent& p : r.premises)
        f.parents.push_back(index_.at({canonicalize(p.antecedent), p.succedent.atom_name()}));
      add_fact(std::move(f));
    }
  }

  void schematic_rule_joins(std::size_t new_id) {
    const auto& schem = base_.schematic_rules();
    for (std::size_t i = 0; i < schem.size(); ++i) {
      const SchematicRule& r = schem[i];
      if (r.premises.empty()) continue;
      // join: the new fact must match some premise slot
      for (std::size_t slot = 0; slot < r.premises.size(); ++slot) {
        Sequent fact_seq{facts_[new_id].ant.get(), Formula::atom(facts_[new_id].suc)};
        schematic::match_sequent(r.premises[slot], fact_seq, Bindings{}, [&](const Bindings& b0) {
          join_remaining(r, static_cast<int>(i), slot, 0, b0, {});
        });
      }
    }
  }

  // fill premises 0..n-1 (skipping `pinned`, already matched) against the
  // fact set, then fire the conclusion
  void join_remaining(const SchematicRule& r, int rule_i, std::size_t pinned, std::size_t next,
                      const Bindings& bs, std::vector<std::size_t> premise_ids) {
    if (next == r.premises.size()) {
      fire_schematic(r, rule_i, pinned, bs, premise_ids);
      return;
    }
    if (next == pinned) {
      join_remaining(r, rule_i, pinned, next + 1, bs, premise_ids);
      return;
    }
    // try every known fact against this premise
    std::size_t n = facts_.size();
    for (std::size_t id = 0; id < n; ++id) {
      Sequent fact_seq{facts_[id].ant.get(), Formula::atom(facts_[id].suc)};
      schematic::match_sequent(r.premises[next], fact_seq, bs, [&](const Bindings& b2) {
        auto ids = premise_ids;
        ids.push_back(id);
        join_remaining(r, rule_i, pinned, next + 1, b2, std::move(ids));
      });
    }
  }

  void fire_schematic(const SchematicRule& r, int rule_i, std::size_t pinned, const Bindings& bs,
                      const std::vector<std::size_t>& premise_ids) {
    // any variable appearing only in the conclusion still needs enumeration
    Bindings full = bs;
    std::vector<std::string> missing;
    for (const std::string& v : schematic::rule_vars(r)) {
      auto d = r.vars.find(v);
      VarDecl::Kind kind = d == r.vars.end() ? VarDecl::Kind::AtomVar : d->second.kind;
      bool bound = full.atoms.count(v) || full.bunches.count(v) || full.contexts.count(v);
      (void)kind;
      if (!bound) missing.push_back(v);
    }
    enumerate_missing(r, missing, 0, full, [&](const Bindings& complete) {
      AtomicRule inst;
      try {
        inst = instantiate(r, complete);
      } catch (const TranslationError&) {
        return;
      }
      CanonicalBunch ant = canonicalize(inst.conclusion.antecedent);
      if (ant.size() > budget_.max_bunch_size) return;
      // verify premises really are present (pinned slot included)
      std::vector<std::size_t> parents;
      bool ok = true;
      for (const Sequent& p : inst.premises) {
        auto it = index_.find({canonicalize(p.antecedent), p.succedent.atom_name()});
        if (it == index_.end()) {
          ok = false;
          break;
        }
        parents.push_back(it->second);
      }
      (void)pinned;
      (void)premise_ids;
      if (!ok) return;
      Fact f;
      f.ant = ant;
      f.suc = inst.conclusion.succedent.atom_name();
      f.via = Via::Rule;
      f.schematic_index = rule_i;
      f.bindings = complete;
      f.instance = std::move(inst);
      f.parents = std::move(parents);
      add_fact(std::move(f));
    });
  }

  void enumerate_missing(const SchematicRule& r, const std::vector<std::string>& vars,
                         std::size_t i, Bindings& bs,
                         const std::function<void(const Bindings&)>& yield) {
    if (i == vars.size()) {
      yield(bs);
      return;
    }
    const std::string& v = vars[i];
    auto d = r.vars.find(v);
    VarDecl decl = d == r.vars.end() ? VarDecl{VarDecl::Kind::AtomVar, ""} : d->second;
    switch (decl.kind) {
      case VarDecl::Kind::AtomVar:
        for (const Atom& a : universe_) {
          bs.atoms[v] = a;
          enumerate_missing(r, vars, i + 1, bs, yield);
        }
        bs.atoms.erase(v);
        return;
      case VarDecl::Kind::BunchVar:
        for (const Bunch& b : range_bunches(decl.alphabet)) {
          bs.bunches[v] = b;
          enumerate_missing(r, vars, i + 1, bs, yield);
        }
        bs.bunches.erase(v);
        return;
      case VarDecl::Kind::CtxVar:
        for (const Bunch& host : range_bunches(decl.alphabet)) {
          for (const OccurrencePath& at : detail::all_paths(host)) {
            bs.contexts[v] = replace_at(host, at, Bunch::hole());
            enumerate_missing(r, vars, i + 1, bs, yield);
          }
        }
        bs.contexts[v] = Bunch::hole();
        enumerate_missing(r, vars, i + 1, bs, yield);
        bs.contexts.erase(v);
        return;
    }
  }

  // --- derivation reconstruction ---

  BaseDerivationPtr build(std::size_t id) const {
    const Fact& f = facts_[id];
    Sequent concl{f.ant.get(), Formula::atom(f.suc)};
    switch (f.via) {
      case Via::Taut:
        return BaseDerivation::taut(f.suc);
      case Via::Initial:
        return BaseDerivation::initial(concl, f.rule_index, f.schematic_index, f.bindings);
      case Via::Rule: {
        std::vector<BaseDerivationPtr> children;
        for (std::size_t pid : f.parents) children.push_back(build(pid));
        return BaseDerivation::rule(concl, std::move(children), f.rule_index, f.schematic_index,
                                    f.bindings);
      }
      case Via::WeakStep:
        return weak_from_step(build(f.parents[0]), f.ins, concl);
      case Via::ContStep: {
        BaseDerivationPtr parent = build(f.parents[0]);
        // exchange the parent onto the representative with an explicit (Q;Q)
        Formula suc = Formula::atom(f.suc);
        BaseDerivationPtr at_rep =
            BaseDerivation::exch({f.con.rep_before, suc}, std::move(parent));
        BaseDerivationPtr contracted =
            BaseDerivation::cont({f.con.rep_after, suc}, std::move(at_rep), f.con.q_path);
        return BaseDerivation::exch(concl, std::move(contracted));
      }
      case Via::Cut: {
        BaseDerivationPtr t = build(f.parents[0]);
        BaseDerivationPtr s = build(f.parents[1]);
        Bunch glued = replace_at(facts_[f.parents[1]].ant.get(), f.cut_path,
                                 facts_[f.parents[0]].ant.get());
        Formula suc = Formula::atom(f.suc);
        BaseDerivationPtr cut =
            BaseDerivation::cut({glued, suc}, std::move(t), std::move(s), f.cut_path);
        return BaseDerivation::exch(concl, std::move(cut));
      }
    }
    throw PathError("bad provenance");
  }

 public:
  // Turn an insertion step into WEAK (+EXCH) nodes on top of `child`, which
  // must conclude (step.before |- suc). The result concludes `target`.
  static BaseDerivationPtr weak_from_step(BaseDerivationPtr child, const InsertStep& step,
                                          const Sequent& target) {
    const Formula& suc = target.succedent;
    const Bunch& before = step.before;
    auto finish = [&](BaseDerivationPtr d) {
      if (d->sequent == target) return d;
      return BaseDerivation::exch(target, std::move(d));
    };
    switch (step.kind) {
      case InsertStep::Kind::Plain: {
        Bunch sub = subbunch_at(before, step.node);
        Bunch grown = replace_at(before, step.node, Bunch::add2(sub, step.material));
        return finish(
            BaseDerivation::weak({grown, suc}, std::move(child), step.node, step.material));
      }
      case InsertStep::Kind::MulUnit: {
        Bunch sub = subbunch_at(before, step.node);
        Bunch rep = replace_at(before, step.node, Bunch::mul2(sub, Bunch::unit_mul()));
        BaseDerivationPtr at_rep = BaseDerivation::exch({rep, suc}, std::move(child));
        OccurrencePath unit_path = step.node;
        unit_path.push_back(1);
        Bunch grown = replace_at(
            before, step.node,
            Bunch::mul2(sub, Bunch::add2(Bunch::unit_mul(), step.material)));
        return finish(
            BaseDerivation::weak({grown, suc}, std::move(at_rep), unit_path, step.material));
      }
      case InsertStep::Kind::GroupPlain:
      case InsertStep::Kind::GroupMulUnit: {
        Bunch sub = subbunch_at(before, step.node);
        std::vector<Bunch> in_group, rest;
        std::size_t gi = 0;
        for (std::size_t i = 0; i < sub.children().size(); ++i) {
          if (gi < step.group.size() && step.group[gi] == i) {
            in_group.push_back(sub.children()[i]);
            ++gi;
          } else {
            rest.push_back(sub.children()[i]);
          }
        }
        Bunch grouped = detail::bunch_of(sub.kind(), in_group);
        if (step.kind == InsertStep::Kind::GroupPlain) {
          // regroup, then weaken the grouped sub-bunch
          std::vector<Bunch> items{grouped};
          for (const Bunch& rb : rest) items.push_back(rb);
          Bunch rep_sub = detail::bunch_of(sub.kind(), items);
          Bunch rep = replace_at(before, step.node, rep_sub);
          BaseDerivationPtr at_rep = BaseDerivation::exch({rep, suc}, std::move(child));
          OccurrencePath grp_path = step.node;
          grp_path.push_back(0);
          items[0] = Bunch::add2(grouped, step.material);
          Bunch grown = replace_at(before, step.node, detail::bunch_of(sub.kind(), items));
          return finish(
              BaseDerivation::weak({grown, suc}, std::move(at_rep), grp_path, step.material));
        }
        // GroupMulUnit: (G) == (G , empty*), weaken at the unit
        std::vector<Bunch> items{Bunch::mul2(grouped, Bunch::unit_mul())};
        for (const Bunch& rb : rest) items.push_back(rb);
        Bunch rep = replace_at(before, step.node, detail::bunch_of(sub.kind(), items));
        BaseDerivationPtr at_rep = BaseDerivation::exch({rep, suc}, std::move(child));
        OccurrencePath unit_path = step.node;
        unit_path.push_back(0);
        unit_path.push_back(1);
        items[0] = Bunch::mul2(grouped, Bunch::add2(Bunch::unit_mul(), step.material));
        Bunch grown = replace_at(before, step.node, detail::bunch_of(sub.kind(), items));
        return finish(
            BaseDerivation::weak({grown, suc}, std::move(at_rep), unit_path, step.material));
      }
    }
    throw PathError("bad insertion step");
  }
};

}  // namespace bi
