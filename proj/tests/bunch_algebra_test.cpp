#include <catch2/catch_amalgamated.hpp>

#include <deque>
#include <random>
#include <set>
#include <unordered_set>

#include "bi/bunch_algebra.hpp"
#include "bi/parse.hpp"
#include "bi/render.hpp"

using namespace bi;

namespace {

using BunchSet = std::unordered_set<Bunch, BunchHash>;

// right-nested binary image of an n-ary bunch
Bunch to_binary(const Bunch& b) {
  if (!b.is_internal()) return b;
  std::vector<Bunch> cs;
  for (const Bunch& c : b.children()) cs.push_back(to_binary(c));
  Bunch acc = cs.back();
  for (std::size_t i = cs.size() - 1; i-- > 0;)
    acc = Bunch::node(b.kind(), {cs[i], acc});
  return acc;
}

// Exhaustive rewriting closure of the coherent-equivalence equations on
// binary trees: associativity (both directions), commutativity, unit removal
// and bounded unit introduction, applied at every subterm. This is the
// independent oracle for coherently_equivalent and canonicalize.
BunchSet rewrite_closure(const Bunch& start_nary, std::uint32_t max_nodes, std::size_t cap) {
  Bunch start = to_binary(start_nary);
  BunchSet seen{start};
  std::deque<Bunch> todo{start};
  auto offer = [&](Bunch b) {
    if (b.size() > max_nodes) return;
    if (seen.insert(b).second) {
      if (seen.size() > cap) throw std::runtime_error("rewrite closure blew the cap");
      todo.push_back(std::move(b));
    }
  };
  while (!todo.empty()) {
    Bunch cur = todo.front();
    todo.pop_front();
    for (const OccurrencePath& path : detail::all_paths(cur)) {
      const Bunch& t = subbunch_at(cur, path);
      if (t.is_internal()) {
        const Bunch& a = t.children()[0];
        const Bunch& b = t.children()[1];
        BunchKind k = t.kind();
        Bunch unit = k == BunchKind::Add ? Bunch::unit_add() : Bunch::unit_mul();
        // commutativity
        offer(replace_at(cur, path, Bunch::node(k, {b, a})));
        // associativity
        if (a.is_internal() && a.kind() == k)
          offer(replace_at(
              cur, path,
              Bunch::node(k, {a.children()[0], Bunch::node(k, {a.children()[1], b})})));
        if (b.is_internal() && b.kind() == k)
          offer(replace_at(
              cur, path,
              Bunch::node(k, {Bunch::node(k, {a, b.children()[0]}), b.children()[1]})));
        // unit removal
        if (b == unit) offer(replace_at(cur, path, a));
        if (a == unit) offer(replace_at(cur, path, b));
      }
      // unit introduction (both kinds apply to every subterm)
      offer(replace_at(cur, path, Bunch::node(BunchKind::Add, {t, Bunch::unit_add()})));
      offer(replace_at(cur, path, Bunch::node(BunchKind::Mul, {t, Bunch::unit_mul()})));
    }
  }
  return seen;
}

// Reaching the normal form never requires growth: unit removals shrink and
// associativity/commutativity preserve size, so the closure is bounded by
// the start size.
bool equivalent_by_rewriting(const Bunch& x, const Bunch& y) {
  std::uint32_t bound = std::max(to_binary(x).size(), to_binary(y).size());
  BunchSet cx = rewrite_closure(x, bound, 2000000);
  return cx.count(to_binary(y)) > 0;
}

Bunch atom(const char* s) { return Bunch::atom_leaf(s); }

}  // namespace

TEST_CASE("canonicalize worked examples") {
  // Gamma(empty+) is coherently equivalent to p
  Bunch g = Bunch::mul2(Bunch::unit_mul(), Bunch::add2(atom("p"), Bunch::unit_add()));
  REQUIRE(canonicalize(g).get() == atom("p"));

  // nested additive layers flatten and sort
  Bunch h = Bunch::add2(Bunch::add2(atom("a"), atom("b")), atom("c"));
  Bunch expect = Bunch::add({atom("a"), atom("b"), atom("c")});
  REQUIRE(canonicalize(h).get() == expect);

  REQUIRE(canonicalize(Bunch::unit_mul()).get() == Bunch::unit_mul());

  // idempotence on random raw bunches; canonical form reachable by rewriting
  std::mt19937 rng(7);
  auto rnd = [&](auto&& self, int depth) -> Bunch {
    if (depth == 0 || rng() % 3 == 0) {
      switch (rng() % 4) {
        case 0: return atom("a");
        case 1: return atom("b");
        case 2: return Bunch::unit_add();
        default: return Bunch::unit_mul();
      }
    }
    std::vector<Bunch> cs;
    std::size_t n = 2 + rng() % 2;
    for (std::size_t i = 0; i < n; ++i) cs.push_back(self(self, depth - 1));
    return Bunch::node(rng() % 2 ? BunchKind::Add : BunchKind::Mul, std::move(cs));
  };
  int checked = 0;
  for (int i = 0; i < 400 && checked < 120; ++i) {
    Bunch b = rnd(rnd, 3);
    Bunch c1 = canonicalize(b).get();
    REQUIRE(canonicalize(c1).get() == c1);
    // the rewriting oracle is exhaustive only at small sizes
    if (to_binary(b).size() <= 9) {
      REQUIRE(equivalent_by_rewriting(b, c1));
      ++checked;
    }
  }
  REQUIRE(checked >= 100);
}

TEST_CASE("coherent equivalence basics") {
  REQUIRE(coherently_equivalent(parse_bunch("p , empty*"), parse_bunch("p")));
  REQUIRE(coherently_equivalent(parse_bunch("p ; q"), parse_bunch("q ; p")));
  REQUIRE(!coherently_equivalent(parse_bunch("p , q"), parse_bunch("p ; q")));
  // empty* is not a unit for the additive context-former
  REQUIRE(!coherently_equivalent(parse_bunch("p ; empty*"), parse_bunch("p")));
  REQUIRE(!coherently_equivalent(parse_bunch("p , empty+"), parse_bunch("p")));
}

TEST_CASE("equivalence is a congruence under plugging") {
  std::mt19937 rng(11);
  std::vector<Bunch> pool = enumerate_canonical_bunches({"a", "b"}, 4);
  for (int i = 0; i < 200; ++i) {
    Bunch d = pool[rng() % pool.size()];
    Bunch d2 = Bunch::add2(d, Bunch::unit_add());  // raw equivalent variant
    Bunch host = pool[rng() % pool.size()];
    auto paths = detail::all_paths(host);
    OccurrencePath at = paths[rng() % paths.size()];
    BunchCtx ctx(replace_at(host, at, Bunch::hole()));
    REQUIRE(coherently_equivalent(plug(ctx, d), plug(ctx, d2)));
  }
}

TEST_CASE("plug and context_at") {
  // Gamma(q) := empty* , (p ; q)
  BunchCtx ctx(Bunch::mul2(Bunch::unit_mul(), Bunch::add2(atom("p"), Bunch::hole())));
  REQUIRE(plug(ctx, atom("q")) ==
          Bunch::mul2(Bunch::unit_mul(), Bunch::add2(atom("p"), atom("q"))));

  REQUIRE(plug(BunchCtx::identity(), atom("d")) == atom("d"));

  Bunch b = Bunch::mul2(Bunch::unit_mul(), Bunch::add2(atom("p"), atom("q")));
  auto [c2, sub] = context_at(b, {1, 1});
  REQUIRE(sub == atom("q"));
  REQUIRE(plug(c2, sub) == b);

  auto [c3, sub3] = context_at(b, {});
  REQUIRE(c3 == BunchCtx::identity());
  REQUIRE(sub3 == b);

  REQUIRE_THROWS_AS(context_at(b, {5}), PathError);
  REQUIRE_THROWS_AS(BunchCtx(atom("p")), PathError);
  REQUIRE_THROWS_AS(BunchCtx(Bunch::add2(Bunch::hole(), Bunch::hole())), PathError);
}

TEST_CASE("nest depth and hole depth") {
  Bunch b = Bunch::add2(atom("p"), atom("q"));
  REQUIRE(nest_depth(b, {}) == 0);
  REQUIRE(nest_depth(b, {1}) == 1);
  REQUIRE_THROWS_AS(nest_depth(b, {3}), PathError);

  REQUIRE(hole_depth(BunchCtx::identity()) == 0);
  REQUIRE(hole_depth(BunchCtx(Bunch::add2(atom("p"), Bunch::hole()))) == 1);

  // phi1 ; ((phi2 ; empty* ; (phi3 , phi4)) , (phi5 ; hole))  has hole depth 3
  Bunch inner_add = Bunch::add({atom("phi2"), Bunch::unit_mul(),
                                Bunch::mul2(atom("phi3"), atom("phi4"))});
  Bunch ctx_raw = Bunch::add2(
      atom("phi1"), Bunch::mul2(inner_add, Bunch::add2(atom("phi5"), Bunch::hole())));
  REQUIRE(hole_depth(BunchCtx(ctx_raw)) == 3);
}

TEST_CASE("extends worked examples") {
  REQUIRE(extends(parse_bunch("((p , q) ; u) , r"), parse_bunch("(p , q) , r")));
  REQUIRE(extends(parse_bunch("((p , q) ; u) , r"), parse_bunch("p , (q , r)")));
  REQUIRE(extends(parse_bunch("p ; q"), Bunch::unit_add()));
  REQUIRE(extends(atom("p"), Bunch::unit_add()));
  REQUIRE(!extends(atom("p"), atom("q")));
  REQUIRE(!extends(parse_bunch("p , q"), parse_bunch("p ; q")));
  REQUIRE(!extends(parse_bunch("p ; q"), parse_bunch("p , q")));
  REQUIRE(extends(parse_bunch("p ; q"), atom("p")));
  REQUIRE(!extends(parse_bunch("p , q"), atom("p")));
  // the multiplicative-unit trick: p == p , empty*, then weaken at the unit
  REQUIRE(extends(parse_bunch("p , (empty* ; q)"), atom("p")));
  // unit targets
  REQUIRE(extends(Bunch::unit_mul(), Bunch::unit_mul()));
  REQUIRE(extends(parse_bunch("empty* ; q"), Bunch::unit_mul()));
  REQUIRE(!extends(atom("p"), Bunch::unit_mul()));
  REQUIRE(!extends(parse_bunch("p , q"), Bunch::unit_mul()));
  // group target: a grouped pair of mul-children weakened as one
  REQUIRE(extends(parse_bunch("((p , q) ; u) , r"), parse_bunch("p , q , r")));
}

TEST_CASE("insertion steps agree with the literal definition") {
  // literal single step: replace any subterm S of any coherently-equivalent
  // binary representative by (S ; d), then canonicalize. One introduced unit
  // per representative is enough headroom: further units collapse to the
  // same canonical successors.
  std::vector<Bunch> hs = enumerate_canonical_bunches({"a", "b"}, 4);
  std::vector<Bunch> materials = {atom("a"), atom("b"), Bunch::unit_add(), Bunch::unit_mul(),
                                  Bunch::mul2(atom("a"), atom("b"))};
  for (const Bunch& h : hs) {
    CanonicalBunch ch = canonicalize(h);
    BunchSet reps = rewrite_closure(h, to_binary(h).size() + 2, 2000000);
    for (const Bunch& d : materials) {
      std::set<CanonicalBunch> mine;
      for (const InsertStep& s : insertion_steps(ch, d)) mine.insert(canonicalize(s.after));
      std::set<CanonicalBunch> lit;
      for (const Bunch& rep : reps) {
        for (const OccurrencePath& path : detail::all_paths(rep)) {
          const Bunch& sub = subbunch_at(rep, path);
          lit.insert(canonicalize(replace_at(rep, path, Bunch::add2(sub, d))));
        }
      }
      lit.erase(ch);  // the generator drops no-ops
      if (mine != lit) {
        CAPTURE(render(h), render(d));
        for (auto& m : mine)
          if (!lit.count(m)) FAIL_CHECK("extra: " << render(m.get()));
        for (auto& m : lit)
          if (!mine.count(m)) FAIL_CHECK("missing: " << render(m.get()));
      }
      REQUIRE(mine == lit);
    }
  }
}

TEST_CASE("extends agrees with the insertion closure on small instances") {
  std::vector<Bunch> gs = enumerate_canonical_bunches({"a", "b"}, 4);
  std::vector<Bunch> pool = enumerate_canonical_bunches({"a", "b"}, 3);
  for (const Bunch& g : gs) {
    auto closure = weakening_closure(g, pool, 6);
    for (const Bunch& h : enumerate_canonical_bunches({"a", "b"}, 6)) {
      bool in_closure = closure.count(canonicalize(h)) > 0;
      bool ext = extends(h, g);
      if (in_closure != ext) {
        CAPTURE(render(h), render(g), in_closure, ext);
        REQUIRE(in_closure == ext);
      }
    }
  }
}

TEST_CASE("weakening closure basics") {
  auto cl = weakening_closure(atom("p"), {atom("u")}, 3);
  REQUIRE(cl.count(canonicalize(atom("p"))) == 1);
  REQUIRE(cl.count(canonicalize(parse_bunch("p ; u"))) == 1);
  REQUIRE(cl.count(canonicalize(parse_bunch("p ; u ; u"))) == 0);  // size 4 > bound

  auto cl2 = weakening_closure(atom("p"), {}, 5);
  REQUIRE(cl2.size() == 1);

  // everything the pool can build extends empty+
  auto cl3 = weakening_closure(Bunch::unit_add(), {atom("a")}, 3);
  for (const CanonicalBunch& h : cl3) REQUIRE(extends(h.get(), Bunch::unit_add()));
  REQUIRE(cl3.count(canonicalize(atom("a"))) == 1);

  REQUIRE_THROWS_AS(weakening_closure(parse_bunch("p;q;r"), {}, 2), BudgetError);
}

TEST_CASE("extends is reflexive, transitive, compositional") {
  std::mt19937 rng(23);
  std::vector<Bunch> all = enumerate_canonical_bunches({"a", "b", "c"}, 5);
  for (int i = 0; i < 400; ++i) {
    const Bunch& g = all[rng() % all.size()];
    REQUIRE(extends(g, g));
  }
  std::vector<Bunch> pool = enumerate_canonical_bunches({"a", "b"}, 2);
  for (int i = 0; i < 200; ++i) {
    const Bunch& g = all[rng() % all.size()];
    auto s1 = insertion_steps(canonicalize(g), pool[rng() % pool.size()]);
    if (s1.empty()) continue;
    const Bunch& g1 = s1[rng() % s1.size()].after;
    auto s2 = insertion_steps(canonicalize(g1), pool[rng() % pool.size()]);
    if (s2.empty()) continue;
    const Bunch& g2 = s2[rng() % s2.size()].after;
    REQUIRE(extends(g1, g));
    REQUIRE(extends(g2, g1));
    REQUIRE(extends(g2, g));
  }
  // compositionality: T <= S implies P(T) <= P(S)
  for (int i = 0; i < 200; ++i) {
    const Bunch& t = all[rng() % all.size()];
    auto steps = insertion_steps(canonicalize(t), pool[rng() % pool.size()]);
    if (steps.empty()) continue;
    const Bunch& s = steps[rng() % steps.size()].after;
    const Bunch& host = all[rng() % all.size()];
    auto paths = detail::all_paths(host);
    OccurrencePath at = paths[rng() % paths.size()];
    BunchCtx ctx(replace_at(host, at, Bunch::hole()));
    REQUIRE(extends(plug(ctx, s), plug(ctx, t)));
  }
}

TEST_CASE("extension steps witness every extension") {
  std::mt19937 rng(31);
  std::vector<Bunch> all = enumerate_canonical_bunches({"a", "b"}, 4);
  std::vector<Bunch> pool = enumerate_canonical_bunches({"a", "b"}, 2);
  int found = 0;
  for (int i = 0; i < 60; ++i) {
    const Bunch& g = all[rng() % all.size()];
    CanonicalBunch cur = canonicalize(g);
    for (int k = 0; k < 2; ++k) {
      auto steps = insertion_steps(cur, pool[rng() % pool.size()]);
      if (steps.empty()) break;
      cur = canonicalize(steps[rng() % steps.size()].after);
    }
    auto chain = extension_steps(g, cur.get());
    ++found;
    Bunch state = canonicalize(g).get();
    for (const InsertStep& s : chain) {
      REQUIRE(s.before == state);
      state = canonicalize(s.after).get();
    }
    REQUIRE(state == cur.get());
  }
  REQUIRE(found >= 60);
  REQUIRE_THROWS_AS(extension_steps(parse_bunch("p ; q"), atom("p")), PathError);
}

TEST_CASE("contraction steps") {
  CanonicalBunch b = canonicalize(parse_bunch("p ; p ; q"));
  auto steps = contraction_steps(b);
  bool saw = false;
  for (const ContractStep& s : steps) {
    REQUIRE(coherently_equivalent(s.rep_before, s.before));
    REQUIRE(coherently_equivalent(s.rep_after, s.after));
    // the rep pair differs exactly by duplicating the group at q_path
    const Bunch& q = subbunch_at(s.rep_after, s.q_path);
    REQUIRE(replace_at(s.rep_after, s.q_path, Bunch::add2(q, q)) == s.rep_before);
    if (canonicalize(s.after) == canonicalize(parse_bunch("p ; q"))) saw = true;
  }
  REQUIRE(saw);

  auto steps2 = contraction_steps(canonicalize(parse_bunch("a ; a")));
  bool collapsed = false;
  for (const ContractStep& s : steps2)
    if (canonicalize(s.after).get() == atom("a")) collapsed = true;
  REQUIRE(collapsed);

  auto steps3 = contraction_steps(canonicalize(parse_bunch("a ; b ; a ; b")));
  bool grouped = false;
  for (const ContractStep& s : steps3)
    if (canonicalize(s.after) == canonicalize(parse_bunch("a ; b"))) grouped = true;
  REQUIRE(grouped);
}

TEST_CASE("canonical bunch enumeration is duplicate-free and canonical") {
  std::vector<Bunch> all = enumerate_canonical_bunches({"a", "b", "c"}, 5);
  std::set<CanonicalBunch> set;
  for (const Bunch& b : all) {
    REQUIRE(canonicalize(b).get() == b);
    REQUIRE(b.size() <= 5);
    REQUIRE(set.insert(canonicalize(b)).second);
  }
  REQUIRE(set.count(canonicalize(atom("a"))) == 1);
  REQUIRE(set.count(canonicalize(Bunch::unit_add())) == 1);
  REQUIRE(set.count(canonicalize(parse_bunch("a ; (b , c)"))) == 1);
}
