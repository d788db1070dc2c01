#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "bi/parse.hpp"
#include "bi/render.hpp"

using namespace bi;

TEST_CASE("formula parsing follows the declared precedence") {
  // weakest: -* and -> (right-assoc); then \/; then /\ and * (left-assoc)
  Formula f = parse_formula("p * (q -* r)");
  REQUIRE(f == Formula::star(Formula::atom("p"),
                             Formula::wand(Formula::atom("q"), Formula::atom("r"))));

  REQUIRE(parse_formula("a /\\ c") ==
          Formula::land(Formula::atom("a"), Formula::atom("c")));

  REQUIRE(parse_formula("p * q * r") ==
          Formula::star(Formula::star(Formula::atom("p"), Formula::atom("q")),
                        Formula::atom("r")));

  REQUIRE(parse_formula("p -> q -> r") ==
          Formula::imp(Formula::atom("p"),
                       Formula::imp(Formula::atom("q"), Formula::atom("r"))));

  REQUIRE(parse_formula("p /\\ q * r") ==
          Formula::star(Formula::land(Formula::atom("p"), Formula::atom("q")),
                        Formula::atom("r")));

  REQUIRE(parse_formula("T") == Formula::top());
  REQUIRE(parse_formula("Tm") == Formula::mtop());
  REQUIRE(parse_formula("F") == Formula::bot());
}

TEST_CASE("bunch parsing") {
  Bunch b = parse_bunch("empty* , (p ; q)");
  REQUIRE(b == Bunch::mul2(Bunch::unit_mul(),
                           Bunch::add2(Bunch::atom_leaf("p"), Bunch::atom_leaf("q"))));

  Bunch c = parse_bunch("(p , q) ; u");
  REQUIRE(c == Bunch::add2(Bunch::mul2(Bunch::atom_leaf("p"), Bunch::atom_leaf("q")),
                           Bunch::atom_leaf("u")));

  REQUIRE(parse_bunch("empty+") == Bunch::unit_add());

  // n-ary nodes keep written order
  Bunch d = parse_bunch("p , q , r");
  REQUIRE(d.kind() == BunchKind::Mul);
  REQUIRE(d.children().size() == 3);

  // formulas as bunch leaves
  Bunch e = parse_bunch("p /\\ q ; r");
  REQUIRE(e == Bunch::add2(Bunch::leaf(Formula::land(Formula::atom("p"), Formula::atom("q"))),
                           Bunch::atom_leaf("r")));

  // parenthesized formula leaf followed by a connective
  Bunch g = parse_bunch("(p /\\ q) -* r , s");
  REQUIRE(g.kind() == BunchKind::Mul);
  REQUIRE(g.children()[0].payload().kind() == FormulaKind::Wand);

  // hole leaf
  Bunch h = parse_bunch("p ; _");
  REQUIRE(h.children()[1].is_hole());
}

TEST_CASE("mixed context-formers are rejected") {
  REQUIRE_THROWS_AS(parse_bunch("p , q ; r"), MixedContextError);
  REQUIRE_THROWS_AS(parse_bunch("p ; q , r"), MixedContextError);
  REQUIRE_NOTHROW(parse_bunch("(p , q) ; r"));
}

TEST_CASE("syntax errors carry position and expectations") {
  try {
    parse_formula("p * ");
    FAIL("expected SyntaxError");
  } catch (const SyntaxError& e) {
    REQUIRE(e.offset() == 4);
    REQUIRE(!e.expected().empty());
  }
  REQUIRE_THROWS_AS(parse_formula("p @ q"), SyntaxError);
  REQUIRE_THROWS_AS(parse_formula(""), SyntaxError);
  REQUIRE_THROWS_AS(parse_formula("p q"), SyntaxError);
  REQUIRE_THROWS_AS(parse_bunch("p , , q"), SyntaxError);
  REQUIRE_THROWS_AS(parse_sequent("p |- "), SyntaxError);
  REQUIRE_THROWS_AS(parse_formula("empty+"), SyntaxError);
  REQUIRE_THROWS_AS(parse_formula("9p"), SyntaxError);
}

TEST_CASE("sequent parsing") {
  Sequent s = parse_sequent("p , q |- p * q");
  REQUIRE(s.antecedent == Bunch::mul2(Bunch::atom_leaf("p"), Bunch::atom_leaf("q")));
  REQUIRE(s.succedent == Formula::star(Formula::atom("p"), Formula::atom("q")));
  REQUIRE(s.is_atomic() == false);
  REQUIRE(parse_sequent("m ; (p , p) |- c").is_atomic());
}

TEST_CASE("render round trips the worked strings") {
  REQUIRE(render(parse_bunch("(p,q);u")) == "(p , q) ; u");
  REQUIRE(render(Formula::land(Formula::atom("a"), Formula::atom("c"))) == "a /\\ c");
  Formula w = Formula::wand(Formula::atom("p"),
                            Formula::star(Formula::atom("q"), Formula::atom("r")));
  REQUIRE(render(w) == "p -* q * r");
  REQUIRE(parse_formula(render(w)) == w);
}

namespace {

Formula random_formula(std::mt19937& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 3 : 8);
  static const char* names[] = {"p", "q", "r", "s_1", "tok"};
  switch (pick(rng)) {
    case 0: case 1: return Formula::atom(names[rng() % 5]);
    case 2: return Formula::top();
    case 3: return rng() % 2 ? Formula::bot() : Formula::mtop();
    default: {
      FormulaKind ks[] = {FormulaKind::And, FormulaKind::Or, FormulaKind::Imp,
                          FormulaKind::Star, FormulaKind::Wand};
      return Formula::make(ks[rng() % 5], random_formula(rng, depth - 1),
                           random_formula(rng, depth - 1));
    }
  }
}

Bunch random_bunch(std::mt19937& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 2 : 6);
  switch (pick(rng)) {
    case 0: return Bunch::leaf(random_formula(rng, 2));
    case 1: return Bunch::unit_add();
    case 2: return Bunch::unit_mul();
    default: {
      std::size_t n = 2 + rng() % 3;
      std::vector<Bunch> cs;
      for (std::size_t i = 0; i < n; ++i) cs.push_back(random_bunch(rng, depth - 1));
      return Bunch::node(rng() % 2 ? BunchKind::Add : BunchKind::Mul, std::move(cs));
    }
  }
}

}  // namespace

TEST_CASE("parse/render round trip on random terms") {
  std::mt19937 rng(20240811);
  for (int i = 0; i < 500; ++i) {
    Formula f = random_formula(rng, 8);
    REQUIRE(parse_formula(render(f)) == f);
  }
  for (int i = 0; i < 500; ++i) {
    Bunch b = random_bunch(rng, 8);
    REQUIRE(parse_bunch(render(b)) == b);
  }
}

TEST_CASE("parsing is deterministic") {
  const char* inputs[] = {"p * (q -* r)", "(p , q) ; u", "p /\\ q \\/ r -> s"};
  for (const char* in : inputs) {
    REQUIRE(parse_formula("p * (q -* r)") == parse_formula("p * (q -* r)"));
    (void)in;
  }
  REQUIRE(render(parse_bunch("empty*,(p;q)")) == render(parse_bunch("  empty* , ( p ; q ) ")));
}
