#include <catch_amalgamated.hpp>

#include "lcn/oracle.hpp"
#include "lcn/semantics.hpp"
#include "test_util.hpp"

using namespace lcn;

TEST_CASE("connectives follow the min/max/involutive tables") {
  for (int n = 1; n <= 8; ++n)
    for (int a = 0; a <= n; ++a)
      for (int b = 0; b <= n; ++b) {
        Degree da{a, n}, db{b, n};
        CHECK(tnorm(da, db).num == std::min(a, b));
        CHECK(snorm(da, db).num == std::max(a, b));
        CHECK(negate(da).num == n - a);
        CHECK(implies(da, db).num == (a <= b ? n : b));
        // involution and De Morgan over the finite space
        CHECK(negate(negate(da)) == da);
        CHECK(negate(tnorm(da, db)) == snorm(negate(da), negate(db)));
        CHECK(negate(snorm(da, db)) == tnorm(negate(da), negate(db)));
      }
}

TEST_CASE("implication example at n=4") {
  // value of h -> has_tail with h = 4/4 and has_tail = 3/4
  CHECK(implies(Degree{4, 4}, Degree{3, 4}) == Degree{3, 4});
  CHECK(impl_num(4, 3, 4) == 3);
  CHECK(impl_num(2, 3, 4) == 4);
}

TEST_CASE("eval_concept is structural") {
  KnowledgeBase kb = testutil::horse_kb();
  Assignment elem = {4, 3, 4, 0, 1};  // horse, has_tail, tall, has_stripes, small
  Concept horse = ConceptExpr::make_name("horse");
  Concept tail = ConceptExpr::make_name("has_tail");
  Concept small = ConceptExpr::make_name("small");
  CHECK(eval_concept(kb, elem, ConceptExpr::top()) == 4);
  CHECK(eval_concept(kb, elem, ConceptExpr::bot()) == 0);
  CHECK(eval_concept(kb, elem, ConceptExpr::make_and(horse, tail)) == 3);
  CHECK(eval_concept(kb, elem, ConceptExpr::make_or(small, tail)) == 3);
  CHECK(eval_concept(kb, elem, ConceptExpr::make_neg(small)) == 3);
  CHECK(eval_concept(kb, elem, ConceptExpr::make_impl(horse, tail)) == 3);
  CHECK(eval_concept(kb, elem, ConceptExpr::make_impl(small, tail)) == 4);
}

TEST_CASE("weight_of sums body degrees in [0,1]") {
  KnowledgeBase kb = testutil::horse_kb();
  // has_tail = 1, tall = 1, has_stripes = 0: 50 + 40 - 0 = 90
  Assignment elem = {4, 4, 4, 0, 0};
  CHECK(weight_of(kb, elem, "horse") == Rational(90));
  // has_tail = 1/2, tall = 1: 25 + 40 = 65
  elem = {4, 2, 4, 0, 0};
  CHECK(weight_of(kb, elem, "horse") == Rational(65));
  // non-distinguished subject has the empty sum
  CHECK(weight_of(kb, elem, "tall") == Rational(0));

  // independent recomputation in numerator units: n * weight
  Rational scaled = 0;
  for (std::size_t i : kb.wtis_for("horse"))
    scaled += kb.dbox[i].weight * eval_concept(kb, elem, kb.dbox[i].body);
  CHECK(scaled == weight_of(kb, elem, "horse") * kb.n);
}

TEST_CASE("element coherence ties distinguished degrees to phi") {
  KnowledgeBase kb = testutil::horse_kb();
  // weight 90 > 60 so horse must sit at 4/4
  CHECK(element_coherent(kb, {4, 4, 4, 0, 0}));
  CHECK_FALSE(element_coherent(kb, {2, 4, 4, 0, 0}));
  // weight 65 also forces 4/4
  CHECK(element_coherent(kb, {4, 2, 4, 0, 0}));
  // weight 50*1 - 50*1 + 40*1 = 40 -> phi = 2/4
  CHECK(element_coherent(kb, {2, 4, 4, 4, 0}));
  std::vector<std::string> why;
  CHECK_FALSE(element_coherent(kb, {3, 4, 4, 4, 0}, &why));
  REQUIRE(why.size() == 1);
  CHECK(why[0].find("horse") != std::string::npos);
}

TEST_CASE("element coherence agrees with full enumeration on the horse kb") {
  KnowledgeBase kb = testutil::horse_kb();
  // reference: recompute the coherence condition from first principles for
  // every one of the 5^5 assignments
  std::uint64_t total = 0, coherent = 0;
  Assignment elem(5, 0);
  for (std::uint64_t code = 0; code < 3125; ++code) {
    std::uint64_t rest = code;
    for (int i = 0; i < 5; ++i) {
      elem[i] = static_cast<int>(rest % 5);
      rest /= 5;
    }
    Rational w = Rational(50) * Rational(elem[1], 4) + Rational(40) * Rational(elem[2], 4) -
                 Rational(50) * Rational(elem[3], 4);
    int expected;
    if (w <= 0)
      expected = 0;
    else if (w <= 20)
      expected = 1;
    else if (w <= 40)
      expected = 2;
    else if (w <= 60)
      expected = 3;
    else
      expected = 4;
    bool ref = elem[0] == expected;
    CHECK(element_coherent(kb, elem) == ref);
    ++total;
    if (ref) ++coherent;
  }
  CHECK(total == 3125);
  CHECK(coherent == 625);  // horse determined by the other four degrees
}

TEST_CASE("crisp and exactly-one side conditions") {
  KnowledgeBase kb = testutil::horse_kb();
  kb.crisp.insert("small");
  kb.exactly_one.push_back({"size", {"tall", "small"}});
  kb.finalize();
  CHECK(element_coherent(kb, {4, 4, 4, 0, 0}));         // tall at 1, small at 0
  CHECK_FALSE(element_coherent(kb, {4, 4, 2, 0, 1}));   // small non-crisp
  CHECK_FALSE(element_coherent(kb, {4, 4, 2, 0, 0}));   // nobody at 1
  CHECK_FALSE(element_coherent(kb, {2, 4, 4, 4, 4}));   // both at 1
}

TEST_CASE("axiom evaluation at a single element") {
  KnowledgeBase kb = testutil::horse_kb();
  const Inclusion& disjoint = kb.tbox[0];
  // tall = 1, small = 1/4: implies(1/4, 0) = 0 < 1
  CHECK_FALSE(inclusion_holds_at(kb, {0, 0, 4, 0, 1}, disjoint));
  CHECK(inclusion_holds_at(kb, {0, 0, 4, 0, 0}, disjoint));
  CHECK_FALSE(universal_inclusions_hold(kb, {0, 0, 4, 0, 1}));

  Assertion as{ConceptExpr::make_name("horse"), "anonymous", Cmp::GE, Rational(1, 2)};
  CHECK(assertion_holds_at(kb, {2, 0, 0, 0, 0}, as));
  CHECK_FALSE(assertion_holds_at(kb, {1, 0, 0, 0, 0}, as));
}

TEST_CASE("query implication value uses the typicality degree") {
  KnowledgeBase kb = testutil::horse_kb();
  Query q = testutil::horse_query(Cmp::GE, Rational(1, 2));
  const Degree typical{4, 4};
  // typical element: value is the implication at its own degree
  CHECK(query_impl_value(kb, {4, 2, 4, 0, 0}, typical, q) == Degree{2, 4});
  CHECK(query_impl_value(kb, {4, 4, 4, 0, 0}, typical, q) == Degree{4, 4});
  // below the maximum: typicality degree 0, vacuously 1
  CHECK(query_impl_value(kb, {2, 4, 4, 4, 0}, typical, q) == Degree{4, 4});
}

TEST_CASE("valuation-level wrappers") {
  KnowledgeBase kb = testutil::horse_kb();
  Valuation val;
  val.by_individual["anonymous"] = {4, 4, 4, 0, 0};
  CHECK(eval_concept(kb, val, "anonymous", ConceptExpr::make_name("horse")) == Degree{4, 4});
  CHECK(weight_of(kb, val, "anonymous", "horse") == Rational(90));
  CHECK(is_coherent(kb, val));
  val.by_individual["pippo"] = {3, 4, 4, 0, 0};
  std::vector<std::string> why;
  CHECK_FALSE(is_coherent(kb, val, &why));
  REQUIRE(why.size() == 1);
  CHECK(why[0].find("pippo") != std::string::npos);
  CHECK_THROWS_AS(eval_concept(kb, val, "nobody", ConceptExpr::top()), kb_error);
}
